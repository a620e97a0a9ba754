#include "gclus/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gclus/oracle.hpp"

namespace gclus {

namespace {

struct Dsu {
	std::vector<int> parent;
	explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
	int find(int x) {
		while (parent[x] != x)
			x = parent[x] = parent[parent[x]];
		return x;
	}
	bool unite(int a, int b) {
		a = find(a), b = find(b);
		if (a == b)
			return false;
		if (a > b)
			std::swap(a, b);
		parent[b] = a;
		return true;
	}
};

} // namespace

std::vector<int> coarse_solution(const Graph &g, int k) {
	const int n = g.n();
	if (k < 1 || k > n)
		throw InvalidK("k must lie in [1, n]");
	const auto &edges = g.edges();
	std::vector<int> order(edges.size());
	std::iota(order.begin(), order.end(), 0);
	std::stable_sort(order.begin(), order.end(),
	                 [&](int a, int b) { return edges[a].w < edges[b].w; });
	Dsu dsu(n);
	int comps = n;
	for (int id : order) {
		if (comps == k)
			break;
		if (dsu.unite(edges[id].u, edges[id].v))
			--comps;
	}
	// Union keeps the smaller id as root, so roots are component minima.
	std::vector<int> out;
	for (int v = 0; v < n; ++v)
		if (dsu.find(v) == v)
			out.push_back(v);
	return out;
}

double aspect_bound(int n, double z, double eps) {
	return 32 * z * z / (eps * eps) * std::pow(static_cast<double>(n), z + 5);
}

Normalized normalize_weights(const Graph &g, int k, double z, double eps, double alpha) {
	if (!(eps > 0 && eps < 1))
		throw InvalidEpsilon("normalization needs 0 < epsilon < 1");
	const double n = g.n();
	Normalized out;
	out.alpha = std::clamp(alpha, 1.0, std::pow(n, z + 1));
	out.cost_init = exact_cost(g, coarse_solution(g, k), z);
	if (out.cost_init == 0) {
		out.graph = g;
		return out;
	}
	out.w_min = std::pow(1 / ((1 + 3 * z / eps) * n * n), 1 + 1 / z) *
	            std::pow(out.cost_init, 1 / z);
	out.w_max = std::pow(std::exp2(eps) * out.alpha * out.cost_init, 1 / z);
	std::vector<double> w;
	w.reserve(g.edges().size());
	for (const Edge &e : g.edges())
		w.push_back(std::min(std::max(e.w, out.w_min), out.w_max));
	const double lo = *std::min_element(w.begin(), w.end());
	for (double &x : w)
		x /= lo;
	out.scale = 1 / lo;
	out.graph = reweight(g, w);
	out.applied = true;
	return out;
}

} // namespace gclus
