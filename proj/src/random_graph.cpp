#include "gclus/random_graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace gclus {

Graph random_connected_graph(int n, double density, int wlo, int whi, std::mt19937_64 &rng) {
	std::uniform_int_distribution<int> wdist(wlo, whi);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	std::vector<int> perm(n);
	std::iota(perm.begin(), perm.end(), 0);
	std::shuffle(perm.begin(), perm.end(), rng);
	std::vector<Edge> edges;
	std::set<std::pair<int, int>> used;
	for (int i = 1; i < n; ++i) {
		const int j = std::uniform_int_distribution<int>(0, i - 1)(rng);
		int a = perm[i], b = perm[j];
		if (a > b)
			std::swap(a, b);
		used.insert({a, b});
		edges.push_back({a, b, static_cast<double>(wdist(rng))});
	}
	for (int a = 0; a < n; ++a)
		for (int b = a + 1; b < n; ++b)
			if (!used.count({a, b}) && unit(rng) < density)
				edges.push_back({a, b, static_cast<double>(wdist(rng))});
	return load_graph(n, edges);
}

} // namespace gclus
