#include "gclus/graph.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

namespace gclus {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_connected(const Graph &g) {
	std::vector<char> seen(g.n(), 0);
	std::vector<int> stack{0};
	seen[0] = 1;
	int count = 1;
	while (!stack.empty()) {
		int v = stack.back();
		stack.pop_back();
		for (const Arc &a : g.neighbors(v)) {
			if (!seen[a.to]) {
				seen[a.to] = 1;
				++count;
				stack.push_back(a.to);
			}
		}
	}
	if (count != g.n())
		throw DisconnectedGraph("graph has " + std::to_string(g.n() - count) +
		                        " vertices unreachable from vertex 0");
}

} // namespace

Graph load_graph(int n, const std::vector<Edge> &edges) {
	if (n < 2)
		throw SingletonGraph("graph needs at least two vertices");
	for (const Edge &e : edges) {
		if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
			throw VertexOutOfRange("edge (" + std::to_string(e.u) + ", " +
			                       std::to_string(e.v) + ") out of range");
		if (e.u == e.v)
			throw SelfLoop("self-loop at vertex " + std::to_string(e.u));
		if (!(e.w >= 0) || !std::isfinite(e.w))
			throw NegativeWeight("bad weight on edge (" + std::to_string(e.u) +
			                     ", " + std::to_string(e.v) + ")");
	}

	Graph g;
	g.n_ = n;
	g.edges_ = edges;
	g.off_.assign(n + 1, 0);
	for (const Edge &e : edges) {
		++g.off_[e.u + 1];
		++g.off_[e.v + 1];
	}
	for (int v = 0; v < n; ++v)
		g.off_[v + 1] += g.off_[v];
	g.arcs_.resize(2 * edges.size());
	std::vector<int> pos(g.off_.begin(), g.off_.end() - 1);
	for (const Edge &e : edges) {
		g.arcs_[pos[e.u]++] = {e.v, e.w};
		g.arcs_[pos[e.v]++] = {e.u, e.w};
	}
	g.wmin_ = kInf;
	g.wmax_ = 0;
	for (const Edge &e : edges) {
		g.wmin_ = std::min(g.wmin_, e.w);
		g.wmax_ = std::max(g.wmax_, e.w);
	}
	check_connected(g);
	return g;
}

Graph reweight(const Graph &g, const std::vector<double> &weights) {
	std::vector<Edge> edges = g.edges();
	for (size_t i = 0; i < edges.size(); ++i)
		edges[i].w = weights.at(i);
	return load_graph(g.n(), edges);
}

Graph read_edge_list(std::istream &in) {
	long long n = 0, m = 0;
	if (!(in >> n >> m) || n < 0 || m < 0)
		throw ParseError("expected header \"n m\"");
	std::vector<Edge> edges;
	edges.reserve(static_cast<size_t>(m));
	for (long long i = 0; i < m; ++i) {
		long long u, v;
		double w;
		if (!(in >> u >> v >> w))
			throw ParseError("edge line " + std::to_string(i + 1) + " malformed");
		if (u < 0 || v < 0 || u >= n || v >= n)
			throw VertexOutOfRange("edge line " + std::to_string(i + 1) +
			                       " has a vertex outside [0, n)");
		edges.push_back({static_cast<int>(u), static_cast<int>(v), w});
	}
	return load_graph(static_cast<int>(n), edges);
}

Graph read_edge_list_file(const std::string &path) {
	std::ifstream in(path);
	if (!in)
		throw ParseError("cannot open " + path);
	return read_edge_list(in);
}

void write_edge_list(std::ostream &out, const Graph &g) {
	std::ostringstream buf;
	buf.precision(17);
	buf << g.n() << ' ' << g.m() << '\n';
	for (const Edge &e : g.edges())
		buf << e.u << ' ' << e.v << ' ' << e.w << '\n';
	out << buf.str();
}

DistArray multi_source_dijkstra(const Graph &g, const std::vector<Source> &sources) {
	if (sources.empty())
		throw EmptySources("multi-source Dijkstra needs at least one source");
	const int n = g.n();
	DistArray out{std::vector<double>(n, kInf), std::vector<int>(n, kNone)};
	using Item = std::tuple<double, int, int>; // (dist, label, vertex)
	std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
	auto better = [&](double d, int lab, int v) {
		return d < out.dist[v] || (d == out.dist[v] && lab < out.label[v]);
	};
	for (const Source &s : sources) {
		if (s.v < 0 || s.v >= n)
			throw VertexOutOfRange("source out of range");
		if (better(s.offset, s.v, s.v)) {
			out.dist[s.v] = s.offset;
			out.label[s.v] = s.v;
			pq.emplace(s.offset, s.v, s.v);
		}
	}
	while (!pq.empty()) {
		auto [d, lab, v] = pq.top();
		pq.pop();
		if (d != out.dist[v] || lab != out.label[v])
			continue;
		for (const Arc &a : g.neighbors(v)) {
			double nd = d + a.w;
			if (better(nd, lab, a.to)) {
				out.dist[a.to] = nd;
				out.label[a.to] = lab;
				pq.emplace(nd, lab, a.to);
			}
		}
	}
	return out;
}

std::vector<double> dijkstra(const Graph &g, int s) {
	return multi_source_dijkstra(g, {{s, 0.0}}).dist;
}

} // namespace gclus
