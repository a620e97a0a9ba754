#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gclus/errors.hpp"

namespace gclus {

inline constexpr int kNone = -1;

struct Edge {
	int u;
	int v;
	double w;
};

struct Arc {
	int to;
	double w;
};

// Undirected weighted graph in CSR form. Every edge is stored in both
// directions; m() counts undirected edges.
class Graph {
public:
	Graph() = default;

	int n() const { return n_; }
	int64_t m() const { return static_cast<int64_t>(edges_.size()); }
	int deg(int v) const { return off_[v + 1] - off_[v]; }

	std::span<const Arc> neighbors(int v) const {
		return {arcs_.data() + off_[v], static_cast<size_t>(deg(v))};
	}

	const std::vector<Edge> &edges() const { return edges_; }
	double min_weight() const { return wmin_; }
	double max_weight() const { return wmax_; }

	friend Graph load_graph(int n, const std::vector<Edge> &edges);

private:
	int n_ = 0;
	std::vector<int> off_;
	std::vector<Arc> arcs_;
	std::vector<Edge> edges_;
	double wmin_ = 0;
	double wmax_ = 0;
};

// Validates and builds a graph. Throws SingletonGraph, VertexOutOfRange,
// SelfLoop, NegativeWeight or DisconnectedGraph.
Graph load_graph(int n, const std::vector<Edge> &edges);

// Same graph with new weights, one per edge in edges() order.
Graph reweight(const Graph &g, const std::vector<double> &weights);

Graph read_edge_list(std::istream &in);
Graph read_edge_list_file(const std::string &path);
void write_edge_list(std::ostream &out, const Graph &g);

struct DistArray {
	std::vector<double> dist;
	std::vector<int> label;
};

struct Source {
	int v;
	double offset;
};

// dist[v] = min over sources of offset + dist(s, v). Ties on distance go to
// the smaller source id.
DistArray multi_source_dijkstra(const Graph &g, const std::vector<Source> &sources);

// Single source convenience.
std::vector<double> dijkstra(const Graph &g, int s);

inline double powz(double x, double z) {
	if (z == 1.0)
		return x;
	if (z == 2.0)
		return x * x;
	return std::pow(x, z);
}

} // namespace gclus
