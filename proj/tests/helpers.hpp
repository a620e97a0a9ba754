#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "gclus/graph.hpp"
#include "gclus/random_graph.hpp"

namespace testutil {

inline gclus::Graph k3(double w = 1) {
	return gclus::load_graph(3, {{0, 1, w}, {1, 2, w}, {0, 2, w}});
}

inline gclus::Graph path(const std::vector<double> &w) {
	std::vector<gclus::Edge> e;
	for (size_t i = 0; i < w.size(); ++i)
		e.push_back({static_cast<int>(i), static_cast<int>(i + 1), w[i]});
	return gclus::load_graph(static_cast<int>(w.size()) + 1, e);
}

inline gclus::Graph random_graph(int n, std::mt19937_64 &rng, double density = 0.15,
                                 int wlo = 1, int whi = 10) {
	return gclus::random_connected_graph(n, density, wlo, whi, rng);
}

} // namespace testutil

#include <memory>

#include "gclus/cluster_state.hpp"
#include "gclus/cover.hpp"

namespace testutil {

// Owns graph and cover so the state's references stay valid.
struct Fixture {
	gclus::Graph g;
	gclus::IsolationCover cover;
	gclus::StateParams params;
	std::unique_ptr<gclus::ClusterState> s;

	Fixture(gclus::Graph graph, const std::vector<int> &centers, double z = 1,
	        double eps = 0.05, int beta = 0)
	    : g(std::move(graph)), cover(g.n()),
	      params(gclus::make_params(g, cover, z, eps, beta)),
	      s(std::make_unique<gclus::ClusterState>(g, cover, params, centers)) {}

	gclus::ClusterState &state() { return *s; }
};

inline std::vector<int> random_centers(int n, int k, std::mt19937_64 &rng) {
	std::vector<int> all(n);
	for (int i = 0; i < n; ++i)
		all[i] = i;
	std::shuffle(all.begin(), all.end(), rng);
	all.resize(k);
	std::sort(all.begin(), all.end());
	return all;
}

} // namespace testutil
