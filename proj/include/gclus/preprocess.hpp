#pragma once

#include <vector>

#include "gclus/graph.hpp"

namespace gclus {

// Kruskal until k components remain; the smallest id of each component.
std::vector<int> coarse_solution(const Graph &g, int k);

struct Normalized {
	Graph graph;
	double cost_init = 0;
	double alpha = 1;  // after clipping to [1, n^(z+1)]
	double w_min = 0;  // before the final rescale
	double w_max = 0;
	double scale = 1;  // new weight = clamped weight * scale
	bool applied = false;
};

// Clamps weights into [w_min, w_max] derived from the coarse solution cost
// for this k, then rescales so the smallest weight is 1. When the coarse
// solution already costs 0 nothing is changed and `applied` is false.
Normalized normalize_weights(const Graph &g, int k, double z, double eps, double alpha);

// Bound on max/min weight after normalization.
double aspect_bound(int n, double z, double eps);

} // namespace gclus
