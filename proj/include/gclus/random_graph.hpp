#pragma once

#include <random>

#include "gclus/graph.hpp"

namespace gclus {

// Random spanning tree plus each remaining pair independently with
// probability `density`; integer weights uniform in [wlo, whi].
Graph random_connected_graph(int n, double density, int wlo, int whi, std::mt19937_64 &rng);

} // namespace gclus
