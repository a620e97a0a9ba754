#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gclus/cluster_state.hpp"
#include "gclus/graph.hpp"

namespace gclus {

// Sum over v of dist(v, C)^z.
double exact_cost(const Graph &g, const std::vector<int> &centers, double z);

struct OptResult {
	std::vector<int> centers;
	double cost = 0;
};

// Exhaustive optimum over all k-subsets, ties to the lexicographically
// smallest set. Throws InstanceTooLarge when binom(n, k) exceeds the cap.
OptResult brute_force_opt(const Graph &g, int k, double z, double cap = 1e6);

// Sum of the (p, q)-swap distoid raised to z. `assign` and `dist` are the
// maintained clustering arrays c[.] and d[.].
double swap_distoid_cost(const Graph &g, const std::vector<int> &centers,
                         const std::vector<int> &assign, const std::vector<double> &dist,
                         int p, int q, double z, double eps);
double swap_distoid_cost(const ClusterState &s, int p, int q);

struct SuperEffective {
	bool yes = false;
	int witness = kNone;
};
SuperEffective is_super_effective_noncenter(const ClusterState &s, int p);

struct Violation {
	std::string rule;
	std::string detail;
};

struct ConsistencyReport {
	std::vector<Violation> violations;
	bool ok() const { return violations.empty(); }
	bool mentions(const std::string &rule) const;
	std::string summary(size_t max_lines = 10) const;
};

// Recomputes everything the state maintains from scratch and compares.
// `tol` is the relative tolerance on real-valued identities.
ConsistencyReport check_state_consistency(const Graph &g, const ClusterState &s,
                                          double tol = 1e-9);

struct Potential {
	double phi = 0;
	double phi_max = 0;
};
Potential potential(const ClusterState &s);

} // namespace gclus
