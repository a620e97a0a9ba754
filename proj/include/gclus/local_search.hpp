#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gclus/cluster_state.hpp"
#include "gclus/graph.hpp"
#include "gclus/preprocess.hpp"

namespace gclus {

enum class Scheduler { RoundRobin, Sequential };

Scheduler parse_scheduler(const std::string &s);
const char *scheduler_name(Scheduler s);

struct SwapCandidate {
	int c_ins = kNone;
	int c_del = kNone;
	double predicted_ratio = 0;   // (D'.cost + D'.loss[c_del]) / D.cost
	double predicted_volume = 0;  // D'.volume[c_del]
};

// Probes c_ins on `probe` and always leaves it bit-identical to its entry
// state. base_cost is the objective estimator before the insertion.
std::optional<SwapCandidate> test_effectiveness(double base_cost, ClusterState &probe, int c_ins);

// Resumable form of test_effectiveness; one step is one entry modification
// or one group test.
class EffectivenessProbe {
public:
	EffectivenessProbe(double base_cost, ClusterState &probe, int c_ins);
	~EffectivenessProbe();
	EffectivenessProbe(const EffectivenessProbe &) = delete;
	EffectivenessProbe &operator=(const EffectivenessProbe &) = delete;

	// Advances one step; returns false once finished.
	bool step();
	bool finished() const { return finished_; }
	const std::optional<SwapCandidate> &result() const { return result_; }
	int64_t steps() const { return steps_; }
	// Rolls back early if still running.
	void abort();

private:
	void finish(std::optional<SwapCandidate> r);

	double base_cost_;
	ClusterState *probe_;
	int c_ins_;
	ClusterState::Token token_;
	std::optional<ClusterState::InsertCursor> cursor_;
	int tau_ = 0;
	bool finished_ = false;
	std::optional<SwapCandidate> result_;
	int64_t steps_ = 0;
};

int64_t compute_s(double eps, double z, int n, int64_t m, int cover_size, double c0);
double alpha_z(double z, double eps);
int64_t iteration_bound(double z, double eps, int n, int64_t m, int cover_size);
double volume_bound(double z, double eps, int n);

struct SwapRecord {
	int c_ins;
	int c_del;
	double cost_before;
	double cost_after;
	double volume;          // D'.volume[c_del] after the insertion
	double predicted_ratio;
};

struct RunStats {
	int64_t positive_iterations = 0;
	double volume_sum = 0;
	std::vector<double> cost_trajectory;
	std::vector<SwapRecord> swaps;
	int64_t draws = 0;
	int64_t candidates_tested = 0;
	int64_t probe_steps = 0;
	int64_t insert_modifications = 0;
	int64_t delete_modifications = 0;
	double potential_initial = 0;
	double potential_final = 0;
	double potential_max = 0;
	double wall_seconds = 0;
	int64_t s = 0;
	int64_t max_iters = 0;
	int64_t replicas = 0;
	int64_t effective_violations = 0;
	int64_t replica_mismatches = 0;
	int64_t audit_failures = 0;
	std::string first_audit_failure;
};

struct Solution {
	std::vector<int> centers;
	std::vector<int> assignment;
	double estimated_cost = 0;
	double exact_cost = 0;
};

struct SearchOptions {
	Scheduler scheduler = Scheduler::RoundRobin;
	int64_t s = 0;          // 0 selects compute_s(..., c0)
	double c0 = 2.0;
	int64_t max_iters = 0;  // 0 selects iteration_bound
	uint64_t seed = 0;
	bool audit = false;          // consistency check after every committed op
	bool check_replicas = false; // deep-compare replicas at iteration boundaries
};

// Local search on a graph whose minimum weight is at least 1.
std::pair<Solution, RunStats> run_local_search(const Graph &g, int k, const StateParams &params,
                                               const SearchOptions &opt);

struct ClusterOptions {
	double z = 1.0;
	double eps = 0.05;
	int beta = 0;
	bool normalize = true;
	SearchOptions search;
};

struct ClusterResult {
	Solution solution;   // exact_cost measured on the input graph
	RunStats stats;
	StateParams params;
	Normalized norm;
	double alpha_target = 0;
	int64_t iteration_bound = 0;
	double volume_bound = 0;
	bool early_exit = false; // coarse solution already had cost 0
};

// Full pipeline: normalization (optional), local search, exact cost on g.
ClusterResult cluster_graph(const Graph &g, int k, const ClusterOptions &opt);

} // namespace gclus
