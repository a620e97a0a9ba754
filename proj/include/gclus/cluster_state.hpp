#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "gclus/cover.hpp"
#include "gclus/graph.hpp"

namespace gclus {

struct StateParams {
	double z = 1.0;
	double eps = 0.05;
	int beta = 1;
	double wbar = 1.0;   // max edge weight
	double dbar = 1.0;   // 2^eps * beta * wbar
	double relax = 1.0;  // 2^(eps / beta)
	int cover_size = 0;  // |J|
	int64_t vol_total = 0; // 2m|J|
	int t = 1;           // number of volume groups
};

// beta <= 0 selects n - 1. Requires z >= 1, 0 <= eps <= 1/(10z) and a
// minimum edge weight of at least 1.
StateParams make_params(const Graph &g, const IsolationCover &cover, double z,
                        double eps, int beta = 0);

// Per-operation instrumentation, filled only when tracing is on.
struct OpTrace {
	int64_t modifications = 0;
	// delete: per cover index (in membership order) the vertices whose
	// entries were read or written, and U_J plus its boundary.
	std::vector<int> indices;
	std::vector<std::vector<int>> touched;
	std::vector<std::vector<int>> region;
	// insert: potential drop of every entry modification and whether the
	// overwritten entry carried no center.
	std::vector<double> drops;
	std::vector<char> from_empty;
};

class ClusterState {
public:
	using Token = uint64_t;

	ClusterState(const Graph &g, const IsolationCover &cover, const StateParams &p,
	             const std::vector<int> &centers);

	const Graph &graph() const { return *g_; }
	const IsolationCover &cover() const { return *cover_; }
	const StateParams &params() const { return p_; }
	int n() const { return n_; }

	bool is_center(int v) const { return is_center_[v] != 0; }
	int num_centers() const { return k_; }
	std::vector<int> centers() const;
	int subset_size(int j) const { return cj_size_[j]; }

	int sub_center(int j, int v) const { return sub_c_[idx(j, v)]; }
	double sub_dist(int j, int v) const { return sub_d_[idx(j, v)]; }
	int center_of(int v) const { return clus_c_[v]; }
	double dist_of(int v) const { return clus_d_[v]; }

	double cost() const { return tree_[1]; }
	double loss(int c) const;
	double volume(int c) const {
		return static_cast<double>(vol_[c]) / static_cast<double>(p_.vol_total);
	}
	int64_t volume_count(int c) const { return vol_[c]; }
	int group_of(int c) const { return grp_[c]; }
	double group_key(int c) const { return key_[c]; }
	const std::set<std::pair<double, int>> &group(int tau) const { return groups_[tau]; }
	int tau_of_count(int64_t cnt) const;

	const std::vector<double> &tree() const { return tree_; }
	int tree_leaves() const { return leaves_; }

	void insert(int c);
	void erase(int c);

	// Loss minimizer of group tau, skipping `exclude`; ties to smaller id.
	std::optional<std::pair<int, double>> group_min_loss(int tau, int exclude = kNone) const;

	int sample_noncenter(std::mt19937_64 &rng) const;

	Token transaction();
	// Undoes everything since t; scopes nested inside t are discarded.
	void rollback(Token t);
	void commit(Token t);
	bool in_transaction() const { return !tx_.empty(); }
	size_t log_size() const { return log_.size(); }

	void set_tracing(bool on) { tracing_ = on; }
	const OpTrace &last_trace() const { return trace_; }
	int64_t total_modifications() const { return total_mods_; }

	// Stepwise insertion: each step performs at most one entry modification.
	class InsertCursor {
	public:
		InsertCursor(ClusterState &s, int c);
		// Returns false once the insertion has fully completed.
		bool step();
		bool done() const { return done_; }

	private:
		ClusterState *s_;
		int c_;
		size_t jpos_ = 0;
		bool started_ = false;
		bool done_ = false;
		std::vector<std::pair<int, int>> stack_; // (vertex, next arc)
	};

	// Deep comparison of every maintained field.
	bool operator==(const ClusterState &o) const;

	// Test hook: overwrite a merged distance without synchronization.
	void corrupt_dist_for_testing(int v, double d) { clus_d_[v] = d; }

private:
	enum Field : uint8_t {
		SubC, SubD, Next, Prev, Head, ClusC, ClusD, Gap, Tree, LossHi, LossLo,
		LossInf, Vol, Grp, Key, IsCenter, CjSize, K, GroupIns, GroupErase
	};
	struct Rec {
		uint8_t field;
		int32_t b;
		int64_t a;
		uint64_t bits;
	};

	size_t idx(int j, int v) const { return static_cast<size_t>(j) * n_ + v; }

	template <class T> void put(Field f, std::vector<T> &arr, size_t i, T val);
	void set_entry(int j, int v, int c, double d);
	void insert_entry(int j, int v, int c, double d);
	void unlink(int j, int c, int v);
	void link(int j, int c, int v);
	void sync_vertex(int v);
	void add_loss(int c, double x);
	void regroup(int c);
	void tree_set(int v, double val);
	double gap_for(int v, int c, double d) const;
	void set_k(int k);

	const Graph *g_;
	const IsolationCover *cover_;
	StateParams p_;
	int n_;
	int nj_;
	int leaves_;

	std::vector<int32_t> sub_c_;
	std::vector<double> sub_d_;
	std::vector<int32_t> next_, prev_, head_;
	std::vector<int32_t> clus_c_;
	std::vector<double> clus_d_;
	std::vector<double> gap_;
	std::vector<double> tree_;
	std::vector<double> loss_hi_, loss_lo_;
	std::vector<int32_t> loss_inf_;
	std::vector<int64_t> vol_;
	std::vector<int32_t> grp_;
	std::vector<double> key_;
	std::vector<int32_t> is_center_;
	std::vector<int32_t> cj_size_;
	int k_ = 0;
	std::vector<std::set<std::pair<double, int>>> groups_;

	std::vector<Rec> log_;
	std::vector<std::pair<Token, size_t>> tx_;
	Token next_token_ = 0;

	bool tracing_ = false;
	OpTrace trace_;
	int64_t total_mods_ = 0;
	std::vector<char> scratch_in_, scratch_seen_;
};

// Descends a sum tree laid out as in ClusterState::tree(), choosing each
// child with probability proportional to its value.
int sample_sum_tree(const std::vector<double> &tree, int leaves, std::mt19937_64 &rng);

} // namespace gclus
