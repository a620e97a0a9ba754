#include "gclus/local_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "gclus/oracle.hpp"

namespace gclus {

Scheduler parse_scheduler(const std::string &s) {
	if (s == "round_robin")
		return Scheduler::RoundRobin;
	if (s == "sequential")
		return Scheduler::Sequential;
	throw InvalidParams("unknown scheduler: " + s);
}

const char *scheduler_name(Scheduler s) {
	return s == Scheduler::RoundRobin ? "round_robin" : "sequential";
}

EffectivenessProbe::EffectivenessProbe(double base_cost, ClusterState &probe, int c_ins)
    : base_cost_(base_cost), probe_(&probe), c_ins_(c_ins) {
	cursor_.emplace(probe, c_ins);
	token_ = probe.transaction();
}

EffectivenessProbe::~EffectivenessProbe() {
	try {
		abort();
	} catch (...) {
	}
}

void EffectivenessProbe::abort() {
	if (finished_)
		return;
	probe_->rollback(token_);
	finished_ = true;
}

void EffectivenessProbe::finish(std::optional<SwapCandidate> r) {
	probe_->rollback(token_);
	finished_ = true;
	result_ = r;
}

bool EffectivenessProbe::step() {
	if (finished_)
		return false;
	if (cursor_) {
		if (cursor_->step()) {
			++steps_;
			return true;
		}
		cursor_.reset();
		tau_ = 1;
	}
	ClusterState &P = *probe_;
	++steps_;
	if (auto m = P.group_min_loss(tau_, c_ins_)) {
		const double ratio = (P.cost() + m->second) / base_cost_;
		const double vol = P.volume(m->first);
		if (ratio <= 1 - P.params().eps / 2 * vol) {
			finish(SwapCandidate{c_ins_, m->first, ratio, vol});
			return false;
		}
	}
	if (++tau_ > P.params().t) {
		finish(std::nullopt);
		return false;
	}
	return true;
}

std::optional<SwapCandidate> test_effectiveness(double base_cost, ClusterState &probe, int c_ins) {
	EffectivenessProbe p(base_cost, probe, c_ins);
	while (p.step()) {
	}
	return p.result();
}

int64_t compute_s(double eps, double z, int n, int64_t m, int cover_size, double c0) {
	if (!(eps > 0))
		throw InvalidEpsilon("compute_s needs epsilon > 0");
	const double ln_n = std::log(static_cast<double>(n));
	const double lbar = 8 * z / eps * static_cast<double>(m) * cover_size * ln_n;
	const double s = std::ceil(std::pow(eps, -4 * z) * (std::log(lbar) + c0 * ln_n));
	if (!(s >= 1))
		return 1;
	if (s > 4e18)
		return static_cast<int64_t>(4e18);
	return static_cast<int64_t>(s);
}

double alpha_z(double z, double eps) {
	if (!(z >= 1) || !(eps >= 0) || eps > 1 / (10 * z) * (1 + 1e-12))
		throw EpsilonOutOfRange("alpha_z needs z >= 1 and 0 <= epsilon <= 1/(10z)");
	if (z == 1)
		return (std::exp2(2 + 2 * eps) + std::exp2(1 + 4 * eps)) /
		       (3 - eps - std::exp2(1 + 2 * eps) * (1 + eps));
	const double A = (3 - eps) / std::exp2(1 + 2 * eps * z) - eps;
	if (!(A > 1))
		throw EpsilonOutOfRange("no feasible lambda for this (z, epsilon)");
	const double lo_lambda = 1 / (std::pow(A, 1 / (z - 1)) - 1);
	auto f = [&](double u) {
		const double lambda = lo_lambda + std::exp(u);
		const double num = std::exp2(1 + z + 2 * eps * z) * std::pow(1 + lambda, z - 1) +
		                   std::exp2((1 + 4 * eps) * z);
		const double den = 3 - eps -
		                   std::exp2(1 + 2 * eps * z) * (std::pow(1 + 1 / lambda, z - 1) + eps);
		return den > 0 ? num / den : std::numeric_limits<double>::infinity();
	};
	// Golden-section search over log(lambda - lambda_lo).
	const double scale = std::log(std::max(1.0, lo_lambda));
	double a = scale - 30, b = scale + 30;
	const double phi = (std::sqrt(5.0) - 1) / 2;
	double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
	double f1 = f(x1), f2 = f(x2);
	while (b - a > 1e-10) {
		if (f1 <= f2) {
			b = x2;
			x2 = x1;
			f2 = f1;
			x1 = b - phi * (b - a);
			f1 = f(x1);
		} else {
			a = x1;
			x1 = x2;
			f1 = f2;
			x2 = a + phi * (b - a);
			f2 = f(x2);
		}
	}
	return f((a + b) / 2);
}

int64_t iteration_bound(double z, double eps, int n, int64_t m, int cover_size) {
	return static_cast<int64_t>(
	    std::ceil(8 * z / eps * static_cast<double>(m) * cover_size * std::log(n)));
}

double volume_bound(double z, double eps, int n) { return 4 * z / eps * std::log(n); }

namespace {

// Distinct candidates of an s-draw D^z sample, in first-occurrence order.
// Repeated draws are skipped in bulk with a geometric jump.
class CandidateStream {
public:
	CandidateStream(const ClusterState &s, int64_t budget, std::mt19937_64 &rng)
	    : tree_(s.tree()), leaves_(s.tree_leaves()), total_(s.cost()), budget_(budget),
	      rng_(rng) {}

	std::optional<int> next() {
		const double rem = tree_[1];
		if (!(rem > 0) || draws_ >= budget_)
			return std::nullopt;
		const double p = rem / total_;
		if (p < 1) {
			const double u = 1 - unit_(rng_);
			const double skip = std::floor(std::log(u) / std::log1p(-p));
			if (!(skip < static_cast<double>(budget_ - draws_))) {
				draws_ = budget_;
				return std::nullopt;
			}
			draws_ += static_cast<int64_t>(skip);
		}
		++draws_;
		const int v = sample_sum_tree(tree_, leaves_, rng_);
		size_t i = static_cast<size_t>(leaves_) + v;
		tree_[i] = 0;
		for (i /= 2; i >= 1; i /= 2)
			tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
		return v;
	}

	int64_t draws() const { return draws_; }

private:
	std::vector<double> tree_;
	int leaves_;
	double total_;
	int64_t budget_;
	int64_t draws_ = 0;
	std::mt19937_64 &rng_;
	std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

void audit(const Graph &g, const ClusterState &s, RunStats &st, const char *what) {
	ConsistencyReport r = check_state_consistency(g, s);
	if (!r.ok()) {
		if (st.audit_failures == 0)
			st.first_audit_failure = std::string(what) + ": " + r.summary(3);
		++st.audit_failures;
	}
}

} // namespace

std::pair<Solution, RunStats> run_local_search(const Graph &g, int k, const StateParams &params,
                                               const SearchOptions &opt) {
	const auto t0 = std::chrono::steady_clock::now();
	const int n = g.n();
	if (k < 1 || k > n)
		throw InvalidK("k must lie in [1, n]");
	IsolationCover cover(n);
	if (params.cover_size != cover.size())
		throw InvalidParams("params were built for a different cover");

	RunStats st;
	st.s = opt.s > 0 ? opt.s : compute_s(params.eps, params.z, n, g.m(), cover.size(), opt.c0);
	st.max_iters = opt.max_iters > 0
	                   ? opt.max_iters
	                   : iteration_bound(params.z, params.eps, n, g.m(), cover.size());

	ClusterState base(g, cover, params, coarse_solution(g, k));
	const Potential p0 = potential(base);
	st.potential_initial = p0.phi;
	st.potential_max = p0.phi_max;
	st.cost_trajectory.push_back(base.cost());
	if (opt.audit)
		audit(g, base, st, "initialize");

	std::mt19937_64 rng(opt.seed);
	std::vector<ClusterState> pool;

	while (base.cost() > 0) {
		const double base_cost = base.cost();
		CandidateStream stream(base, st.s, rng);
		std::optional<SwapCandidate> win;
		if (opt.scheduler == Scheduler::Sequential) {
			while (auto v = stream.next()) {
				++st.candidates_tested;
				EffectivenessProbe probe(base_cost, base, *v);
				while (probe.step()) {
				}
				st.probe_steps += probe.steps();
				if ((win = probe.result()))
					break;
			}
		} else {
			std::vector<int> cands;
			while (auto v = stream.next())
				cands.push_back(*v);
			while (pool.size() < cands.size())
				pool.push_back(base);
			st.replicas = static_cast<int64_t>(pool.size());
			std::vector<std::unique_ptr<EffectivenessProbe>> probes;
			for (size_t i = 0; i < cands.size(); ++i)
				probes.push_back(std::make_unique<EffectivenessProbe>(base_cost, pool[i], cands[i]));
			bool running = !probes.empty();
			while (running && !win) {
				running = false;
				for (auto &p : probes) {
					if (p->finished())
						continue;
					p->step();
					if (p->finished() && p->result()) {
						win = p->result();
						break;
					}
					running |= !p->finished();
				}
			}
			for (auto &p : probes) {
				st.probe_steps += p->steps();
				p->abort();
			}
			st.candidates_tested += static_cast<int64_t>(cands.size());
		}
		st.draws += stream.draws();
		if (!win)
			break;

		if (st.positive_iterations + 1 > st.max_iters)
			throw IterationCapExceeded("positive iterations exceed " +
			                           std::to_string(st.max_iters));
		const int64_t m0 = base.total_modifications();
		base.insert(win->c_ins);
		if (opt.audit)
			audit(g, base, st, "insert");
		const int64_t m1 = base.total_modifications();
		const double vol = base.volume(win->c_del);
		base.erase(win->c_del);
		if (opt.audit)
			audit(g, base, st, "delete");
		st.insert_modifications += m1 - m0;
		st.delete_modifications += base.total_modifications() - m1;

		const double after = base.cost();
		if (!(after / base_cost <= 1 - params.eps / 2 * vol + 1e-9))
			++st.effective_violations;
		st.swaps.push_back({win->c_ins, win->c_del, base_cost, after, vol, win->predicted_ratio});
		++st.positive_iterations;
		st.volume_sum += vol;
		st.cost_trajectory.push_back(after);

		for (ClusterState &r : pool) {
			r.insert(win->c_ins);
			r.erase(win->c_del);
			if (opt.check_replicas && !(r == base))
				++st.replica_mismatches;
		}
	}

	Solution sol;
	sol.centers = base.centers();
	sol.assignment.resize(n);
	for (int v = 0; v < n; ++v)
		sol.assignment[v] = base.center_of(v);
	sol.estimated_cost = base.cost();
	sol.exact_cost = exact_cost(g, sol.centers, params.z);
	st.potential_final = potential(base).phi;
	st.wall_seconds =
	    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
	return {sol, st};
}

ClusterResult cluster_graph(const Graph &g, int k, const ClusterOptions &opt) {
	const int n = g.n();
	if (k < 1 || k > n)
		throw InvalidK("k must lie in [1, n]");
	ClusterResult res;
	res.alpha_target = alpha_z(opt.z, opt.eps);
	Graph work;
	if (opt.normalize) {
		res.norm = normalize_weights(g, k, opt.z, opt.eps, res.alpha_target);
		work = res.norm.graph;
	} else {
		res.norm.graph = g;
		res.norm.alpha = res.alpha_target;
		res.norm.cost_init = exact_cost(g, coarse_solution(g, k), opt.z);
		if (g.min_weight() >= 1) {
			work = g;
		} else if (g.min_weight() > 0) {
			std::vector<double> w;
			for (const Edge &e : g.edges())
				w.push_back(e.w / g.min_weight());
			res.norm.scale = 1 / g.min_weight();
			work = reweight(g, w);
		} else if (res.norm.cost_init > 0) {
			throw InvalidParams("zero-weight edges require normalization");
		}
	}
	IsolationCover cover(n);
	res.iteration_bound = iteration_bound(opt.z, opt.eps, n, g.m(), cover.size());
	res.volume_bound = volume_bound(opt.z, opt.eps, n);

	if (res.norm.cost_init == 0) {
		res.early_exit = true;
		Solution &sol = res.solution;
		sol.centers = coarse_solution(g, k);
		std::vector<Source> src;
		for (int c : sol.centers)
			src.push_back({c, 0.0});
		sol.assignment = multi_source_dijkstra(g, src).label;
		res.params.z = opt.z;
		res.params.eps = opt.eps;
		res.stats.cost_trajectory.push_back(0.0);
		return res;
	}

	res.params = make_params(work, cover, opt.z, opt.eps, opt.beta);
	auto [sol, st] = run_local_search(work, k, res.params, opt.search);
	sol.exact_cost = exact_cost(g, sol.centers, opt.z);
	res.solution = std::move(sol);
	res.stats = std::move(st);
	return res;
}

} // namespace gclus
