// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gclus/local_search.hpp"
#include "gclus/oracle.hpp"
#include "gclus/preprocess.hpp"
#include "gclus/spanner.hpp"
#include "helpers.hpp"

using namespace gclus;
using testutil::Fixture;

namespace {

struct Outcome {
	bool pass = true;
	std::string detail;
};

std::string fmt(const char *f, auto... args) {
	char buf[512];
	std::snprintf(buf, sizeof buf, f, args...);
	return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x) {
	if (x <= 0)
		return 1;
	const double lg = std::lgamma(a);
	if (x < a + 1) {
		double sum = 1 / a, term = sum;
		for (int n = 1; n < 1000; ++n) {
			term *= x / (a + n);
			sum += term;
			if (std::abs(term) < std::abs(sum) * 1e-15)
				break;
		}
		return 1 - sum * std::exp(-x + a * std::log(x) - lg);
	}
	// Lentz continued fraction.
	double b = x + 1 - a, c = 1e300, d = 1 / b, h = d;
	for (int i = 1; i < 1000; ++i) {
		const double an = -i * (i - a);
		b += 2;
		d = an * d + b;
		if (std::abs(d) < 1e-300)
			d = 1e-300;
		c = b + an / c;
		if (std::abs(c) < 1e-300)
			c = 1e-300;
		d = 1 / d;
		const double del = d * c;
		h *= del;
		if (std::abs(del - 1) < 1e-15)
			break;
	}
	return std::exp(-x + a * std::log(x) - lg) * h;
}

int random_noncenter(const ClusterState &s, std::mt19937_64 &rng) {
	int v;
	do
		v = static_cast<int>(rng() % s.n());
	while (s.is_center(v));
	return v;
}

int random_center(const ClusterState &s, std::mt19937_64 &rng) {
	auto cs = s.centers();
	return cs[rng() % cs.size()];
}

// Criteria 1 and 7 share the soak.
struct SoakResult {
	Outcome c1, c7;
};

SoakResult soak() {
	const auto t0 = std::chrono::steady_clock::now();
	std::mt19937_64 rng(1001);
	int64_t ops = 0, checks_failed = 0, ins_viol = 0, del_viol = 0, deletes = 0, inserts = 0;
	std::string first;
	for (int gi = 0; gi < 20; ++gi) {
		const int n = 8 + static_cast<int>(rng() % 23);
		Graph g = testutil::random_graph(n, rng, 0.15, 1, 10);
		const double z = gi % 2 ? 2 : 1;
		Fixture f(g, testutil::random_centers(n, 1 + static_cast<int>(rng() % 3), rng), z, 0.05);
		ClusterState &s = f.state();
		s.set_tracing(true);
		const int nj = f.cover.size();
		std::vector<int> bc(static_cast<size_t>(nj) * n);
		std::vector<double> bd(bc.size());
		for (int op = 0; op < 10000; ++op, ++ops) {
			const int kind = static_cast<int>(rng() % 3);
			if (kind == 0 && s.num_centers() < n) {
				const int p = random_noncenter(s, rng);
				for (int j = 0; j < nj; ++j)
					for (int v = 0; v < n; ++v) {
						bc[static_cast<size_t>(j) * n + v] = s.sub_center(j, v);
						bd[static_cast<size_t>(j) * n + v] = s.sub_dist(j, v);
					}
				s.insert(p);
				++inserts;
				for (int j = 0; j < nj; ++j)
					for (int v = 0; v < n; ++v)
						if (s.sub_center(j, v) != p &&
						    (s.sub_center(j, v) != bc[static_cast<size_t>(j) * n + v] ||
						     !same_bits(s.sub_dist(j, v), bd[static_cast<size_t>(j) * n + v])))
							++ins_viol;
			} else if (kind == 1 && s.num_centers() > 1) {
				s.erase(random_center(s, rng));
				++deletes;
				const OpTrace &tr = s.last_trace();
				for (size_t i = 0; i < tr.indices.size(); ++i)
					if (!std::includes(tr.region[i].begin(), tr.region[i].end(),
					                   tr.touched[i].begin(), tr.touched[i].end()))
						++del_viol;
			} else if (s.cost() > 0) {
				if (s.is_center(s.sample_noncenter(rng)))
					++checks_failed;
			}
			const ConsistencyReport rep = check_state_consistency(f.g, s, 1e-9);
			if (!rep.ok()) {
				if (checks_failed == 0)
					first = rep.summary(2);
				++checks_failed;
			}
		}
	}
	const double secs = seconds_since(t0);
	SoakResult r;
	r.c1.pass = checks_failed == 0 && secs < 120;
	r.c1.detail = fmt("%lld ops on 20 graphs, %lld failed checks, %.1fs (limit 120s)",
	                  static_cast<long long>(ops), static_cast<long long>(checks_failed), secs);
	if (!first.empty())
		r.c1.detail += "; first: " + first;
	r.c7.pass = ins_viol == 0 && del_viol == 0 && deletes > 0 && inserts > 0;
	r.c7.detail = fmt("%lld inserts with %lld changed foreign entries, %lld deletes with %lld "
	                  "out-of-region accesses",
	                  static_cast<long long>(inserts), static_cast<long long>(ins_viol),
	                  static_cast<long long>(deletes), static_cast<long long>(del_viol));
	return r;
}

Outcome c2_initialize() {
	std::mt19937_64 rng(2002);
	double worst = 0;
	int bad = 0;
	for (int t = 0; t < 100; ++t) {
		const int n = 2 + static_cast<int>(rng() % 40);
		Graph g = testutil::random_graph(n, rng, 0.15, 1, 10);
		const double z = std::vector<double>{1, 2, 1.5, 3}[t % 4];
		const int k = 1 + static_cast<int>(rng() % std::min(n, 6));
		Fixture f(g, testutil::random_centers(n, k, rng), z, 1 / (10 * z));
		const double exact = exact_cost(f.g, f.state().centers(), z);
		const double rel = exact == 0 ? std::abs(f.state().cost())
		                              : std::abs(f.state().cost() - exact) / exact;
		worst = std::max(worst, rel);
		bad += rel > 1e-12;
	}
	return {bad == 0, fmt("100 instances, worst relative error %.3g (limit 1e-12)", worst)};
}

struct Instance {
	Graph g;
	int k;
	double z;
	double opt;
};

std::vector<Instance> approx_instances() {
	std::mt19937_64 rng(3003);
	std::vector<Instance> out;
	for (int gi = 0; gi < 30; ++gi) {
		const int n = 5 + static_cast<int>(rng() % 8); // 5..12
		Graph g = testutil::random_graph(n, rng, 0.2, 1, 10);
		for (int k : {2, 3, 4})
			for (double z : {1.0, 2.0})
				out.push_back({g, k, z, brute_force_opt(g, k, z).cost});
	}
	return out;
}

struct ApproxResult {
	Outcome c3, c4;
};

ApproxResult c3_c4(const std::vector<Instance> &inst) {
	const auto t0 = std::chrono::steady_clock::now();
	const double eps = 0.05;
	int64_t runs = 0, over = 0, iter_viol = 0, vol_viol = 0, swap_viol = 0, swaps = 0;
	double worst = 0, sum_ratio = 0;
	int64_t ratio_runs = 0;
	for (const Instance &in : inst) {
		for (uint64_t seed = 0; seed < 50; ++seed) {
			ClusterOptions o;
			o.z = in.z;
			o.eps = eps;
			o.search.seed = seed * 7919 + 17;
			o.search.scheduler = seed % 2 ? Scheduler::Sequential : Scheduler::RoundRobin;
			const ClusterResult r = cluster_graph(in.g, in.k, o);
			++runs;
			const double bound = alpha_z(in.z, eps) * in.opt;
			if (r.solution.exact_cost > bound)
				++over;
			if (in.opt > 0) {
				const double ratio = r.solution.exact_cost / in.opt;
				worst = std::max(worst, ratio);
				sum_ratio += ratio;
				++ratio_runs;
			}
			if (r.stats.positive_iterations > r.iteration_bound)
				++iter_viol;
			if (r.stats.volume_sum > r.volume_bound)
				++vol_viol;
			for (const SwapRecord &sw : r.stats.swaps) {
				++swaps;
				if (sw.cost_after > sw.cost_before * (1 - eps / 2 * sw.volume) * (1 + 1e-9))
					++swap_viol;
			}
		}
	}
	const double secs = seconds_since(t0);
	ApproxResult res;
	res.c3.pass = over == 0 && secs < 600;
	res.c3.detail = fmt("%lld runs, %lld above alpha*OPT, mean ratio %.4f, worst ratio %.4f "
	                    "(alpha_1=%.3f, alpha_2=%.3f), %.1fs (limit 600s)",
	                    static_cast<long long>(runs), static_cast<long long>(over),
	                    ratio_runs ? sum_ratio / ratio_runs : 1.0, worst, alpha_z(1, eps),
	                    alpha_z(2, eps), secs);
	res.c4.pass = iter_viol == 0 && vol_viol == 0 && swap_viol == 0;
	res.c4.detail = fmt("%lld runs, %lld swaps; iteration bound violations %lld, volume bound "
	                    "violations %lld, ineffective swaps %lld",
	                    static_cast<long long>(runs), static_cast<long long>(swaps),
	                    static_cast<long long>(iter_viol), static_cast<long long>(vol_viol),
	                    static_cast<long long>(swap_viol));
	return res;
}

Outcome c5_test_lemma() {
	std::mt19937_64 rng(5005);
	const double eps = 0.05;
	int64_t probes = 0, certified = 0, missed = 0, returned = 0, unsound = 0;
	for (int t = 0; t < 10; ++t) {
		const int n = 5 + static_cast<int>(rng() % 6); // 5..10
		Graph g = testutil::random_graph(n, rng, 0.25, 1, 10);
		const double z = t % 2 ? 2 : 1;
		Fixture f(g, testutil::random_centers(n, 1 + static_cast<int>(rng() % 3), rng), z, eps);
		ClusterState &s = f.state();
		for (int p = 0; p < n; ++p) {
			if (s.is_center(p))
				continue;
			++probes;
			const SuperEffective o = is_super_effective_noncenter(s, p);
			const auto r = test_effectiveness(s.cost(), s, p);
			certified += o.yes;
			if (o.yes && !r)
				++missed;
			if (r) {
				++returned;
				Fixture replay(g, s.centers(), z, eps);
				const double before = replay.state().cost();
				replay.state().insert(r->c_ins);
				const double vol = replay.state().volume(r->c_del);
				replay.state().erase(r->c_del);
				if (replay.state().cost() > before * (1 - eps / 2 * vol) * (1 + 1e-9))
					++unsound;
			}
		}
	}
	return {missed == 0 && unsound == 0,
	        fmt("%lld noncenters, %lld certified by the oracle, %lld missed, %lld pairs returned, "
	            "%lld not effective on replay",
	            static_cast<long long>(probes), static_cast<long long>(certified),
	            static_cast<long long>(missed), static_cast<long long>(returned),
	            static_cast<long long>(unsound))};
}

Outcome c6_sampling() {
	std::mt19937_64 rng(6006);
	int failed = 0, center_draws = 0;
	double min_p = 1;
	for (int t = 0; t < 10; ++t) {
		const int n = 8 + static_cast<int>(rng() % 23);
		Graph g = testutil::random_graph(n, rng, 0.15, 1, 10);
		const double z = t % 2 ? 2 : 1;
		Fixture f(g, testutil::random_centers(n, 1 + static_cast<int>(rng() % 4), rng), z);
		ClusterState &s = f.state();
		// a few random swaps so the state is not freshly initialized
		for (int i = 0; i < 5; ++i) {
			s.insert(random_noncenter(s, rng));
			s.erase(random_center(s, rng));
		}
		const int64_t N = 100000;
		std::vector<int64_t> cnt(n, 0);
		for (int64_t i = 0; i < N; ++i) {
			const int v = s.sample_noncenter(rng);
			++cnt[v];
			center_draws += s.is_center(v);
		}
		double total = 0;
		for (int v = 0; v < n; ++v)
			total += powz(s.dist_of(v), z);
		// merge cells with expected count below 5
		double chi = 0, pool_e = 0;
		int64_t pool_o = 0;
		int cells = 0;
		for (int v = 0; v < n; ++v) {
			const double e = powz(s.dist_of(v), z) / total * N;
			if (e == 0) {
				if (cnt[v] != 0)
					chi = INFINITY;
				continue;
			}
			if (e < 5) {
				pool_e += e;
				pool_o += cnt[v];
				continue;
			}
			chi += (cnt[v] - e) * (cnt[v] - e) / e;
			++cells;
		}
		if (pool_e > 0) {
			chi += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
			++cells;
		}
		const double p = cells > 1 ? gamma_q((cells - 1) / 2.0, chi / 2) : (chi == 0 ? 1 : 0);
		min_p = std::min(min_p, p);
		failed += p < 0.001;
	}
	return {failed == 0 && center_draws == 0,
	        fmt("10 states x 1e5 draws, %d rejected at 0.001, smallest p-value %.4f, %d center draws",
	            failed, min_p, center_draws)};
}

Outcome c8_coarse(const std::vector<Instance> &inst) {
	int bad = 0;
	double worst = 0;
	for (const Instance &in : inst) {
		const double c = exact_cost(in.g, coarse_solution(in.g, in.k), in.z);
		const double bound = std::pow(in.g.n(), in.z + 1) * in.opt;
		if (c > bound)
			++bad;
		if (in.opt > 0)
			worst = std::max(worst, c / bound);
	}
	return {bad == 0, fmt("%zu instances, %d above n^(z+1)*OPT, worst cost/bound %.4f",
	                      inst.size(), bad, worst)};
}

// Visits every k-subset of [0, n).
void for_each_subset(int n, int k, const std::function<void(const std::vector<int> &)> &fn) {
	std::vector<int> c(k);
	for (int i = 0; i < k; ++i)
		c[i] = i;
	while (true) {
		fn(c);
		int i = k - 1;
		while (i >= 0 && c[i] == n - k + i)
			--i;
		if (i < 0)
			return;
		++c[i];
		for (int j = i + 1; j < k; ++j)
			c[j] = c[j - 1] + 1;
	}
}

Outcome c9_normalization(const std::vector<Instance> &inst) {
	const double eps = 0.05;
	std::mt19937_64 rng(9009);
	int aspect_bad = 0, aspect_checked = 0;
	double worst_aspect = 0;
	auto check_aspect = [&](const Graph &g, int k, double z) {
		const Normalized nz = normalize_weights(g, k, z, eps, alpha_z(z, eps));
		if (!nz.applied)
			return;
		++aspect_checked;
		const double a = nz.graph.max_weight() / nz.graph.min_weight();
		const double bound = aspect_bound(g.n(), z, eps);
		worst_aspect = std::max(worst_aspect, a / bound);
		aspect_bad += a > bound;
	};
	for (const Instance &in : inst)
		check_aspect(in.g, in.k, in.z);

	// Heavy-tailed weights make the clamps bite.
	int64_t subsets = 0, good = 0, lift_bad = 0, clamped = 0;
	for (int t = 0; t < 40; ++t) {
		const int n = 4 + static_cast<int>(rng() % 7); // 4..10
		std::vector<Edge> e;
		for (int v = 1; v < n; ++v)
			e.push_back({static_cast<int>(rng() % v), v, std::pow(10.0, static_cast<double>(rng() % 13) - 6)});
		for (int u = 0; u < n; ++u)
			for (int v = u + 1; v < n; ++v)
				if (rng() % 5 == 0)
					e.push_back({u, v, std::pow(10.0, static_cast<double>(rng() % 13) - 6)});
		Graph g = load_graph(n, e);
		const int k = 1 + static_cast<int>(rng() % 3);
		const double z = t % 2 ? 2 : 1;
		check_aspect(g, k, z);
		const Normalized nz = normalize_weights(g, k, z, eps, alpha_z(z, eps));
		if (!nz.applied)
			continue;
		for (size_t i = 0; i < e.size(); ++i)
			clamped += nz.graph.edges()[i].w != g.edges()[i].w * nz.scale;
		const double opt = brute_force_opt(g, k, z).cost;
		const double opt_n = brute_force_opt(nz.graph, k, z).cost;
		const double alpha = nz.alpha;
		for_each_subset(n, k, [&](const std::vector<int> &c) {
			++subsets;
			if (exact_cost(nz.graph, c, z) <= alpha * opt_n) {
				++good;
				if (exact_cost(g, c, z) > std::pow(2.0, eps) * alpha * opt * (1 + 1e-12))
					++lift_bad;
			}
		});
	}
	return {aspect_bad == 0 && lift_bad == 0 && aspect_checked > 0,
	        fmt("aspect ratio within bound on %d graphs (worst ratio/bound %.3g, %d over); "
	            "%lld subsets enumerated, %lld within alpha*OPT' after normalization, %lld of "
	            "those above 2^eps*alpha*OPT originally; %lld clamped edges",
	            aspect_checked, worst_aspect, aspect_bad, static_cast<long long>(subsets),
	            static_cast<long long>(good), static_cast<long long>(lift_bad),
	            static_cast<long long>(clamped))};
}

Outcome c10_alpha() {
	const double a1 = alpha_z(1, 0), a2 = alpha_z(2, 0);
	const double target = 44 + 16 * std::sqrt(7.0);
	return {a1 == 6.0 && std::abs(a2 - target) <= 1e-6,
	        fmt("alpha_z(1,0) = %.17g, alpha_z(2,0) = %.12f vs %.12f (diff %.3g)", a1, a2, target,
	            std::abs(a2 - target))};
}

Outcome c11_spanner() {
	const auto t0 = std::chrono::steady_clock::now();
	const double c = 4;
	int64_t pairs = 0, within = 0, shorter = 0, fallbacks = 0;
	double worst = 0;
	int64_t edges = 0;
	for (uint64_t seed = 0; seed < 20; ++seed) {
		std::mt19937_64 rng(11000 + seed);
		PointSet p;
		p.n = 200;
		p.d = 4;
		std::uniform_real_distribution<double> u(0, 1);
		for (int i = 0; i < 800; ++i)
			p.x.push_back(u(rng));
		auto fam = pstable_lp_family(p, 2);
		const Spanner sp = build_lsh_spanner(*fam, make_spanner_params(*fam, c, 3, seed));
		fallbacks += sp.stats.fallback_star;
		edges += sp.stats.edges;
		std::vector<std::pair<int, int>> sample;
		while (sample.size() < 1000) {
			const int a = static_cast<int>(rng() % 200), b = static_cast<int>(rng() % 200);
			if (a != b)
				sample.push_back({a, b});
		}
		std::sort(sample.begin(), sample.end());
		int last = -1;
		std::vector<double> dist;
		for (auto [a, b] : sample) {
			if (a != last) {
				dist = dijkstra(sp.graph, a);
				last = a;
			}
			const double d = fam->distance(a, b);
			const double ratio = dist[b] / d;
			++pairs;
			within += ratio <= 8 * c;
			shorter += dist[b] < d * (1 - 1e-12);
			worst = std::max(worst, ratio);
		}
	}
	const double secs = seconds_since(t0);
	const double frac = static_cast<double>(within) / pairs;
	return {frac >= 0.99 && shorter == 0 && secs < 180,
	        fmt("%lld (seed, pair) checks, %.4f within 8c, worst stretch %.3f, %lld shorter than "
	            "the metric, mean edges %.0f, %lld fallback stars, %.1fs (limit 180s)",
	            static_cast<long long>(pairs), frac, worst, static_cast<long long>(shorter),
	            edges / 20.0, static_cast<long long>(fallbacks), secs)};
}

std::string slurp(const std::filesystem::path &p) {
	std::ifstream in(p, std::ios::binary);
	std::stringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

Outcome c12_determinism() {
	namespace fs = std::filesystem;
	const fs::path dir = fs::temp_directory_path() / "gclus_acceptance";
	fs::create_directories(dir);
	std::mt19937_64 rng(12012);
	{
		std::ofstream pts(dir / "points.txt");
		pts << "60 3\n";
		std::uniform_real_distribution<double> u(0, 1);
		pts.precision(17);
		for (int i = 0; i < 60; ++i)
			pts << u(rng) << ' ' << u(rng) << ' ' << u(rng) << '\n';
		std::ofstream gr(dir / "graph.txt");
		write_edge_list(gr, testutil::random_graph(40, rng, 0.1, 1, 10));
	}
	const std::string cli = GCLUS_CLI_PATH;
	auto run = [&](const std::string &args, const fs::path &out) {
		const std::string cmd = cli + " " + args + " --out " + out.string();
		return std::system(cmd.c_str());
	};
	const std::string pts_args = "cluster-points --points " + (dir / "points.txt").string() +
	                             " --metric l2 --c 4 --c1 1 --k 4 --z 2 --epsilon 0.05 "
	                             "--scheduler sequential --seed 42";
	const std::string graph_args = "cluster --graph " + (dir / "graph.txt").string() +
	                               " --k 5 --z 1 --epsilon 0.05 --scheduler sequential --seed 42";
	int code = 0;
	code |= run(pts_args, dir / "p1.json");
	code |= run(pts_args, dir / "p2.json");
	code |= run(graph_args, dir / "g1.json");
	code |= run(graph_args, dir / "g2.json");
	const std::string p1 = slurp(dir / "p1.json"), p2 = slurp(dir / "p2.json");
	const std::string g1 = slurp(dir / "g1.json"), g2 = slurp(dir / "g2.json");
	const bool ok = code == 0 && !p1.empty() && !g1.empty() && p1 == p2 && g1 == g2;
	return {ok, fmt("cluster-points: %zu bytes, identical=%d; cluster: %zu bytes, identical=%d; "
	                "exit status %d",
	                p1.size(), p1 == p2, g1.size(), g1 == g2, code)};
}

} // namespace

int main() {
	int failures = 0;
	auto report = [&](int id, const char *name, const Outcome &o) {
		std::cout << "criterion " << id << " [" << name << "]: " << (o.pass ? "PASS" : "FAIL")
		          << " - " << o.detail << std::endl;
		failures += !o.pass;
	};
	auto guarded = [](const std::function<Outcome()> &fn) {
		try {
			return fn();
		} catch (const std::exception &e) {
			return Outcome{false, std::string("exception: ") + e.what()};
		}
	};

	SoakResult soak_r;
	try {
		soak_r = soak();
	} catch (const std::exception &e) {
		soak_r.c1 = soak_r.c7 = Outcome{false, std::string("exception: ") + e.what()};
	}
	report(1, "invariant soak", soak_r.c1);
	report(2, "initialization exactness", guarded(c2_initialize));

	std::vector<Instance> inst;
	ApproxResult ar;
	try {
		inst = approx_instances();
		ar = c3_c4(inst);
	} catch (const std::exception &e) {
		ar.c3 = ar.c4 = Outcome{false, std::string("exception: ") + e.what()};
	}
	report(3, "approximation", ar.c3);
	report(4, "iteration and volume bounds", ar.c4);
	report(5, "test-effectiveness equivalence", guarded(c5_test_lemma));
	report(6, "sampling distribution", guarded(c6_sampling));
	report(7, "locality instrumentation", soak_r.c7);
	report(8, "coarse solution ratio", guarded([&] { return c8_coarse(inst); }));
	report(9, "weight normalization", guarded([&] { return c9_normalization(inst); }));
	report(10, "alpha values", guarded(c10_alpha));
	report(11, "spanner stretch", guarded(c11_spanner));
	report(12, "determinism", guarded(c12_determinism));

	std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
	          << std::endl;
	return failures == 0 ? 0 : 1;
}
