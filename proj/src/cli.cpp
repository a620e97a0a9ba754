#include "gclus/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gclus/io.hpp"
#include "gclus/random_graph.hpp"
#include "gclus/spanner.hpp"

namespace gclus {

namespace {

struct ClusterArgs {
	int k = 0;
	double z = 1;
	double eps = 0.05;
	int beta = 0;
	double c0 = 2;
	int64_t s = 0;
	std::string scheduler = "round_robin";
	bool no_normalize = false;
	uint64_t seed = 0;
	bool audit = false;
	std::string out;
};

void add_cluster_options(CLI::App *cmd, ClusterArgs &a) {
	cmd->add_option("--k", a.k, "number of centers")->required();
	cmd->add_option("--z", a.z, "objective exponent (1 = k-median, 2 = k-means)")->required();
	cmd->add_option("--epsilon", a.eps, "accuracy parameter, at most 1/(10z)")->required();
	cmd->add_option("--beta", a.beta, "hop bound (default n-1)");
	cmd->add_option("--s-factor", a.c0, "safety exponent c0 in the sample count");
	cmd->add_option("--s", a.s, "override the sample count");
	cmd->add_option("--scheduler", a.scheduler, "round_robin or sequential")
	    ->check(CLI::IsMember({"round_robin", "sequential"}));
	cmd->add_flag("--no-normalize", a.no_normalize, "skip edge-weight normalization");
	cmd->add_option("--seed", a.seed, "random seed");
	cmd->add_flag("--audit", a.audit, "check every invariant after each committed operation");
	cmd->add_option("--out", a.out, "result JSON path (default stdout)");
}

ClusterOptions to_options(const ClusterArgs &a) {
	ClusterOptions o;
	o.z = a.z;
	o.eps = a.eps;
	o.beta = a.beta;
	o.normalize = !a.no_normalize;
	o.search.scheduler = parse_scheduler(a.scheduler);
	o.search.c0 = a.c0;
	o.search.s = a.s;
	o.search.seed = a.seed;
	o.search.audit = a.audit;
	return o;
}

void emit(const std::string &path, const std::string &text, std::ostream &out) {
	if (path.empty() || path == "-") {
		out << text;
		return;
	}
	std::ofstream f(path);
	if (!f)
		throw ParseError("cannot write " + path);
	f << text;
}

std::unique_ptr<LshFamily> load_family(const std::string &path, const std::string &metric) {
	std::ifstream in(path);
	if (!in)
		throw ParseError("cannot open " + path);
	if (metric == "jaccard")
		return minhash_jaccard_family(read_sets(in));
	double p = 2;
	if (metric == "l2")
		p = 2;
	else if (metric.rfind("lp:", 0) == 0)
		p = std::stod(metric.substr(3));
	else
		throw InvalidParams("unknown metric " + metric);
	return pstable_lp_family(read_points(in), p);
}

int finish_cluster(const ClusterResult &r, const ClusterArgs &a, const ClusterOptions &o,
                   nlohmann::json extra, std::ostream &out, std::ostream &err) {
	nlohmann::json j = result_to_json(r, a.k, o);
	for (auto it = extra.begin(); it != extra.end(); ++it)
		j[it.key()] = it.value();
	emit(a.out, j.dump(2) + "\n", out);
	if (a.audit && r.stats.audit_failures > 0) {
		err << "audit failed: " << r.stats.first_audit_failure << '\n';
		return 1;
	}
	if (a.audit && r.stats.effective_violations > 0) {
		err << "audit failed: committed swap did not meet the effectiveness bound\n";
		return 1;
	}
	return 0;
}

int run_check(const Graph &g, const std::string &trace_path, double z, double eps, int beta,
              uint64_t seed, std::ostream &out, std::ostream &err) {
	std::ifstream in(trace_path);
	if (!in)
		throw ParseError("cannot open " + trace_path);
	IsolationCover cover(g.n());
	const StateParams params = make_params(g, cover, z, eps, beta);
	std::mt19937_64 rng(seed);
	std::optional<ClusterState> state;
	std::vector<ClusterState::Token> tokens;
	std::string line;
	int lineno = 0, failures = 0;
	while (std::getline(in, line)) {
		++lineno;
		std::istringstream ls(line);
		std::string op;
		if (!(ls >> op) || op[0] == '#')
			continue;
		if (op == "init") {
			std::vector<int> cs;
			int c;
			while (ls >> c)
				cs.push_back(c);
			state.emplace(g, cover, params, cs);
			tokens.clear();
		} else {
			if (!state)
				throw ParseError("line " + std::to_string(lineno) + ": trace must start with init");
			int v = kNone;
			ls >> v;
			if (op == "insert")
				state->insert(v);
			else if (op == "delete")
				state->erase(v);
			else if (op == "sample")
				out << "sample " << state->sample_noncenter(rng) << '\n';
			else if (op == "begin")
				tokens.push_back(state->transaction());
			else if (op == "rollback") {
				if (tokens.empty())
					throw TokenOrderViolation("rollback without begin");
				state->rollback(tokens.back());
				tokens.pop_back();
			} else if (op == "commit") {
				if (tokens.empty())
					throw TokenOrderViolation("commit without begin");
				state->commit(tokens.back());
				tokens.pop_back();
			} else
				throw ParseError("line " + std::to_string(lineno) + ": unknown op " + op);
		}
		const ConsistencyReport rep = check_state_consistency(g, *state);
		out << lineno << '\t' << op << '\t' << (rep.ok() ? "ok" : "FAIL") << '\t'
		    << state->cost() << '\n';
		if (!rep.ok()) {
			++failures;
			err << rep.summary();
		}
	}
	return failures == 0 ? 0 : 1;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
	CLI::App app{"Graph (k,z)-clustering by 1-swap local search"};
	app.require_subcommand(1);

	std::string graph_path, points_path, trace_path, metric = "l2", spanner_out;
	double c = 4, c1 = 3;
	uint64_t seed = 0;
	double cap = 1e6;

	ClusterArgs ca;
	auto *cluster = app.add_subcommand("cluster", "cluster a graph edge list");
	cluster->add_option("--graph", graph_path, "edge-list file")->required();
	add_cluster_options(cluster, ca);

	std::string sp_out;
	auto *spanner = app.add_subcommand("spanner", "build an LSH spanner from points");
	spanner->add_option("--points", points_path, "points or sets file")->required();
	spanner->add_option("--metric", metric, "l2, lp:<p> or jaccard");
	spanner->add_option("--c", c, "stretch parameter");
	spanner->add_option("--c1", c1, "repetition constant");
	spanner->add_option("--seed", seed, "random seed");
	spanner->add_option("--out", sp_out, "edge-list output path")->required();

	ClusterArgs pa;
	auto *cpoints = app.add_subcommand("cluster-points", "spanner then cluster");
	cpoints->add_option("--points", points_path, "points or sets file")->required();
	cpoints->add_option("--metric", metric, "l2, lp:<p> or jaccard");
	cpoints->add_option("--c", c, "stretch parameter");
	cpoints->add_option("--c1", c1, "repetition constant");
	cpoints->add_option("--spanner-out", spanner_out, "also write the spanner edge list");
	add_cluster_options(cpoints, pa);

	int ok_k = 0;
	double oz = 1;
	std::string oout;
	auto *oracle = app.add_subcommand("oracle", "brute-force optimum");
	oracle->add_option("--graph", graph_path, "edge-list file")->required();
	oracle->add_option("--k", ok_k, "number of centers")->required();
	oracle->add_option("--z", oz, "objective exponent")->required();
	oracle->add_option("--cap", cap, "maximum number of subsets");
	oracle->add_option("--out", oout, "JSON output path (default stdout)");

	double cz = 1, ceps = 0.05;
	int cbeta = 0;
	auto *check = app.add_subcommand("check", "replay an operation trace with consistency checks");
	check->add_option("--graph", graph_path, "edge-list file")->required();
	check->add_option("--trace", trace_path, "trace file")->required();
	check->add_option("--z", cz, "objective exponent");
	check->add_option("--epsilon", ceps, "accuracy parameter");
	check->add_option("--beta", cbeta, "hop bound (default n-1)");
	check->add_option("--seed", seed, "seed for sample operations");

	std::vector<int> sizes{50, 100, 200};
	int bk = 5;
	double bz = 1, beps = 0.05, density = 0.05;
	std::string bsched = "sequential";
	auto *bench = app.add_subcommand("bench", "timing table on random graphs (TSV)");
	bench->add_option("--sizes", sizes, "vertex counts")->delimiter(',');
	bench->add_option("--k", bk, "number of centers");
	bench->add_option("--z", bz, "objective exponent");
	bench->add_option("--epsilon", beps, "accuracy parameter");
	bench->add_option("--density", density, "extra edge probability");
	bench->add_option("--scheduler", bsched, "round_robin or sequential")
	    ->check(CLI::IsMember({"round_robin", "sequential"}));
	bench->add_option("--seed", seed, "random seed");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		const int code = app.exit(e, out, err);
		return code == 0 ? 0 : 2;
	}

	try {
		if (*cluster) {
			const Graph g = read_edge_list_file(graph_path);
			const ClusterOptions o = to_options(ca);
			const ClusterResult r = cluster_graph(g, ca.k, o);
			return finish_cluster(r, ca, o, nlohmann::json::object(), out, err);
		}
		if (*spanner) {
			auto fam = load_family(points_path, metric);
			const Spanner sp = build_lsh_spanner(*fam, make_spanner_params(*fam, c, c1, seed));
			std::ostringstream os;
			write_edge_list(os, sp.graph);
			emit(sp_out, os.str(), out);
			if (sp.stats.fallback_star)
				err << "spanner: union was disconnected, added a star from point 0\n";
			return 0;
		}
		if (*cpoints) {
			auto fam = load_family(points_path, metric);
			const SpannerParams sp = make_spanner_params(*fam, c, c1, pa.seed);
			const Spanner s = build_lsh_spanner(*fam, sp);
			if (!spanner_out.empty()) {
				std::ostringstream os;
				write_edge_list(os, s.graph);
				emit(spanner_out, os.str(), out);
			}
			const ClusterOptions o = to_options(pa);
			const ClusterResult r = cluster_graph(s.graph, pa.k, o);
			nlohmann::json extra;
			extra["spanner"] = {{"metric", metric},   {"c", c},
			                    {"c1", c1},           {"N", sp.N},
			                    {"L", sp.L},          {"edges", s.stats.edges},
			                    {"hub_star", s.stats.hub_star},
			                    {"fallback_star", s.stats.fallback_star}};
			return finish_cluster(r, pa, o, extra, out, err);
		}
		if (*oracle) {
			const Graph g = read_edge_list_file(graph_path);
			const OptResult r = brute_force_opt(g, ok_k, oz, cap);
			emit(oout, opt_to_json(r, ok_k, oz).dump(2) + "\n", out);
			return 0;
		}
		if (*check) {
			const Graph g = read_edge_list_file(graph_path);
			return run_check(g, trace_path, cz, ceps, cbeta, seed, out, err);
		}
		if (*bench) {
			std::mt19937_64 rng(seed);
			out << "n\tm\tk\tz\tscheduler\titerations\tdraws\tcandidates\texact_cost\tseconds\n";
			for (int n : sizes) {
				const Graph g = random_connected_graph(n, density, 1, 10, rng);
				ClusterOptions o;
				o.z = bz;
				o.eps = beps;
				o.search.scheduler = parse_scheduler(bsched);
				o.search.seed = seed;
				const auto t0 = std::chrono::steady_clock::now();
				const ClusterResult r = cluster_graph(g, std::min(bk, n), o);
				const double secs =
				    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
				out << n << '\t' << g.m() << '\t' << std::min(bk, n) << '\t' << bz << '\t' << bsched
				    << '\t' << r.stats.positive_iterations << '\t' << r.stats.draws << '\t'
				    << r.stats.candidates_tested << '\t' << r.solution.exact_cost << '\t' << secs
				    << '\n';
			}
			return 0;
		}
	} catch (const Error &e) {
		err << e.kind() << ": " << e.what() << '\n';
		return 3;
	} catch (const std::exception &e) {
		err << "error: " << e.what() << '\n';
		return 3;
	}
	return 2;
}

} // namespace gclus
