#include "gclus/io.hpp"

#include <cmath>

namespace gclus {

namespace {

// JSON has no infinity; unreachable values are written as null.
nlohmann::json num(double x) {
	if (std::isfinite(x))
		return x;
	return nullptr;
}

} // namespace

nlohmann::json state_to_json(const ClusterState &s) {
	using nlohmann::json;
	const int n = s.n(), nj = s.cover().size();
	json j;
	j["n"] = n;
	j["cover_size"] = nj;
	j["centers"] = s.centers();
	json sub = json::array();
	for (int J = 0; J < nj; ++J) {
		json c = json::array(), d = json::array();
		for (int v = 0; v < n; ++v) {
			c.push_back(s.sub_center(J, v));
			d.push_back(num(s.sub_dist(J, v)));
		}
		sub.push_back({{"index", J}, {"c", c}, {"d", d}});
	}
	j["subclusterings"] = sub;
	json c = json::array(), d = json::array();
	for (int v = 0; v < n; ++v) {
		c.push_back(s.center_of(v));
		d.push_back(num(s.dist_of(v)));
	}
	j["c"] = c;
	j["d"] = d;
	j["cost_z"] = s.cost();
	json loss = json::object(), vol = json::object();
	for (int v : s.centers()) {
		loss[std::to_string(v)] = num(s.loss(v));
		vol[std::to_string(v)] = s.volume(v);
	}
	j["loss"] = loss;
	j["volume"] = vol;
	json groups = json::array();
	for (int tau = 1; tau <= s.params().t; ++tau) {
		json g = json::array();
		for (const auto &[key, cc] : s.group(tau))
			g.push_back({{"center", cc}, {"loss", num(key)}});
		groups.push_back(g);
	}
	j["groups"] = groups;
	return j;
}

nlohmann::json result_to_json(const ClusterResult &r, int k, const ClusterOptions &opt) {
	using nlohmann::json;
	const Solution &sol = r.solution;
	const RunStats &st = r.stats;
	json j;
	j["centers"] = sol.centers;
	j["assignment"] = sol.assignment;
	j["exact_cost"] = sol.exact_cost;
	j["estimated_cost"] = sol.estimated_cost;
	j["alpha_target"] = r.alpha_target;
	j["stats"] = {
	    {"iterations", st.positive_iterations},
	    {"volume_sum", st.volume_sum},
	    {"potential_initial", st.potential_initial},
	    {"potential_final", st.potential_final},
	    {"potential_max", st.potential_max},
	    {"draws", st.draws},
	    {"candidates_tested", st.candidates_tested},
	    {"probe_steps", st.probe_steps},
	    {"insert_modifications", st.insert_modifications},
	    {"delete_modifications", st.delete_modifications},
	    {"replicas", st.replicas},
	    {"effective_violations", st.effective_violations},
	    {"cost_trajectory", st.cost_trajectory},
	};
	j["bounds"] = {{"iterations", r.iteration_bound}, {"volume_sum", r.volume_bound}};
	j["params"] = {
	    {"k", k},
	    {"z", opt.z},
	    {"epsilon", opt.eps},
	    {"beta", r.params.beta},
	    {"s", st.s},
	    {"s_factor", opt.search.c0},
	    {"scheduler", scheduler_name(opt.search.scheduler)},
	    {"normalize", opt.normalize},
	    {"seed", opt.search.seed},
	    {"relax", r.params.relax},
	    {"dbar", r.params.dbar},
	    {"cover_size", r.params.cover_size},
	    {"groups", r.params.t},
	    {"cost_init", r.norm.cost_init},
	    {"weight_scale", r.norm.scale},
	    {"w_min", r.norm.w_min},
	    {"w_max", r.norm.w_max},
	    {"early_exit", r.early_exit},
	};
	if (opt.search.audit)
		j["audit"] = {{"failures", st.audit_failures}, {"first", st.first_audit_failure}};
	return j;
}

nlohmann::json opt_to_json(const OptResult &r, int k, double z) {
	return {{"centers", r.centers}, {"cost", r.cost}, {"k", k}, {"z", z}};
}

} // namespace gclus
