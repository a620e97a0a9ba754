#include "gclus/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gclus {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binom(int n, int k) {
	double r = 1;
	for (int i = 1; i <= k; ++i)
		r = r * (n - k + i) / i;
	return r;
}

bool approx_le(double a, double b, double tol) {
	if (a <= b)
		return true;
	return a - b <= tol * std::max({std::fabs(a), std::fabs(b), 1.0});
}

bool approx_eq(double a, double b, double scale, double tol) {
	if (a == b)
		return true;
	return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), scale, 1.0});
}

class Reporter {
public:
	explicit Reporter(ConsistencyReport &r) : r_(r) {}
	template <class... Args> void fail(const std::string &rule, Args &&...args) {
		if (r_.violations.size() >= 200)
			return;
		std::ostringstream os;
		os.precision(17);
		(os << ... << args);
		r_.violations.push_back({rule, os.str()});
	}

private:
	ConsistencyReport &r_;
};

} // namespace

double exact_cost(const Graph &g, const std::vector<int> &centers, double z) {
	if (centers.empty())
		throw EmptyCenters("exact_cost needs a nonempty center set");
	std::vector<Source> src;
	for (int c : centers)
		src.push_back({c, 0.0});
	DistArray da = multi_source_dijkstra(g, src);
	double sum = 0;
	for (double d : da.dist)
		sum += powz(d, z);
	return sum;
}

OptResult brute_force_opt(const Graph &g, int k, double z, double cap) {
	const int n = g.n();
	if (k < 1 || k > n)
		throw InvalidK("k must lie in [1, n]");
	if (binom(n, k) > cap)
		throw InstanceTooLarge("binom(" + std::to_string(n) + ", " + std::to_string(k) +
		                       ") exceeds the enumeration cap");
	std::vector<int> cur(k);
	for (int i = 0; i < k; ++i)
		cur[i] = i;
	OptResult best{cur, kInf};
	while (true) {
		const double c = exact_cost(g, cur, z);
		if (c < best.cost)
			best = {cur, c};
		int i = k - 1;
		while (i >= 0 && cur[i] == n - k + i)
			--i;
		if (i < 0)
			break;
		++cur[i];
		for (int j = i + 1; j < k; ++j)
			cur[j] = cur[j - 1] + 1;
	}
	return best;
}

double swap_distoid_cost(const Graph &g, const std::vector<int> &centers,
                         const std::vector<int> &assign, const std::vector<double> &dist,
                         int p, int q, double z, double eps) {
	const bool p_in = std::find(centers.begin(), centers.end(), p) != centers.end();
	const bool q_in = std::find(centers.begin(), centers.end(), q) != centers.end();
	if (p_in || !q_in)
		throw InvalidSwap("swap distoid needs p outside C and q inside C");
	std::vector<Source> src{{p, 0.0}};
	for (int c : centers)
		if (c != q)
			src.push_back({c, 0.0});
	const std::vector<double> after = multi_source_dijkstra(g, src).dist;
	const std::vector<double> from_p = dijkstra(g, p);
	const double f = std::exp2(2 * eps);
	double sum = 0;
	for (int v = 0; v < g.n(); ++v) {
		const double dv = assign[v] == q ? f * after[v] : std::min(dist[v], f * from_p[v]);
		sum += powz(dv, z);
	}
	return sum;
}

double swap_distoid_cost(const ClusterState &s, int p, int q) {
	std::vector<int> assign(s.n());
	std::vector<double> dist(s.n());
	for (int v = 0; v < s.n(); ++v) {
		assign[v] = s.center_of(v);
		dist[v] = s.dist_of(v);
	}
	return swap_distoid_cost(s.graph(), s.centers(), assign, dist, p, q, s.params().z,
	                         s.params().eps);
}

SuperEffective is_super_effective_noncenter(const ClusterState &s, int p) {
	if (s.is_center(p))
		return {};
	const double cost = s.cost();
	for (int q : s.centers()) {
		const double lhs = swap_distoid_cost(s, p, q);
		if (lhs <= (1 - s.params().eps * s.volume(q)) * cost)
			return {true, q};
	}
	return {};
}

bool ConsistencyReport::mentions(const std::string &rule) const {
	return std::any_of(violations.begin(), violations.end(),
	                   [&](const Violation &v) { return v.rule == rule; });
}

std::string ConsistencyReport::summary(size_t max_lines) const {
	std::ostringstream os;
	for (size_t i = 0; i < violations.size() && i < max_lines; ++i)
		os << violations[i].rule << ": " << violations[i].detail << '\n';
	if (violations.size() > max_lines)
		os << "... " << violations.size() - max_lines << " more\n";
	return os.str();
}

ConsistencyReport check_state_consistency(const Graph &g, const ClusterState &s, double tol) {
	ConsistencyReport report;
	Reporter r(report);
	const StateParams &P = s.params();
	const IsolationCover &cov = s.cover();
	const int n = g.n();
	const int nj = cov.size();
	const double z = P.z;
	const double f2 = std::exp2(2 * P.eps);

	std::vector<int> C;
	for (int v = 0; v < n; ++v)
		if (s.is_center(v))
			C.push_back(v);
	if (static_cast<int>(C.size()) != s.num_centers())
		r.fail("centers", "center count ", s.num_centers(), " but ", C.size(), " flags set");
	if (C.empty()) {
		r.fail("centers", "empty center set");
		return report;
	}

	// Exact distances from every center.
	std::vector<std::vector<double>> from(n);
	for (int c : C)
		from[c] = dijkstra(g, c);
	std::vector<double> dist_c(n, kInf);
	for (int c : C)
		for (int v = 0; v < n; ++v)
			dist_c[v] = std::min(dist_c[v], from[c][v]);

	std::vector<int64_t> vol(n, 0);
	bool all_nonempty = true;
	for (int j = 0; j < nj; ++j) {
		std::vector<int> CJ;
		for (int c : C)
			if (cov.contains(j, c))
				CJ.push_back(c);
		if (static_cast<int>(CJ.size()) != s.subset_size(j))
			r.fail("centers", "|C_J| mismatch at J=", j);
		if (CJ.empty()) {
			all_nonempty = false;
			for (int v = 0; v < n; ++v)
				if (s.sub_center(j, v) != kNone || s.sub_dist(j, v) != P.dbar)
					r.fail("A4", "J=", j, " v=", v, " not (none, dbar)");
			continue;
		}
		for (int c : CJ)
			if (s.sub_center(j, c) != c || s.sub_dist(j, c) != 0.0)
				r.fail("A1", "J=", j, " center ", c, " entry (", s.sub_center(j, c), ", ",
				       s.sub_dist(j, c), ")");
		for (const Edge &e : g.edges()) {
			const double du = s.sub_dist(j, e.u), dv = s.sub_dist(j, e.v);
			if (!approx_le(du, P.relax * (dv + e.w), 1e-12))
				r.fail("A2", "J=", j, " edge (", e.u, ",", e.v, ") ", du, " > relax*(", dv,
				       "+", e.w, ")");
			if (!approx_le(dv, P.relax * (du + e.w), 1e-12))
				r.fail("A2", "J=", j, " edge (", e.v, ",", e.u, ") ", dv, " > relax*(", du,
				       "+", e.w, ")");
		}
		for (int v = 0; v < n; ++v) {
			const int c = s.sub_center(j, v);
			const double d = s.sub_dist(j, v);
			if (c == kNone || !std::binary_search(CJ.begin(), CJ.end(), c)) {
				r.fail("A3", "J=", j, " v=", v, " labelled ", c, " which is not in C_J");
				continue;
			}
			vol[c] += g.deg(v);
			if (!approx_le(from[c][v], d, tol))
				r.fail("A3", "J=", j, " v=", v, " dist to label ", from[c][v], " > d_J ", d);
			double djc = kInf;
			for (int cc : CJ)
				djc = std::min(djc, from[cc][v]);
			if (!approx_le(d, std::min(P.dbar, f2 * djc), tol))
				r.fail("subclusterings", "J=", j, " v=", v, " d_J ", d, " exceeds min(dbar, ",
				       f2 * djc, ")");
		}
	}

	// Member lists are only checked indirectly through the volume identity;
	// the merged clustering is recomputed from the entries.
	double sum_dz = 0, exact = 0;
	std::vector<double> loss(n, 0.0);
	std::vector<char> loss_inf(n, 0);
	for (int v = 0; v < n; ++v) {
		double bd = kInf;
		int bc = kNone;
		bool bbot = true;
		for (int j = 0; j < nj; ++j) {
			const int c = s.sub_center(j, v);
			const double d = s.sub_dist(j, v);
			const bool bot = c == kNone;
			if (d < bd || (d == bd && (bot < bbot || (!bot && !bbot && c < bc)))) {
				bd = d;
				bc = c;
				bbot = bot;
			}
		}
		if (bc != s.center_of(v) || bd != s.dist_of(v))
			r.fail("B", "v=", v, " holds (", s.center_of(v), ", ", s.dist_of(v),
			       ") expected (", bc, ", ", bd, ")");
		const double dv = s.dist_of(v);
		if (!approx_le(dist_c[v], dv, tol) || !approx_le(dv, f2 * dist_c[v], tol))
			r.fail("clustering", "v=", v, " d ", dv, " outside [", dist_c[v], ", ",
			       f2 * dist_c[v], "]");
		const double leaf = s.tree()[s.tree_leaves() + v];
		if (leaf != powz(dv, z))
			r.fail("C", "leaf ", v, " = ", leaf, " expected ", powz(dv, z));
		sum_dz += powz(dv, z);
		exact += powz(dist_c[v], z);
		if (bc != kNone) {
			double m = kInf;
			for (int j = 0; j < nj; ++j)
				if (!cov.contains(j, bc))
					m = std::min(m, s.sub_dist(j, v));
			if (std::isinf(m))
				loss_inf[bc] = 1;
			else
				loss[bc] += powz(m, z) - powz(bd, z);
		}
	}
	const std::vector<double> &T = s.tree();
	for (int i = 1; i < s.tree_leaves(); ++i)
		if (T[i] != T[2 * i] + T[2 * i + 1])
			r.fail("C", "tree node ", i, " is not the sum of its children");
	for (int i = s.tree_leaves() + n; i < 2 * s.tree_leaves(); ++i)
		if (T[i] != 0.0)
			r.fail("C", "padding leaf ", i, " nonzero");
	const double cost = s.cost();
	if (!approx_eq(cost, sum_dz, 0, tol))
		r.fail("D", "cost_z ", cost, " but sum of d^z is ", sum_dz);
	if (!approx_le(exact, cost, tol) || !approx_le(cost, std::exp2(2 * P.eps * z) * exact, tol))
		r.fail("DScost", "cost_z ", cost, " outside [", exact, ", ",
		       std::exp2(2 * P.eps * z) * exact, "]");

	for (int c = 0; c < n; ++c) {
		const double got = s.loss(c);
		if (loss_inf[c]) {
			if (!std::isinf(got))
				r.fail("E", "loss[", c, "] = ", got, " expected +inf");
		} else if (!approx_eq(got, loss[c], cost, tol)) {
			r.fail("E", "loss[", c, "] = ", got, " expected ", loss[c]);
		}
		if (s.volume_count(c) != vol[c])
			r.fail("F", "volume count of ", c, " = ", s.volume_count(c), " expected ", vol[c]);
	}

	int64_t vsum = 0;
	for (int c = 0; c < n; ++c)
		vsum += vol[c];
	if (vsum > P.vol_total || vsum < static_cast<int64_t>(C.size()))
		r.fail("sum-rule", "volume sum ", vsum, "/", P.vol_total, " out of range");
	if (all_nonempty && vsum != P.vol_total)
		r.fail("sum-rule", "all C_J nonempty but volume sum ", vsum, "/", P.vol_total);

	for (int c = 0; c < n; ++c) {
		int tau = 0;
		if (vol[c] > 0) {
			tau = 1;
			while (static_cast<__int128>(vol[c]) << tau <= P.vol_total)
				++tau;
		}
		const bool member = s.is_center(c);
		if (member && tau == 0)
			r.fail("G", "center ", c, " has zero volume");
		if (!member && vol[c] != 0)
			r.fail("F", "noncenter ", c, " has volume");
		if (s.group_of(c) != (member ? tau : 0))
			r.fail("G", "center ", c, " in group ", s.group_of(c), " expected ", tau);
		if (member && tau >= 1 && tau <= P.t) {
			const double key = loss_inf[c] ? kInf : std::max(0.0, s.loss(c));
			if (!s.group(tau).count({key, c}))
				r.fail("H", "center ", c, " missing from group ", tau, " with key ", key);
		}
	}
	size_t members = 0;
	for (int tau = 1; tau <= P.t; ++tau) {
		members += s.group(tau).size();
		for (const auto &[key, c] : s.group(tau))
			if (!s.is_center(c) || s.group_of(c) != tau)
				r.fail("H", "group ", tau, " holds stale entry for ", c);
	}
	if (members != C.size())
		r.fail("H", "groups hold ", members, " entries for ", C.size(), " centers");
	return report;
}

Potential potential(const ClusterState &s) {
	const Graph &g = s.graph();
	Potential p;
	for (int j = 0; j < s.cover().size(); ++j)
		for (int v = 0; v < s.n(); ++v)
			p.phi += g.deg(v) * std::log2(1 + s.sub_dist(j, v));
	p.phi_max = static_cast<double>(s.params().vol_total) * std::log2(1 + s.params().dbar);
	return p;
}

} // namespace gclus
