#include "gclus/spanner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gclus/errors.hpp"

namespace gclus {

namespace {

uint64_t splitmix64(uint64_t x) {
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

} // namespace

PointSet read_points(std::istream &in) {
	PointSet ps;
	if (!(in >> ps.n >> ps.d) || ps.n < 0 || ps.d < 1)
		throw ParseError("expected header \"n d\"");
	ps.x.resize(static_cast<size_t>(ps.n) * ps.d);
	for (double &v : ps.x)
		if (!(in >> v))
			throw ParseError("point file truncated");
	return ps;
}

SetCollection read_sets(std::istream &in) {
	SetCollection sc;
	std::string line;
	while (std::getline(in, line)) {
		std::istringstream ls(line);
		std::vector<int> s;
		long long e;
		while (ls >> e) {
			if (e < 0 || e > 1'000'000'000)
				throw ParseError("element id out of range");
			s.push_back(static_cast<int>(e));
		}
		if (!ls.eof())
			throw ParseError("malformed set line");
		std::sort(s.begin(), s.end());
		s.erase(std::unique(s.begin(), s.end()), s.end());
		if (!s.empty())
			sc.universe = std::max(sc.universe, s.back() + 1);
		sc.sets.push_back(std::move(s));
	}
	return sc;
}

double lp_distance(const double *a, const double *b, int d, double p) {
	double s = 0;
	if (p == 2) {
		for (int i = 0; i < d; ++i)
			s += (a[i] - b[i]) * (a[i] - b[i]);
		return std::sqrt(s);
	}
	for (int i = 0; i < d; ++i)
		s += std::pow(std::fabs(a[i] - b[i]), p);
	return std::pow(s, 1 / p);
}

double jaccard_distance(const std::vector<int> &a, const std::vector<int> &b) {
	if (a.empty() && b.empty())
		return 0;
	size_t i = 0, j = 0, inter = 0;
	while (i < a.size() && j < b.size()) {
		if (a[i] == b[j])
			++inter, ++i, ++j;
		else if (a[i] < b[j])
			++i;
		else
			++j;
	}
	const size_t uni = a.size() + b.size() - inter;
	return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double LshFamily::rho(double r, double c) const {
	return std::log(1 / p1(r, c)) / std::log(1 / p2(r, c));
}

PStableFamily::PStableFamily(PointSet points, double p) : pts_(std::move(points)), p_(p) {
	if (!(p >= 1 && p <= 2))
		throw InvalidParams("p-stable family needs 1 <= p <= 2");
	if (pts_.n < 2)
		throw DegenerateDataset("need at least two points");
	dmin_ = std::numeric_limits<double>::infinity();
	for (int i = 0; i < pts_.n; ++i)
		for (int j = i + 1; j < pts_.n; ++j) {
			const double d = distance(i, j);
			dmax_ = std::max(dmax_, d);
			if (d > 0)
				dmin_ = std::min(dmin_, d);
		}
	if (!(dmax_ > 0))
		throw DegenerateDataset("all points are identical");
}

double PStableFamily::distance(int i, int j) const {
	return lp_distance(pts_.row(i), pts_.row(j), pts_.d, p_);
}

double PStableFamily::collision_probability(double t) const {
	if (auto it = cache_.find(t); it != cache_.end())
		return it->second;
	// P = (2 / (pi t)) * int_0^inf exp(-s^p) (1 - cos(t s)) / s^2 ds.
	const double upper = std::pow(45.0, 1 / p_);
	const int steps = 20000;
	const double h = upper / steps;
	auto f = [&](double s) {
		if (s == 0)
			return t * t / 2;
		const double half = std::sin(t * s / 2);
		return std::exp(-std::pow(s, p_)) * 2 * half * half / (s * s);
	};
	double sum = f(0) + f(upper);
	for (int i = 1; i < steps; ++i)
		sum += f(i * h) * (i % 2 ? 4 : 2);
	const double prob = 2 / (std::numbers::pi * t) * sum * h / 3;
	cache_[t] = prob;
	return prob;
}

double PStableFamily::p1(double r, double c) const {
	(void)r;
	(void)c;
	return collision_probability(4.0);
}

double PStableFamily::p2(double r, double c) const {
	(void)r;
	return collision_probability(4.0 / c);
}

double PStableFamily::stable_variate(std::mt19937_64 &rng) const {
	if (p_ == 2)
		return std::normal_distribution<double>(0.0, 1.0)(rng) * std::numbers::sqrt2;
	if (p_ == 1)
		return std::cauchy_distribution<double>(0.0, 1.0)(rng);
	// Chambers-Mallows-Stuck.
	const double th =
	    std::uniform_real_distribution<double>(-std::numbers::pi / 2, std::numbers::pi / 2)(rng);
	const double W = std::exponential_distribution<double>(1.0)(rng);
	return std::sin(p_ * th) / std::pow(std::cos(th), 1 / p_) *
	       std::pow(std::cos(th - p_ * th) / W, (1 - p_) / p_);
}

PStableFamily::Hash PStableFamily::sample(double r, std::mt19937_64 &rng) const {
	Hash h;
	h.w = 4 * r;
	h.a.resize(pts_.d);
	for (double &v : h.a)
		v = stable_variate(rng);
	h.b = std::uniform_real_distribution<double>(0.0, h.w)(rng);
	return h;
}

int64_t PStableFamily::evaluate(const Hash &h, const double *x) {
	double dot = 0;
	for (size_t i = 0; i < h.a.size(); ++i)
		dot += h.a[i] * x[i];
	return static_cast<int64_t>(std::floor((dot + h.b) / h.w));
}

std::vector<int64_t> PStableFamily::sample_keys(double r, std::mt19937_64 &rng) const {
	const Hash h = sample(r, rng);
	std::vector<int64_t> keys(pts_.n);
	for (int i = 0; i < pts_.n; ++i)
		keys[i] = evaluate(h, pts_.row(i));
	return keys;
}

std::vector<double> PStableFamily::scales(double c) const {
	(void)c;
	const int L = static_cast<int>(std::ceil(std::log2(dmax_ / dmin_))) + 1;
	std::vector<double> out;
	for (int l = 0; l < L; ++l)
		out.push_back(dmin_ * std::ldexp(1.0, l));
	return out;
}

MinHashFamily::MinHashFamily(SetCollection sets) : sets_(std::move(sets)) {
	if (sets_.sets.size() < 2)
		throw DegenerateDataset("need at least two sets");
	if (sets_.universe < 1)
		throw DegenerateDataset("universe is empty");
	bool all_same = true;
	for (size_t i = 1; i < sets_.sets.size() && all_same; ++i)
		all_same = sets_.sets[i] == sets_.sets[0];
	if (all_same)
		throw DegenerateDataset("all sets are identical");
}

double MinHashFamily::distance(int i, int j) const {
	return jaccard_distance(sets_.sets[i], sets_.sets[j]);
}

void MinHashFamily::check_scale(double r, double c) const {
	if (r < 1.0 / sets_.universe || r > 1 / (2 * c))
		throw ScaleOutOfRange("min-hash scale must lie in [1/|U|, 1/(2c)]");
}

double MinHashFamily::p1(double r, double c) const {
	check_scale(r, c);
	return 1 - r;
}

double MinHashFamily::p2(double r, double c) const {
	check_scale(r, c);
	return 1 - c * r;
}

int64_t MinHashFamily::evaluate(const Hash &h, const std::vector<int> &set) {
	int64_t best = -1;
	uint64_t bp = 0;
	for (int e : set) {
		const uint64_t pr = splitmix64(h.seed ^ splitmix64(static_cast<uint64_t>(e)));
		if (best < 0 || pr < bp) {
			bp = pr;
			best = e;
		}
	}
	return best;
}

std::vector<int64_t> MinHashFamily::sample_keys(double r, std::mt19937_64 &rng) const {
	(void)r;
	const Hash h = sample(rng);
	std::vector<int64_t> keys(sets_.sets.size());
	for (size_t i = 0; i < keys.size(); ++i)
		keys[i] = evaluate(h, sets_.sets[i]);
	return keys;
}

std::vector<double> MinHashFamily::scales(double c) const {
	std::vector<double> out;
	const int lo = static_cast<int>(std::ceil(-std::log2(static_cast<double>(sets_.universe))));
	const int hi = static_cast<int>(std::floor(-std::log2(2 * c)));
	for (int l = lo; l <= hi; ++l)
		out.push_back(std::ldexp(1.0, l));
	return out;
}

std::unique_ptr<LshFamily> pstable_lp_family(PointSet points, double p) {
	return std::make_unique<PStableFamily>(std::move(points), p);
}

std::unique_ptr<LshFamily> minhash_jaccard_family(SetCollection sets) {
	return std::make_unique<MinHashFamily>(std::move(sets));
}

SpannerParams make_spanner_params(const LshFamily &family, double c, double c1, uint64_t seed) {
	if (!(c > 1))
		throw InvalidParams("stretch target c must exceed 1");
	SpannerParams sp;
	sp.c = c;
	sp.c1 = c1;
	sp.seed = seed;
	sp.scales = family.scales(c);
	sp.L = static_cast<int>(sp.scales.size());
	const double n = family.size();
	sp.N = sp.scales.empty() ? 1 : 0;
	for (double r : sp.scales) {
		const double p1 = family.p1(r, c), p2 = family.p2(r, c);
		if (!(p1 > p2 && p2 > 0 && p1 < 1))
			throw InvalidParams("family is not sensitive at this scale");
		sp.M.push_back(std::max(1, static_cast<int>(std::ceil(std::log(n * n * n) /
		                                                      std::log(1 / p2)))));
		const double rho = std::log(1 / p1) / std::log(1 / p2);
		const auto N = static_cast<int64_t>(
		    std::ceil(c1 / p1 * std::pow(n, 3 * rho) * std::log(n)));
		sp.N = std::max(sp.N, std::max<int64_t>(N, 1));
	}
	return sp;
}

Spanner build_lsh_spanner(const LshFamily &family, const SpannerParams &params) {
	const int n = family.size();
	if (n < 2)
		throw DegenerateDataset("need at least two points");
	Spanner out;
	std::vector<uint64_t> pairs;
	auto add = [&](int s, int u) {
		if (s == u)
			return;
		if (s > u)
			std::swap(s, u);
		pairs.push_back((static_cast<uint64_t>(s) << 32) | static_cast<uint32_t>(u));
	};

	std::vector<int> order(n);
	std::vector<uint64_t> fp(n);
	std::vector<int64_t> keys;
	for (int64_t rep = 0; rep < params.N; ++rep) {
		std::mt19937_64 rng(splitmix64(params.seed ^ splitmix64(static_cast<uint64_t>(rep))));
		for (size_t l = 0; l < params.scales.size(); ++l) {
			const int M = params.M[l];
			keys.assign(static_cast<size_t>(n) * M, 0);
			std::fill(fp.begin(), fp.end(), 0);
			for (int h = 0; h < M; ++h) {
				const std::vector<int64_t> k = family.sample_keys(params.scales[l], rng);
				for (int i = 0; i < n; ++i) {
					keys[static_cast<size_t>(i) * M + h] = k[i];
					fp[i] = splitmix64(fp[i] ^ static_cast<uint64_t>(k[i]));
				}
			}
			auto key_less = [&](int a, int b) {
				const int64_t *ka = keys.data() + static_cast<size_t>(a) * M;
				const int64_t *kb = keys.data() + static_cast<size_t>(b) * M;
				if (std::lexicographical_compare(ka, ka + M, kb, kb + M))
					return true;
				if (std::lexicographical_compare(kb, kb + M, ka, ka + M))
					return false;
				return a < b;
			};
			std::iota(order.begin(), order.end(), 0);
			std::sort(order.begin(), order.end(), [&](int a, int b) {
				if (fp[a] != fp[b])
					return fp[a] < fp[b];
				return key_less(a, b);
			});
			// Buckets are runs of equal full keys; each run is a star from its
			// smallest id, which comes first in the run.
			for (int i = 0; i < n;) {
				int j = i + 1;
				const int64_t *ki = keys.data() + static_cast<size_t>(order[i]) * M;
				while (j < n && fp[order[j]] == fp[order[i]] &&
				       std::equal(ki, ki + M, keys.data() + static_cast<size_t>(order[j]) * M))
					++j;
				for (int t = i + 1; t < j; ++t)
					add(order[i], order[t]);
				i = j;
			}
		}
	}
	if (family.needs_hub()) {
		out.stats.hub_star = true;
		for (int v = 1; v < n; ++v)
			add(0, v);
	}
	out.stats.candidate_edges = static_cast<int64_t>(pairs.size());
	std::sort(pairs.begin(), pairs.end());
	pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

	// Connectivity fallback.
	std::vector<int> parent(n);
	std::iota(parent.begin(), parent.end(), 0);
	auto find = [&](int x) {
		while (parent[x] != x)
			x = parent[x] = parent[parent[x]];
		return x;
	};
	int comps = n;
	for (uint64_t p : pairs) {
		const int a = find(static_cast<int>(p >> 32)), b = find(static_cast<int>(p & 0xffffffffu));
		if (a != b)
			parent[a] = b, --comps;
	}
	if (comps > 1) {
		out.stats.fallback_star = true;
		for (int v = 1; v < n; ++v)
			pairs.push_back(static_cast<uint64_t>(v));
		std::sort(pairs.begin(), pairs.end());
		pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
	}

	std::vector<Edge> edges;
	edges.reserve(pairs.size());
	for (uint64_t p : pairs) {
		const int a = static_cast<int>(p >> 32), b = static_cast<int>(p & 0xffffffffu);
		edges.push_back({a, b, family.distance(a, b)});
	}
	out.stats.edges = static_cast<int64_t>(edges.size());
	out.graph = load_graph(n, edges);
	return out;
}

} // namespace gclus
