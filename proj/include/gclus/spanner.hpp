#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gclus/graph.hpp"

namespace gclus {

struct PointSet {
	int n = 0;
	int d = 0;
	std::vector<double> x; // row-major n x d
	const double *row(int i) const { return x.data() + static_cast<size_t>(i) * d; }
};

struct SetCollection {
	std::vector<std::vector<int>> sets; // sorted, unique
	int universe = 0;
};

PointSet read_points(std::istream &in);
SetCollection read_sets(std::istream &in);

double lp_distance(const double *a, const double *b, int d, double p);
double jaccard_distance(const std::vector<int> &a, const std::vector<int> &b);

// A locality-sensitive family bound to a dataset.
class LshFamily {
public:
	virtual ~LshFamily() = default;
	virtual int size() const = 0;
	virtual double distance(int i, int j) const = 0;
	virtual double p1(double r, double c) const = 0;
	virtual double p2(double r, double c) const = 0;
	double rho(double r, double c) const;
	// Samples one hash at scale r and returns its key on every point.
	virtual std::vector<int64_t> sample_keys(double r, std::mt19937_64 &rng) const = 0;
	// Scales the construction iterates over for stretch target c.
	virtual std::vector<double> scales(double c) const = 0;
	virtual bool needs_hub() const { return false; }
};

// h(x) = floor((<a, x> + b) / w) with a p-stable, b uniform in [0, w) and
// w = 4r. The stable law is normalized to characteristic exp(-|t|^p).
class PStableFamily : public LshFamily {
public:
	struct Hash {
		std::vector<double> a;
		double b;
		double w;
	};

	PStableFamily(PointSet points, double p);

	int size() const override { return pts_.n; }
	double distance(int i, int j) const override;
	double p1(double r, double c) const override;
	double p2(double r, double c) const override;
	std::vector<int64_t> sample_keys(double r, std::mt19937_64 &rng) const override;
	std::vector<double> scales(double c) const override;

	Hash sample(double r, std::mt19937_64 &rng) const;
	static int64_t evaluate(const Hash &h, const double *x);
	double stable_variate(std::mt19937_64 &rng) const;
	// Probability that two points at distance u share a bucket of width w.
	double collision_probability(double w_over_u) const;
	double p() const { return p_; }
	const PointSet &points() const { return pts_; }
	double min_distance() const { return dmin_; }
	double max_distance() const { return dmax_; }

private:
	PointSet pts_;
	double p_;
	double dmin_ = 0, dmax_ = 0;
	mutable std::map<double, double> cache_;
};

// Min-hash over a random priority assignment on the universe.
class MinHashFamily : public LshFamily {
public:
	struct Hash {
		uint64_t seed;
	};

	explicit MinHashFamily(SetCollection sets);

	int size() const override { return static_cast<int>(sets_.sets.size()); }
	double distance(int i, int j) const override;
	double p1(double r, double c) const override;
	double p2(double r, double c) const override;
	std::vector<int64_t> sample_keys(double r, std::mt19937_64 &rng) const override;
	std::vector<double> scales(double c) const override;
	bool needs_hub() const override { return true; }

	Hash sample(std::mt19937_64 &rng) const { return {rng()}; }
	static int64_t evaluate(const Hash &h, const std::vector<int> &set);
	void check_scale(double r, double c) const;

private:
	SetCollection sets_;
};

std::unique_ptr<LshFamily> pstable_lp_family(PointSet points, double p);
std::unique_ptr<LshFamily> minhash_jaccard_family(SetCollection sets);

struct SpannerParams {
	double c = 4;
	double c1 = 3;
	uint64_t seed = 0;
	int L = 0;
	std::vector<double> scales;
	std::vector<int> M; // per scale
	int64_t N = 0;
};

SpannerParams make_spanner_params(const LshFamily &family, double c, double c1 = 3,
                                  uint64_t seed = 0);

struct SpannerStats {
	int64_t candidate_edges = 0;
	int64_t edges = 0;
	bool hub_star = false;
	bool fallback_star = false;
};

struct Spanner {
	Graph graph;
	SpannerStats stats;
};

Spanner build_lsh_spanner(const LshFamily &family, const SpannerParams &params);

} // namespace gclus
