#include "gclus/cluster_state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <queue>
#include <tuple>

namespace gclus {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

uint64_t bits_of(double x) { return std::bit_cast<uint64_t>(x); }
uint64_t bits_of(int32_t x) { return static_cast<uint32_t>(x); }
uint64_t bits_of(int64_t x) { return static_cast<uint64_t>(x); }

template <class T> T from_bits(uint64_t b);
template <> double from_bits<double>(uint64_t b) { return std::bit_cast<double>(b); }
template <> int32_t from_bits<int32_t>(uint64_t b) {
	return static_cast<int32_t>(static_cast<uint32_t>(b));
}
template <> int64_t from_bits<int64_t>(uint64_t b) { return static_cast<int64_t>(b); }

template <class T> bool same_bits(const std::vector<T> &a, const std::vector<T> &b) {
	return a.size() == b.size() &&
	       (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}

} // namespace

StateParams make_params(const Graph &g, const IsolationCover &cover, double z,
                        double eps, int beta) {
	if (!(z >= 1.0) || !std::isfinite(z))
		throw InvalidParams("z must be >= 1");
	if (!(eps >= 0.0) || eps > 1.0 / (10.0 * z) * (1 + 1e-12))
		throw InvalidEpsilon("epsilon must lie in [0, 1/(10z)]");
	if (g.min_weight() < 1.0)
		throw InvalidParams("minimum edge weight must be at least 1 (normalize first)");
	if (cover.n() != g.n())
		throw InvalidParams("cover size does not match graph");
	StateParams p;
	p.z = z;
	p.eps = eps;
	p.beta = beta > 0 ? beta : g.n() - 1;
	p.wbar = g.max_weight();
	p.dbar = std::exp2(eps) * p.beta * p.wbar;
	p.relax = std::exp(eps * std::log(2.0) / p.beta);
	p.cover_size = cover.size();
	p.vol_total = 2 * g.m() * cover.size();
	p.t = static_cast<int>(std::bit_width(static_cast<uint64_t>(p.vol_total)));
	return p;
}

ClusterState::ClusterState(const Graph &g, const IsolationCover &cover,
                           const StateParams &p, const std::vector<int> &centers)
    : g_(&g), cover_(&cover), p_(p), n_(g.n()), nj_(cover.size()) {
	if (centers.empty())
		throw EmptyCenters("initial center set is empty");
	leaves_ = 1;
	while (leaves_ < n_)
		leaves_ *= 2;
	const size_t nn = static_cast<size_t>(nj_) * n_;
	sub_c_.assign(nn, kNone);
	sub_d_.assign(nn, p_.dbar);
	next_.assign(nn, kNone);
	prev_.assign(nn, kNone);
	head_.assign(nn, kNone);
	clus_c_.assign(n_, kNone);
	clus_d_.assign(n_, 0.0);
	gap_.assign(n_, 0.0);
	tree_.assign(2 * static_cast<size_t>(leaves_), 0.0);
	loss_hi_.assign(n_, 0.0);
	loss_lo_.assign(n_, 0.0);
	loss_inf_.assign(n_, 0);
	vol_.assign(n_, 0);
	grp_.assign(n_, 0);
	key_.assign(n_, 0.0);
	is_center_.assign(n_, 0);
	cj_size_.assign(nj_, 0);
	groups_.resize(p_.t + 1);
	scratch_in_.assign(n_, 0);
	scratch_seen_.assign(n_, 0);

	for (int c : centers) {
		if (c < 0 || c >= n_)
			throw VertexOutOfRange("center out of range");
		if (!is_center_[c]) {
			is_center_[c] = 1;
			++k_;
		}
	}
	for (int j = 0; j < nj_; ++j) {
		std::vector<Source> src;
		for (int c = 0; c < n_; ++c)
			if (is_center_[c] && cover.contains(j, c))
				src.push_back({c, 0.0});
		cj_size_[j] = static_cast<int32_t>(src.size());
		if (src.empty())
			continue;
		DistArray da = multi_source_dijkstra(g, src);
		for (int v = 0; v < n_; ++v) {
			sub_c_[idx(j, v)] = da.label[v];
			sub_d_[idx(j, v)] = da.dist[v];
			link(j, da.label[v], v);
			vol_[da.label[v]] += g.deg(v);
		}
	}
	for (int v = 0; v < n_; ++v)
		sync_vertex(v);
	for (int c = 0; c < n_; ++c)
		regroup(c);
}

std::vector<int> ClusterState::centers() const {
	std::vector<int> out;
	for (int v = 0; v < n_; ++v)
		if (is_center_[v])
			out.push_back(v);
	return out;
}

double ClusterState::loss(int c) const {
	if (loss_inf_[c] > 0)
		return kInf;
	return loss_hi_[c] + loss_lo_[c];
}

int ClusterState::tau_of_count(int64_t cnt) const {
	return static_cast<int>(std::bit_width(static_cast<uint64_t>(p_.vol_total / cnt)));
}

template <class T> void ClusterState::put(Field f, std::vector<T> &arr, size_t i, T val) {
	if (bits_of(arr[i]) == bits_of(val))
		return;
	if (!tx_.empty())
		log_.push_back({f, 0, static_cast<int64_t>(i), bits_of(arr[i])});
	arr[i] = val;
}

void ClusterState::set_k(int k) {
	if (!tx_.empty())
		log_.push_back({K, 0, 0, static_cast<uint64_t>(k_)});
	k_ = k;
}

void ClusterState::unlink(int j, int c, int v) {
	const size_t e = idx(j, v);
	const int p = prev_[e], nx = next_[e];
	if (p != kNone)
		put(Next, next_, idx(j, p), nx);
	else
		put(Head, head_, idx(j, c), nx);
	if (nx != kNone)
		put(Prev, prev_, idx(j, nx), p);
	put(Next, next_, e, int32_t{kNone});
	put(Prev, prev_, e, int32_t{kNone});
}

void ClusterState::link(int j, int c, int v) {
	const size_t e = idx(j, v);
	const int h = head_[idx(j, c)];
	put(Next, next_, e, int32_t{h});
	put(Prev, prev_, e, int32_t{kNone});
	if (h != kNone)
		put(Prev, prev_, idx(j, h), int32_t{v});
	put(Head, head_, idx(j, c), int32_t{v});
}

void ClusterState::tree_set(int v, double val) {
	size_t i = static_cast<size_t>(leaves_) + v;
	put(Tree, tree_, i, val);
	for (i /= 2; i >= 1; i /= 2)
		put(Tree, tree_, i, tree_[2 * i] + tree_[2 * i + 1]);
}

void ClusterState::add_loss(int c, double x) {
	if (std::isinf(x)) {
		put(LossInf, loss_inf_, c, loss_inf_[c] + (x > 0 ? 1 : -1));
		return;
	}
	// Double-double accumulation keeps long add/remove sequences from drifting.
	const double hi = loss_hi_[c], lo = loss_lo_[c];
	const double s = hi + x;
	const double bp = s - hi;
	const double e = (hi - (s - bp)) + (x - bp);
	const double lo2 = lo + e;
	const double hi2 = s + lo2;
	const double lo3 = lo2 - (hi2 - s);
	put(LossHi, loss_hi_, c, hi2);
	put(LossLo, loss_lo_, c, lo3);
}

double ClusterState::gap_for(int v, int c, double d) const {
	if (c == kNone)
		return 0.0;
	double m = kInf;
	for (int j = 0; j < nj_; ++j)
		if (!cover_->contains(j, c))
			m = std::min(m, sub_d_[idx(j, v)]);
	if (std::isinf(m))
		return kInf;
	return powz(m, p_.z) - powz(d, p_.z);
}

void ClusterState::regroup(int c) {
	if (c == kNone)
		return;
	const int tau = vol_[c] > 0 ? tau_of_count(vol_[c]) : 0;
	const double key = loss_inf_[c] > 0 ? kInf : std::max(0.0, loss_hi_[c] + loss_lo_[c]);
	if (tau == grp_[c] && bits_of(key) == bits_of(key_[c]))
		return;
	if (grp_[c] != 0) {
		groups_[grp_[c]].erase({key_[c], c});
		if (!tx_.empty())
			log_.push_back({GroupErase, grp_[c], c, bits_of(key_[c])});
	}
	put(Grp, grp_, c, int32_t{tau});
	put(Key, key_, c, key);
	if (tau != 0) {
		groups_[tau].insert({key, c});
		if (!tx_.empty())
			log_.push_back({GroupIns, tau, c, bits_of(key)});
	}
}

void ClusterState::sync_vertex(int v) {
	double bd = kInf;
	int bc = kNone;
	bool bbot = true;
	for (int j = 0; j < nj_; ++j) {
		const int c = sub_c_[idx(j, v)];
		const double d = sub_d_[idx(j, v)];
		const bool bot = c == kNone;
		if (d < bd || (d == bd && (bot < bbot || (!bot && !bbot && c < bc)))) {
			bd = d;
			bc = c;
			bbot = bot;
		}
	}
	const double ng = gap_for(v, bc, bd);
	const int oc = clus_c_[v];
	const bool changed = oc != bc || bits_of(ng) != bits_of(gap_[v]);
	if (changed && oc != kNone)
		add_loss(oc, -gap_[v]);
	put(ClusC, clus_c_, v, int32_t{bc});
	if (bits_of(clus_d_[v]) != bits_of(bd)) {
		put(ClusD, clus_d_, v, bd);
		tree_set(v, powz(bd, p_.z));
	}
	put(Gap, gap_, v, ng);
	if (changed) {
		if (bc != kNone)
			add_loss(bc, ng);
		regroup(oc);
		regroup(bc);
	}
}

void ClusterState::set_entry(int j, int v, int c, double d) {
	const size_t e = idx(j, v);
	const int oc = sub_c_[e];
	if (oc == c && bits_of(sub_d_[e]) == bits_of(d))
		return;
	++total_mods_;
	if (tracing_)
		++trace_.modifications;
	if (oc != c) {
		if (oc != kNone) {
			unlink(j, oc, v);
			put(Vol, vol_, oc, vol_[oc] - g_->deg(v));
		}
		if (c != kNone) {
			link(j, c, v);
			put(Vol, vol_, c, vol_[c] + g_->deg(v));
		}
	}
	put(SubC, sub_c_, e, int32_t{c});
	put(SubD, sub_d_, e, d);
	sync_vertex(v);
	if (oc != c) {
		regroup(oc);
		regroup(c);
	}
}

void ClusterState::insert_entry(int j, int v, int c, double d) {
	if (tracing_) {
		const double old = sub_d_[idx(j, v)];
		trace_.drops.push_back(g_->deg(v) * (std::log2(1 + old) - std::log2(1 + d)));
		trace_.from_empty.push_back(sub_c_[idx(j, v)] == kNone);
	}
	set_entry(j, v, c, d);
}

ClusterState::InsertCursor::InsertCursor(ClusterState &s, int c) : s_(&s), c_(c) {
	if (c < 0 || c >= s.n_)
		throw VertexOutOfRange("insert: vertex out of range");
	if (s.is_center_[c])
		throw AlreadyCenter("vertex " + std::to_string(c) + " is already a center");
	if (s.tracing_)
		s.trace_ = OpTrace{};
}

bool ClusterState::InsertCursor::step() {
	if (done_)
		return false;
	ClusterState &S = *s_;
	const std::vector<int> &mem = S.cover_->membership(c_);
	while (true) {
		if (stack_.empty()) {
			if (started_) {
				++jpos_;
				started_ = false;
			}
			if (jpos_ == mem.size()) {
				for (int j : mem)
					S.put(CjSize, S.cj_size_, j, S.cj_size_[j] + 1);
				S.put(IsCenter, S.is_center_, c_, int32_t{1});
				S.set_k(S.k_ + 1);
				done_ = true;
				return false;
			}
			started_ = true;
			S.insert_entry(mem[jpos_], c_, c_, 0.0);
			stack_.push_back({c_, 0});
			return true;
		}
		const int j = mem[jpos_];
		auto &top = stack_.back();
		const int v = top.first;
		auto nb = S.g_->neighbors(v);
		if (top.second == static_cast<int>(nb.size())) {
			stack_.pop_back();
			continue;
		}
		const Arc a = nb[top.second++];
		const double x = S.sub_d_[S.idx(j, v)] + a.w;
		const size_t e = S.idx(j, a.to);
		if (S.sub_c_[e] == kNone || S.sub_d_[e] > S.p_.relax * x) {
			S.insert_entry(j, a.to, c_, x);
			stack_.push_back({a.to, 0});
			return true;
		}
	}
}

void ClusterState::insert(int c) {
	InsertCursor cur(*this, c);
	while (cur.step()) {
	}
}

void ClusterState::erase(int c) {
	if (c < 0 || c >= n_)
		throw VertexOutOfRange("delete: vertex out of range");
	if (!is_center_[c])
		throw NotACenter("vertex " + std::to_string(c) + " is not a center");
	if (k_ == 1)
		throw WouldEmptyCenters("cannot delete the last center");
	if (tracing_)
		trace_ = OpTrace{};

	using Item = std::tuple<double, int, int>; // (d, is-empty, vertex)
	for (int j : cover_->membership(c)) {
		std::vector<int> touched, region;
		if (cj_size_[j] == 1) {
			for (int v = 0; v < n_; ++v)
				set_entry(j, v, kNone, p_.dbar);
			if (tracing_) {
				for (int v = 0; v < n_; ++v)
					touched.push_back(v);
				region = touched;
			}
		} else {
			std::vector<int> U;
			for (int v = head_[idx(j, c)]; v != kNone; v = next_[idx(j, v)])
				U.push_back(v);
			for (int v : U)
				scratch_in_[v] = 1;
			std::vector<int> boundary;
			for (int v : U)
				for (const Arc &a : g_->neighbors(v))
					if (!scratch_in_[a.to] && !scratch_seen_[a.to]) {
						scratch_seen_[a.to] = 1;
						boundary.push_back(a.to);
					}
			for (int v : U)
				set_entry(j, v, kNone, kInf);

			std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
			for (int v : U)
				pq.emplace(kInf, 1, v);
			for (int v : boundary) {
				pq.emplace(sub_d_[idx(j, v)], sub_c_[idx(j, v)] == kNone, v);
				if (tracing_)
					touched.push_back(v);
			}
			if (tracing_)
				touched.insert(touched.end(), U.begin(), U.end());
			std::vector<int> done;
			while (!pq.empty()) {
				auto [d, bot, v] = pq.top();
				pq.pop();
				const size_t ev = idx(j, v);
				if (bits_of(d) != bits_of(sub_d_[ev]) || bot != (sub_c_[ev] == kNone) ||
				    scratch_seen_[v] == 2)
					continue;
				if (scratch_seen_[v] == 0)
					done.push_back(v);
				scratch_seen_[v] = 2;
				if (tracing_)
					touched.push_back(v);
				if (bot)
					continue;
				for (const Arc &a : g_->neighbors(v)) {
					if (!scratch_in_[a.to])
						continue;
					const double x = p_.relax * (sub_d_[ev] + a.w);
					if (tracing_)
						touched.push_back(a.to);
					if (sub_d_[idx(j, a.to)] > x) {
						set_entry(j, a.to, sub_c_[ev], x);
						pq.emplace(x, 0, a.to);
					}
				}
			}
			if (tracing_) {
				region = U;
				region.insert(region.end(), boundary.begin(), boundary.end());
			}
			for (int v : U)
				scratch_in_[v] = 0, scratch_seen_[v] = 0;
			for (int v : boundary)
				scratch_seen_[v] = 0;
			for (int v : done)
				scratch_seen_[v] = 0;
		}
		if (tracing_) {
			std::sort(touched.begin(), touched.end());
			touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
			std::sort(region.begin(), region.end());
			trace_.indices.push_back(j);
			trace_.touched.push_back(std::move(touched));
			trace_.region.push_back(std::move(region));
		}
	}
	for (int j : cover_->membership(c))
		put(CjSize, cj_size_, j, cj_size_[j] - 1);
	put(IsCenter, is_center_, c, int32_t{0});
	set_k(k_ - 1);
}

std::optional<std::pair<int, double>> ClusterState::group_min_loss(int tau, int exclude) const {
	if (tau < 1 || tau > p_.t)
		throw InvalidParams("group index out of range");
	for (const auto &[key, c] : groups_[tau]) {
		if (c == exclude)
			continue;
		return std::make_pair(c, key);
	}
	return std::nullopt;
}

int sample_sum_tree(const std::vector<double> &tree, int leaves, std::mt19937_64 &rng) {
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	size_t i = 1;
	while (i < static_cast<size_t>(leaves)) {
		const double L = tree[2 * i], R = tree[2 * i + 1];
		if (R <= 0)
			i = 2 * i;
		else if (L <= 0)
			i = 2 * i + 1;
		else
			i = unit(rng) * (L + R) < L ? 2 * i : 2 * i + 1;
	}
	return static_cast<int>(i - leaves);
}

int ClusterState::sample_noncenter(std::mt19937_64 &rng) const {
	if (!(cost() > 0))
		throw ZeroCost("cannot sample: objective estimator is zero");
	return sample_sum_tree(tree_, leaves_, rng);
}

ClusterState::Token ClusterState::transaction() {
	tx_.emplace_back(++next_token_, log_.size());
	return next_token_;
}

void ClusterState::commit(Token t) {
	if (tx_.empty() || tx_.back().first != t)
		throw TokenOrderViolation("commit with a token that is not innermost");
	tx_.pop_back();
	if (tx_.empty())
		log_.clear();
}

void ClusterState::rollback(Token t) {
	// Rolling back an outer scope discards every scope nested inside it.
	auto it = std::find_if(tx_.rbegin(), tx_.rend(), [t](const auto &e) { return e.first == t; });
	if (it == tx_.rend())
		throw TokenOrderViolation("rollback with a stale or unknown token");
	tx_.erase(it.base(), tx_.end());
	const size_t mark = tx_.back().second;
	while (log_.size() > mark) {
		const Rec r = log_.back();
		log_.pop_back();
		const size_t i = static_cast<size_t>(r.a);
		switch (r.field) {
		case SubC: sub_c_[i] = from_bits<int32_t>(r.bits); break;
		case SubD: sub_d_[i] = from_bits<double>(r.bits); break;
		case Next: next_[i] = from_bits<int32_t>(r.bits); break;
		case Prev: prev_[i] = from_bits<int32_t>(r.bits); break;
		case Head: head_[i] = from_bits<int32_t>(r.bits); break;
		case ClusC: clus_c_[i] = from_bits<int32_t>(r.bits); break;
		case ClusD: clus_d_[i] = from_bits<double>(r.bits); break;
		case Gap: gap_[i] = from_bits<double>(r.bits); break;
		case Tree: tree_[i] = from_bits<double>(r.bits); break;
		case LossHi: loss_hi_[i] = from_bits<double>(r.bits); break;
		case LossLo: loss_lo_[i] = from_bits<double>(r.bits); break;
		case LossInf: loss_inf_[i] = from_bits<int32_t>(r.bits); break;
		case Vol: vol_[i] = from_bits<int64_t>(r.bits); break;
		case Grp: grp_[i] = from_bits<int32_t>(r.bits); break;
		case Key: key_[i] = from_bits<double>(r.bits); break;
		case IsCenter: is_center_[i] = from_bits<int32_t>(r.bits); break;
		case CjSize: cj_size_[i] = from_bits<int32_t>(r.bits); break;
		case K: k_ = static_cast<int>(r.bits); break;
		case GroupIns: groups_[r.b].erase({from_bits<double>(r.bits), static_cast<int>(r.a)}); break;
		case GroupErase: groups_[r.b].insert({from_bits<double>(r.bits), static_cast<int>(r.a)}); break;
		}
	}
	tx_.pop_back();
	if (tx_.empty())
		log_.clear();
}

bool ClusterState::operator==(const ClusterState &o) const {
	return n_ == o.n_ && nj_ == o.nj_ && k_ == o.k_ && same_bits(sub_c_, o.sub_c_) &&
	       same_bits(sub_d_, o.sub_d_) && same_bits(next_, o.next_) &&
	       same_bits(prev_, o.prev_) && same_bits(head_, o.head_) &&
	       same_bits(clus_c_, o.clus_c_) && same_bits(clus_d_, o.clus_d_) &&
	       same_bits(gap_, o.gap_) && same_bits(tree_, o.tree_) &&
	       same_bits(loss_hi_, o.loss_hi_) && same_bits(loss_lo_, o.loss_lo_) &&
	       same_bits(loss_inf_, o.loss_inf_) && same_bits(vol_, o.vol_) &&
	       same_bits(grp_, o.grp_) && same_bits(key_, o.key_) &&
	       same_bits(is_center_, o.is_center_) && same_bits(cj_size_, o.cj_size_) &&
	       groups_ == o.groups_;
}

} // namespace gclus
