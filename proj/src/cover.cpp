#include "gclus/cover.hpp"

#include "gclus/errors.hpp"

namespace gclus {

IsolationCover::IsolationCover(int n) : n_(n) {
	if (n < 2)
		throw InvalidParams("isolation cover needs n >= 2");
	while ((int64_t{1} << bits_) < n)
		++bits_;
	const size_t nwords = (static_cast<size_t>(n) + 63) / 64;
	member_.resize(n);
	for (int i = 0; i < bits_; ++i) {
		const int shift = bits_ - 1 - i;
		for (int b = 0; b < 2; ++b) {
			const int j = static_cast<int>(words_.size());
			words_.emplace_back(nwords, 0);
			for (int v = 0; v < n; ++v) {
				if (((v >> shift) & 1) == b) {
					words_[j][v >> 6] |= uint64_t{1} << (v & 63);
					member_[v].push_back(j);
				}
			}
		}
	}
}

std::vector<int> IsolationCover::set(int j) const {
	std::vector<int> out;
	for (int v = 0; v < n_; ++v)
		if (contains(j, v))
			out.push_back(v);
	return out;
}

IsolationCover build_cover(int n) { return IsolationCover(n); }

} // namespace gclus
