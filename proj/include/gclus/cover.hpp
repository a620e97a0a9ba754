#pragma once

#include <cstdint>
#include <vector>

namespace gclus {

// Bit-slice isolation cover: for each label bit i (most significant first)
// and b in {0, 1}, the set of vertices whose bit i equals b.
class IsolationCover {
public:
	IsolationCover() = default;
	explicit IsolationCover(int n);

	int n() const { return n_; }
	int size() const { return static_cast<int>(words_.size()); }
	int bits() const { return bits_; }

	bool contains(int j, int v) const {
		return (words_[j][v >> 6] >> (v & 63)) & 1u;
	}
	// Indices of the sets that contain v, ascending.
	const std::vector<int> &membership(int v) const { return member_[v]; }
	std::vector<int> set(int j) const;
	const std::vector<uint64_t> &bitset(int j) const { return words_[j]; }

private:
	int n_ = 0;
	int bits_ = 0;
	std::vector<std::vector<uint64_t>> words_;
	std::vector<std::vector<int>> member_;
};

IsolationCover build_cover(int n);

} // namespace gclus
