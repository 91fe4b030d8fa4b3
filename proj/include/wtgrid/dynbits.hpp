#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace wtgrid {

// Bit sequence with insertions and deletions: a treap over chunks of at
// most 511 bits, each node carrying subtree bit, one and chunk counts.
// Chunks split at 512 bits and a chunk that falls under 128 bits is
// rebalanced with a neighbour.
class DynamicBits {
public:
    static constexpr uint32_t kChunkBits = 512;

    DynamicBits() = default;
    explicit DynamicBits(const std::vector<bool>& bits);

    uint64_t size() const { return root_ < 0 ? 0 : pool_[root_].size; }
    uint64_t ones() const { return root_ < 0 ? 0 : pool_[root_].ones; }
    uint64_t zeros() const { return size() - ones(); }

    bool operator[](uint64_t i) const;
    // occurrences in [0, pos)
    uint64_t rank1(uint64_t pos) const;
    uint64_t rank0(uint64_t pos) const { return pos - rank1(pos); }
    uint64_t rank(bool b, uint64_t pos) const { return b ? rank1(pos) : rank0(pos); }
    // position of the k-th occurrence, k >= 1
    uint64_t select1(uint64_t k) const;
    uint64_t select0(uint64_t k) const;
    uint64_t select(bool b, uint64_t k) const { return b ? select1(k) : select0(k); }

    // Inclusive rank and select returning -1 for k = 0, as RankSelectBits.
    uint64_t rank_at(bool b, int64_t i) const;
    int64_t select_at(bool b, uint64_t k) const;

    void insert(uint64_t i, bool b);
    bool erase(uint64_t i);

    uint64_t chunks() const { return root_ < 0 ? 0 : pool_[root_].chunks; }
    uint64_t bits() const;
    // Re-derives every counter and checks the chunk and heap rules; throws
    // on the first inconsistency.
    void audit() const;

private:
    struct Node {
        std::array<uint64_t, kChunkBits / 64> w{};
        uint32_t len = 0;
        uint32_t pri = 0;
        int32_t l = -1, r = -1;
        uint64_t size = 0, ones = 0, chunks = 0;
    };

    int32_t make_node();
    void free_node(int32_t t);
    void pull(int32_t t);
    uint64_t own_ones(const Node& n) const;
    void split(int32_t t, uint64_t k, int32_t& a, int32_t& b);
    int32_t merge(int32_t a, int32_t b);
    // chunk index of the k-th chunk's node
    int32_t chunk_node(uint64_t k) const;
    void rebalance(uint64_t first);
    uint64_t audit_rec(int32_t t, uint32_t parent_pri) const;

    std::vector<Node> pool_;
    std::vector<int32_t> free_;
    int32_t root_ = -1;
    uint64_t rng_ = 0x9e3779b97f4a7c15ULL;
};

}  // namespace wtgrid
