#include "wtgrid/dynbits.hpp"

#include <bit>

#include "wtgrid/bitops.hpp"
#include "wtgrid/error.hpp"

namespace wtgrid {

namespace {

constexpr uint32_t kWords = DynamicBits::kChunkBits / 64;
constexpr uint32_t kLowChunk = 128;

using Words = std::array<uint64_t, kWords>;

bool get_bit(const Words& w, uint64_t i) { return (w[i >> 6] >> (i & 63)) & 1; }
void put_bit(Words& w, uint64_t i, bool b) {
    if (b) w[i >> 6] |= 1ULL << (i & 63);
    else w[i >> 6] &= ~(1ULL << (i & 63));
}

uint64_t prefix_ones(const Words& w, uint64_t pos) {
    uint64_t r = 0, full = pos >> 6;
    for (uint64_t j = 0; j < full; ++j) r += std::popcount(w[j]);
    if (pos & 63) r += std::popcount(w[full] & ((1ULL << (pos & 63)) - 1));
    return r;
}

// position of the k-th one (k >= 1) or zero among the first len bits
uint64_t chunk_select(const Words& w, uint32_t len, bool b, uint64_t k) {
    for (uint32_t j = 0; j < kWords; ++j) {
        uint64_t x = b ? w[j] : ~w[j];
        if (!b && j * 64 >= len) x = 0;
        else if (!b && len - j * 64 < 64) x &= (1ULL << (len - j * 64)) - 1;
        uint64_t c = std::popcount(x);
        if (k <= c) return j * 64 + select_in_word(x, static_cast<unsigned>(k - 1));
        k -= c;
    }
    throw Error(Errc::corrupt, "chunk select overran");
}

void chunk_insert(Words& w, uint64_t off, bool b) {
    uint64_t wi = off >> 6, bi = off & 63;
    for (uint64_t j = kWords - 1; j > wi; --j) w[j] = (w[j] << 1) | (w[j - 1] >> 63);
    uint64_t low_mask = bi == 0 ? 0 : (1ULL << bi) - 1;
    uint64_t x = w[wi];
    w[wi] = (x & low_mask) | (uint64_t(b) << bi) | ((x & ~low_mask) << 1);
}

bool chunk_erase(Words& w, uint64_t off) {
    uint64_t wi = off >> 6, bi = off & 63;
    uint64_t x = w[wi];
    bool bit = (x >> bi) & 1;
    uint64_t low_mask = bi == 0 ? 0 : (1ULL << bi) - 1;
    uint64_t carry = wi + 1 < kWords ? (w[wi + 1] & 1) << 63 : 0;
    w[wi] = (x & low_mask) | (((x >> bi) >> 1) << bi) | carry;
    for (uint64_t j = wi + 1; j < kWords; ++j) w[j] = (w[j] >> 1) | (j + 1 < kWords ? (w[j + 1] & 1) << 63 : 0);
    return bit;
}

}  // namespace

DynamicBits::DynamicBits(const std::vector<bool>& bits) {
    for (uint64_t i = 0; i < bits.size(); ++i) insert(i, bits[i]);
}

int32_t DynamicBits::make_node() {
    int32_t t;
    if (!free_.empty()) {
        t = free_.back();
        free_.pop_back();
        pool_[t] = Node{};
    } else {
        t = static_cast<int32_t>(pool_.size());
        pool_.emplace_back();
    }
    // xorshift64
    rng_ ^= rng_ << 13;
    rng_ ^= rng_ >> 7;
    rng_ ^= rng_ << 17;
    pool_[t].pri = static_cast<uint32_t>(rng_ >> 32);
    pool_[t].chunks = 1;
    return t;
}

void DynamicBits::free_node(int32_t t) { free_.push_back(t); }

uint64_t DynamicBits::own_ones(const Node& n) const {
    uint64_t c = 0;
    for (uint64_t x : n.w) c += std::popcount(x);
    return c;
}

void DynamicBits::pull(int32_t t) {
    Node& n = pool_[t];
    n.size = n.len;
    n.ones = own_ones(n);
    n.chunks = 1;
    for (int32_t c : {n.l, n.r})
        if (c >= 0) {
            n.size += pool_[c].size;
            n.ones += pool_[c].ones;
            n.chunks += pool_[c].chunks;
        }
}

void DynamicBits::split(int32_t t, uint64_t k, int32_t& a, int32_t& b) {
    if (t < 0) {
        a = b = -1;
        return;
    }
    Node& n = pool_[t];
    uint64_t lc = n.l < 0 ? 0 : pool_[n.l].chunks;
    if (k <= lc) {
        split(n.l, k, a, pool_[t].l);
        b = t;
    } else {
        split(n.r, k - lc - 1, pool_[t].r, b);
        a = t;
    }
    pull(t);
}

int32_t DynamicBits::merge(int32_t a, int32_t b) {
    if (a < 0) return b;
    if (b < 0) return a;
    if (pool_[a].pri > pool_[b].pri) {
        pool_[a].r = merge(pool_[a].r, b);
        pull(a);
        return a;
    }
    pool_[b].l = merge(a, pool_[b].l);
    pull(b);
    return b;
}

int32_t DynamicBits::chunk_node(uint64_t k) const {
    int32_t t = root_;
    while (t >= 0) {
        const Node& n = pool_[t];
        uint64_t lc = n.l < 0 ? 0 : pool_[n.l].chunks;
        if (k < lc) {
            t = n.l;
        } else if (k == lc) {
            return t;
        } else {
            k -= lc + 1;
            t = n.r;
        }
    }
    throw Error(Errc::corrupt, "chunk index out of range");
}

bool DynamicBits::operator[](uint64_t i) const {
    if (i >= size()) throw Error(Errc::out_of_range, "bit index out of range");
    int32_t t = root_;
    for (;;) {
        const Node& n = pool_[t];
        uint64_t ls = n.l < 0 ? 0 : pool_[n.l].size;
        if (i < ls) {
            t = n.l;
            continue;
        }
        i -= ls;
        if (i < n.len) return get_bit(n.w, i);
        i -= n.len;
        t = n.r;
    }
}

uint64_t DynamicBits::rank1(uint64_t pos) const {
    if (pos > size()) throw Error(Errc::out_of_range, "rank position out of range");
    uint64_t r = 0;
    int32_t t = root_;
    while (t >= 0 && pos > 0) {
        const Node& n = pool_[t];
        uint64_t ls = n.l < 0 ? 0 : pool_[n.l].size;
        if (pos <= ls) {
            t = n.l;
            continue;
        }
        uint64_t lo = n.l < 0 ? 0 : pool_[n.l].ones;
        r += lo;
        pos -= ls;
        if (pos <= n.len) return r + prefix_ones(n.w, pos);
        r += n.ones - lo - (n.r < 0 ? 0 : pool_[n.r].ones);
        pos -= n.len;
        t = n.r;
    }
    return r;
}

uint64_t DynamicBits::select1(uint64_t k) const {
    if (k == 0 || k > ones()) throw Error(Errc::not_found, "select beyond count");
    uint64_t pos = 0;
    int32_t t = root_;
    for (;;) {
        const Node& n = pool_[t];
        uint64_t lo = n.l < 0 ? 0 : pool_[n.l].ones;
        if (k <= lo) {
            t = n.l;
            continue;
        }
        k -= lo;
        pos += n.l < 0 ? 0 : pool_[n.l].size;
        uint64_t own = own_ones(n);
        if (k <= own) return pos + chunk_select(n.w, n.len, true, k);
        k -= own;
        pos += n.len;
        t = n.r;
    }
}

uint64_t DynamicBits::select0(uint64_t k) const {
    if (k == 0 || k > zeros()) throw Error(Errc::not_found, "select beyond count");
    uint64_t pos = 0;
    int32_t t = root_;
    for (;;) {
        const Node& n = pool_[t];
        uint64_t lz = n.l < 0 ? 0 : pool_[n.l].size - pool_[n.l].ones;
        if (k <= lz) {
            t = n.l;
            continue;
        }
        k -= lz;
        pos += n.l < 0 ? 0 : pool_[n.l].size;
        uint64_t own = n.len - own_ones(n);
        if (k <= own) return pos + chunk_select(n.w, n.len, false, k);
        k -= own;
        pos += n.len;
        t = n.r;
    }
}

uint64_t DynamicBits::rank_at(bool b, int64_t i) const {
    if (i < -1 || i >= static_cast<int64_t>(size())) throw Error(Errc::out_of_range, "rank index out of range");
    return rank(b, static_cast<uint64_t>(i + 1));
}

int64_t DynamicBits::select_at(bool b, uint64_t k) const {
    if (k == 0) return -1;
    return static_cast<int64_t>(select(b, k));
}

void DynamicBits::insert(uint64_t i, bool b) {
    if (i > size()) throw Error(Errc::out_of_range, "insert position out of range");
    if (root_ < 0) root_ = make_node();
    std::vector<int32_t> path;
    int32_t t = root_;
    uint64_t chunk = 0;
    for (;;) {
        path.push_back(t);
        const Node& n = pool_[t];
        uint64_t ls = n.l < 0 ? 0 : pool_[n.l].size;
        if (n.l >= 0 && i <= ls) {
            t = n.l;
            continue;
        }
        i -= ls;
        chunk += n.l < 0 ? 0 : pool_[n.l].chunks;
        if (i <= n.len) break;
        i -= n.len;
        ++chunk;
        t = n.r;
    }
    chunk_insert(pool_[t].w, i, b);
    ++pool_[t].len;
    for (auto it = path.rbegin(); it != path.rend(); ++it) pull(*it);
    if (pool_[t].len < kChunkBits) return;
    // split the full chunk in halves
    int32_t u = make_node();
    Node& full = pool_[t];
    Node& half = pool_[u];
    for (uint32_t j = 0; j < kWords / 2; ++j) {
        half.w[j] = full.w[j + kWords / 2];
        full.w[j + kWords / 2] = 0;
    }
    full.len = half.len = kChunkBits / 2;
    pull(u);
    for (auto it = path.rbegin(); it != path.rend(); ++it) pull(*it);
    int32_t a, c;
    split(root_, chunk + 1, a, c);
    root_ = merge(merge(a, u), c);
}

bool DynamicBits::erase(uint64_t i) {
    if (i >= size()) throw Error(Errc::out_of_range, "erase position out of range");
    std::vector<int32_t> path;
    int32_t t = root_;
    uint64_t chunk = 0;
    for (;;) {
        path.push_back(t);
        const Node& n = pool_[t];
        uint64_t ls = n.l < 0 ? 0 : pool_[n.l].size;
        if (i < ls) {
            t = n.l;
            continue;
        }
        i -= ls;
        chunk += n.l < 0 ? 0 : pool_[n.l].chunks;
        if (i < n.len) break;
        i -= n.len;
        ++chunk;
        t = n.r;
    }
    bool bit = chunk_erase(pool_[t].w, i);
    --pool_[t].len;
    for (auto it = path.rbegin(); it != path.rend(); ++it) pull(*it);
    if (pool_[t].len == 0) {
        int32_t a, m, c;
        split(root_, chunk, a, m);
        int32_t single;
        split(m, 1, single, c);
        free_node(single);
        root_ = merge(a, c);
    } else if (pool_[t].len < kLowChunk && chunks() > 1) {
        rebalance(chunk + 1 < chunks() ? chunk : chunk - 1);
    }
    return bit;
}

void DynamicBits::rebalance(uint64_t first) {
    int32_t a, m, c, pair;
    split(root_, first, a, m);
    split(m, 2, pair, c);
    int32_t x = pair, y;
    if (pool_[pair].l >= 0) {
        x = pool_[pair].l;
        y = pair;
    } else {
        y = pool_[pair].r;
    }
    std::array<uint64_t, 2 * kWords> buf{};
    uint64_t total = 0;
    for (int32_t s : {x, y}) {
        const Node& n = pool_[s];
        for (uint64_t k = 0; k < n.len; ++k, ++total)
            if (get_bit(n.w, k)) buf[total >> 6] |= 1ULL << (total & 63);
    }
    free_node(x);
    free_node(y);
    uint64_t parts = total <= 3 * kChunkBits / 4 ? 1 : 2;
    int32_t mid = -1;
    uint64_t from = 0;
    for (uint64_t p = 0; p < parts; ++p) {
        uint64_t to = parts == 1 ? total : (p == 0 ? total / 2 : total);
        int32_t u = make_node();
        Node& n = pool_[u];
        for (uint64_t k = from; k < to; ++k) put_bit(n.w, k - from, (buf[k >> 6] >> (k & 63)) & 1);
        n.len = static_cast<uint32_t>(to - from);
        pull(u);
        mid = merge(mid, u);
        from = to;
    }
    root_ = merge(merge(a, mid), c);
}

uint64_t DynamicBits::bits() const {
    // live nodes only
    return (pool_.size() - free_.size()) * sizeof(Node) * 8;
}

uint64_t DynamicBits::audit_rec(int32_t t, uint32_t parent_pri) const {
    if (t < 0) return 0;
    const Node& n = pool_[t];
    if (n.pri > parent_pri) throw Error(Errc::corrupt, "treap heap order broken");
    if (n.len == 0 || n.len >= kChunkBits) throw Error(Errc::corrupt, "chunk length out of bounds");
    for (uint64_t k = n.len; k < kChunkBits; ++k)
        if (get_bit(n.w, k)) throw Error(Errc::corrupt, "bits beyond chunk end");
    audit_rec(n.l, n.pri);
    audit_rec(n.r, n.pri);
    uint64_t size = n.len, ones = own_ones(n), chunks = 1;
    for (int32_t c : {n.l, n.r})
        if (c >= 0) {
            size += pool_[c].size;
            ones += pool_[c].ones;
            chunks += pool_[c].chunks;
        }
    if (size != n.size || ones != n.ones || chunks != n.chunks) throw Error(Errc::corrupt, "treap counters stale");
    return size;
}

void DynamicBits::audit() const { audit_rec(root_, UINT32_MAX); }

}  // namespace wtgrid
