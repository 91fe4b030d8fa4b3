#include "wtgrid/aligned_stats.hpp"

#include <algorithm>

namespace wtgrid {

namespace {

std::vector<uint64_t> block_totals(const std::vector<uint64_t>& v, uint64_t block) {
    std::vector<uint64_t> out((v.size() + block - 1) / block, 0);
    for (uint64_t p = 0; p < v.size(); ++p) out[p / block] += v[p];
    return out;
}

std::vector<uint64_t> level_weights(const RankGrid& g, const std::vector<uint64_t>& seq, unsigned d) {
    auto order = level_order(seq, g.tree().depth(), d);
    for (auto& i : order) i = g.weight(i);
    return order;
}

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

}  // namespace

BandSummary merge_bands(const BandSummary& a, const BandSummary& b) {
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    double m = double(a.count), n = double(b.count);
    double diff = (n / m) * double(a.total) - double(b.total);
    return {a.count + b.count, a.total + b.total, a.spread + b.spread + (m / (n * (m + n))) * diff * diff};
}

SumAugmentation::SumAugmentation(const RankGrid& g, uint64_t t, Centring centring, bool parallel)
    : t_(t), centring_(centring) {
    if (t == 0) throw Error(Errc::invalid_argument, "t must be at least 1");
    bind(g);
    unsigned L = nav_.depth();
    uint64_t n = g.size(), W = g.weight_bound();
    if (W > (uint64_t(1) << 32)) throw Error(Errc::invalid_argument, "weights must be below 2^32");
    if (n > 0 && u128(n) * (W - 1) * (W - 1) >= u128(1) << 62)
        throw Error(Errc::invalid_argument, "n * W^2 exceeds the partial-sum range");
    tau_ = t * std::max(1u, ceil_log2(W));
    sums_.resize(L);
    squares_.resize(L);
    centred_.resize(L);
    values_.resize(L + 1);
    centres_.resize(centring_ == Centring::global ? 1 : L + 1);
    auto seq = sequence_of(g.tree());
    unsigned wbits = width_for(W);

    uint64_t global_centre = 0;
    if (centring_ == Centring::global && n > 0) {
        uint64_t total = 0;
        for (uint64_t i = 0; i < n; ++i) total += g.weight(i);
        global_centre = ceil_div(total, n);
        centres_[0] = IntVector(1, wbits);
        centres_[0].set(0, global_centre);
    }

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (unsigned d = 0; d <= L; ++d) {
        auto w = level_weights(g, seq, d);
        std::vector<uint64_t> c(n);
        if (centring_ == Centring::per_node) {
            IntVector cv(nav_.node_count(d), wbits);
            for (uint64_t l = 0; l < nav_.node_count(d); ++l) {
                uint64_t s = nav_.node_start(d, l), e = nav_.node_start(d, l + 1), total = 0;
                for (uint64_t p = s; p < e; ++p) total += w[p];
                uint64_t centre = e > s ? ceil_div(total, e - s) : 0;
                cv.set(l, centre);
                for (uint64_t p = s; p < e; ++p) c[p] = centre;
            }
            centres_[d] = std::move(cv);
        } else {
            std::fill(c.begin(), c.end(), global_centre);
        }
        if (d < L) {
            std::vector<uint64_t> sq(n), dev(n);
            for (uint64_t p = 0; p < n; ++p) {
                sq[p] = w[p] * w[p];
                uint64_t diff = w[p] > c[p] ? w[p] - c[p] : c[p] - w[p];
                dev[p] = diff * diff;
            }
            sums_[d] = UnaryPartialSums(block_totals(w, tau_));
            squares_[d] = UnaryPartialSums(block_totals(sq, tau_));
            centred_[d] = UnaryPartialSums(block_totals(dev, tau_));
        }
        if (d > 0 && stores_level(d)) values_[d] = IntVector::from(w, wbits);
    }
}

uint64_t SumAugmentation::weight_at(unsigned d, uint64_t p) const {
    if (d == 0) return g_->weight(p);
    while (!stores_level(d)) p = nav_.down(d++, p);
    return values_[d][p];
}

uint64_t SumAugmentation::centre(unsigned d, uint64_t p) const {
    if (centring_ == Centring::global) return centres_[0][0];
    return centres_[d][nav_.label_of(d, p)];
}

uint64_t SumAugmentation::range_sum(unsigned d, uint64_t a, uint64_t b) const {
    uint64_t s = 0;
    uint64_t jb = ceil_div(a, tau_), je = b / tau_;
    if (d == nav_.depth() || jb >= je) {
        for (uint64_t p = a; p < b; ++p) s += weight_at(d, p);
        return s;
    }
    for (uint64_t p = a; p < jb * tau_; ++p) s += weight_at(d, p);
    s += sums_[d].range_sum(jb, je);
    for (uint64_t p = je * tau_; p < b; ++p) s += weight_at(d, p);
    return s;
}

u128 SumAugmentation::range_squares(unsigned d, uint64_t a, uint64_t b) const {
    u128 s = 0;
    auto sq = [&](uint64_t p) {
        u128 w = weight_at(d, p);
        return w * w;
    };
    uint64_t jb = ceil_div(a, tau_), je = b / tau_;
    if (d == nav_.depth() || jb >= je) {
        for (uint64_t p = a; p < b; ++p) s += sq(p);
        return s;
    }
    for (uint64_t p = a; p < jb * tau_; ++p) s += sq(p);
    s += squares_[d].range_sum(jb, je);
    for (uint64_t p = je * tau_; p < b; ++p) s += sq(p);
    return s;
}

u128 SumAugmentation::range_centred(unsigned d, uint64_t a, uint64_t b) const {
    u128 s = 0;
    auto dev = [&](uint64_t p) {
        uint64_t w = weight_at(d, p), c = centre(d, p);
        u128 diff = w > c ? w - c : c - w;
        return diff * diff;
    };
    uint64_t jb = ceil_div(a, tau_), je = b / tau_;
    if (d == nav_.depth() || jb >= je) {
        for (uint64_t p = a; p < b; ++p) s += dev(p);
        return s;
    }
    for (uint64_t p = a; p < jb * tau_; ++p) s += dev(p);
    s += centred_[d].range_sum(jb, je);
    for (uint64_t p = je * tau_; p < b; ++p) s += dev(p);
    return s;
}

SumAugmentation::Totals SumAugmentation::totals(const RankRect& r) const {
    Totals t;
    if (r.empty()) return t;
    g_->tree().for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
        t.count += hi - lo;
        t.sum += range_sum(v.level, v.start + lo, v.start + hi);
        t.squares += range_squares(v.level, v.start + lo, v.start + hi);
    });
    return t;
}

uint64_t SumAugmentation::sum(const RankRect& r) const {
    uint64_t s = 0;
    if (r.empty()) return s;
    g_->tree().for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
        s += range_sum(v.level, v.start + lo, v.start + hi);
    });
    return s;
}

std::optional<Rational> SumAugmentation::avg(const RectQuery& q) const {
    RankRect r = g_->map_rect(q);
    uint64_t c = g_->count(r);
    if (c == 0) return std::nullopt;
    return Rational::make(sum(r), c);
}

std::optional<Rational> SumAugmentation::var(const RectQuery& q) const {
    Totals t = totals(g_->map_rect(q));
    if (t.count == 0) return std::nullopt;
    u128 c = t.count, s = t.sum;
    return Rational::make(c * t.squares - s * s, c * c);
}

std::vector<BandSummary> SumAugmentation::bands(const RankRect& r) const {
    std::vector<BandSummary> out;
    if (r.empty()) return out;
    g_->tree().for_each_cover(r.x0, r.x1 + 1, r.y0, r.y1, [&](const WtNode& v, uint64_t lo, uint64_t hi) {
        uint64_t a = v.start + lo, b = v.start + hi, q = b - a;
        uint64_t total = range_sum(v.level, a, b);
        u128 centred = range_centred(v.level, a, b);
        __int128 dev = __int128(total) - __int128(q) * __int128(centre(v.level, a));
        // q * sum((w-c)^2) - (T - q c)^2 = q * sum((w-mean)^2), exactly
        __int128 num = __int128(q) * __int128(centred) - dev * dev;
        out.push_back({q, total, double(num) / double(q)});
    });
    return out;
}

std::optional<double> SumAugmentation::var_stable(const RectQuery& q) const {
    auto b = bands(g_->map_rect(q));
    if (b.empty()) return std::nullopt;
    BandSummary acc;
    for (const auto& s : b) acc = merge_bands(acc, s);
    return acc.variance();
}

SumSpace SumAugmentation::space() const {
    SumSpace s;
    for (const auto& a : sums_) s.block_sums += a.bits();
    for (const auto& a : squares_) s.block_squares += a.bits();
    for (const auto& a : centred_) s.centred += a.bits();
    for (const auto& c : centres_) s.centred += c.bits();
    for (const auto& v : values_) s.explicit_values += v.bits();
    return s;
}

void SumAugmentation::save(ByteWriter& out) const {
    out.u64(t_);
    out.u64(tau_);
    out.u8(static_cast<uint8_t>(centring_));
    out.u64(sums_.size());
    for (size_t d = 0; d < sums_.size(); ++d) {
        sums_[d].save(out);
        squares_[d].save(out);
        centred_[d].save(out);
    }
    out.u64(values_.size());
    for (const auto& v : values_) v.save(out);
    out.u64(centres_.size());
    for (const auto& c : centres_) c.save(out);
}

SumAugmentation SumAugmentation::load(ByteReader& in, const RankGrid& g) {
    SumAugmentation s;
    s.bind(g);
    s.t_ = in.u64();
    s.tau_ = in.u64();
    uint8_t c = in.u8();
    if (c > 1 || s.t_ == 0 || s.tau_ == 0) throw Error(Errc::corrupt, "sum section header");
    s.centring_ = static_cast<Centring>(c);
    uint64_t levels = in.u64();
    if (levels != s.nav_.depth()) throw Error(Errc::corrupt, "sum section depth");
    for (uint64_t d = 0; d < levels; ++d) {
        s.sums_.push_back(UnaryPartialSums::load(in));
        s.squares_.push_back(UnaryPartialSums::load(in));
        s.centred_.push_back(UnaryPartialSums::load(in));
    }
    uint64_t nv = in.u64();
    if (nv != levels + 1) throw Error(Errc::corrupt, "sum section values");
    for (uint64_t d = 0; d < nv; ++d) s.values_.push_back(IntVector::load(in));
    uint64_t nc = in.u64();
    if (nc != (s.centring_ == Centring::global ? 1 : levels + 1)) throw Error(Errc::corrupt, "sum section centres");
    for (uint64_t d = 0; d < nc; ++d) s.centres_.push_back(IntVector::load(in));
    return s;
}

}  // namespace wtgrid
