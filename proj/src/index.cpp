#include "wtgrid/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wtgrid/io.hpp"

namespace wtgrid {

namespace {

constexpr size_t kEntryBytes = 2 + 8 + 8 + 8;

void write_params(ByteWriter& out, const BuildParams& p, uint64_t U, uint64_t W, uint64_t n) {
    out.u64(p.t);
    out.u64(p.ell);
    out.u8(p.alpha ? 1 : 0);
    out.u64(p.alpha ? p.alpha->num : 0);
    out.u64(p.alpha ? p.alpha->den : 0);
    out.u64(U);
    out.u64(W);
    out.u64(n);
}

void check_params(const BuildParams& p) {
    if (p.t == 0) throw Error(Errc::invalid_argument, "t must be at least 1");
    if (p.ell < 2) throw Error(Errc::invalid_argument, "ell must be at least 2");
    if (p.alpha && (p.alpha->num == 0 || p.alpha->num >= p.alpha->den))
        throw Error(Errc::invalid_argument, "alpha must lie in (0, 1)");
}

void finish(const ByteReader& in, const char* what) {
    if (!in.done()) throw Error(Errc::corrupt, std::string("trailing bytes in ") + what + " section");
}

}  // namespace

ContainerHeader read_header(std::string_view bytes) {
    ByteReader in(bytes);
    if (bytes.size() < 4 || in.raw(4) != std::string_view(kMagic, 4)) throw Error(Errc::corrupt, "not an index file");
    ContainerHeader h;
    h.version = in.u16();
    if (h.version != kFormatVersion)
        throw Error(Errc::version, "unsupported format version " + std::to_string(h.version) + " (expected " +
                                       std::to_string(kFormatVersion) + ")");
    h.params.t = in.u64();
    h.params.ell = in.u64();
    bool has_alpha = in.u8() != 0;
    uint64_t num = in.u64(), den = in.u64();
    if (has_alpha) h.params.alpha = Fraction{num, den};
    h.U = in.u64();
    h.W = in.u64();
    h.n = in.u64();
    uint32_t count = in.u32();
    if (uint64_t(count) * kEntryBytes > bytes.size()) throw Error(Errc::corrupt, "section table truncated");
    for (uint32_t i = 0; i < count; ++i) {
        SectionEntry e;
        e.tag = in.u16();
        e.offset = in.u64();
        e.length = in.u64();
        e.checksum = in.u64();
        if (e.offset > bytes.size() || e.length > bytes.size() - e.offset)
            throw Error(Errc::corrupt, "section " + std::to_string(e.tag) + " out of bounds");
        h.sections.push_back(e);
    }
    return h;
}

Index::Index() : Index(WeightedPointSet{}, BuildParams{}) {}

Index::Index(const WeightedPointSet& ps, const BuildParams& params, bool parallel) : params_(params) {
    check_params(params);
    grid_ = std::make_unique<RankGrid>(ps, parallel);
    sums_ = std::make_unique<SumAugmentation>(*grid_, params.t, SumAugmentation::Centring::per_node, parallel);
    minmax_ = std::make_unique<MinMaxAugmentation>(*grid_, params.t, parallel);
    if (params.alpha) fixed_ = std::make_unique<FixedMajority>(*grid_, *minmax_, *params.alpha, params.t, parallel);
    values_ = std::make_unique<ValueWaveletTree>(*grid_, *minmax_, params.ell, parallel);
    attach_groups();
}

void Index::attach_groups() {
    xor_ = std::make_unique<GroupSums<XorGroup>>(*sums_, *grid_);
    mod_ = std::make_unique<GroupSums<ModularGroup>>(*sums_, *grid_, ModularGroup{7});
}

void Index::inject_fault(unsigned level, uint64_t pos) {
    if (grid_->size() == 0) return;
    grid_->flip_tree_bit(level, pos);
}

std::string Index::serialize() const {
    std::vector<std::pair<SectionTag, std::string>> parts;
    auto add = [&](SectionTag tag, auto&&... items) {
        ByteWriter w;
        (items->save(w), ...);
        parts.emplace_back(tag, w.take());
    };
    add(SectionTag::grid, grid_);
    add(SectionTag::aligned_stats, sums_, minmax_);
    if (fixed_) add(SectionTag::fixed_majority, fixed_);
    add(SectionTag::valuewt, values_);

    ByteWriter out;
    out.raw(std::string_view(kMagic, 4));
    out.u16(kFormatVersion);
    write_params(out, params_, universe(), weight_bound(), size());
    out.u32(static_cast<uint32_t>(parts.size()));
    uint64_t offset = out.size() + parts.size() * kEntryBytes;
    for (const auto& [tag, body] : parts) {
        out.u16(static_cast<uint16_t>(tag));
        out.u64(offset);
        out.u64(body.size());
        out.u64(fnv1a64(body));
        offset += body.size();
    }
    for (const auto& part : parts) out.raw(part.second);
    return out.take();
}

Index Index::deserialize(std::string_view bytes, std::vector<std::string>* warnings) {
    ContainerHeader h = read_header(bytes);
    check_params(h.params);
    std::optional<std::string_view> body[5];
    for (const auto& e : h.sections) {
        std::string_view s = bytes.substr(e.offset, e.length);
        if (fnv1a64(s) != e.checksum) throw Error(Errc::corrupt, "checksum mismatch in section " + std::to_string(e.tag));
        if (e.tag < 1 || e.tag > 4) {
            if (warnings) warnings->push_back("skipping unknown section " + std::to_string(e.tag));
            continue;
        }
        if (body[e.tag]) throw Error(Errc::corrupt, "duplicate section " + std::to_string(e.tag));
        body[e.tag] = s;
    }
    auto need = [&](SectionTag tag, const char* name) {
        auto& b = body[static_cast<int>(tag)];
        if (!b) throw Error(Errc::corrupt, std::string("missing ") + name + " section");
        return ByteReader(*b);
    };
    if (h.params.alpha.has_value() != body[3].has_value())
        throw Error(Errc::corrupt, "fixed-majority section does not match the build parameters");

    Index idx(WeightedPointSet{}, BuildParams{});
    idx.params_ = h.params;
    {
        ByteReader in = need(SectionTag::grid, "grid");
        idx.grid_ = std::make_unique<RankGrid>(RankGrid::load(in));
        finish(in, "grid");
    }
    const RankGrid& g = *idx.grid_;
    if (g.size() != h.n || g.universe() != h.U || g.weight_bound() != h.W)
        throw Error(Errc::corrupt, "grid section disagrees with the header");
    {
        ByteReader in = need(SectionTag::aligned_stats, "aligned-stats");
        idx.sums_ = std::make_unique<SumAugmentation>(SumAugmentation::load(in, g));
        idx.minmax_ = std::make_unique<MinMaxAugmentation>(MinMaxAugmentation::load(in, g));
        finish(in, "aligned-stats");
    }
    idx.fixed_.reset();
    if (body[3]) {
        ByteReader in(*body[3]);
        idx.fixed_ = std::make_unique<FixedMajority>(FixedMajority::load(in, g, *idx.minmax_));
        finish(in, "fixed-majority");
    }
    {
        ByteReader in = need(SectionTag::valuewt, "valuewt");
        idx.values_ = std::make_unique<ValueWaveletTree>(ValueWaveletTree::load(in, g, *idx.minmax_));
        finish(in, "valuewt");
    }
    idx.attach_groups();
    return idx;
}

void Index::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::data, "cannot write " + path);
    std::string bytes = serialize();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::data, "write failed: " + path);
}

Index Index::load(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::data, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str(), warnings);
}

WeightedPointSet read_points(std::istream& in, std::optional<uint64_t> U, std::optional<uint64_t> W) {
    WeightedPointSet ps;
    std::string line;
    uint64_t lineno = 0, max_c = 0, max_w = 0;
    std::vector<uint64_t> lines;
    auto bad = [&](const std::string& what) { return Error(Errc::data, "line " + std::to_string(lineno) + ": " + what); };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        uint64_t v[3];
        for (auto& x : v) {
            std::string tok;
            if (!(fields >> tok)) throw bad("expected x, y and w");
            if (tok.find_first_not_of("0123456789") != std::string::npos) throw bad("not an unsigned integer: " + tok);
            try {
                x = std::stoull(tok);
            } catch (const std::out_of_range&) {
                throw bad("value too large: " + tok);
            }
        }
        std::string extra;
        if (fields >> extra) throw bad("unexpected field: " + extra);
        ps.points.push_back({v[0], v[1], v[2]});
        lines.push_back(lineno);
        max_c = std::max({max_c, v[0], v[1]});
        max_w = std::max(max_w, v[2]);
    }
    bool any = !ps.points.empty();
    ps.U = U ? *U : (any ? max_c + 1 : 1);
    ps.W = W ? *W : (any ? max_w + 1 : 1);
    for (size_t i = 0; i < ps.points.size(); ++i) {
        const Point& p = ps.points[i];
        lineno = lines[i];
        if (p.x >= ps.U || p.y >= ps.U)
            throw Error(Errc::out_of_range, "line " + std::to_string(lineno) + ": coordinate outside [0, " +
                                                std::to_string(ps.U) + ")");
        if (p.w >= ps.W)
            throw Error(Errc::out_of_range,
                        "line " + std::to_string(lineno) + ": weight outside [0, " + std::to_string(ps.W) + ")");
    }
    return ps;
}

WeightedPointSet read_points_file(const std::string& path, std::optional<uint64_t> U, std::optional<uint64_t> W) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::data, "cannot read " + path);
    return read_points(in, U, W);
}

std::vector<SpaceRow> space_rows(const Index& idx) {
    const RankGrid& g = idx.grid();
    SpaceReport sr = g.space_report();
    SumSpace ss = idx.sums().space();
    MinMaxSpace ms = idx.minmax().space();
    double n = double(g.size());
    double lg = g.size() > 1 ? std::log2(n) : 0.0;
    double t = double(idx.params().t);
    double m = double(std::max<uint64_t>(idx.minmax().distinct(), 1));
    double lm = std::log2(std::max(m, 2.0));
    double levels = std::ceil(lm / std::log2(double(idx.params().ell)));
    double ratio = g.size() == 0 ? 0.0 : std::log2((double(g.universe()) + n) / n);

    std::vector<SpaceRow> rows;
    auto row = [&](std::string name, uint64_t bits, std::string formula, double per_point) {
        rows.push_back({std::move(name), bits, n == 0 ? 0.0 : double(bits) / n, std::move(formula), per_point});
    };
    row("grid tree", sr.tree_bits, "log2 n", lg);
    row("coordinate maps", sr.x_map_bits + sr.y_map_bits, "2 (log2((U+n)/n) + 2)", g.size() == 0 ? 0 : 2 * (ratio + 2));
    row("weights", sr.weight_bits, "ceil(log2 W)", double(width_for(g.weight_bound())));
    row("sum blocks", ss.block_sums, "log2 n / t", lg / t);
    row("square blocks", ss.block_squares + ss.centred, "2 log2 n / t", 2 * lg / t);
    row("sampled weights", ss.explicit_values, "-", 0);
    row("min structure", ms.min_structure(), "log2 n / t", lg / t);
    row("max structure", ms.rmq_max + ms.explicit_ranks, "log2 n / t", lg / t);
    if (const FixedMajority* f = idx.fixed_majority())
        row("fixed majority", f->candidate_bits() + f->grid_bits(), "log2 n (1 + 1/t) + log2 m", lg * (1 + 1 / t) + lm);
    row("value tree", idx.values().bits(), "log2 n ceil(log2 m / log2 ell) + O(log2 m)", lg * levels);
    return rows;
}

}  // namespace wtgrid
