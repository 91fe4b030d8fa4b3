#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wtgrid/aligned_stats.hpp"
#include "wtgrid/fixed_majority.hpp"
#include "wtgrid/grid.hpp"
#include "wtgrid/group.hpp"
#include "wtgrid/types.hpp"
#include "wtgrid/valuewt.hpp"

namespace wtgrid {

struct BuildParams {
    uint64_t t = 1;
    uint64_t ell = 2;
    std::optional<Fraction> alpha;  // fixed majority threshold, if built
};

inline constexpr char kMagic[4] = {'W', 'T', 'G', 'R'};
inline constexpr uint16_t kFormatVersion = 1;

enum class SectionTag : uint16_t {
    grid = 1,
    aligned_stats = 2,
    fixed_majority = 3,
    valuewt = 4,
};

struct SectionEntry {
    uint16_t tag = 0;
    uint64_t offset = 0;  // from the start of the container
    uint64_t length = 0;
    uint64_t checksum = 0;  // fnv1a64 of the section bytes
};

struct ContainerHeader {
    uint16_t version = kFormatVersion;
    BuildParams params;
    uint64_t U = 1, W = 1, n = 0;
    std::vector<SectionEntry> sections;
};

// Parses magic, version, parameters and section table without touching the
// sections themselves.
ContainerHeader read_header(std::string_view bytes);

// The static index: rank grid plus every augmentation, owned together so
// that the augmentations' back pointers stay valid when the index moves.
class Index {
public:
    Index();
    Index(const WeightedPointSet& ps, const BuildParams& params, bool parallel = false);

    const BuildParams& params() const { return params_; }
    uint64_t size() const { return grid_->size(); }
    uint64_t universe() const { return grid_->universe(); }
    uint64_t weight_bound() const { return grid_->weight_bound(); }

    const RankGrid& grid() const { return *grid_; }
    const SumAugmentation& sums() const { return *sums_; }
    const MinMaxAugmentation& minmax() const { return *minmax_; }
    const FixedMajority* fixed_majority() const { return fixed_.get(); }
    const ValueWaveletTree& values() const { return *values_; }
    const GroupSums<XorGroup>& xor_sums() const { return *xor_; }
    const GroupSums<ModularGroup>& mod_sums() const { return *mod_; }

    // Test hook: flips one bit of the grid's wavelet tree.
    void inject_fault(unsigned level, uint64_t pos);

    std::string serialize() const;
    // Unknown sections are skipped; a note for each goes to warnings.
    static Index deserialize(std::string_view bytes, std::vector<std::string>* warnings = nullptr);

    void save(const std::string& path) const;
    static Index load(const std::string& path, std::vector<std::string>* warnings = nullptr);

private:
    void attach_groups();

    BuildParams params_;
    std::unique_ptr<RankGrid> grid_;
    std::unique_ptr<SumAugmentation> sums_;
    std::unique_ptr<MinMaxAugmentation> minmax_;
    std::unique_ptr<FixedMajority> fixed_;
    std::unique_ptr<ValueWaveletTree> values_;
    std::unique_ptr<GroupSums<XorGroup>> xor_;
    std::unique_ptr<GroupSums<ModularGroup>> mod_;
};

// One point per line, "x<TAB>y<TAB>w" (any blank run separates fields);
// '#' lines and blank lines are skipped. Bounds not given are inferred as
// max + 1.
WeightedPointSet read_points(std::istream& in, std::optional<uint64_t> U = {}, std::optional<uint64_t> W = {});
WeightedPointSet read_points_file(const std::string& path, std::optional<uint64_t> U = {},
                                  std::optional<uint64_t> W = {});

struct SpaceRow {
    std::string section;
    uint64_t bits = 0;
    double bits_per_point = 0;
    std::string formula;
    double formula_bits_per_point = 0;
};

// Measured space per structure next to the per-point formulas for the
// index's t and ell.
std::vector<SpaceRow> space_rows(const Index& idx);

}  // namespace wtgrid
