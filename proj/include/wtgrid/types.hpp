#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "wtgrid/error.hpp"
#include "wtgrid/grid.hpp"

namespace wtgrid {

using u128 = unsigned __int128;

std::string to_string_u128(u128 v);

// Non-negative exact fraction, always reduced.
struct Rational {
    u128 num = 0;
    u128 den = 1;

    static Rational make(u128 num, u128 den);
    bool operator==(const Rational&) const = default;
    std::string str() const { return to_string_u128(num) + "/" + to_string_u128(den); }
    long double value() const { return static_cast<long double>(num) / static_cast<long double>(den); }
};

// Fraction in (0,1) used as a majority threshold; kept exact so that
// "count > alpha * total" never suffers rounding.
struct Fraction {
    uint64_t num = 1;
    uint64_t den = 2;

    // Accepts "p/q" or a decimal such as "0.34".
    static Fraction parse(const std::string& s);
    // count > (num/den) * total
    bool exceeded_by(uint64_t count, uint64_t total) const { return u128(count) * den > u128(num) * total; }
    double value() const { return double(num) / double(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

enum class Direction { NE, NW, SE, SW };

Direction parse_direction(const std::string& s);
const char* direction_name(Direction d);

struct WeightedHit {
    uint64_t value = 0;
    Point point;

    bool operator==(const WeightedHit&) const = default;
};

struct ValueCount {
    uint64_t value = 0;
    uint64_t count = 0;

    bool operator==(const ValueCount&) const = default;
};

}  // namespace wtgrid
