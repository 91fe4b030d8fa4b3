#pragma once

#include <cstdint>

namespace wtgrid {

// Finite groups over weights for range folds. A group supplies identity,
// op, inverse, the map from a weight to an element, and the bits needed to
// store one element.
struct XorGroup {
    static constexpr const char* name = "xor";
    uint64_t identity() const { return 0; }
    uint64_t op(uint64_t a, uint64_t b) const { return a ^ b; }
    uint64_t inverse(uint64_t a) const { return a; }
    uint64_t lift(uint64_t w) const { return w; }
    unsigned element_bits(unsigned weight_bits) const { return weight_bits; }
};

struct ModularGroup {
    static constexpr const char* name = "mod";
    uint64_t modulus = 7;

    uint64_t identity() const { return 0; }
    uint64_t op(uint64_t a, uint64_t b) const { return (a + b) % modulus; }
    uint64_t inverse(uint64_t a) const { return (modulus - a) % modulus; }
    uint64_t lift(uint64_t w) const { return w % modulus; }
    unsigned element_bits(unsigned) const {
        unsigned b = 0;
        while ((uint64_t(1) << b) < modulus) ++b;
        return b;
    }
};

}  // namespace wtgrid
