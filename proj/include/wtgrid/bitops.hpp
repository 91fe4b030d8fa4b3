#pragma once

#include <bit>
#include <cstdint>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

namespace wtgrid {

// Position of the (k+1)-th set bit of w; k < popcount(w).
inline unsigned select_in_word(uint64_t w, unsigned k) {
#if defined(__BMI2__)
    return static_cast<unsigned>(std::countr_zero(_pdep_u64(1ULL << k, w)));
#else
    unsigned base = 0;
    for (;;) {
        unsigned c = std::popcount(w & 0xff);
        if (k < c) break;
        k -= c;
        w >>= 8;
        base += 8;
    }
    for (;; ++base, w >>= 1) {
        if (w & 1) {
            if (k == 0) return base;
            --k;
        }
    }
#endif
}

}  // namespace wtgrid
