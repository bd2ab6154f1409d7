#pragma once

#include <cassert>

#include "stochldpc/kernels.hpp"

namespace stochldpc::kern::detail {

// Scalar comparator over words [w_begin, w_end) of a fill whose index
// mapping was fixed by the full array (stride computed by the caller).
// w_begin must be even so that word pairs keep sharing Philox blocks.
inline void bernoulli_fill_range(u64* out, std::size_t w_begin, std::size_t w_end, u64 stride,
                                 u64 threshold, rng::Stream s, u64 base) {
    assert((base & 1) == 0 && (w_begin & 1) == 0);
    for (std::size_t w = w_begin; w < w_end; w += 2) {
        bool pair = w + 1 < w_end;
        u64 lt0 = 0, eq0 = ~0ull;
        u64 lt1 = 0, eq1 = ~0ull;
        for (int k = 0; k < 64; ++k) {
            u64 idx = base + static_cast<u64>(k) * stride + w;
            auto blk = rng::philox_block(s.k.key, s.k.salt, idx >> 1);
            if ((threshold >> (63 - k)) & 1) {
                lt0 |= eq0 & ~blk[0];
                eq0 &= blk[0];
                lt1 |= eq1 & ~blk[1];
                eq1 &= blk[1];
            } else {
                eq0 &= ~blk[0];
                eq1 &= ~blk[1];
            }
            if (((pair ? (eq0 | eq1) : eq0) == 0) || k == 63 || (threshold << (k + 1)) == 0) break;
        }
        out[w] = lt0;
        if (pair) out[w + 1] = lt1;
    }
}

} // namespace stochldpc::kern::detail
