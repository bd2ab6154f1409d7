#pragma once

#include <cstddef>
#include <cstdint>

#include "stochldpc/rng.hpp"

namespace stochldpc::kern {

using u64 = std::uint64_t;

// Packed-bit kernels behind the stochastic decoder. Every kernel is an
// integer computation, so the scalar reference and the SIMD variants are
// bit-for-bit interchangeable (enforced by the equivalence tests).
//
// Bit order: bit b of word w holds stream position w*64 + b (0-based).

// Bernoulli fills address stream words as base + round*64 + word so that a
// message of 2K bits is a prefix of the 2K' > 2K message drawn from the same
// stream (common random numbers across message dimensions). Messages wider
// than kBernoulliStride words fall back to their own stride.
inline constexpr u64 kBernoulliStride = 64;

inline u64 bernoulli_word_stride(std::size_t nwords) {
    u64 padded = (static_cast<u64>(nwords) + 1) & ~1ull;
    return padded > kBernoulliStride ? padded : kBernoulliStride;
}

struct Backend {
    const char* name;

    // dst[i] ^= src[i]
    void (*xor_acc)(u64* dst, const u64* src, std::size_t n);
    // conjunction / disjunction accumulators for the equality operator
    void (*and_or_acc)(u64* and_acc, u64* or_acc, const u64* src, std::size_t n);
    // out = equality scan: position takes 1 where all_and set, 0 where
    // all_or clear, previous output otherwise; y0 seeds position -1.
    void (*equality_fill)(const u64* all_and, const u64* all_or, u64* out, std::size_t n, bool y0);
    u64 (*popcount)(const u64* w, std::size_t n);
    // i.i.d. Bernoulli(threshold / 2^64) bits, one word stream per call
    void (*bernoulli_fill)(u64* out, std::size_t n, u64 threshold, rng::Stream s, u64 base);
};

const Backend& scalar_backend();
const Backend* avx2_backend(); // nullptr when unsupported at build or run time

// Selected once per process: AVX2 when the CPU has it, overridable with
// STOCHLDPC_KERNELS=scalar|avx2.
const Backend& backend();

u64 popcount_bit_range(const u64* w, std::size_t bit_lo, std::size_t bit_hi);

} // namespace stochldpc::kern
