#include "stochldpc/kernels.hpp"

#include <bit>

#include "kernels_detail.hpp"

namespace stochldpc::kern {

namespace {

void xor_acc_scalar(u64* dst, const u64* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] ^= src[i];
}

void and_or_acc_scalar(u64* and_acc, u64* or_acc, const u64* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        and_acc[i] &= src[i];
        or_acc[i] |= src[i];
    }
}

// Per word: propagate the nearest decided position upward in log steps,
// then stitch the inter-word carry.
void equality_fill_scalar(const u64* all_and, const u64* all_or, u64* out, std::size_t n, bool y0) {
    u64 carry = y0 ? ~0ull : 0;
    for (std::size_t w = 0; w < n; ++w) {
        u64 set1 = all_and[w];
        u64 defined = set1 | ~all_or[w];
        u64 val = set1;
        u64 filled = defined;
        for (int s = 1; s < 64; s <<= 1) {
            val |= (val << s) & ~filled;
            filled |= filled << s;
        }
        u64 res = val | (carry & ~filled);
        out[w] = res;
        carry = static_cast<u64>(-static_cast<std::int64_t>(res >> 63));
    }
}

u64 popcount_scalar(const u64* w, std::size_t n) {
    u64 c = 0;
    for (std::size_t i = 0; i < n; ++i) c += static_cast<u64>(std::popcount(w[i]));
    return c;
}

// Bit-sliced comparison of 64 random binary fractions against the threshold,
// one round per threshold bit, most significant first. Lanes drop out once
// decided; a pair of output words shares each Philox block.
void bernoulli_fill_scalar(u64* out, std::size_t n, u64 threshold, rng::Stream s, u64 base) {
    detail::bernoulli_fill_range(out, 0, n, bernoulli_word_stride(n), threshold, s, base);
}

constexpr Backend kScalar{
    "scalar", &xor_acc_scalar, &and_or_acc_scalar, &equality_fill_scalar, &popcount_scalar,
    &bernoulli_fill_scalar,
};

} // namespace

const Backend& scalar_backend() { return kScalar; }

u64 popcount_bit_range(const u64* w, std::size_t bit_lo, std::size_t bit_hi) {
    if (bit_hi <= bit_lo) return 0;
    std::size_t w_lo = bit_lo >> 6;
    std::size_t w_hi = (bit_hi - 1) >> 6;
    u64 first_mask = ~0ull << (bit_lo & 63);
    u64 last_mask = ~0ull >> (63 - ((bit_hi - 1) & 63));
    if (w_lo == w_hi) return static_cast<u64>(std::popcount(w[w_lo] & first_mask & last_mask));
    u64 c = static_cast<u64>(std::popcount(w[w_lo] & first_mask));
    for (std::size_t i = w_lo + 1; i < w_hi; ++i) c += static_cast<u64>(std::popcount(w[i]));
    c += static_cast<u64>(std::popcount(w[w_hi] & last_mask));
    return c;
}

} // namespace stochldpc::kern
