#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cassert>
#include <cstring>

#include "kernels_detail.hpp"

namespace stochldpc::kern {

namespace {

inline __m256i load(const u64* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store(u64* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }

void xor_acc_avx2(u64* dst, const u64* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) store(dst + i, _mm256_xor_si256(load(dst + i), load(src + i)));
    for (; i < n; ++i) dst[i] ^= src[i];
}

void and_or_acc_avx2(u64* and_acc, u64* or_acc, const u64* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i s = load(src + i);
        store(and_acc + i, _mm256_and_si256(load(and_acc + i), s));
        store(or_acc + i, _mm256_or_si256(load(or_acc + i), s));
    }
    for (; i < n; ++i) {
        and_acc[i] &= src[i];
        or_acc[i] |= src[i];
    }
}

// In-word value propagation runs four words wide; the carry stitch between
// words stays scalar (it is a strict dependency chain but only ~3 ops/word).
void equality_fill_avx2(const u64* all_and, const u64* all_or, u64* out, std::size_t n, bool y0) {
    constexpr std::size_t kChunk = 64;
    alignas(32) u64 val_buf[kChunk];
    alignas(32) u64 lead_buf[kChunk];
    const __m256i ones = _mm256_set1_epi64x(-1);
    u64 carry = y0 ? ~0ull : 0;
    std::size_t w = 0;
    while (w < n) {
        std::size_t c = n - w < kChunk ? n - w : kChunk;
        std::size_t i = 0;
        for (; i + 4 <= c; i += 4) {
            __m256i set1 = load(all_and + w + i);
            __m256i defined = _mm256_or_si256(set1, _mm256_xor_si256(load(all_or + w + i), ones));
            __m256i val = set1;
            __m256i filled = defined;
            for (int s = 1; s < 64; s <<= 1) {
                val = _mm256_or_si256(val, _mm256_andnot_si256(filled, _mm256_slli_epi64(val, s)));
                filled = _mm256_or_si256(filled, _mm256_slli_epi64(filled, s));
            }
            store(val_buf + i, val);
            store(lead_buf + i, _mm256_xor_si256(filled, ones));
        }
        for (; i < c; ++i) {
            u64 set1 = all_and[w + i];
            u64 filled = set1 | ~all_or[w + i];
            u64 val = set1;
            for (int s = 1; s < 64; s <<= 1) {
                val |= (val << s) & ~filled;
                filled |= filled << s;
            }
            val_buf[i] = val;
            lead_buf[i] = ~filled;
        }
        for (i = 0; i < c; ++i) {
            u64 res = val_buf[i] | (carry & lead_buf[i]);
            out[w + i] = res;
            carry = static_cast<u64>(-static_cast<std::int64_t>(res >> 63));
        }
        w += c;
    }
}

// Mula's positional popcount (nibble shuffle + sad).
u64 popcount_avx2(const u64* w, std::size_t n) {
    const __m256i lut =
        _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1, 2, 1, 2, 2, 3, 1,
                         2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i v = load(w + i);
        __m256i lo = _mm256_and_si256(v, low_mask);
        __m256i hi = _mm256_and_si256(_mm256_srli_epi32(v, 4), low_mask);
        __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
    }
    alignas(32) u64 lanes[4];
    store(lanes, acc);
    u64 total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) total += static_cast<u64>(__builtin_popcountll(w[i]));
    return total;
}

// Four Philox4x32-10 blocks (blk .. blk+3) -> 8 words, interleaved exactly
// like consecutive scalar philox_block calls.
inline void philox4_blocks(u64 key, u64 salt, u64 blk, u64 out[8]) {
    const __m256i mask32 = _mm256_set1_epi64x(0xffffffffll);
    const __m256i m0 = _mm256_set1_epi64x(0xd2511f53ll);
    const __m256i m1 = _mm256_set1_epi64x(0xcd9e8d57ll);
    const __m256i w0 = _mm256_set1_epi64x(0x9e3779b9ll);
    const __m256i w1 = _mm256_set1_epi64x(0xbb67ae85ll);

    __m256i blkv = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(blk)),
                                    _mm256_setr_epi64x(0, 1, 2, 3));
    __m256i c0 = _mm256_and_si256(blkv, mask32);
    __m256i c1 = _mm256_srli_epi64(blkv, 32);
    __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(salt & 0xffffffffull));
    __m256i c3 = _mm256_set1_epi64x(static_cast<long long>(salt >> 32));
    __m256i k0 = _mm256_set1_epi64x(static_cast<long long>(key & 0xffffffffull));
    __m256i k1 = _mm256_set1_epi64x(static_cast<long long>(key >> 32));

    for (int round = 0; round < 10; ++round) {
        __m256i p0 = _mm256_mul_epu32(c0, m0);
        __m256i p1 = _mm256_mul_epu32(c2, m1);
        __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c1), k0);
        __m256i n1 = _mm256_and_si256(p1, mask32);
        __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c3), k1);
        __m256i n3 = _mm256_and_si256(p0, mask32);
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0), mask32);
        k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1), mask32);
    }
    __m256i wlo = _mm256_or_si256(c0, _mm256_slli_epi64(c1, 32));
    __m256i whi = _mm256_or_si256(c2, _mm256_slli_epi64(c3, 32));
    __m256i ab = _mm256_unpacklo_epi64(wlo, whi); // b0w0 b0w1 b2w0 b2w1
    __m256i cd = _mm256_unpackhi_epi64(wlo, whi); // b1w0 b1w1 b3w0 b3w1
    store(out, _mm256_permute2x128_si256(ab, cd, 0x20));
    store(out + 4, _mm256_permute2x128_si256(ab, cd, 0x31));
}

void bernoulli_fill_avx2(u64* out, std::size_t n, u64 threshold, rng::Stream s, u64 base) {
    assert((base & 1) == 0);
    const u64 stride = bernoulli_word_stride(n);
    std::size_t w = 0;
    alignas(32) u64 r[8];
    for (; w + 8 <= n; w += 8) {
        __m256i lt0 = _mm256_setzero_si256(), eq0 = _mm256_set1_epi64x(-1);
        __m256i lt1 = _mm256_setzero_si256(), eq1 = _mm256_set1_epi64x(-1);
        for (int k = 0; k < 64; ++k) {
            u64 idx = base + static_cast<u64>(k) * stride + w;
            philox4_blocks(s.k.key, s.k.salt, idx >> 1, r);
            __m256i r0 = load(r);
            __m256i r1 = load(r + 4);
            if ((threshold >> (63 - k)) & 1) {
                lt0 = _mm256_or_si256(lt0, _mm256_andnot_si256(r0, eq0));
                eq0 = _mm256_and_si256(eq0, r0);
                lt1 = _mm256_or_si256(lt1, _mm256_andnot_si256(r1, eq1));
                eq1 = _mm256_and_si256(eq1, r1);
            } else {
                eq0 = _mm256_andnot_si256(r0, eq0);
                eq1 = _mm256_andnot_si256(r1, eq1);
            }
            __m256i any = _mm256_or_si256(eq0, eq1);
            if (_mm256_testz_si256(any, any) || k == 63 || (threshold << (k + 1)) == 0) break;
        }
        store(out + w, lt0);
        store(out + w + 4, lt1);
    }
    if (w < n) detail::bernoulli_fill_range(out, w, n, stride, threshold, s, base);
}

constexpr Backend kAvx2{
    "avx2", &xor_acc_avx2, &and_or_acc_avx2, &equality_fill_avx2, &popcount_avx2,
    &bernoulli_fill_avx2,
};

} // namespace

const Backend* avx2_backend() {
    return __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
}

} // namespace stochldpc::kern

#else

#include "stochldpc/kernels.hpp"

namespace stochldpc::kern {
const Backend* avx2_backend() { return nullptr; }
} // namespace stochldpc::kern

#endif
