#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace stochldpc::rng {

// Counter-based randomness (Philox4x32-10). Every consumer owns a derived
// stream and addresses 64-bit words by index, so results do not depend on
// evaluation order or thread count.

inline constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

// fnv1a over a string literal, used for stream tags.
constexpr std::uint64_t tag(const char* s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001b3ull;
    return h;
}

// Stream identity: a Philox key plus a counter salt occupying the upper
// half of the 128-bit counter. Block indices occupy the lower half.
struct SeedKey {
    std::uint64_t key = 0;
    std::uint64_t salt = 0;
};

constexpr std::uint64_t fold1(std::uint64_t h, std::uint64_t w) {
    return mix64((h + golden) ^ w);
}

// Child-stream derivation: parent -> (tag, a, b). The tree used by the
// harness is documented in the README.
constexpr SeedKey derive(SeedKey parent, std::uint64_t t, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t k = fold1(fold1(fold1(parent.key, t), a), b);
    std::uint64_t s = fold1(fold1(fold1(parent.salt, ~t), b), a);
    return SeedKey{k, s};
}

constexpr SeedKey root_key(std::uint64_t seed) {
    return SeedKey{mix64(seed ^ golden), mix64(~seed * 0x100000001b3ull)};
}

// One Philox4x32-10 block: 128 bits from (key, salt, block index).
std::array<std::uint64_t, 2> philox_block(std::uint64_t key, std::uint64_t salt, std::uint64_t block);

// Randomly addressable stream of 64-bit words.
struct Stream {
    SeedKey k;

    std::uint64_t word_at(std::uint64_t index) const {
        auto b = philox_block(k.key, k.salt, index >> 1);
        return b[index & 1];
    }
};

// Sequential view over a stream, with uniform and Gaussian draws.
class Sequential {
public:
    explicit Sequential(SeedKey k) : s_{k} {}
    explicit Sequential(Stream s) : s_{s} {}

    std::uint64_t next_u64() { return s_.word_at(idx_++); }

    // uniform in (0, 1]
    double next_unit() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1p-53; }

    bool next_coin() { return next_u64() & 1; }

    // Box-Muller; formula kept explicit so the draw sequence is pinned by
    // this code rather than the standard library.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    Stream s_;
    std::uint64_t idx_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Fixed-point Bernoulli threshold: bits are 1 with probability t / 2^64.
inline std::uint64_t unit_to_threshold(double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return ~0ull;
    long double s = static_cast<long double>(p) * 0x1p64L;
    if (s >= 0x1p64L) return ~0ull;
    return static_cast<std::uint64_t>(s);
}

// Exact rational threshold c/d (0 < c < d): floor(c * 2^64 / d).
inline std::uint64_t ratio_to_threshold(std::uint64_t c, std::uint64_t d) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(c) << 64) / d);
}

} // namespace stochldpc::rng
