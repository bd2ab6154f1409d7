#include "stochldpc/rng.hpp"

namespace stochldpc::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xd2511f53u;
constexpr std::uint32_t kPhiloxM1 = 0xcd9e8d57u;
constexpr std::uint32_t kPhiloxW0 = 0x9e3779b9u;
constexpr std::uint32_t kPhiloxW1 = 0xbb67ae85u;

} // namespace

std::array<std::uint64_t, 2> philox_block(std::uint64_t key, std::uint64_t salt, std::uint64_t block) {
    std::uint32_t c0 = static_cast<std::uint32_t>(block);
    std::uint32_t c1 = static_cast<std::uint32_t>(block >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(salt);
    std::uint32_t c3 = static_cast<std::uint32_t>(salt >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);

    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
        std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
        std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
        std::uint32_t n1 = static_cast<std::uint32_t>(p1);
        std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
        std::uint32_t n3 = static_cast<std::uint32_t>(p0);
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {static_cast<std::uint64_t>(c0) | (static_cast<std::uint64_t>(c1) << 32),
            static_cast<std::uint64_t>(c2) | (static_cast<std::uint64_t>(c3) << 32)};
}

} // namespace stochldpc::rng
