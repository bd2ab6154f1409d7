#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stochldpc/channel.hpp"
#include "stochldpc/factor_graph.hpp"
#include "stochldpc/rng.hpp"
#include "stochldpc/sp_decoder.hpp"

namespace stochldpc::sd {

struct SdConfig {
    int cycles = 30000;
    int em_length = 25;
    int output_window = 0; // 0 means cycles / 2
    bool early_stop = true;
    rng::SeedKey seed = rng::root_key(0);
};

// Randomness interface: all draws are keyed by (entity, cycle) so the
// computation commutes with node relabeling when the key map is carried
// along (exercised by the equivariance test).
struct SdRandom {
    // uniform 64-bit word for variable i's channel bit at a cycle
    std::function<std::uint64_t(int i, int cycle)> chan_word;
    // uniform 64-bit word for the edge-memory draw of v2c edge e at a cycle
    std::function<std::uint64_t(std::size_t e, int cycle)> edge_word;
};

SdRandom default_random(rng::SeedKey seed);

sp::DecodeResult sd_decode(const FactorGraph& g, const LikelihoodVector& mu, const SdConfig& cfg);
sp::DecodeResult sd_decode(const FactorGraph& g, const LikelihoodVector& mu, const SdConfig& cfg,
                           const SdRandom& rnd);

} // namespace stochldpc::sd
