#pragma once

#include <cstdint>
#include <vector>

#include "stochldpc/bit_message.hpp"
#include "stochldpc/channel.hpp"
#include "stochldpc/factor_graph.hpp"
#include "stochldpc/rng.hpp"

namespace stochldpc::mbsd {

struct MbsdConfig {
    std::size_t K = 256;   // half message dimension; messages carry 2K bits
    int T = 60;            // iteration count
    bool early_stop = true;
    // Stream identity for this decode; derive per frame in experiments.
    rng::SeedKey seed = rng::root_key(0);
};

struct MbsdResult {
    std::vector<double> marginal_estimates; // multiples of 1/K
    std::vector<std::uint8_t> hard_bits;
    bool syndrome_satisfied = false;
    int iterations_run = 0;
};

// Elementwise XOR across the list; empty list gives the all-zero vector.
BitMessage xor_combine(const std::vector<BitMessage>& msgs, std::size_t n_bits);

// Sequential agreement scan: emits 1 (0) where every input is 1 (0),
// otherwise repeats the previous output; position 0 is the given virtual
// state.
BitMessage equality_combine_with_state(const std::vector<BitMessage>& msgs, bool y0);
// Same, with the virtual state drawn as a fair coin.
BitMessage equality_combine(const std::vector<BitMessage>& msgs, rng::Sequential& rng);

// Resamples the whole vector i.i.d. from the empirical distribution of the
// tail half (positions K+1 .. 2K), i.e. Bernoulli(ones-in-tail / K).
BitMessage resample_tail(const BitMessage& aux, const rng::Stream& s);

// 2K i.i.d. Bernoulli(mu) bits.
BitMessage sample_channel_message(double mu, std::size_t K, const rng::Stream& s);

MbsdResult decode(const FactorGraph& g, const LikelihoodVector& mu, const MbsdConfig& cfg);

} // namespace stochldpc::mbsd
