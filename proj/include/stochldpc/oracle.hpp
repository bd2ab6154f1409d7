#pragma once

#include <cstdint>
#include <vector>

#include "stochldpc/channel.hpp"
#include "stochldpc/factor_graph.hpp"

namespace stochldpc::oracle {

struct OracleResult {
    std::vector<double> marginals; // exact P(x_i = 1 | y), posterior over the code
    std::uint64_t codeword_count = 0;
};

// Brute-force bitwise MAP by enumerating all 2^n words (n <= 24).
OracleResult exact_bitwise_map(const FactorGraph& g, const LikelihoodVector& mu);

// P(state = 1) at positions 0..length for a two-state chain with
// transition probabilities f (0->1), g (1->0) and initial P(1) = p1.
// Long-double iteration; serves as the reference for closed forms.
std::vector<double> exact_chain_distribution(double f, double g, double p1, std::size_t length);

} // namespace stochldpc::oracle
