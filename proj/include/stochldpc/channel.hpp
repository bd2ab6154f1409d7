#pragma once

#include <vector>

#include "stochldpc/rng.hpp"

namespace stochldpc {

// Probability floor shared by the channel and the message-passing updates;
// keeps all products strictly inside (0, 1).
inline constexpr double kProbFloor = 1e-9;

inline double clamp_prob(double p) {
    if (p < kProbFloor) return kProbFloor;
    if (p > 1.0 - kProbFloor) return 1.0 - kProbFloor;
    return p;
}

struct ChannelParams {
    double sigma2 = 1.0;
    double rate = 0.5;
    bool nds_enabled = false;
    double nds_param = 0.0; // 0 means "use sigma2"

    double effective_nds() const { return nds_param > 0.0 ? nds_param : sigma2; }
};

// Per-variable P(x_i = 1 | y_i), clamped into [kProbFloor, 1 - kProbFloor].
using LikelihoodVector = std::vector<double>;

double ebno_db_to_sigma2(double ebno_db, double rate);

// BPAM, bit 0 -> +1; the all-zero codeword is transmitted everywhere.
std::vector<double> transmit_all_zero(int n, double sigma2, rng::Sequential& rng);

LikelihoodVector likelihoods(const std::vector<double>& y, double sigma2);
LikelihoodVector likelihoods(const std::vector<double>& y, const ChannelParams& params);

} // namespace stochldpc
