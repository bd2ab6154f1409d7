#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stochldpc/channel.hpp"
#include "stochldpc/factor_graph.hpp"

namespace stochldpc::sp {

// Message state at one iteration; arrays indexed by the graph's v2c / c2v
// edge ids.
struct SpState {
    std::vector<double> var_to_chk;
    std::vector<double> chk_to_var;
    std::vector<double> marginals;
    int iteration = 0;
};

struct DecodeResult {
    std::vector<std::uint8_t> hard_bits;
    std::vector<double> marginals;
    int iterations_run = 0;
    bool syndrome_satisfied = false;
    bool converged = false;
};

struct DecodeOptions {
    int max_iters = 60;
    bool early_stop = true;
    double tol = 1e-12;
};

// Optional per-iteration capture used by the analysis module.
struct SpTrace {
    // chk_to_var messages after the check pass of each iteration t = 0, 1, ...
    std::vector<std::vector<double>> chk_to_var;
    // marginals gamma^{t}, t = 0 .. iterations_run (gamma^0 = channel input)
    std::vector<std::vector<double>> marginals;
};

double check_update(std::span<const double> incoming);
double var_update(double channel_mu, std::span<const double> incoming);
double marginalize(double channel_mu, std::span<const double> incoming);

std::vector<std::uint8_t> hard_decision(const std::vector<double>& marginals);

DecodeResult decode(const FactorGraph& g, const LikelihoodVector& mu, const DecodeOptions& opt,
                    SpTrace* trace = nullptr);

// First iteration t with max_i |gamma_i^t - gamma_i^*| <= eps, where
// gamma^* is the fixed point reached within max_iters at tolerance 1e-12.
int stopping_time(const FactorGraph& g, const LikelihoodVector& mu, double eps, int max_iters);

} // namespace stochldpc::sp
