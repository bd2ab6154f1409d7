#pragma once

#include <optional>
#include <vector>

#include "stochldpc/factor_graph.hpp"
#include "stochldpc/sp_decoder.hpp"

namespace stochldpc::analysis {

// Two-state chain generated by the equality operator: f is the 0->1 and g
// the 1->0 transition probability; (p0, p1) the distribution of the
// virtual initial state.
struct ChainModel {
    double f = 0.0;
    double g = 0.0;
    double p0 = 0.5;
    double p1 = 0.5;

    double second_eigenvalue() const { return 1.0 - f - g; }
};

// Square non-negative matrix over directed chk->var edges; entry value is
// the Lipschitz constant at the positions allowed by the graph, zero
// elsewhere. Stored as the nonzero pattern plus the shared value.
struct EdgeMatrix {
    std::size_t dim = 0;
    double lips = 0.0;
    std::vector<std::vector<std::uint32_t>> rows; // sorted column ids per row
};

struct BoundInputs {
    double eps = 1e-3;     // target accuracy
    double lips = 2.0;     // Lipschitz constant L
    double lambda = 0.5;   // lower bound on f + g
    int dc = 6;            // max check degree
    int dv = 3;            // max variable degree
    int horizon = 0;       // diameter D on trees, stopping time T* otherwise
};

ChainModel chain_from_inputs(double mu, const std::vector<double>& rhos);
double stationary(const ChainModel& chain);
double marginal_at(const ChainModel& chain, std::size_t ell);
double expected_marginal_estimate(const ChainModel& chain, std::size_t K);

EdgeMatrix build_edge_matrix(const FactorGraph& g, double lips);

// Smallest power ell <= limit with M^ell = 0, computed on the exact
// nonzero pattern; empty when no such power exists within the limit.
std::optional<int> nilpotency_degree(const EdgeMatrix& M, int limit);

long required_dimension(const BoundInputs& b);
double message_gap_bound(const BoundInputs& b, std::size_t K);
double variance_bound(double lambda, std::size_t K);

// Conservative default for the Lipschitz constant of u/(u+v) on the region
// u+v >= lambda; used only inside bound evaluation.
inline double default_lipschitz(double lambda) { return 2.0 / (lambda * lambda); }

// Smallest f+g over iterations, variables and both message families, built
// from sum-product messages (trace from sp::decode).
double estimate_lambda(const FactorGraph& g, const LikelihoodVector& mu, const sp::SpTrace& trace);

} // namespace stochldpc::analysis
