#include "stochldpc/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "stochldpc/errors.hpp"

namespace stochldpc::analysis {

ChainModel chain_from_inputs(double mu, const std::vector<double>& rhos) {
    ChainModel c;
    c.f = mu;
    c.g = 1.0 - mu;
    for (double r : rhos) {
        c.f *= r;
        c.g *= 1.0 - r;
    }
    if (c.f + c.g <= 0.0) raise(errc::degenerate_chain, "f + g = 0");
    return c;
}

double stationary(const ChainModel& chain) {
    double denom = chain.f + chain.g;
    if (denom <= 0.0) raise(errc::degenerate_chain, "f + g = 0");
    return chain.f / denom;
}

double marginal_at(const ChainModel& chain, std::size_t ell) {
    double denom = chain.f + chain.g;
    if (denom <= 0.0) raise(errc::degenerate_chain, "f + g = 0");
    double pi = chain.f / denom;
    double coef = (chain.g * chain.p1 - chain.f * chain.p0) / denom;
    return pi + coef * std::pow(1.0 - denom, static_cast<double>(ell));
}

double expected_marginal_estimate(const ChainModel& chain, std::size_t K) {
    if (K < 1) raise(errc::config_invalid, "K must be at least 1");
    double sum = 0.0;
    for (std::size_t ell = K + 1; ell <= 2 * K; ++ell) sum += marginal_at(chain, ell);
    return sum / static_cast<double>(K);
}

EdgeMatrix build_edge_matrix(const FactorGraph& g, double lips) {
    EdgeMatrix M;
    M.dim = g.n_edges();
    M.lips = lips;
    M.rows.assign(M.dim, {});
    for (std::size_t r = 0; r < M.dim; ++r) {
        int a = g.c2v_chk(r);
        int i = g.c2v_var(r);
        for (std::size_t s = 0; s < g.chk_neighbors(a).size(); ++s) {
            int j = g.chk_neighbors(a)[s];
            if (j == i) continue;
            const auto& nbj = g.var_neighbors(j);
            for (std::size_t q = 0; q < nbj.size(); ++q) {
                int b = nbj[q];
                if (b == a) continue;
                // column = c2v id of (b -> j)
                const auto& cb = g.chk_neighbors(b);
                std::size_t slot = std::lower_bound(cb.begin(), cb.end(), j) - cb.begin();
                M.rows[r].push_back(static_cast<std::uint32_t>(g.c2v_id(b, static_cast<int>(slot))));
            }
        }
        std::sort(M.rows[r].begin(), M.rows[r].end());
    }
    return M;
}

namespace {

using PatternMatrix = std::vector<std::vector<std::uint64_t>>; // row bitsets

PatternMatrix to_pattern(const EdgeMatrix& M) {
    std::size_t words = (M.dim + 63) / 64;
    PatternMatrix P(M.dim, std::vector<std::uint64_t>(words, 0));
    for (std::size_t r = 0; r < M.dim; ++r)
        for (std::uint32_t c : M.rows[r]) P[r][c >> 6] |= 1ull << (c & 63);
    return P;
}

bool is_zero(const PatternMatrix& P) {
    for (const auto& row : P)
        for (std::uint64_t w : row)
            if (w) return false;
    return true;
}

// boolean product: out.row[r] = union of B.row[c] over c set in A.row[r]
PatternMatrix bool_multiply(const PatternMatrix& A, const PatternMatrix& B) {
    std::size_t dim = A.size(), words = dim ? A[0].size() : 0;
    PatternMatrix out(dim, std::vector<std::uint64_t>(words, 0));
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t bits = A[r][w];
            while (bits) {
                int b = std::countr_zero(bits);
                bits &= bits - 1;
                std::size_t c = w * 64 + static_cast<std::size_t>(b);
                for (std::size_t k = 0; k < words; ++k) out[r][k] |= B[c][k];
            }
        }
    }
    return out;
}

} // namespace

std::optional<int> nilpotency_degree(const EdgeMatrix& M, int limit) {
    if (M.dim == 0) return 1;
    PatternMatrix base = to_pattern(M);
    PatternMatrix power = base;
    for (int ell = 1; ell <= limit; ++ell) {
        if (is_zero(power)) return ell;
        if (ell == limit) break;
        power = bool_multiply(power, base);
    }
    return std::nullopt;
}

namespace {

double contraction_factor(const BoundInputs& b) {
    double c = b.lips * (b.dc - 1) * (b.dv - 1);
    if (c <= 1.0) raise(errc::invalid_regime, "L*(dc-1)*(dv-1) must exceed 1");
    return c;
}

} // namespace

long required_dimension(const BoundInputs& b) {
    if (!(b.eps > 0.0)) raise(errc::config_invalid, "eps must be positive");
    if (!(b.lambda > 0.0 && b.lambda <= 1.0)) raise(errc::config_invalid, "lambda must be in (0,1]");
    double c = contraction_factor(b);
    double first = 0.0;
    if (b.lambda < 1.0)
        first = (std::log(b.eps) - b.horizon * std::log(c)) / std::log(1.0 - b.lambda);
    double second = 3.0 / b.lambda;
    return static_cast<long>(std::ceil(std::max(first, second)));
}

double message_gap_bound(const BoundInputs& b, std::size_t K) {
    if (K < 1) raise(errc::config_invalid, "K must be at least 1");
    if (!(b.lambda > 0.0 && b.lambda <= 1.0)) raise(errc::config_invalid, "lambda must be in (0,1]");
    double c = contraction_factor(b);
    double lead = (b.dc - 1) * std::pow(1.0 - b.lambda, static_cast<double>(K + 1)) /
                  (static_cast<double>(K) * b.lambda);
    return lead * std::pow(c, static_cast<double>(b.horizon)) / (c - 1.0);
}

double variance_bound(double lambda, std::size_t K) {
    if (!(lambda > 0.0 && lambda <= 1.0)) raise(errc::config_invalid, "lambda must be in (0,1]");
    if (K < 1) raise(errc::config_invalid, "K must be at least 1");
    return (1.0 + 2.0 / lambda) / static_cast<double>(K);
}

double estimate_lambda(const FactorGraph& g, const LikelihoodVector& mu, const sp::SpTrace& trace) {
    double lambda = 1.0;
    for (const auto& c2v : trace.chk_to_var) {
        for (int i = 0; i < g.n_vars(); ++i) {
            double cmu = clamp_prob(mu[i]);
            double f_all = cmu, g_all = 1.0 - cmu;
            const auto& nb = g.var_neighbors(i);
            for (std::size_t s = 0; s < nb.size(); ++s) {
                int a = nb[s];
                const auto& ca = g.chk_neighbors(a);
                std::size_t slot = std::lower_bound(ca.begin(), ca.end(), i) - ca.begin();
                double msg = c2v[g.c2v_id(a, static_cast<int>(slot))];
                f_all *= msg;
                g_all *= 1.0 - msg;
            }
            lambda = std::min(lambda, f_all + g_all);
            // per-edge family: drop one factor at a time
            for (std::size_t s = 0; s < nb.size(); ++s) {
                int a = nb[s];
                const auto& ca = g.chk_neighbors(a);
                std::size_t slot = std::lower_bound(ca.begin(), ca.end(), i) - ca.begin();
                double msg = c2v[g.c2v_id(a, static_cast<int>(slot))];
                double fe = f_all / msg;
                double ge = g_all / (1.0 - msg);
                lambda = std::min(lambda, fe + ge);
            }
        }
    }
    return lambda;
}

} // namespace stochldpc::analysis
