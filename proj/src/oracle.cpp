#include "stochldpc/oracle.hpp"

#include <bit>

#include "stochldpc/errors.hpp"

namespace stochldpc::oracle {

OracleResult exact_bitwise_map(const FactorGraph& g, const LikelihoodVector& mu) {
    int n = g.n_vars();
    if (n > 24) raise(errc::too_large, "enumeration limited to 24 variables");
    if (mu.size() != static_cast<std::size_t>(n))
        raise(errc::length_mismatch, "likelihood length != n_vars");

    std::vector<std::uint32_t> chk_mask(g.n_chks(), 0);
    for (int a = 0; a < g.n_chks(); ++a)
        for (int i : g.chk_neighbors(a)) chk_mask[a] |= 1u << i;

    // Split-table word weights: w(x) = lo[x & half] * hi[x >> half_bits].
    int lo_bits = n / 2, hi_bits = n - lo_bits;
    auto build = [&](int first_bit, int count) {
        std::vector<double> t(std::size_t{1} << count, 1.0);
        for (std::uint32_t x = 0; x < t.size(); ++x) {
            double w = 1.0;
            for (int b = 0; b < count; ++b) {
                double p = mu[first_bit + b];
                w *= (x >> b) & 1 ? p : 1.0 - p;
            }
            t[x] = w;
        }
        return t;
    };
    std::vector<double> lo_tab = build(0, lo_bits), hi_tab = build(lo_bits, hi_bits);
    std::uint32_t lo_mask = (1u << lo_bits) - 1;

    OracleResult res;
    res.marginals.assign(n, 0.0);
    double total = 0.0;
    std::vector<double> one_weight(n, 0.0);
    for (std::uint32_t x = 0; x < (1u << n); ++x) {
        bool ok = true;
        for (std::uint32_t m : chk_mask)
            if (std::popcount(x & m) & 1) {
                ok = false;
                break;
            }
        if (!ok) continue;
        double w = lo_tab[x & lo_mask] * hi_tab[x >> lo_bits];
        total += w;
        ++res.codeword_count;
        std::uint32_t bits = x;
        while (bits) {
            int i = std::countr_zero(bits);
            one_weight[i] += w;
            bits &= bits - 1;
        }
    }
    for (int i = 0; i < n; ++i) res.marginals[i] = one_weight[i] / total;
    return res;
}

std::vector<double> exact_chain_distribution(double f, double g, double p1, std::size_t length) {
    std::vector<double> out(length + 1);
    long double p = p1;
    out[0] = static_cast<double>(p);
    for (std::size_t l = 1; l <= length; ++l) {
        p = p * (1.0L - static_cast<long double>(g)) + (1.0L - p) * static_cast<long double>(f);
        out[l] = static_cast<double>(p);
    }
    return out;
}

} // namespace stochldpc::oracle
