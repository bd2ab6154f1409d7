#include "stochldpc/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <sstream>

#include "stochldpc/analysis.hpp"
#include "stochldpc/bit_message.hpp"
#include "stochldpc/channel.hpp"
#include "stochldpc/factor_graph.hpp"
#include "stochldpc/harness.hpp"
#include "stochldpc/mbsd_decoder.hpp"
#include "stochldpc/oracle.hpp"
#include "stochldpc/sp_decoder.hpp"

namespace stochldpc::verify {

namespace {

struct TransitionCounts {
    std::uint64_t n0 = 0, n1 = 0;   // occupancy of positions 0 .. N-2
    std::uint64_t n01 = 0, n10 = 0; // transitions out of those positions
};

TransitionCounts count_transitions(const BitMessage& m) {
    TransitionCounts c;
    std::size_t N = m.n_bits();
    std::uint64_t prev_carry = 0; // bit 63 of the previous word, shifted in
    for (std::size_t w = 0; w < m.n_words(); ++w) {
        std::uint64_t cur = m.words()[w];
        std::size_t hi = std::min<std::size_t>(64, N - w * 64);
        std::uint64_t pair_mask = hi == 64 ? ~0ull : ((1ull << hi) - 1);
        std::uint64_t prev = (cur << 1) | prev_carry; // prev[l] = bit l-1
        std::uint64_t valid = pair_mask; // pairs ending inside this word
        std::uint64_t went01 = ~prev & cur & valid;
        std::uint64_t went10 = prev & ~cur & valid;
        std::uint64_t stay1 = prev & cur & valid;
        std::uint64_t stay0 = ~prev & ~cur & valid;
        if (w == 0) {
            // position 0 has no predecessor inside the vector
            went01 &= ~1ull;
            went10 &= ~1ull;
            stay1 &= ~1ull;
            stay0 &= ~1ull;
        }
        c.n01 += std::popcount(went01);
        c.n10 += std::popcount(went10);
        c.n0 += std::popcount(went01) + std::popcount(stay0);
        c.n1 += std::popcount(went10) + std::popcount(stay1);
        prev_carry = hi == 64 ? cur >> 63 : (cur >> (hi - 1)) & 1;
    }
    return c;
}

// asymptotic std of the empirical mean of a two-state chain at stationarity
double chain_mean_std(double f, double g, std::size_t N) {
    double pi = f / (f + g);
    double r = 1.0 - f - g;
    double corr = 0.0;
    double rk = 1.0;
    for (std::size_t k = 1; k < N; ++k) {
        rk *= r;
        double term = (1.0 - static_cast<double>(k) / N) * rk;
        corr += term;
        if (std::fabs(rk) < 1e-14) break;
    }
    double var = pi * (1.0 - pi) * (1.0 + 2.0 * corr) / static_cast<double>(N);
    return std::sqrt(std::max(var, 1e-300));
}

CheckResult chain_transition_stats(const VerifyOptions& opt) {
    CheckResult res{"chain_transition_stats", true, 1e9, ""};
    int tuples = opt.quick ? 6 : 20;
    std::size_t len = opt.quick ? 200000 : 1000000;
    rng::Sequential pick(rng::derive(rng::root_key(opt.seed), rng::tag("verify/chain")));
    for (int t = 0; t < tuples; ++t) {
        int d = 1 + static_cast<int>(pick.next_u64() % 4);
        double mu = 0.05 + 0.9 * pick.next_unit();
        std::vector<double> rhos(d);
        for (auto& r : rhos) r = 0.05 + 0.9 * pick.next_unit();

        std::vector<BitMessage> inputs;
        inputs.push_back(mbsd::sample_channel_message(
            mu, len / 2, rng::Stream{rng::derive(rng::root_key(opt.seed), rng::tag("verify/chain/in"),
                                                 static_cast<std::uint64_t>(t), 0)}));
        for (int i = 0; i < d; ++i)
            inputs.push_back(mbsd::sample_channel_message(
                rhos[i], len / 2,
                rng::Stream{rng::derive(rng::root_key(opt.seed), rng::tag("verify/chain/in"),
                                        static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(i + 1))}));
        rng::Sequential coin(rng::derive(rng::root_key(opt.seed), rng::tag("verify/chain/coin"),
                                         static_cast<std::uint64_t>(t)));
        BitMessage chain = mbsd::equality_combine(inputs, coin);

        analysis::ChainModel model = analysis::chain_from_inputs(mu, rhos);
        TransitionCounts c = count_transitions(chain);
        double f_hat = c.n0 ? static_cast<double>(c.n01) / c.n0 : 0.0;
        double g_hat = c.n1 ? static_cast<double>(c.n10) / c.n1 : 0.0;
        double pi_hat = static_cast<double>(chain.count_ones()) / len;

        double zf = std::fabs(f_hat - model.f) / std::sqrt(model.f * (1 - model.f) / std::max<std::uint64_t>(c.n0, 1));
        double zg = std::fabs(g_hat - model.g) / std::sqrt(model.g * (1 - model.g) / std::max<std::uint64_t>(c.n1, 1));
        double zpi = std::fabs(pi_hat - analysis::stationary(model)) / chain_mean_std(model.f, model.g, len);
        double z = std::max({zf, zg, zpi});
        res.margin = std::min(res.margin, 4.0 - z);
        if (z > 4.0) {
            res.pass = false;
            std::ostringstream os;
            os << "tuple " << t << " z=" << z;
            res.detail = os.str();
        }
    }
    if (res.detail.empty()) res.detail = "worst |z| over transitions and stationary mass";
    return res;
}

CheckResult chain_marginal_closed_form(const VerifyOptions& opt) {
    CheckResult res{"chain_marginal_closed_form", true, 1e9, "max |closed form - powering|"};
    int chains = opt.quick ? 30 : 100;
    rng::Sequential pick(rng::derive(rng::root_key(opt.seed), rng::tag("verify/marginal")));
    double worst = 0.0;
    for (int t = 0; t < chains; ++t) {
        int d = 1 + static_cast<int>(pick.next_u64() % 4);
        double mu = 0.02 + 0.96 * pick.next_unit();
        std::vector<double> rhos(d);
        for (auto& r : rhos) r = 0.02 + 0.96 * pick.next_unit();
        analysis::ChainModel m = analysis::chain_from_inputs(mu, rhos);
        m.p1 = pick.next_unit();
        m.p0 = 1.0 - m.p1;
        auto exact = oracle::exact_chain_distribution(m.f, m.g, m.p1, 10000);
        for (std::size_t ell = 0; ell <= 10000; ell += (ell < 64 ? 1 : 37))
            worst = std::max(worst, std::fabs(analysis::marginal_at(m, ell) - exact[ell]));
    }
    res.margin = 1e-12 - worst;
    res.pass = worst <= 1e-12;
    return res;
}

CheckResult edge_matrix_nilpotency(const VerifyOptions& opt) {
    CheckResult res{"edge_matrix_nilpotency", true, 1e9, ""};
    int trees = opt.quick ? 15 : 50;
    rng::Sequential pick(rng::derive(rng::root_key(opt.seed), rng::tag("verify/nilpotent")));
    for (int t = 0; t < trees; ++t) {
        int n = 2 + static_cast<int>(pick.next_u64() % 29);
        int m = 1 + static_cast<int>(pick.next_u64() % n);
        FactorGraph g = random_tree(n, m, pick.next_u64());
        GraphStats st = analyze(g);
        auto M = analysis::build_edge_matrix(g, 2.0);
        auto deg = analysis::nilpotency_degree(M, 100);
        int diam = std::max(1, *st.diameter);
        if (!deg || *deg > diam) {
            res.pass = false;
            res.detail = "tree " + std::to_string(t) + " violates the diameter bound";
        } else {
            res.margin = std::min(res.margin, static_cast<double>(diam - *deg));
        }
    }
    for (int k = 2; k <= 11; ++k) {
        auto M = analysis::build_edge_matrix(cycle_graph(k), 2.0);
        if (analysis::nilpotency_degree(M, 100)) {
            res.pass = false;
            res.detail = "cycle " + std::to_string(k) + " reported nilpotent";
        }
    }
    if (res.detail.empty()) res.detail = "degree <= tree diameter; cycles never nilpotent";
    return res;
}

CheckResult dimension_formula(const VerifyOptions&) {
    CheckResult res{"required_dimension_arithmetic", true, 0.0, ""};
    analysis::BoundInputs b;
    b.eps = 1e-3;
    b.lips = 2.0;
    b.lambda = 0.5;
    b.dc = 6;
    b.dv = 3;
    b.horizon = 4;
    long K = analysis::required_dimension(b);
    res.pass = K == 28;
    res.detail = "K(1e-3, L=2, lambda=0.5, dc=6, dv=3, D=4) = " + std::to_string(K);
    long prev = 0;
    for (double eps = 1e-1; eps >= 1e-8; eps /= 10) {
        b.eps = eps;
        long cur = analysis::required_dimension(b);
        if (cur < prev) res.pass = false;
        prev = cur;
    }
    b.eps = 1e-3;
    prev = 0;
    for (int D = 0; D <= 12; ++D) {
        b.horizon = D;
        long cur = analysis::required_dimension(b);
        if (cur < prev) res.pass = false;
        prev = cur;
    }
    return res;
}

CheckResult variance_formula(const VerifyOptions&) {
    CheckResult res{"variance_bound_arithmetic", true, 0.0, "spot values and halving under K doubling"};
    res.pass = analysis::variance_bound(0.5, 100) == 0.05 && analysis::variance_bound(1.0, 1) == 3.0;
    for (std::size_t K = 8; K <= 4096; K *= 2)
        if (analysis::variance_bound(0.31, 2 * K) != analysis::variance_bound(0.31, K) / 2.0)
            res.pass = false;
    return res;
}

CheckResult sp_tree_exactness(const VerifyOptions& opt) {
    CheckResult res{"sp_tree_exactness", true, 1e9, "max |sp - enumeration| on tree fixtures"};
    int trees = opt.quick ? 5 : 25;
    rng::Sequential pick(rng::derive(rng::root_key(opt.seed), rng::tag("verify/tree")));
    double worst = 0.0;
    for (int t = 0; t < trees; ++t) {
        int n = 3 + static_cast<int>(pick.next_u64() % 13);
        int m = 1 + static_cast<int>(pick.next_u64() % (n - 1));
        FactorGraph g = random_tree(n, m, pick.next_u64(), 2);
        LikelihoodVector mu(n);
        for (auto& p : mu) p = 0.05 + 0.9 * pick.next_unit();
        auto st = analyze(g);
        sp::DecodeOptions o;
        o.max_iters = std::max(1, *st.diameter);
        o.early_stop = false;
        auto sp_res = sp::decode(g, mu, o);
        auto exact = oracle::exact_bitwise_map(g, mu);
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::fabs(sp_res.marginals[i] - exact.marginals[i]));
    }
    res.margin = 1e-9 - worst;
    res.pass = worst <= 1e-9;
    return res;
}

CheckResult mbsd_tree_moments(const VerifyOptions& opt) {
    CheckResult res{"mbsd_tree_moments", true, 1e9, "bias and variance against the bounds"};
    FactorGraph g = random_tree(10, 5, 7, 2);
    rng::Sequential pick(rng::derive(rng::root_key(opt.seed), rng::tag("verify/moments")));
    LikelihoodVector mu(10);
    for (auto& p : mu) p = 0.1 + 0.8 * pick.next_unit();
    harness::MomentStudyConfig mc;
    mc.K_grid = {64, 256};
    mc.runs = opt.quick ? 200 : 400;
    mc.seed = opt.seed;
    mc.threads = opt.threads;
    auto records = harness::run_moment_study(g, mu, mc);
    for (const auto& r : records) {
        double se_mean = std::sqrt(r.var_gamma / r.runs);
        double bias = std::fabs(r.mean_gamma - r.sp_gamma);
        if (bias > 0.02 + 3 * se_mean) res.pass = false;
        double var_est_std = r.var_gamma * std::sqrt(2.0 / (r.runs - 1));
        if (r.var_gamma > r.var_bound + 3 * var_est_std) res.pass = false;
        res.margin = std::min(res.margin, r.var_bound + 3 * var_est_std - r.var_gamma);
    }
    return res;
}

} // namespace

std::vector<CheckResult> run_all(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    out.push_back(chain_transition_stats(opt));
    out.push_back(chain_marginal_closed_form(opt));
    out.push_back(edge_matrix_nilpotency(opt));
    out.push_back(dimension_formula(opt));
    out.push_back(variance_formula(opt));
    out.push_back(sp_tree_exactness(opt));
    out.push_back(mbsd_tree_moments(opt));
    return out;
}

void write_jsonl(const std::vector<CheckResult>& results, std::ostream& out) {
    for (const auto& r : results) {
        out << "{\"check\":\"" << r.name << "\",\"pass\":" << (r.pass ? "true" : "false")
            << ",\"margin\":" << r.margin << ",\"detail\":\"" << r.detail << "\"}\n";
    }
}

} // namespace stochldpc::verify
