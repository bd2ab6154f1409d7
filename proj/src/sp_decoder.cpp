#include "stochldpc/sp_decoder.hpp"

#include <cmath>

#include "stochldpc/errors.hpp"

namespace stochldpc::sp {

double check_update(std::span<const double> incoming) {
    double prod = 1.0;
    for (double mu : incoming) prod *= 1.0 - 2.0 * mu;
    return clamp_prob(0.5 - 0.5 * prod);
}

namespace {

double log_ratio_combine(double channel_mu, std::span<const double> incoming) {
    double s1 = std::log(channel_mu);
    double s0 = std::log1p(-channel_mu);
    for (double mu : incoming) {
        s1 += std::log(mu);
        s0 += std::log1p(-mu);
    }
    return clamp_prob(1.0 / (1.0 + std::exp(s0 - s1)));
}

} // namespace

double var_update(double channel_mu, std::span<const double> incoming) {
    return log_ratio_combine(channel_mu, incoming);
}

double marginalize(double channel_mu, std::span<const double> incoming) {
    return log_ratio_combine(channel_mu, incoming);
}

std::vector<std::uint8_t> hard_decision(const std::vector<double>& marginals) {
    std::vector<std::uint8_t> bits(marginals.size());
    for (std::size_t i = 0; i < marginals.size(); ++i) bits[i] = marginals[i] > 0.5 ? 1 : 0;
    return bits;
}

DecodeResult decode(const FactorGraph& g, const LikelihoodVector& mu, const DecodeOptions& opt,
                    SpTrace* trace) {
    if (mu.size() != static_cast<std::size_t>(g.n_vars()))
        raise(errc::length_mismatch, "likelihood length != n_vars");
    std::size_t E = g.n_edges();
    std::vector<double> v2c(E), c2v(E, 0.5), v2c_next(E), c2v_prev(E);
    std::vector<double> l1(E), l0(E);
    std::vector<double> gamma(g.n_vars());

    for (std::size_t e = 0; e < E; ++e) v2c[e] = clamp_prob(mu[g.v2c_var(e)]);
    for (int i = 0; i < g.n_vars(); ++i) gamma[i] = clamp_prob(mu[i]);
    if (trace) {
        trace->chk_to_var.clear();
        trace->marginals.clear();
        trace->marginals.push_back(gamma);
    }

    DecodeResult res;
    res.marginals = gamma;
    res.hard_bits = hard_decision(gamma);
    res.syndrome_satisfied = syndrome_ok(g, res.hard_bits);

    for (int t = 0; t < opt.max_iters; ++t) {
        // check pass: forward/backward partial products of (1 - 2 mu)
        c2v_prev.swap(c2v);
        for (int a = 0; a < g.n_chks(); ++a) {
            const auto& nb = g.chk_neighbors(a);
            std::size_t d = nb.size();
            std::size_t base = g.c2v_begin(a);
            double prefix = 1.0;
            for (std::size_t s = 0; s < d; ++s) {
                c2v[base + s] = prefix;
                prefix *= 1.0 - 2.0 * v2c[g.c2v_to_v2c(base + s)];
            }
            double suffix = 1.0;
            for (std::size_t s = d; s-- > 0;) {
                c2v[base + s] = clamp_prob(0.5 - 0.5 * c2v[base + s] * suffix);
                suffix *= 1.0 - 2.0 * v2c[g.c2v_to_v2c(base + s)];
            }
        }
        if (trace) trace->chk_to_var.push_back(c2v);

        // variable pass in the log domain, plus marginals from the same
        // incoming messages
        for (std::size_t e = 0; e < E; ++e) {
            l1[e] = std::log(c2v[e]);
            l0[e] = std::log1p(-c2v[e]);
        }
        for (int i = 0; i < g.n_vars(); ++i) {
            double cmu = clamp_prob(mu[i]);
            double s1 = std::log(cmu);
            double s0 = std::log1p(-cmu);
            const auto& nb = g.var_neighbors(i);
            std::size_t base = g.v2c_begin(i);
            for (std::size_t s = 0; s < nb.size(); ++s) {
                std::size_t c2v_e = g.v2c_to_c2v(base + s);
                s1 += l1[c2v_e];
                s0 += l0[c2v_e];
            }
            gamma[i] = clamp_prob(1.0 / (1.0 + std::exp(s0 - s1)));
            for (std::size_t s = 0; s < nb.size(); ++s) {
                std::size_t c2v_e = g.v2c_to_c2v(base + s);
                v2c_next[base + s] =
                    clamp_prob(1.0 / (1.0 + std::exp((s0 - l0[c2v_e]) - (s1 - l1[c2v_e]))));
            }
        }

        double delta = 0.0;
        for (std::size_t e = 0; e < E; ++e) {
            delta = std::max(delta, std::fabs(v2c_next[e] - v2c[e]));
            delta = std::max(delta, std::fabs(c2v[e] - c2v_prev[e]));
        }
        v2c.swap(v2c_next);
        res.iterations_run = t + 1;
        res.marginals = gamma;
        res.hard_bits = hard_decision(gamma);
        res.syndrome_satisfied = syndrome_ok(g, res.hard_bits);
        if (trace) trace->marginals.push_back(gamma);
        if (delta < opt.tol) {
            res.converged = true;
            break;
        }
        if (opt.early_stop && res.syndrome_satisfied) break;
    }
    return res;
}

int stopping_time(const FactorGraph& g, const LikelihoodVector& mu, double eps, int max_iters) {
    SpTrace trace;
    DecodeOptions opt;
    opt.max_iters = max_iters;
    opt.early_stop = false;
    opt.tol = 1e-12;
    DecodeResult res = decode(g, mu, opt, &trace);
    if (!res.converged)
        raise(errc::no_convergence, "sum-product did not reach a fixed point");
    const auto& star = res.marginals;
    for (int t = 0; t < static_cast<int>(trace.marginals.size()); ++t) {
        double worst = 0.0;
        for (int i = 0; i < g.n_vars(); ++i)
            worst = std::max(worst, std::fabs(trace.marginals[t][i] - star[i]));
        if (worst <= eps) return t;
    }
    return res.iterations_run; // unreachable: the last entry equals star
}

} // namespace stochldpc::sp
