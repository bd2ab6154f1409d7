#include "stochldpc/mbsd_decoder.hpp"

#include <cstring>

#include "stochldpc/errors.hpp"
#include "stochldpc/sp_decoder.hpp"

namespace stochldpc::mbsd {

namespace {

using kern::u64;

// word offset reserved inside per-edge streams: index 0 is the equality
// operator's virtual-state coin, Bernoulli fills start here (even, and
// clear of the coin for every stride).
constexpr u64 kFillBase = 64;

constexpr u64 tag_chan = rng::tag("mbsd/chan");
constexpr u64 tag_edge = rng::tag("mbsd/edge");
constexpr u64 tag_marg = rng::tag("mbsd/marg");

void fill_bernoulli_words(u64* out, std::size_t n_words, std::size_t n_bits, double p,
                          const rng::Stream& s, u64 base) {
    if (p <= 0.0) {
        std::memset(out, 0, n_words * sizeof(u64));
        return;
    }
    if (p >= 1.0) {
        std::memset(out, 0xff, n_words * sizeof(u64));
    } else {
        kern::backend().bernoulli_fill(out, n_words, rng::unit_to_threshold(p), s, base);
    }
    if (n_bits & 63) out[n_words - 1] &= ~0ull >> (64 - (n_bits & 63));
}

void fill_tail_resample(u64* out, std::size_t n_words, std::size_t n_bits, u64 ones, u64 K,
                        const rng::Stream& s, u64 base) {
    if (ones == 0) {
        std::memset(out, 0, n_words * sizeof(u64));
        return;
    }
    if (ones >= K) {
        std::memset(out, 0xff, n_words * sizeof(u64));
    } else {
        kern::backend().bernoulli_fill(out, n_words, rng::ratio_to_threshold(ones, K), s, base);
    }
    if (n_bits & 63) out[n_words - 1] &= ~0ull >> (64 - (n_bits & 63));
}

} // namespace

BitMessage xor_combine(const std::vector<BitMessage>& msgs, std::size_t n_bits) {
    BitMessage out(n_bits);
    for (const auto& m : msgs) {
        if (m.n_bits() != n_bits) raise(errc::length_mismatch, "xor_combine length mismatch");
        kern::backend().xor_acc(out.words(), m.words(), out.n_words());
    }
    return out;
}

BitMessage equality_combine_with_state(const std::vector<BitMessage>& msgs, bool y0) {
    if (msgs.empty()) raise(errc::empty_input, "equality operator needs at least one input");
    std::size_t n_bits = msgs[0].n_bits();
    std::size_t n_words = msgs[0].n_words();
    std::vector<u64> and_acc(msgs[0].words(), msgs[0].words() + n_words);
    std::vector<u64> or_acc = and_acc;
    for (std::size_t i = 1; i < msgs.size(); ++i) {
        if (msgs[i].n_bits() != n_bits) raise(errc::length_mismatch, "equality length mismatch");
        kern::backend().and_or_acc(and_acc.data(), or_acc.data(), msgs[i].words(), n_words);
    }
    BitMessage out(n_bits);
    kern::backend().equality_fill(and_acc.data(), or_acc.data(), out.words(), n_words, y0);
    out.mask_tail();
    return out;
}

BitMessage equality_combine(const std::vector<BitMessage>& msgs, rng::Sequential& rng) {
    return equality_combine_with_state(msgs, rng.next_coin());
}

BitMessage resample_tail(const BitMessage& aux, const rng::Stream& s) {
    std::size_t K = aux.n_bits() / 2;
    BitMessage out(aux.n_bits());
    u64 ones = aux.count_ones(K, 2 * K);
    fill_tail_resample(out.words(), out.n_words(), out.n_bits(), ones, K, s, 0);
    return out;
}

BitMessage sample_channel_message(double mu, std::size_t K, const rng::Stream& s) {
    if (!(mu > 0.0 && mu < 1.0)) raise(errc::config_invalid, "mu must be in (0,1)");
    BitMessage out(2 * K);
    fill_bernoulli_words(out.words(), out.n_words(), out.n_bits(), mu, s, 0);
    return out;
}

MbsdResult decode(const FactorGraph& g, const LikelihoodVector& mu, const MbsdConfig& cfg) {
    if (cfg.K < 1 || cfg.T < 1) raise(errc::config_invalid, "K and T must be at least 1");
    if (mu.size() != static_cast<std::size_t>(g.n_vars()))
        raise(errc::length_mismatch, "likelihood length != n_vars");

    const std::size_t K = cfg.K;
    const std::size_t n_bits = 2 * K;
    const std::size_t W = (n_bits + 63) / 64;
    const std::size_t E = g.n_edges();
    const int n = g.n_vars();

    std::vector<u64> v2c(E * W), v2c_next(E * W), c2v(E * W), chan(n * W);
    std::vector<u64> total(W), and_acc(W), or_acc(W), aux(W);

    auto chan_stream = [&](int i, int t) {
        return rng::Stream{rng::derive(cfg.seed, tag_chan, static_cast<u64>(i), static_cast<u64>(t))};
    };
    auto edge_stream = [&](std::size_t e, int t) {
        return rng::Stream{rng::derive(cfg.seed, tag_edge, static_cast<u64>(e), static_cast<u64>(t))};
    };
    auto marg_stream = [&](int i, int t) {
        return rng::Stream{rng::derive(cfg.seed, tag_marg, static_cast<u64>(i), static_cast<u64>(t))};
    };

    // t = 0: every outgoing message is the variable's first channel draw
    for (int i = 0; i < n; ++i) {
        fill_bernoulli_words(chan.data() + i * W, W, n_bits, clamp_prob(mu[i]), chan_stream(i, 0), 0);
        for (std::size_t s = 0; s < g.var_neighbors(i).size(); ++s)
            std::memcpy(v2c.data() + g.v2c_id(i, static_cast<int>(s)) * W, chan.data() + i * W,
                        W * sizeof(u64));
    }

    MbsdResult res;
    res.marginal_estimates.assign(n, 0.0);
    res.hard_bits.assign(n, 0);

    for (int t = 0; t < cfg.T; ++t) {
        // (a) check messages: XOR of the other inputs
        for (int a = 0; a < g.n_chks(); ++a) {
            std::size_t deg = g.chk_neighbors(a).size();
            std::size_t base = g.c2v_begin(a);
            std::memset(total.data(), 0, W * sizeof(u64));
            for (std::size_t s = 0; s < deg; ++s)
                kern::backend().xor_acc(total.data(), v2c.data() + g.c2v_to_v2c(base + s) * W, W);
            for (std::size_t s = 0; s < deg; ++s) {
                u64* out = c2v.data() + (base + s) * W;
                std::memcpy(out, total.data(), W * sizeof(u64));
                kern::backend().xor_acc(out, v2c.data() + g.c2v_to_v2c(base + s) * W, W);
            }
        }

        // fresh channel messages z^{t+1}, shared by all updates of the variable
        for (int i = 0; i < n; ++i)
            fill_bernoulli_words(chan.data() + i * W, W, n_bits, clamp_prob(mu[i]),
                                 chan_stream(i, t + 1), 0);

        // (b) per-edge equality over the other check messages plus z^{t+1},
        // then tail resampling
        for (int i = 0; i < n; ++i) {
            const auto& nb = g.var_neighbors(i);
            for (std::size_t s = 0; s < nb.size(); ++s) {
                std::size_t e = g.v2c_id(i, static_cast<int>(s));
                std::memcpy(and_acc.data(), chan.data() + i * W, W * sizeof(u64));
                std::memcpy(or_acc.data(), chan.data() + i * W, W * sizeof(u64));
                for (std::size_t q = 0; q < nb.size(); ++q) {
                    if (q == s) continue;
                    int a = nb[q];
                    const auto& ca = g.chk_neighbors(a);
                    std::size_t slot = std::lower_bound(ca.begin(), ca.end(), i) - ca.begin();
                    kern::backend().and_or_acc(and_acc.data(), or_acc.data(),
                                               c2v.data() + g.c2v_id(a, static_cast<int>(slot)) * W, W);
                }
                rng::Stream es = edge_stream(e, t);
                bool y0 = es.word_at(0) & 1;
                kern::backend().equality_fill(and_acc.data(), or_acc.data(), aux.data(), W, y0);
                if (n_bits & 63) aux[W - 1] &= ~0ull >> (64 - (n_bits & 63));
                u64 ones = kern::popcount_bit_range(aux.data(), K, 2 * K);
                fill_tail_resample(v2c_next.data() + e * W, W, n_bits, ones, K, es, kFillBase);
            }
        }

        // (c) marginal estimates from the all-inclusive equality state
        for (int i = 0; i < n; ++i) {
            std::memcpy(and_acc.data(), chan.data() + i * W, W * sizeof(u64));
            std::memcpy(or_acc.data(), chan.data() + i * W, W * sizeof(u64));
            const auto& nb = g.var_neighbors(i);
            for (std::size_t s = 0; s < nb.size(); ++s) {
                int a = nb[s];
                const auto& ca = g.chk_neighbors(a);
                std::size_t slot = std::lower_bound(ca.begin(), ca.end(), i) - ca.begin();
                kern::backend().and_or_acc(and_acc.data(), or_acc.data(),
                                           c2v.data() + g.c2v_id(a, static_cast<int>(slot)) * W, W);
            }
            bool y0 = marg_stream(i, t).word_at(0) & 1;
            kern::backend().equality_fill(and_acc.data(), or_acc.data(), aux.data(), W, y0);
            if (n_bits & 63) aux[W - 1] &= ~0ull >> (64 - (n_bits & 63));
            u64 ones = kern::popcount_bit_range(aux.data(), K, 2 * K);
            res.marginal_estimates[i] = static_cast<double>(ones) / static_cast<double>(K);
            res.hard_bits[i] = res.marginal_estimates[i] > 0.5 ? 1 : 0;
        }

        v2c.swap(v2c_next);
        res.iterations_run = t + 1;
        res.syndrome_satisfied = syndrome_ok(g, res.hard_bits);
        if (cfg.early_stop && res.syndrome_satisfied) break;
    }
    return res;
}

} // namespace stochldpc::mbsd
