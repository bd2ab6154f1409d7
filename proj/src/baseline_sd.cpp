#include "stochldpc/baseline_sd.hpp"

#include "stochldpc/errors.hpp"

namespace stochldpc::sd {

namespace {

constexpr std::uint64_t tag_chan = rng::tag("sd/chan");
constexpr std::uint64_t tag_edge = rng::tag("sd/edge");

struct EdgeMemory {
    std::vector<std::uint8_t> buf;
    int size = 0;
    int pos = 0;

    explicit EdgeMemory(int capacity) : buf(capacity, 0) {}

    void push(std::uint8_t bit) {
        buf[pos] = bit;
        pos = (pos + 1) % static_cast<int>(buf.size());
        if (size < static_cast<int>(buf.size())) ++size;
    }
    std::uint8_t pick(std::uint64_t word) const {
        return buf[word % static_cast<std::uint64_t>(size)];
    }
};

} // namespace

SdRandom default_random(rng::SeedKey seed) {
    SdRandom r;
    r.chan_word = [seed](int i, int cycle) {
        return rng::Stream{rng::derive(seed, tag_chan, static_cast<std::uint64_t>(i))}.word_at(
            static_cast<std::uint64_t>(cycle));
    };
    r.edge_word = [seed](std::size_t e, int cycle) {
        return rng::Stream{rng::derive(seed, tag_edge, static_cast<std::uint64_t>(e))}.word_at(
            static_cast<std::uint64_t>(cycle));
    };
    return r;
}

sp::DecodeResult sd_decode(const FactorGraph& g, const LikelihoodVector& mu, const SdConfig& cfg) {
    return sd_decode(g, mu, cfg, default_random(cfg.seed));
}

sp::DecodeResult sd_decode(const FactorGraph& g, const LikelihoodVector& mu, const SdConfig& cfg,
                           const SdRandom& rnd) {
    if (cfg.cycles < 1 || cfg.em_length < 1) raise(errc::config_invalid, "cycles and em_length >= 1");
    int window = cfg.output_window > 0 ? cfg.output_window : cfg.cycles / 2;
    if (window < 1) window = 1;
    if (window > cfg.cycles) raise(errc::config_invalid, "output_window exceeds cycles");
    if (mu.size() != static_cast<std::size_t>(g.n_vars()))
        raise(errc::length_mismatch, "likelihood length != n_vars");

    const int n = g.n_vars();
    const std::size_t E = g.n_edges();
    std::vector<std::uint64_t> thresh(n);
    for (int i = 0; i < n; ++i) thresh[i] = rng::unit_to_threshold(clamp_prob(mu[i]));

    std::vector<std::uint8_t> v2c(E), v2c_next(E), c2v(E), chan_bit(n);
    std::vector<EdgeMemory> mem(E, EdgeMemory(cfg.em_length));

    // trailing-window majority state per variable
    std::vector<std::uint8_t> eq_state(n), window_buf(static_cast<std::size_t>(n) * window, 0);
    std::vector<int> ones_in_window(n, 0);

    // cycle slot 0 seeds the initial edge bits and equality states
    for (int i = 0; i < n; ++i) eq_state[i] = (rnd.chan_word(i, 0) < thresh[i]) ? 1 : 0;
    for (std::size_t e = 0; e < E; ++e) v2c[e] = eq_state[g.v2c_var(e)];

    sp::DecodeResult res;
    res.hard_bits.assign(n, 0);
    res.marginals.assign(n, 0.0);

    int cycles_run = 0;
    for (int c = 1; c <= cfg.cycles; ++c) {
        for (int i = 0; i < n; ++i) chan_bit[i] = (rnd.chan_word(i, c) < thresh[i]) ? 1 : 0;

        for (int a = 0; a < g.n_chks(); ++a) {
            std::size_t base = g.c2v_begin(a);
            std::size_t deg = g.chk_neighbors(a).size();
            std::uint8_t total = 0;
            for (std::size_t s = 0; s < deg; ++s) total ^= v2c[g.c2v_to_v2c(base + s)];
            for (std::size_t s = 0; s < deg; ++s)
                c2v[base + s] = total ^ v2c[g.c2v_to_v2c(base + s)];
        }

        for (int i = 0; i < n; ++i) {
            const auto& nb = g.var_neighbors(i);
            std::uint8_t agree_all = 1, value_all = chan_bit[i];
            for (std::size_t s = 0; s < nb.size(); ++s) {
                int a = nb[s];
                const auto& ca = g.chk_neighbors(a);
                std::size_t slot = std::lower_bound(ca.begin(), ca.end(), i) - ca.begin();
                std::uint8_t in = c2v[g.c2v_id(a, static_cast<int>(slot))];
                if (in != value_all) agree_all = 0;
            }
            if (agree_all) eq_state[i] = value_all;

            for (std::size_t s = 0; s < nb.size(); ++s) {
                std::size_t e = g.v2c_id(i, static_cast<int>(s));
                std::uint8_t agree = 1, value = chan_bit[i];
                for (std::size_t q = 0; q < nb.size(); ++q) {
                    if (q == s) continue;
                    int a = nb[q];
                    const auto& ca = g.chk_neighbors(a);
                    std::size_t slot = std::lower_bound(ca.begin(), ca.end(), i) - ca.begin();
                    if (c2v[g.c2v_id(a, static_cast<int>(slot))] != value) {
                        agree = 0;
                        break;
                    }
                }
                if (agree) {
                    v2c_next[e] = value;
                    mem[e].push(value); // regenerative bit
                } else if (mem[e].size > 0) {
                    v2c_next[e] = mem[e].pick(rnd.edge_word(e, c));
                } else {
                    v2c_next[e] = v2c[e]; // hold while the memory is empty
                }
            }
        }
        v2c.swap(v2c_next);

        // up/down counting over the trailing window of equality states
        int slot = (c - 1) % window;
        for (int i = 0; i < n; ++i) {
            std::uint8_t& old = window_buf[static_cast<std::size_t>(i) * window + slot];
            ones_in_window[i] += eq_state[i] - old;
            old = eq_state[i];
        }
        cycles_run = c;

        int filled = c < window ? c : window;
        for (int i = 0; i < n; ++i) res.hard_bits[i] = 2 * ones_in_window[i] > filled ? 1 : 0;
        res.syndrome_satisfied = syndrome_ok(g, res.hard_bits);
        if (cfg.early_stop && res.syndrome_satisfied) break;
    }

    int filled = cycles_run < window ? cycles_run : window;
    for (int i = 0; i < n; ++i)
        res.marginals[i] = static_cast<double>(ones_in_window[i]) / static_cast<double>(filled);
    res.iterations_run = cycles_run;
    res.converged = res.syndrome_satisfied;
    return res;
}

} // namespace stochldpc::sd
