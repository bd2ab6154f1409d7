#include <doctest.h>

#include <cmath>

#include "stochldpc/analysis.hpp"
#include "stochldpc/errors.hpp"
#include "stochldpc/mbsd_decoder.hpp"
#include "stochldpc/oracle.hpp"
#include "stochldpc/sp_decoder.hpp"

using namespace stochldpc;

namespace {

BitMessage from_bits(std::initializer_list<int> bits) {
    BitMessage m(bits.size());
    std::size_t i = 0;
    for (int b : bits) m.set(i++, b);
    return m;
}

std::vector<int> to_bits(const BitMessage& m) {
    std::vector<int> out(m.n_bits());
    for (std::size_t i = 0; i < m.n_bits(); ++i) out[i] = m.get(i);
    return out;
}

} // namespace

TEST_CASE("xor combine") {
    auto a = from_bits({1, 0, 1, 1});
    auto b = from_bits({1, 1, 0, 1});
    CHECK(to_bits(mbsd::xor_combine({a}, 4)) == std::vector<int>{1, 0, 1, 1});
    CHECK(to_bits(mbsd::xor_combine({a, b}, 4)) == std::vector<int>{0, 1, 1, 0});
    CHECK(to_bits(mbsd::xor_combine({}, 4)) == std::vector<int>{0, 0, 0, 0});

    BitMessage ones(128);
    for (std::size_t i = 0; i < 128; ++i) ones.set(i, true);
    auto odd = mbsd::xor_combine({ones, ones, ones}, 128);
    CHECK(odd.count_ones() == 128);

    CHECK_THROWS_AS(mbsd::xor_combine({a, BitMessage(6)}, 4), error);
}

TEST_CASE("equality operator hand traces") {
    auto x1 = from_bits({1, 1, 0, 1});
    auto x2 = from_bits({1, 0, 0, 1});
    CHECK(to_bits(mbsd::equality_combine_with_state({x1, x2}, false)) ==
          std::vector<int>{1, 1, 0, 1});
    // disagreement at position 2 holds whatever came before
    CHECK(to_bits(mbsd::equality_combine_with_state({x1, x2}, true)) ==
          std::vector<int>{1, 1, 0, 1});

    // identical inputs pass through for either virtual state
    for (bool y0 : {false, true}) {
        CHECK(to_bits(mbsd::equality_combine_with_state({x1, x1, x1}, y0)) == to_bits(x1));
        CHECK(to_bits(mbsd::equality_combine_with_state({x2}, y0)) == to_bits(x2));
    }

    CHECK_THROWS_AS(mbsd::equality_combine_with_state({}, false), error);
    CHECK_THROWS_AS(mbsd::equality_combine_with_state({x1, BitMessage(2)}, false), error);
}

TEST_CASE("equality operator: positions of full agreement are history-free") {
    rng::Stream s1{rng::root_key(61)}, s2{rng::root_key(62)};
    auto a = mbsd::sample_channel_message(0.4, 256, s1);
    auto b = mbsd::sample_channel_message(0.7, 256, s2);
    auto out0 = mbsd::equality_combine_with_state({a, b}, false);
    auto out1 = mbsd::equality_combine_with_state({a, b}, true);
    for (std::size_t i = 0; i < 512; ++i) {
        if (a.get(i) == b.get(i)) {
            CHECK(out0.get(i) == a.get(i));
            CHECK(out1.get(i) == a.get(i));
        }
    }
}

TEST_CASE("tail resampling") {
    // K = 2: tail all ones / all zeros are reproduced exactly
    auto all1 = from_bits({0, 1, 1, 1});
    auto r1 = mbsd::resample_tail(all1, rng::Stream{rng::root_key(63)});
    CHECK(r1.count_ones() == 4);
    auto all0 = from_bits({1, 1, 0, 0});
    auto r0 = mbsd::resample_tail(all0, rng::Stream{rng::root_key(64)});
    CHECK(r0.count_ones() == 0);

    // K = 4, tail (1,0,1,1): fresh bits are Bernoulli(3/4)
    auto aux = from_bits({0, 0, 0, 0, 1, 0, 1, 1});
    std::uint64_t ones = 0;
    const int reps = 100000;
    for (int t = 0; t < reps; ++t) {
        auto out = mbsd::resample_tail(aux, rng::Stream{rng::derive(rng::root_key(65), 1, t)});
        ones += out.count_ones();
    }
    double frac = static_cast<double>(ones) / (8.0 * reps);
    CHECK(std::fabs(frac - 0.75) < 0.005);
}

TEST_CASE("channel message sampling") {
    // extreme probability: effectively all-zero
    auto z = mbsd::sample_channel_message(kProbFloor, 512, rng::Stream{rng::root_key(66)});
    CHECK(z.count_ones() == 0);

    // symmetric probability: binomial band at K = 512
    auto h = mbsd::sample_channel_message(0.5, 512, rng::Stream{rng::root_key(67)});
    double frac = static_cast<double>(h.count_ones()) / 1024.0;
    CHECK(frac > 0.45);
    CHECK(frac < 0.55);

    // determinism
    auto again = mbsd::sample_channel_message(0.5, 512, rng::Stream{rng::root_key(67)});
    CHECK(h == again);
    CHECK_THROWS_AS(mbsd::sample_channel_message(1.5, 8, rng::Stream{rng::root_key(68)}), error);
}

TEST_CASE("equality chain transitions follow the two-state law") {
    // one long chain; the verify suite runs the full multi-tuple version
    const std::size_t len = 1 << 20;
    double mu = 0.35;
    std::vector<double> rhos{0.6, 0.25};
    std::vector<BitMessage> inputs;
    inputs.push_back(mbsd::sample_channel_message(mu, len / 2, rng::Stream{rng::root_key(71)}));
    inputs.push_back(mbsd::sample_channel_message(rhos[0], len / 2, rng::Stream{rng::root_key(72)}));
    inputs.push_back(mbsd::sample_channel_message(rhos[1], len / 2, rng::Stream{rng::root_key(73)}));
    rng::Sequential coin(rng::root_key(74));
    auto chain = mbsd::equality_combine(inputs, coin);

    auto model = analysis::chain_from_inputs(mu, rhos);
    std::uint64_t n01 = 0, n0 = 0;
    bool prev = chain.get(0);
    for (std::size_t l = 1; l < len; ++l) {
        bool cur = chain.get(l);
        if (!prev) {
            ++n0;
            if (cur) ++n01;
        }
        prev = cur;
    }
    double f_hat = static_cast<double>(n01) / n0;
    double sigma = std::sqrt(model.f * (1 - model.f) / n0);
    CHECK(std::fabs(f_hat - model.f) < 4 * sigma);
}

TEST_CASE("decode: noiseless frames settle immediately") {
    FactorGraph g = gallager_construct(24, 3, 6, 21);
    LikelihoodVector mu(24, kProbFloor);
    for (int frame = 0; frame < 100; ++frame) {
        mbsd::MbsdConfig cfg;
        cfg.K = 16;
        cfg.T = 8;
        cfg.seed = rng::derive(rng::root_key(300), 7, frame);
        auto res = mbsd::decode(g, mu, cfg);
        CHECK(res.syndrome_satisfied);
        CHECK(res.iterations_run == 1);
        for (auto b : res.hard_bits) CHECK(b == 0);
    }
}

TEST_CASE("decode: marginal estimates live on the 1/K grid") {
    FactorGraph g = gallager_construct(12, 2, 4, 22);
    LikelihoodVector mu(12);
    rng::Sequential r(rng::root_key(75));
    for (auto& p : mu) p = 0.1 + 0.8 * r.next_unit();
    mbsd::MbsdConfig cfg;
    cfg.K = 17; // deliberately not a power of two
    cfg.T = 5;
    cfg.early_stop = false;
    cfg.seed = rng::root_key(301);
    auto res = mbsd::decode(g, mu, cfg);
    CHECK(res.iterations_run == 5);
    for (double gamma : res.marginal_estimates) {
        double scaled = gamma * 17;
        CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
    }
    // bit-reproducible
    auto res2 = mbsd::decode(g, mu, cfg);
    CHECK(res2.marginal_estimates == res.marginal_estimates);
}

TEST_CASE("decode: single variable with a degree-1 check") {
    // the check pins the bit toward zero; with channel evidence 0.3 the
    // equality chain mixes channel draws with the all-zero check message
    FactorGraph g = from_dense_matrix({{1}});
    LikelihoodVector mu{0.3};
    double sum = 0.0;
    const int seeds = 200;
    for (int t = 0; t < seeds; ++t) {
        mbsd::MbsdConfig cfg;
        cfg.K = 1024;
        cfg.T = 2;
        cfg.early_stop = false;
        cfg.seed = rng::derive(rng::root_key(302), 9, t);
        sum += mbsd::decode(g, mu, cfg).marginal_estimates[0];
    }
    double mean = sum / seeds;
    // exact reference from the chain law: inputs are the channel draw
    // (p = 0.3) and the constant-zero check message
    auto model = analysis::chain_from_inputs(0.3, {0.0});
    double expect = analysis::expected_marginal_estimate(model, 1024);
    CHECK(std::fabs(mean - expect) < 0.03);
}

TEST_CASE("decode on a small tree tracks the sum-product marginals") {
    FactorGraph g = random_tree(8, 4, 99);
    rng::Sequential r(rng::root_key(76));
    LikelihoodVector mu(8);
    for (auto& p : mu) p = 0.15 + 0.7 * r.next_unit();
    auto st = analyze(g);
    int T = std::max(1, *st.diameter);

    sp::DecodeOptions opt;
    opt.max_iters = T;
    opt.early_stop = false;
    auto sp_res = sp::decode(g, mu, opt);

    const int runs = 500;
    std::vector<double> mean(8, 0.0);
    for (int t = 0; t < runs; ++t) {
        mbsd::MbsdConfig cfg;
        cfg.K = 1024;
        cfg.T = T;
        cfg.early_stop = false;
        cfg.seed = rng::derive(rng::root_key(303), 11, t);
        auto res = mbsd::decode(g, mu, cfg);
        for (int i = 0; i < 8; ++i) mean[i] += res.marginal_estimates[i];
    }
    for (int i = 0; i < 8; ++i) CHECK(std::fabs(mean[i] / runs - sp_res.marginals[i]) <= 0.02);
}

TEST_CASE("variance of the estimates respects the bound on a tree") {
    FactorGraph g = random_tree(6, 3, 44);
    rng::Sequential r(rng::root_key(77));
    LikelihoodVector mu(6);
    for (auto& p : mu) p = 0.2 + 0.6 * r.next_unit();
    auto st = analyze(g);
    int T = std::max(1, *st.diameter);

    sp::SpTrace trace;
    sp::DecodeOptions opt;
    opt.max_iters = T;
    opt.early_stop = false;
    sp::decode(g, mu, opt, &trace);
    double lambda_hat = analysis::estimate_lambda(g, mu, trace);

    const int runs = 600;
    const std::size_t K = 128;
    std::vector<double> sum(6, 0.0), sumsq(6, 0.0);
    for (int t = 0; t < runs; ++t) {
        mbsd::MbsdConfig cfg;
        cfg.K = K;
        cfg.T = T;
        cfg.early_stop = false;
        cfg.seed = rng::derive(rng::root_key(304), 13, t);
        auto res = mbsd::decode(g, mu, cfg);
        for (int i = 0; i < 6; ++i) {
            sum[i] += res.marginal_estimates[i];
            sumsq[i] += res.marginal_estimates[i] * res.marginal_estimates[i];
        }
    }
    double bound = analysis::variance_bound(lambda_hat, K);
    for (int i = 0; i < 6; ++i) {
        double var = (sumsq[i] - sum[i] * sum[i] / runs) / (runs - 1);
        double est_std = var * std::sqrt(2.0 / (runs - 1));
        CHECK(var <= bound + 3 * est_std);
    }
}
