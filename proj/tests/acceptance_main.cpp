// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every tolerance is pinned in code; reruns are bit-identical per seed.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "stochldpc/analysis.hpp"
#include "stochldpc/bit_message.hpp"
#include "stochldpc/channel.hpp"
#include "stochldpc/factor_graph.hpp"
#include "stochldpc/harness.hpp"
#include "stochldpc/mbsd_decoder.hpp"
#include "stochldpc/oracle.hpp"
#include "stochldpc/sp_decoder.hpp"

using namespace stochldpc;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(int id, const std::string& name, bool pass, double secs, const std::string& detail) {
    std::printf("[%s] criterion %2d %-28s (%6.1fs) %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                secs, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void parallel_frames(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next(0);
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------- 1
void criterion_tree_exactness() {
    Timer t;
    rng::Sequential pick(rng::derive(rng::root_key(101), rng::tag("acc/tree")));
    double worst = 0.0;
    for (int rep = 0; rep < 25; ++rep) {
        int n = 4 + static_cast<int>(pick.next_u64() % 12); // up to 15 variables
        int m = 1 + static_cast<int>(pick.next_u64() % (n - 1));
        FactorGraph g = random_tree(n, m, 500 + rep, 2);
        LikelihoodVector mu(n);
        for (auto& p : mu) p = 0.05 + 0.9 * pick.next_unit();
        auto st = analyze(g);
        sp::DecodeOptions opt;
        opt.max_iters = std::max(1, *st.diameter);
        opt.early_stop = false;
        auto res = sp::decode(g, mu, opt);
        auto exact = oracle::exact_bitwise_map(g, mu);
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::fabs(res.marginals[i] - exact.marginals[i]));
    }
    double secs = t.seconds();
    std::ostringstream os;
    os << "max |sp - map| = " << worst << " over 25 trees (tol 1e-9)";
    report(1, "tree exactness", worst <= 1e-9 && secs < 10.0, secs, os.str());
}

// ---------------------------------------------------------------- 2
void criterion_chain_empirics() {
    Timer t;
    rng::Sequential pick(rng::derive(rng::root_key(102), rng::tag("acc/chain")));
    const std::size_t len = 1000000;
    double worst_z = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        int d = 1 + static_cast<int>(pick.next_u64() % 4);
        double mu = 0.05 + 0.9 * pick.next_unit();
        std::vector<double> rhos(d);
        for (auto& r : rhos) r = 0.05 + 0.9 * pick.next_unit();

        std::vector<BitMessage> inputs;
        for (int i = 0; i <= d; ++i)
            inputs.push_back(mbsd::sample_channel_message(
                i == 0 ? mu : rhos[i - 1], len / 2,
                rng::Stream{rng::derive(rng::root_key(102), rng::tag("acc/chain/in"),
                                        static_cast<std::uint64_t>(rep),
                                        static_cast<std::uint64_t>(i))}));
        rng::Sequential coin(rng::derive(rng::root_key(102), rng::tag("acc/chain/coin"),
                                         static_cast<std::uint64_t>(rep)));
        BitMessage chain = mbsd::equality_combine(inputs, coin);
        analysis::ChainModel model = analysis::chain_from_inputs(mu, rhos);

        // transition counts conditioned on the source state are binomial
        std::uint64_t n0 = 0, n1 = 0, n01 = 0, n10 = 0;
        bool prev = chain.get(0);
        for (std::size_t l = 1; l < len; ++l) {
            bool cur = chain.get(l);
            if (prev) {
                ++n1;
                if (!cur) ++n10;
            } else {
                ++n0;
                if (cur) ++n01;
            }
            prev = cur;
        }
        double zf = std::fabs(static_cast<double>(n01) / n0 - model.f) /
                    std::sqrt(model.f * (1 - model.f) / n0);
        double zg = std::fabs(static_cast<double>(n10) / n1 - model.g) /
                    std::sqrt(model.g * (1 - model.g) / n1);

        // the ones-fraction of a dependent chain needs the autocorrelation-
        // corrected standard error
        double pi = analysis::stationary(model);
        double r = 1.0 - model.f - model.g;
        double corr = 0.0, rk = 1.0;
        for (std::size_t k = 1; k < len && std::fabs(rk) > 1e-15; ++k) {
            rk *= r;
            corr += (1.0 - static_cast<double>(k) / len) * rk;
        }
        double sd_pi = std::sqrt(pi * (1 - pi) * (1 + 2 * corr) / len);
        double zpi = std::fabs(static_cast<double>(chain.count_ones()) / len - pi) / sd_pi;
        worst_z = std::max({worst_z, zf, zg, zpi});
    }
    double secs = t.seconds();
    std::ostringstream os;
    os << "worst |z| = " << worst_z << " over 20 tuples (band 4)";
    report(2, "equality-chain statistics", worst_z <= 4.0 && secs < 30.0, secs, os.str());
}

// ---------------------------------------------------------------- 3
void criterion_chain_marginal() {
    Timer t;
    rng::Sequential pick(rng::derive(rng::root_key(103), rng::tag("acc/marginal")));
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        int d = 1 + static_cast<int>(pick.next_u64() % 4);
        double mu = 0.02 + 0.96 * pick.next_unit();
        std::vector<double> rhos(d);
        for (auto& r : rhos) r = 0.02 + 0.96 * pick.next_unit();
        analysis::ChainModel m = analysis::chain_from_inputs(mu, rhos);
        m.p1 = pick.next_unit();
        m.p0 = 1.0 - m.p1;
        auto exact = oracle::exact_chain_distribution(m.f, m.g, m.p1, 10000);
        for (std::size_t ell = 0; ell <= 10000; ++ell)
            worst = std::max(worst, std::fabs(analysis::marginal_at(m, ell) - exact[ell]));
    }
    double secs = t.seconds();
    std::ostringstream os;
    os << "max |closed form - powering| = " << worst << " (tol 1e-12)";
    report(3, "chain marginal closed form", worst <= 1e-12 && secs < 5.0, secs, os.str());
}

// ---------------------------------------------------------------- 4
void criterion_nilpotency() {
    Timer t;
    rng::Sequential pick(rng::derive(rng::root_key(104), rng::tag("acc/nilpotent")));
    bool ok = true;
    std::string why = "degree <= diameter on 50 trees; 10 cycles non-nilpotent to power 100";
    for (int rep = 0; rep < 50 && ok; ++rep) {
        int n = 2 + static_cast<int>(pick.next_u64() % 29);
        int m = 1 + static_cast<int>(pick.next_u64() % n);
        FactorGraph g = random_tree(n, m, 700 + rep);
        auto st = analyze(g);
        auto deg = analysis::nilpotency_degree(analysis::build_edge_matrix(g, 2.0), 100);
        if (!deg || *deg > std::max(1, *st.diameter)) {
            ok = false;
            why = "tree rep " + std::to_string(rep) + " violated the bound";
        }
    }
    for (int k = 2; k <= 11 && ok; ++k) {
        if (analysis::nilpotency_degree(analysis::build_edge_matrix(cycle_graph(k), 2.0), 100)) {
            ok = false;
            why = "cycle of size " + std::to_string(k) + " reported nilpotent";
        }
    }
    double secs = t.seconds();
    report(4, "edge-matrix nilpotency", ok && secs < 10.0, secs, why);
}

// ------------------------------------------------------------- 5, 6
void criteria_tree_moments() {
    Timer t;
    // fixed fixture: 12-variable rate-1/2 tree, frozen noise at 2 dB
    FactorGraph g = random_tree(12, 6, 1, 2);
    double sigma2 = ebno_db_to_sigma2(2.0, harness::code_rate(g));
    rng::Sequential gauss(rng::derive(rng::root_key(1009), rng::tag("fixture"), 0));
    auto y = transmit_all_zero(12, sigma2, gauss);
    auto mu = likelihoods(y, sigma2);

    harness::MomentStudyConfig mc;
    mc.K_grid = {32, 64, 128, 256, 512};
    mc.runs = 2000;
    mc.seed = 77;
    mc.threads = 2;
    auto recs = harness::run_moment_study(g, mu, mc);

    bool mono = true, small_at_512 = true, var_ok = true;
    double prev_max = 1e9;
    std::vector<double> max_biases, mean_vars;
    for (std::size_t ki = 0; ki < mc.K_grid.size(); ++ki) {
        double max_bias = 0, mean_var = 0;
        for (int i = 0; i < 12; ++i) {
            const auto& r = recs[ki * 12 + i];
            max_bias = std::max(max_bias, std::fabs(r.mean_gamma - r.sp_gamma));
            mean_var += r.var_gamma / 12;
            double est_std = r.var_gamma * std::sqrt(2.0 / (r.runs - 1));
            if (r.var_gamma > r.var_bound + 3 * est_std) var_ok = false;
            if (ki + 1 == mc.K_grid.size() && std::fabs(r.mean_gamma - r.sp_gamma) > 0.02)
                small_at_512 = false;
        }
        if (max_bias > prev_max) mono = false;
        prev_max = max_bias;
        max_biases.push_back(max_bias);
        mean_vars.push_back(mean_var);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < mean_vars.size(); ++k) {
        double x = std::log(static_cast<double>(mc.K_grid[k]));
        double yv = std::log(mean_vars[k]);
        sx += x, sy += yv, sxx += x * x, sxy += x * yv;
    }
    double nn = static_cast<double>(mean_vars.size());
    double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    double secs = t.seconds();

    std::ostringstream os5;
    os5 << "max-bias by K:";
    for (double mb : max_biases) os5 << ' ' << mb;
    os5 << " (non-increasing; final <= 0.02 per bit)";
    report(5, "bias trend on a tree", mono && small_at_512 && secs < 300.0, secs, os5.str());

    std::ostringstream os6;
    os6 << "per-bit var within (1+2/lambda)/K + 3se; slope(log var, log K) = " << slope
        << " (band -1 +- 0.2)";
    report(6, "variance law on a tree", var_ok && slope > -1.2 && slope < -0.8 && secs < 300.0,
           secs, os6.str());
}

// ---------------------------------------------------------------- 7
void criterion_dimension_formula() {
    Timer t;
    analysis::BoundInputs b;
    b.eps = 1e-3;
    b.lips = 2.0;
    b.lambda = 0.5;
    b.dc = 6;
    b.dv = 3;
    b.horizon = 4;
    long K = analysis::required_dimension(b);
    bool ok = K == 28;
    long prev = 0;
    for (double eps = 1e-1; eps >= 1e-9; eps /= 10) {
        b.eps = eps;
        long cur = analysis::required_dimension(b);
        if (cur < prev) ok = false;
        prev = cur;
    }
    b.eps = 1e-3;
    prev = 0;
    for (int D = 0; D <= 16; ++D) {
        b.horizon = D;
        long cur = analysis::required_dimension(b);
        if (cur < prev) ok = false;
        prev = cur;
    }
    double secs = t.seconds();
    std::ostringstream os;
    os << "K(1e-3, 2, 0.5, 6, 3, 4) = " << K << " (expect 28); monotone in 1/eps and horizon";
    report(7, "dimension formula", ok && secs < 1.0, secs, os.str());
}

// ------------------------------------------------------------- 8, 9
struct PairedCell {
    long long bits = 0;
    std::vector<int> per_frame;
};

void criteria_ber_orderings() {
    Timer t;
    const int frames = 2000;
    const int threads = 2;
    const std::uint64_t seed = 42;
    FactorGraph g = gallager_construct(200, 3, 6, 1);
    double rate = harness::code_rate(g);

    // slot layout matches the harness derivation tree: slot 1 = the mbsd
    // entry, one slot for the whole K grid so the cells are K-paired
    struct EbnoPlan {
        double ebno;
        std::vector<std::size_t> Ks;
    };
    std::vector<EbnoPlan> plan = {{2.5, {64, 128, 256, 512, 1024}}, {3.5, {64, 1024}}};

    std::vector<std::vector<PairedCell>> mbsd_cells(plan.size());
    std::vector<PairedCell> sp_cells(plan.size());
    for (std::size_t pi = 0; pi < plan.size(); ++pi) {
        sp_cells[pi].per_frame.assign(frames, 0);
        mbsd_cells[pi].assign(plan[pi].Ks.size(), PairedCell{});
        for (auto& c : mbsd_cells[pi]) c.per_frame.assign(frames, 0);
    }

    for (std::size_t pi = 0; pi < plan.size(); ++pi) {
        double sigma2 = ebno_db_to_sigma2(plan[pi].ebno, rate);
        parallel_frames(frames, threads, [&](int f) {
            rng::SeedKey frame_key =
                rng::derive(rng::root_key(seed), rng::tag("frame"), static_cast<std::uint64_t>(f));
            rng::Sequential gauss(frame_key);
            auto y = transmit_all_zero(200, sigma2, gauss);

            sp::DecodeOptions sp_opt;
            sp_opt.max_iters = 60;
            auto sp_res = sp::decode(g, likelihoods(y, sigma2), sp_opt);
            int e = 0;
            for (auto b : sp_res.hard_bits) e += b;
            sp_cells[pi].per_frame[f] = e;

            ChannelParams cp{sigma2, rate, true, 0.0};
            auto mu_nds = likelihoods(y, cp);
            rng::SeedKey dec_key = rng::derive(frame_key, rng::tag("decoder"), 1);
            for (std::size_t ki = 0; ki < plan[pi].Ks.size(); ++ki) {
                mbsd::MbsdConfig mcf;
                mcf.K = plan[pi].Ks[ki];
                mcf.T = 60;
                mcf.seed = dec_key;
                auto res = mbsd::decode(g, mu_nds, mcf);
                int errs = 0;
                for (auto b : res.hard_bits) errs += b;
                mbsd_cells[pi][ki].per_frame[f] = errs;
            }
        });
        for (int f = 0; f < frames; ++f) {
            sp_cells[pi].bits += sp_cells[pi].per_frame[f];
            for (auto& c : mbsd_cells[pi]) c.bits += c.per_frame[f];
        }
    }

    // paired ordering: errors(worse) - errors(better) must not be
    // significantly negative at the 3-sigma level
    auto paired_ok = [&](const PairedCell& better, const PairedCell& worse, std::string& note) {
        double mean = 0;
        for (int f = 0; f < frames; ++f) mean += worse.per_frame[f] - better.per_frame[f];
        mean /= frames;
        double ss = 0;
        for (int f = 0; f < frames; ++f) {
            double d = worse.per_frame[f] - better.per_frame[f] - mean;
            ss += d * d;
        }
        double sigma_sum = std::sqrt(ss * frames / std::max(frames - 1, 1));
        double D = mean * frames;
        std::ostringstream os;
        if (sigma_sum == 0.0)
            os << (D == 0 ? "tied" : "degenerate");
        else if (D >= 3 * sigma_sum)
            os << "ordered at " << D / sigma_sum << " sigma";
        else if (D >= -3 * sigma_sum)
            os << "indistinguishable (" << D / sigma_sum << " sigma)";
        else
            os << "REVERSED at " << D / sigma_sum << " sigma";
        note = os.str();
        return sigma_sum == 0.0 ? D >= 0 : D >= -3 * sigma_sum;
    };

    bool ok8 = true;
    std::ostringstream os8;
    const double n_bits = static_cast<double>(frames) * 200.0;
    for (std::size_t pi = 0; pi < plan.size(); ++pi) {
        std::size_t k64 = 0;
        std::size_t k1024 = plan[pi].Ks.size() - 1;
        std::string sp_vs_big, big_vs_small;
        bool a = paired_ok(sp_cells[pi], mbsd_cells[pi][k1024], sp_vs_big);
        bool b = paired_ok(mbsd_cells[pi][k1024], mbsd_cells[pi][k64], big_vs_small);
        ok8 = ok8 && a && b;
        os8 << "[" << plan[pi].ebno << " dB: sp " << sp_cells[pi].bits / n_bits << " <= K1024 "
            << mbsd_cells[pi][k1024].bits / n_bits << " (" << sp_vs_big << ") <= K64 "
            << mbsd_cells[pi][k64].bits / n_bits << " (" << big_vs_small << ")] ";
    }
    double secs = t.seconds();
    report(8, "BER orderings at 2.5/3.5 dB", ok8 && secs < 1800.0, secs, os8.str());

    // slope of the BER gap against K at the mid-waterfall point (2.5 dB)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int pts = 0;
    std::ostringstream os9;
    os9 << "gaps:";
    for (std::size_t ki = 0; ki < plan[0].Ks.size(); ++ki) {
        double gap = static_cast<double>(mbsd_cells[0][ki].bits - sp_cells[0].bits) / n_bits;
        os9 << ' ' << gap;
        if (gap <= 0) continue;
        double x = std::log(static_cast<double>(plan[0].Ks[ki]));
        double yv = std::log(gap);
        sx += x, sy += yv, sxx += x * x, sxy += x * yv;
        ++pts;
    }
    double slope = 0;
    if (pts >= 2) slope = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
    os9 << "; slope = " << slope << " (band [-1.6, -0.4])";
    report(9, "gap slope against K", pts == 5 && slope >= -1.6 && slope <= -0.4, t.seconds(),
           os9.str());
}

// --------------------------------------------------------------- 10
void criterion_determinism() {
    Timer t;
    harness::ExperimentConfig cfg;
    cfg.code = {"", 96, 3, 6, 4};
    cfg.ebno_db = {2.0, 3.0};
    cfg.frames = 128;
    cfg.max_frame_errors = 1 << 30;
    cfg.seed = 5;
    harness::DecoderSpec sp_spec;
    sp_spec.kind = harness::DecoderSpec::Kind::sp;
    sp_spec.sp.T = 30;
    harness::DecoderSpec mb;
    mb.kind = harness::DecoderSpec::Kind::mbsd;
    mb.mbsd.K_list = {32, 128};
    mb.mbsd.T = 30;
    mb.mbsd.nds = true;
    harness::DecoderSpec sd_spec;
    sd_spec.kind = harness::DecoderSpec::Kind::sd;
    sd_spec.sd.cycles = 2000;
    sd_spec.sd.em_length = 25;
    sd_spec.sd.nds = true;
    cfg.decoders = {sp_spec, mb, sd_spec};

    FactorGraph g = harness::load_code(cfg.code);
    auto strip = [](const std::vector<harness::BerRecord>& recs) {
        std::ostringstream os;
        for (const auto& r : recs)
            os << r.decoder << '|' << r.param << '|' << r.ebno_db << '|' << r.frames << '|'
               << r.bit_errors << '|' << r.frame_errors << '|' << r.noise_crc << '\n';
        return os.str();
    };
    cfg.threads = 1;
    auto a = strip(harness::run_ber_sweep(cfg, g));
    cfg.threads = 2;
    auto b = strip(harness::run_ber_sweep(cfg, g));
    cfg.threads = 4;
    auto c = strip(harness::run_ber_sweep(cfg, g));
    bool ok = a == b && b == c;
    double secs = t.seconds();
    report(10, "thread-count determinism", ok && secs < 300.0, secs,
           ok ? "identical counters for 1, 2 and 4 worker threads"
              : "counters drifted across thread counts");
}

} // namespace

int main() {
    Timer total;
    criterion_tree_exactness();
    criterion_chain_empirics();
    criterion_chain_marginal();
    criterion_nilpotency();
    criteria_tree_moments();
    criterion_dimension_formula();
    criteria_ber_orderings();
    criterion_determinism();
    std::printf("%d criterion failure(s); total %.1fs\n", g_failures, total.seconds());
    return g_failures == 0 ? 0 : 1;
}
