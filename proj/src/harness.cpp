#include "stochldpc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "stochldpc/analysis.hpp"
#include "stochldpc/baseline_sd.hpp"
#include "stochldpc/channel.hpp"
#include "stochldpc/errors.hpp"
#include "stochldpc/mbsd_decoder.hpp"
#include "stochldpc/oracle.hpp"
#include "stochldpc/sp_decoder.hpp"

namespace stochldpc::harness {

namespace {

constexpr std::uint64_t tag_frame = rng::tag("frame");
constexpr std::uint64_t tag_decoder = rng::tag("decoder");
constexpr std::uint64_t tag_moment_run = rng::tag("moment-run");

// Chunked worker pool. Chunk boundaries are fixed, so early termination and
// all accumulations are independent of the thread count.
constexpr int kFrameChunk = 64;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(int begin, int end, int threads, const std::function<void(int)>& fn) {
    int span = end - begin;
    if (span <= 0) return;
    threads = std::min(resolve_threads(threads), span);
    if (threads <= 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::atomic<int> next(begin);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < end; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) h = (h ^ p[i]) * 0x100000001b3ull;
    return h;
}

struct FrameOutcome {
    int bit_errors = 0;
    std::uint64_t noise_crc = 0;
};

struct FrameContext {
    const FactorGraph& g;
    double rate;
    double sigma2;
    std::uint64_t base_seed;
};

std::vector<double> frame_noise(const FrameContext& ctx, int frame_idx, rng::SeedKey& frame_key) {
    frame_key = rng::derive(rng::root_key(ctx.base_seed), tag_frame, static_cast<std::uint64_t>(frame_idx));
    rng::Sequential gauss(frame_key);
    return transmit_all_zero(ctx.g.n_vars(), ctx.sigma2, gauss);
}

// Pipeline for one (decoder, param, ebno, frame) cell entry. Decoders at
// the same frame share the received vector by construction (pure streams).
FrameOutcome run_frame(const FrameContext& ctx, const DecoderSpec& d, std::size_t param_idx,
                       int decoder_slot, int frame_idx) {
    rng::SeedKey frame_key;
    std::vector<double> y = frame_noise(ctx, frame_idx, frame_key);
    FrameOutcome out;
    out.noise_crc = fnv1a_bytes(0xcbf29ce484222325ull, y.data(), y.size() * sizeof(double));
    rng::SeedKey dec_key = rng::derive(frame_key, tag_decoder, static_cast<std::uint64_t>(decoder_slot));

    std::vector<std::uint8_t> hard;
    switch (d.kind) {
        case DecoderSpec::Kind::sp: {
            LikelihoodVector mu = likelihoods(y, ctx.sigma2);
            sp::DecodeOptions opt;
            opt.max_iters = d.sp.T;
            opt.tol = d.sp.tol;
            opt.early_stop = d.sp.early_stop;
            hard = sp::decode(ctx.g, mu, opt).hard_bits;
            break;
        }
        case DecoderSpec::Kind::mbsd: {
            ChannelParams cp{ctx.sigma2, ctx.rate, d.mbsd.nds, 0.0};
            LikelihoodVector mu = likelihoods(y, cp);
            mbsd::MbsdConfig mc;
            mc.K = d.mbsd.K_list[param_idx];
            mc.T = d.mbsd.T;
            mc.early_stop = d.mbsd.early_stop;
            mc.seed = dec_key;
            hard = mbsd::decode(ctx.g, mu, mc).hard_bits;
            break;
        }
        case DecoderSpec::Kind::sd: {
            ChannelParams cp{ctx.sigma2, ctx.rate, d.sd.nds, 0.0};
            LikelihoodVector mu = likelihoods(y, cp);
            sd::SdConfig sc;
            sc.cycles = d.sd.cycles;
            sc.em_length = d.sd.em_length;
            sc.output_window = d.sd.output_window;
            sc.early_stop = d.sd.early_stop;
            sc.seed = dec_key;
            hard = sd::sd_decode(ctx.g, mu, sc).hard_bits;
            break;
        }
    }
    for (std::uint8_t b : hard) out.bit_errors += b;
    return out;
}

long decoder_param(const DecoderSpec& d, std::size_t param_idx) {
    switch (d.kind) {
        case DecoderSpec::Kind::sp: return 0;
        case DecoderSpec::Kind::mbsd: return static_cast<long>(d.mbsd.K_list[param_idx]);
        default: return d.sd.cycles;
    }
}

BerRecord run_cell(const ExperimentConfig& cfg, const FactorGraph& g, const DecoderSpec& d,
                   std::size_t param_idx, int decoder_slot, double ebno) {
    double rate = code_rate(g);
    FrameContext ctx{g, rate, ebno_db_to_sigma2(ebno, rate), cfg.seed};

    BerRecord rec;
    rec.decoder = d.id();
    rec.param = decoder_param(d, param_idx);
    rec.ebno_db = ebno;
    rec.seed = cfg.seed;

    auto t0 = std::chrono::steady_clock::now();
    std::vector<FrameOutcome> outcomes(cfg.frames);
    int frame = 0;
    while (frame < cfg.frames) {
        int chunk_end = std::min(frame + kFrameChunk, cfg.frames);
        parallel_for(frame, chunk_end, cfg.threads, [&](int f) {
            outcomes[f] = run_frame(ctx, d, param_idx, decoder_slot, f);
        });
        for (int f = frame; f < chunk_end; ++f) {
            rec.bit_errors += outcomes[f].bit_errors;
            rec.frame_errors += outcomes[f].bit_errors > 0 ? 1 : 0;
            rec.noise_crc ^= outcomes[f].noise_crc;
        }
        frame = chunk_end;
        rec.frames = frame;
        if (rec.frame_errors >= cfg.max_frame_errors) break;
    }
    rec.ber = static_cast<double>(rec.bit_errors) / (static_cast<double>(rec.frames) * g.n_vars());
    rec.fer = static_cast<double>(rec.frame_errors) / static_cast<double>(rec.frames);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.frames < 1) raise(errc::config_invalid, "frames must be at least 1");
    if (cfg.ebno_db.empty()) raise(errc::config_invalid, "ebno grid is empty");
    if (cfg.decoders.empty()) raise(errc::config_invalid, "no decoders configured");
    if (cfg.max_frame_errors < 1) raise(errc::config_invalid, "max_frame_errors must be at least 1");
    for (const auto& d : cfg.decoders) {
        if (d.kind == DecoderSpec::Kind::mbsd) {
            if (d.mbsd.K_list.empty()) raise(errc::config_invalid, "mbsd K list is empty");
            for (auto K : d.mbsd.K_list)
                if (K < 1) raise(errc::config_invalid, "every K must be at least 1");
            if (d.mbsd.T < 1) raise(errc::config_invalid, "mbsd T must be at least 1");
        }
        if (d.kind == DecoderSpec::Kind::sd && (d.sd.cycles < 1 || d.sd.em_length < 1))
            raise(errc::config_invalid, "sd cycles and em_length must be at least 1");
        if (d.kind == DecoderSpec::Kind::sp && d.sp.T < 1)
            raise(errc::config_invalid, "sp T must be at least 1");
    }
}

} // namespace

FactorGraph load_code(const CodeSpec& spec) {
    if (!spec.alist_path.empty()) return read_alist_file(spec.alist_path);
    return gallager_construct(spec.n, spec.dv, spec.dc, spec.graph_seed);
}

double code_rate(const FactorGraph& g) {
    double r = static_cast<double>(g.n_vars() - g.n_chks()) / g.n_vars();
    if (!(r > 0.0 && r < 1.0)) raise(errc::invalid_rate, "design rate outside (0,1)");
    return r;
}

std::vector<BerRecord> run_ber_sweep(const ExperimentConfig& cfg, const FactorGraph& g) {
    validate(cfg);
    std::vector<BerRecord> records;
    for (std::size_t slot = 0; slot < cfg.decoders.size(); ++slot) {
        const auto& d = cfg.decoders[slot];
        std::size_t n_params = d.kind == DecoderSpec::Kind::mbsd ? d.mbsd.K_list.size() : 1;
        for (std::size_t p = 0; p < n_params; ++p)
            for (double ebno : cfg.ebno_db)
                records.push_back(run_cell(cfg, g, d, p, static_cast<int>(slot), ebno));
    }
    return records;
}

std::vector<GapRecord> run_gap_study(const ExperimentConfig& cfg, const FactorGraph& g) {
    validate(cfg);
    const DecoderSpec* sp_spec = nullptr;
    const DecoderSpec* mbsd_spec = nullptr;
    for (const auto& d : cfg.decoders) {
        if (d.kind == DecoderSpec::Kind::sp && !sp_spec) sp_spec = &d;
        else if (d.kind == DecoderSpec::Kind::mbsd && !mbsd_spec) mbsd_spec = &d;
        else raise(errc::config_invalid, "gap study wants exactly one sp and one mbsd decoder");
    }
    if (!sp_spec || !mbsd_spec) raise(errc::config_invalid, "gap study needs sp and mbsd decoders");

    std::vector<BerRecord> all = run_ber_sweep(cfg, g);
    std::vector<GapRecord> gaps;
    for (double ebno : cfg.ebno_db) {
        const BerRecord* sp_rec = nullptr;
        std::vector<const BerRecord*> mbsd_recs;
        for (const auto& r : all) {
            if (r.ebno_db != ebno) continue;
            if (r.decoder == "sp") sp_rec = &r;
            if (r.decoder == "mbsd") mbsd_recs.push_back(&r);
        }
        // log-log regression over the positive-gap cells
        std::vector<std::pair<double, double>> pts;
        std::vector<GapRecord> block;
        for (const BerRecord* r : mbsd_recs) {
            GapRecord gr;
            gr.ebno_db = ebno;
            gr.K = static_cast<std::size_t>(r->param);
            gr.frames = r->frames;
            gr.ber_sp = sp_rec->ber;
            gr.ber_mbsd = r->ber;
            gr.gap = r->ber - sp_rec->ber;
            if (gr.gap > 0.0) pts.emplace_back(std::log(static_cast<double>(gr.K)), std::log(gr.gap));
            block.push_back(gr);
        }
        std::optional<double> slope;
        if (pts.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (auto [x, yv] : pts) sx += x, sy += yv, sxx += x * x, sxy += x * yv;
            double nn = static_cast<double>(pts.size());
            double denom = nn * sxx - sx * sx;
            if (denom > 0) slope = (nn * sxy - sx * sy) / denom;
        }
        for (auto& gr : block) {
            gr.slope = slope;
            gaps.push_back(gr);
        }
    }
    return gaps;
}

std::vector<MomentRecord> run_moment_study(const FactorGraph& g, const std::vector<double>& mu,
                                           const MomentStudyConfig& cfg) {
    if (cfg.runs < 2) raise(errc::config_invalid, "moment study needs at least 2 runs");
    if (cfg.K_grid.empty()) raise(errc::config_invalid, "K grid is empty");
    GraphStats st = analyze(g);
    int T = cfg.T;
    if (T == 0) {
        if (!st.diameter) raise(errc::config_invalid, "T=0 requires a tree fixture");
        T = std::max(1, *st.diameter);
    }

    // reference quantities: SP marginals, lambda-hat from the SP trace,
    // exact enumeration when feasible
    sp::SpTrace trace;
    sp::DecodeOptions opt;
    opt.max_iters = T;
    opt.early_stop = false;
    sp::DecodeResult sp_res = sp::decode(g, mu, opt, &trace);
    double lambda_hat = analysis::estimate_lambda(g, mu, trace);
    std::optional<std::vector<double>> oracle_marg;
    if (g.n_vars() <= 24) oracle_marg = oracle::exact_bitwise_map(g, mu).marginals;

    analysis::BoundInputs bounds;
    bounds.lambda = lambda_hat;
    bounds.lips = analysis::default_lipschitz(lambda_hat);
    bounds.dc = st.max_chk_degree;
    bounds.dv = st.max_var_degree;
    bounds.horizon = st.diameter ? *st.diameter : T;

    const int n = g.n_vars();
    std::vector<MomentRecord> records;
    for (std::size_t K : cfg.K_grid) {
        std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
        std::vector<std::vector<double>> per_run(cfg.runs);
        parallel_for(0, cfg.runs, cfg.threads, [&](int r) {
            mbsd::MbsdConfig mc;
            mc.K = K;
            mc.T = T;
            mc.early_stop = false;
            mc.seed = rng::derive(rng::root_key(cfg.seed), tag_moment_run, static_cast<std::uint64_t>(r));
            per_run[r] = mbsd::decode(g, mu, mc).marginal_estimates;
        });
        for (int r = 0; r < cfg.runs; ++r)
            for (int i = 0; i < n; ++i) {
                sum[i] += per_run[r][i];
                sumsq[i] += per_run[r][i] * per_run[r][i];
            }
        double gap_bound;
        try {
            gap_bound = analysis::message_gap_bound(bounds, K);
        } catch (const error&) {
            gap_bound = std::numeric_limits<double>::infinity();
        }
        for (int i = 0; i < n; ++i) {
            MomentRecord rec;
            rec.var = i;
            rec.K = K;
            rec.runs = cfg.runs;
            rec.mean_gamma = sum[i] / cfg.runs;
            rec.var_gamma = (sumsq[i] - sum[i] * sum[i] / cfg.runs) / (cfg.runs - 1);
            rec.sp_gamma = sp_res.marginals[i];
            if (oracle_marg) rec.oracle_gamma = (*oracle_marg)[i];
            rec.lambda_hat = lambda_hat;
            rec.var_bound = analysis::variance_bound(lambda_hat, K);
            rec.gap_bound = gap_bound;
            records.push_back(rec);
        }
    }
    return records;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_ber_csv(const std::vector<BerRecord>& records, std::ostream& out) {
    out << "# stoch-ldpc-csv-v1\n";
    out << "decoder,param,ebno_db,frames,bit_errors,frame_errors,ber,fer,wall_seconds,seed,noise_crc\n";
    for (const auto& r : records) {
        char wall[32];
        std::snprintf(wall, sizeof wall, "%.3f", r.wall_seconds);
        out << r.decoder << ',' << r.param << ',' << fmt_double(r.ebno_db) << ',' << r.frames << ','
            << r.bit_errors << ',' << r.frame_errors << ',' << fmt_double(r.ber) << ','
            << fmt_double(r.fer) << ',' << wall << ',' << r.seed << ',' << r.noise_crc << '\n';
    }
}

void write_gap_csv(const std::vector<GapRecord>& records, std::ostream& out) {
    out << "# stoch-ldpc-gap-csv-v1\n";
    out << "ebno_db,K,frames,ber_sp,ber_mbsd,gap,slope\n";
    for (const auto& r : records) {
        out << fmt_double(r.ebno_db) << ',' << r.K << ',' << r.frames << ',' << fmt_double(r.ber_sp)
            << ',' << fmt_double(r.ber_mbsd) << ',' << fmt_double(r.gap) << ',';
        if (r.slope) out << fmt_double(*r.slope);
        out << '\n';
    }
}

void write_moment_csv(const std::vector<MomentRecord>& records, std::ostream& out) {
    out << "# stoch-ldpc-moments-csv-v1\n";
    out << "var,K,runs,mean_gamma,var_gamma,sp_gamma,oracle_gamma,lambda_hat,var_bound,gap_bound\n";
    for (const auto& r : records) {
        out << r.var << ',' << r.K << ',' << r.runs << ',' << fmt_double(r.mean_gamma) << ','
            << fmt_double(r.var_gamma) << ',' << fmt_double(r.sp_gamma) << ',';
        if (r.oracle_gamma) out << fmt_double(*r.oracle_gamma);
        out << ',' << fmt_double(r.lambda_hat) << ',' << fmt_double(r.var_bound) << ','
            << fmt_double(r.gap_bound) << '\n';
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) raise(errc::io_error, "cannot open config " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::config_invalid, std::string("config parse error: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        if (j.contains("code")) {
            const auto& c = j.at("code");
            if (c.contains("alist")) cfg.code.alist_path = c.at("alist").get<std::string>();
            if (c.contains("gallager")) {
                const auto& gl = c.at("gallager");
                cfg.code.n = gl.at("n").get<int>();
                cfg.code.dv = gl.at("dv").get<int>();
                cfg.code.dc = gl.at("dc").get<int>();
                cfg.code.graph_seed = gl.value("seed", 1ull);
            }
        }
        cfg.ebno_db = j.value("ebno_db", std::vector<double>{});
        cfg.frames = j.value("frames", 1000);
        cfg.max_frame_errors = j.value("max_frame_errors", 100);
        cfg.seed = j.value("seed", 1ull);
        cfg.out = j.value("out", std::string{});
        cfg.threads = j.value("threads", 0);
        for (const auto& dj : j.value("decoders", nlohmann::json::array())) {
            DecoderSpec d;
            std::string type = dj.at("type").get<std::string>();
            if (type == "sp") {
                d.kind = DecoderSpec::Kind::sp;
                d.sp.T = dj.value("T", 60);
                d.sp.tol = dj.value("tol", 1e-12);
                d.sp.early_stop = dj.value("early_stop", true);
            } else if (type == "mbsd") {
                d.kind = DecoderSpec::Kind::mbsd;
                if (dj.contains("K") && dj.at("K").is_array())
                    d.mbsd.K_list = dj.at("K").get<std::vector<std::size_t>>();
                else if (dj.contains("K"))
                    d.mbsd.K_list = {dj.at("K").get<std::size_t>()};
                d.mbsd.T = dj.value("T", 60);
                d.mbsd.nds = dj.value("nds", false);
                d.mbsd.early_stop = dj.value("early_stop", true);
            } else if (type == "sd") {
                d.kind = DecoderSpec::Kind::sd;
                d.sd.cycles = dj.value("cycles", 30000);
                d.sd.em_length = dj.value("em_length", 25);
                d.sd.output_window = dj.value("output_window", 0);
                d.sd.nds = dj.value("nds", false);
                d.sd.early_stop = dj.value("early_stop", true);
            } else {
                raise(errc::config_invalid, "unknown decoder type: " + type);
            }
            cfg.decoders.push_back(d);
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::config_invalid, std::string("config field error: ") + e.what());
    }
}

} // namespace stochldpc::harness
