// Command-line driver: BER sweeps, convergence-gap studies, moment studies,
// the property-verification suite, and graph inspection.

#include <fstream>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "stochldpc/analysis.hpp"
#include "stochldpc/channel.hpp"
#include "stochldpc/errors.hpp"
#include "stochldpc/factor_graph.hpp"
#include "stochldpc/harness.hpp"
#include "stochldpc/sp_decoder.hpp"
#include "stochldpc/verify.hpp"

using namespace stochldpc;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int threads = -1;
};

harness::ExperimentConfig load_with_overrides(const CommonArgs& args) {
    harness::ExperimentConfig cfg = harness::load_config_file(args.config_path);
    if (args.has_seed) cfg.seed = args.seed;
    if (!args.out.empty()) cfg.out = args.out;
    if (args.threads >= 0) cfg.threads = args.threads;
    return cfg;
}

void write_csv_or_stdout(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path.empty()) {
        writer(std::cout);
        return;
    }
    std::ofstream f(path);
    if (!f) raise(errc::io_error, "cannot open output " + path);
    writer(f);
}

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config) {
    auto* copt = cmd->add_option("--config", args.config_path, "JSON experiment config");
    if (needs_config) copt->required();
    cmd->add_option("--out", args.out, "output path (overrides config)");
    cmd->add_option("--seed", args.seed, "base seed (overrides config)")
        ->each([&args](const std::string&) { args.has_seed = true; });
    cmd->add_option("--threads", args.threads, "worker threads, 0 = all cores");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bit-exact LDPC decoding laboratory: sum-product, Markov-chain "
                 "stochastic decoding, and the bound-verification suite"};
    app.require_subcommand(1);

    CommonArgs ber_args, gap_args, mom_args;
    auto* ber = app.add_subcommand("ber", "Monte-Carlo BER sweep over decoders and Eb/No points");
    add_common(ber, ber_args, true);
    auto* gap = app.add_subcommand("gap", "SP vs MbSD BER gap and its slope against K");
    add_common(gap, gap_args, true);
    auto* mom = app.add_subcommand("moments", "mean/variance of MbSD marginals on a fixture");
    add_common(mom, mom_args, true);
    int mom_runs = 2000;
    int mom_T = 0;
    std::vector<std::size_t> mom_grid{32, 64, 128, 256, 512};
    mom->add_option("--runs", mom_runs, "independent decodes per K");
    mom->add_option("--K", mom_grid, "message half-dimension grid");
    mom->add_option("--T", mom_T, "iterations; 0 uses the tree diameter");

    auto* ver = app.add_subcommand("verify", "run the property-verification suite (JSON lines)");
    bool quick = false;
    std::string ver_out;
    std::uint64_t ver_seed = 1;
    int ver_threads = 0;
    ver->add_flag("--quick", quick, "smaller sample sizes, finishes within a minute");
    ver->add_option("--out", ver_out, "report path (default stdout)");
    ver->add_option("--seed", ver_seed, "base seed");
    ver->add_option("--threads", ver_threads, "worker threads, 0 = all cores");

    auto* info = app.add_subcommand("graph-info", "print code parameters and graph statistics");
    std::string info_alist;
    std::vector<std::uint64_t> info_gallager;
    info->add_option("--alist", info_alist, "alist file");
    info->add_option("--gallager", info_gallager, "n dv dc seed")->expected(4);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // usage problems map to exit code 2
    }

    try {
        if (ber->parsed()) {
            harness::ExperimentConfig cfg = load_with_overrides(ber_args);
            FactorGraph g = harness::load_code(cfg.code);
            auto records = harness::run_ber_sweep(cfg, g);
            write_csv_or_stdout(cfg.out, [&](std::ostream& os) { harness::write_ber_csv(records, os); });
        } else if (gap->parsed()) {
            harness::ExperimentConfig cfg = load_with_overrides(gap_args);
            FactorGraph g = harness::load_code(cfg.code);
            auto records = harness::run_gap_study(cfg, g);
            write_csv_or_stdout(cfg.out, [&](std::ostream& os) { harness::write_gap_csv(records, os); });
        } else if (mom->parsed()) {
            harness::ExperimentConfig cfg = load_with_overrides(mom_args);
            FactorGraph g = harness::load_code(cfg.code);
            // Fixture: frozen noise from the config seed at the first grid point.
            if (cfg.ebno_db.empty()) raise(errc::config_invalid, "moments needs one ebno point");
            double sigma2 = ebno_db_to_sigma2(cfg.ebno_db[0], harness::code_rate(g));
            rng::Sequential gauss(rng::derive(rng::root_key(cfg.seed), rng::tag("frame"), 0));
            auto y = transmit_all_zero(g.n_vars(), sigma2, gauss);
            auto mu = likelihoods(y, sigma2);
            harness::MomentStudyConfig mc;
            mc.K_grid = mom_grid;
            mc.runs = mom_runs;
            mc.T = mom_T;
            mc.seed = cfg.seed;
            mc.threads = cfg.threads;
            auto records = harness::run_moment_study(g, mu, mc);
            write_csv_or_stdout(cfg.out,
                                [&](std::ostream& os) { harness::write_moment_csv(records, os); });
        } else if (ver->parsed()) {
            verify::VerifyOptions opt;
            opt.quick = quick;
            opt.seed = ver_seed;
            opt.threads = ver_threads;
            auto results = verify::run_all(opt);
            write_csv_or_stdout(ver_out, [&](std::ostream& os) { verify::write_jsonl(results, os); });
            for (const auto& r : results)
                if (!r.pass) return 1;
        } else if (info->parsed()) {
            FactorGraph g;
            if (!info_alist.empty()) {
                g = read_alist_file(info_alist);
            } else if (info_gallager.size() == 4) {
                g = gallager_construct(static_cast<int>(info_gallager[0]),
                                       static_cast<int>(info_gallager[1]),
                                       static_cast<int>(info_gallager[2]), info_gallager[3]);
            } else {
                raise(errc::config_invalid, "graph-info needs --alist or --gallager");
            }
            GraphStats st = analyze(g);
            std::cout << "n=" << g.n_vars() << " m=" << g.n_chks() << " edges=" << g.n_edges()
                      << " is_tree=" << (st.is_tree ? "true" : "false");
            if (st.diameter) std::cout << " diameter=" << *st.diameter;
            std::cout << " dv=" << st.max_var_degree << " dc=" << st.max_chk_degree << '\n';
        }
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == errc::config_invalid || e.code() == errc::io_error ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
