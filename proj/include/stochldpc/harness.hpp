#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stochldpc/factor_graph.hpp"

namespace stochldpc::harness {

struct SpParams {
    int T = 60;
    double tol = 1e-12;
    bool early_stop = true;
};

struct MbsdParams {
    std::vector<std::size_t> K_list{256};
    int T = 60;
    bool nds = false;
    bool early_stop = true;
};

struct SdParams {
    int cycles = 30000;
    int em_length = 25;
    int output_window = 0; // 0 -> cycles / 2
    bool nds = false;
    bool early_stop = true;
};

struct DecoderSpec {
    enum class Kind { sp, mbsd, sd };
    Kind kind = Kind::sp;
    SpParams sp;
    MbsdParams mbsd;
    SdParams sd;

    const char* id() const {
        switch (kind) {
            case Kind::sp: return "sp";
            case Kind::mbsd: return "mbsd";
            default: return "sd";
        }
    }
};

struct CodeSpec {
    std::string alist_path; // empty: use the Gallager parameters below
    int n = 200;
    int dv = 3;
    int dc = 6;
    std::uint64_t graph_seed = 1;
};

struct ExperimentConfig {
    CodeSpec code;
    std::vector<DecoderSpec> decoders;
    std::vector<double> ebno_db;
    int frames = 1000;
    int max_frame_errors = 100;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 0; // 0: hardware concurrency
};

struct BerRecord {
    std::string decoder;
    long param = 0; // K for mbsd, cycles for sd, 0 for sp
    double ebno_db = 0.0;
    long frames = 0;
    long long bit_errors = 0;
    long frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t noise_crc = 0;
};

struct GapRecord {
    double ebno_db = 0.0;
    std::size_t K = 0;
    long frames = 0;
    double ber_sp = 0.0;
    double ber_mbsd = 0.0;
    double gap = 0.0;
    std::optional<double> slope; // per-ebno log-log regression, shared by its rows
};

struct MomentRecord {
    int var = 0;
    std::size_t K = 0;
    int runs = 0;
    double mean_gamma = 0.0;
    double var_gamma = 0.0;
    double sp_gamma = 0.0;
    std::optional<double> oracle_gamma;
    double lambda_hat = 0.0;
    double var_bound = 0.0;
    double gap_bound = 0.0;
};

FactorGraph load_code(const CodeSpec& spec);
double code_rate(const FactorGraph& g);

std::vector<BerRecord> run_ber_sweep(const ExperimentConfig& cfg, const FactorGraph& g);

// SP vs MbSD on identical frame streams; decoders in cfg must be exactly
// one sp entry and one mbsd entry (the K grid).
std::vector<GapRecord> run_gap_study(const ExperimentConfig& cfg, const FactorGraph& g);

struct MomentStudyConfig {
    std::vector<std::size_t> K_grid{32, 64, 128, 256, 512};
    int runs = 2000;
    int T = 0; // 0: tree diameter
    std::uint64_t seed = 1;
    int threads = 0;
};

std::vector<MomentRecord> run_moment_study(const FactorGraph& g, const std::vector<double>& mu,
                                           const MomentStudyConfig& cfg);

void write_ber_csv(const std::vector<BerRecord>& records, std::ostream& out);
void write_gap_csv(const std::vector<GapRecord>& records, std::ostream& out);
void write_moment_csv(const std::vector<MomentRecord>& records, std::ostream& out);

// JSON config file for the CLI; throws errc::config_invalid / io_error.
ExperimentConfig load_config_file(const std::string& path);

} // namespace stochldpc::harness
