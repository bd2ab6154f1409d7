#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace stochldpc::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    double margin = 0.0; // worst slack observed, in units of the check's band
    std::string detail;
};

struct VerifyOptions {
    bool quick = false;
    std::uint64_t seed = 1;
    int threads = 0;
};

// Property checks over the closed-form layer and the decoders: equality
// chain transition/stationary statistics, two-state marginal cross-check,
// edge-matrix nilpotency on trees and cycles, dimension-formula arithmetic,
// variance-bound arithmetic, message-passing exactness on trees.
std::vector<CheckResult> run_all(const VerifyOptions& opt);

void write_jsonl(const std::vector<CheckResult>& results, std::ostream& out);

} // namespace stochldpc::verify
