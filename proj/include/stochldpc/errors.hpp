#pragma once

#include <stdexcept>
#include <string>

namespace stochldpc {

enum class errc {
    empty_row_or_column,
    dimension_mismatch,
    divisibility_violation,
    construction_failure,
    length_mismatch,
    invalid_rate,
    non_positive_variance,
    empty_input,
    degenerate_chain,
    invalid_regime,
    too_large,
    no_convergence,
    config_invalid,
    io_error,
};

// Single exception type carrying a machine-checkable code.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

} // namespace stochldpc
