#pragma once

#include <stdexcept>
#include <string>

namespace tdi {

enum class Errc {
    zero_coefficient,
    nonzero_sum,
    bad_degree,
    bad_arity,
    arity_mismatch,
    not_a_solution,
    bad_indices,
    budget_exceeded,
    overflow,
    arity_too_large,
    tolerance_not_met,
    not_coprime,
    singular_jacobian,
    hypothesis_violated,
    no_convergence,
    no_real_solution,
    bad_params,
    parse_error,
    numerical,
};

const char* errc_name(Errc code) noexcept;

// Process exit code the CLI uses for an error of this kind:
// 2 budget refusal, 3 validation error, 4 hypothesis violation, 1 otherwise.
int exit_code(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace tdi
