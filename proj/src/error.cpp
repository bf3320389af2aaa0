#include "tdi/error.hpp"

namespace tdi {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::zero_coefficient: return "ZeroCoefficient";
        case Errc::nonzero_sum: return "NonzeroSum";
        case Errc::bad_degree: return "BadDegree";
        case Errc::bad_arity: return "BadArity";
        case Errc::arity_mismatch: return "ArityMismatch";
        case Errc::not_a_solution: return "NotASolution";
        case Errc::bad_indices: return "BadIndices";
        case Errc::budget_exceeded: return "BudgetExceeded";
        case Errc::overflow: return "Overflow";
        case Errc::arity_too_large: return "ArityTooLarge";
        case Errc::tolerance_not_met: return "ToleranceNotMet";
        case Errc::not_coprime: return "NotCoprime";
        case Errc::singular_jacobian: return "SingularJacobian";
        case Errc::hypothesis_violated: return "HypothesisViolated";
        case Errc::no_convergence: return "NoConvergence";
        case Errc::no_real_solution: return "NoRealSolution";
        case Errc::bad_params: return "BadParams";
        case Errc::parse_error: return "ParseError";
        case Errc::numerical: return "NumericalError";
    }
    return "Unknown";
}

int exit_code(Errc code) noexcept {
    switch (code) {
        case Errc::budget_exceeded:
        case Errc::overflow:
            return 2;
        case Errc::zero_coefficient:
        case Errc::nonzero_sum:
        case Errc::bad_degree:
        case Errc::bad_arity:
        case Errc::arity_mismatch:
        case Errc::not_a_solution:
        case Errc::bad_indices:
        case Errc::arity_too_large:
        case Errc::not_coprime:
        case Errc::bad_params:
        case Errc::parse_error:
            return 3;
        case Errc::singular_jacobian:
        case Errc::hypothesis_violated:
        case Errc::no_convergence:
        case Errc::no_real_solution:
            return 4;
        case Errc::tolerance_not_met:
        case Errc::numerical:
            return 1;
    }
    return 1;
}

}  // namespace tdi
