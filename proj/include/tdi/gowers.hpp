#pragma once

#include <cstdint>
#include <vector>

#include "tdi/budget.hpp"
#include "tdi/exact.hpp"
#include "tdi/expsums.hpp"
#include "tdi/window.hpp"

namespace tdi {

// N times the balanced function: |A_N| - N A(x) on [1,N], zero elsewhere.
struct BalancedFunction {
    std::int64_t n = 0;
    std::vector<std::int64_t> values;   // values[x-1]

    std::int64_t at(std::int64_t x) const {
        return (x < 1 || x > n) ? 0 : values[static_cast<std::size_t>(x - 1)];
    }
};

BalancedFunction balanced_function(const SetWindow& window);

struct UniformityReport {
    Rational difference_sum;
    Rational parameter;   // difference_sum / N^(k+2)
    int degree = 0;
    std::int64_t n = 0;
};

// sum over w_1..w_k of (sum_x Delta_k(E_N; w)(x))^2, exact.
Rational difference_sum(const SetWindow& window, int k, const Budget& budget = {});

// Direct (k+2)-fold sum over w_1..w_{k+1} and x in I_w.
Rational difference_sum_naive(const SetWindow& window, int k, const Budget& budget = {});

UniformityReport uniformity_parameter(const SetWindow& window, int k, const Budget& budget = {});

struct WeylChainReport {
    std::size_t points = 0;
    std::size_t chain_violations = 0;   // |E|^(2^(k+1)) > (2N)^(2^(k+1)-k-2) * difference_sum
    std::size_t bound_violations = 0;   // |E| > 2 a^(2^-(k+1)) N
    double max_ratio = 0.0;             // max |E| / (2 a^(2^-(k+1)) N)
};

// Phases must have k components.
WeylChainReport weyl_chain_check(const SetWindow& window, const UniformityReport& uniformity,
                                 const std::vector<PhasePoint>& phases);

namespace serial {

// Scaled sum N^(2^(k+1)) * difference_sum over the full symmetric w range.
Integer difference_sum_scaled(const SetWindow& window, int k, const Budget& budget = {});

}  // namespace serial

namespace kernels {

// Same quantity; OpenMP over w_1 using the w -> -w symmetry of each inner sum.
Integer difference_sum_scaled(const SetWindow& window, int k, const Budget& budget = {});

}  // namespace kernels

}  // namespace tdi
