#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tdi/window.hpp"

namespace tdi {

using Complex = std::complex<double>;

// alpha[j-1] multiplies x^j; components are reduced into [0,1).
struct PhasePoint {
    std::vector<double> alpha;

    PhasePoint() = default;
    explicit PhasePoint(std::vector<double> components);
    int degree() const { return static_cast<int>(alpha.size()); }
};

// sigma(k) = 1 / (8 k^2 (ln k + ln ln k / 2 + 2)), delta(k) = k sigma(k); k >= 2.
double arc_sigma(int k);
double arc_delta(int k);

// e(t) = exp(2 pi i t) with t reduced mod 1 first.
Complex unit_phase(double t);

// Deterministic pairwise summation with fixed bracketing.
Complex pairwise_sum(std::span<const Complex> terms);

// Requires N^k < 2^53 so that x^j is exact in double; throws Overflow otherwise.
Complex eval_g(std::int64_t n, const PhasePoint& alpha);
Complex eval_f(const SetWindow& window, const PhasePoint& alpha);
// delta_N g - f
Complex eval_E(const SetWindow& window, const PhasePoint& alpha);
// sum over [1,N] of (delta_N - A(x)) e(alpha . x)
Complex eval_E_balanced(const SetWindow& window, const PhasePoint& alpha);

// sum_{m=0}^{q-1} e((lambda a_k m^k + ... + lambda a_1 m) / q), a ascending.
Complex complete_sum(std::int64_t q, std::span<const std::int64_t> a, std::int64_t lambda = 1);

// integral_0^N e(lambda (beta_k t^k + ... + beta_1 t)) dt, beta ascending.
// Throws ToleranceNotMet.
Complex oscillatory_w(double n, std::span<const double> beta, std::int64_t lambda = 1);

struct ArcLabel {
    std::int64_t q = 1;
    std::vector<std::int64_t> a;    // in [0,q)
    std::vector<double> beta;       // alpha_j - a_j / q
};

// Smallest q <= N^delta with |q alpha_j - a_j| <= N^(delta - j), a_j = round(q alpha_j).
// delta defaults to arc_delta(k).
std::optional<ArcLabel> classify_arc(const PhasePoint& alpha, std::int64_t n,
                                     std::optional<double> exponent_override = std::nullopt);

struct MajorArcReport {
    Complex g;
    Complex approximation;   // q^-1 S(q, lambda a) w(lambda beta)
    double discrepancy = 0;
    double scale = 0;        // q (1 + sum |beta_j| N^j)
    double ratio = 0;
};

MajorArcReport major_arc_approx_check(std::int64_t n, std::int64_t q, std::span<const std::int64_t> a,
                                      std::span<const double> beta, std::int64_t lambda = 1);

}  // namespace tdi
