#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdi/budget.hpp"
#include "tdi/exact.hpp"
#include "tdi/system.hpp"

namespace tdi {

// M_n(q) = #{x in (Z/q)^s : sum_i lambda_i x_i^j = 0 mod q, j = 1..k}
Integer congruence_count(const DiagonalSystem& sys, std::int64_t q, const Budget& budget = {});

// Sum over numerator vectors a in [0,q)^k with gcd(q, a) = 1 of q^-s prod_i S(q, lambda_i a).
// Throws Numerical when the imaginary part is not negligible.
std::complex<double> series_term_direct(const DiagonalSystem& sys, std::int64_t q, const Budget& budget = {});

// sum_{d | q} mu(q/d) d^(k-s) M_n(d)
Rational series_term_moebius(const DiagonalSystem& sys, std::int64_t q, const Budget& budget = {});

int moebius(std::int64_t n);
bool is_prime(std::int64_t n);
std::vector<std::int64_t> divisors(std::int64_t n);

struct MultiplicativityReport {
    Rational s_qr;
    Rational product;     // S(q) S(r)
    double direct_gap = 0.0;   // |S_direct(qr) - S_direct(q) S_direct(r)|
    bool exact_equal = false;
    bool passed = false;
};

// Throws NotCoprime.
MultiplicativityReport multiplicativity_check(const DiagonalSystem& sys, std::int64_t q, std::int64_t r,
                                              bool with_direct = true, const Budget& budget = {});

struct EulerFactorReport {
    std::int64_t p = 0;
    std::vector<Rational> normalized_counts;   // p^((k-s)t) M_n(p^t), t = 0..h_max
    std::vector<Rational> partial_sums;        // sum_{h <= t} S(p^h)
    std::vector<double> gaps;                  // |normalized_counts[t] - normalized_counts[t-1]|
    Rational value;                            // partial_sums.back()
};

EulerFactorReport euler_factor(const DiagonalSystem& sys, std::int64_t p, int h_max, const Budget& budget = {});

enum class SeriesMethod { direct, moebius, both, automatic };

struct SeriesRow {
    std::int64_t q = 0;
    double value = 0.0;
    std::optional<Rational> exact;
    std::string method;
    double residual = 0.0;      // |direct - exact| when both ran
    double cumulative = 0.0;
    double tail_reference = 0.0;   // q^(-9k)
};

struct SeriesTruncation {
    std::int64_t cutoff = 0;
    std::vector<SeriesRow> rows;
    double partial_sum = 0.0;
    std::optional<Rational> exact_partial_sum;
};

SeriesTruncation truncated_singular_series(const DiagonalSystem& sys, std::int64_t cutoff,
                                           SeriesMethod method = SeriesMethod::automatic, const Budget& budget = {});

struct PadicLift {
    std::int64_t p = 0;
    int level = 0;
    std::vector<Integer> values;   // in [0, p^t)
    std::vector<int> free_indices;
    bool certified = false;
    int u = 1;                     // 1 + 2 v_p(Delta_0)
    int iterations = 0;
};

// Newton iteration on the k free variables, others held fixed.
// Throws SingularJacobian, HypothesisViolated, NoConvergence, BadIndices, BadParams.
PadicLift hensel_lift(const DiagonalSystem& sys, std::span<const std::int64_t> seed, std::int64_t p, int level,
                      std::optional<std::vector<int>> free_indices = std::nullopt);

namespace serial {

Integer congruence_count(const DiagonalSystem& sys, std::int64_t q, const Budget& budget = {});

}  // namespace serial

namespace kernels {

Integer congruence_count(const DiagonalSystem& sys, std::int64_t q, const Budget& budget = {});

}  // namespace kernels

}  // namespace tdi
