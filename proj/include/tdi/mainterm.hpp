#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdi/biglog.hpp"
#include "tdi/budget.hpp"
#include "tdi/exact.hpp"
#include "tdi/system.hpp"
#include "tdi/window.hpp"

namespace tdi {

// How the square bracket in s0(k) is read.
enum class BracketConvention { floor, truncate };

// s0(k) = 2k [k (ln k + 2 ln ln k)] + 10k^2 + 6
std::int64_t s0_of(int k, BracketConvention bracket = BracketConvention::floor);

struct ConstantSheet {
    int k = 0;
    BracketConvention bracket = BracketConvention::floor;
    std::int64_t s0 = 0;
    double sigma = 0.0;
    double delta = 0.0;
    BigLogNumber gamma;                     // 2^(2^(k+8) + k + 1)
    BigLogNumber C_exp;                     // (s0 + 2) gamma
    BigLogNumber c_exp;                     // 2^(-2^(k+9))
    std::optional<double> cs;               // supplied C * S value
    std::optional<BigLogNumber> K_const;    // (cs/4)^gamma
    std::optional<BigLogNumber> K_uniform;  // (cs/4)^(2^(k+1))
    std::vector<std::string> notes;
};

// k in [2, 60]; throws BadDegree.
ConstantSheet constants(int k, std::optional<double> cs = std::nullopt,
                        BracketConvention bracket = BracketConvention::floor);

// K delta^(2^(k+1) (s0 + 2)); 0 < delta <= 1.
BigLogNumber uniformity_threshold(int k, std::int64_t s0, const BigLogNumber& K, const Rational& delta);

enum class IncrementOutcome { density_reached_one, ambient_below_Y, budget };

const char* outcome_name(IncrementOutcome outcome);

struct IncrementStep {
    double density = 0.0;
    WideReal loglog_n;
    BigLogNumber D;   // K delta^C at this step
};

struct IncrementTrace {
    std::vector<IncrementStep> steps;   // steps[0] is the starting point
    int iterations_used = 0;
    IncrementOutcome outcome = IncrementOutcome::budget;
    BigLogNumber ambient_exponent;      // prod of D_r: N_final = N_0^(this)
    BigLogNumber density_threshold;     // (1 / (2K))^(1/C)
    BigLogNumber loglog_threshold;      // 1 / (2 D_0)
    BigLogNumber max_iterations;        // ceil(1 / D_0)
};

// delta_{r+1} = min(1, delta_r + D_r), log log N_{r+1} = log log N_r + ln D_r, D_r = K delta_r^C.
IncrementTrace increment_iteration(double delta0, double loglog_n0, std::int64_t y, const BigLogNumber& K,
                                   const BigLogNumber& C, int max_iterations = 1000000);

// Real point of (0,1)^s solving the system with at least k distinct coordinates.
std::optional<std::vector<double>> find_real_solution(const DiagonalSystem& sys, std::uint64_t seed = 1,
                                                      int attempts = 400);

struct IntegralEstimate {
    std::string method;
    double value = 0.0;
    double error = 0.0;
    std::vector<double> levels;         // epsilon levels or N values
    std::vector<double> level_values;
    std::vector<double> real_solution;
};

struct BandVolumeParams {
    std::uint64_t samples = 4000000;
    double epsilon = 0.01;   // levels epsilon and 2 epsilon, relative to sum |lambda|
    std::uint64_t seed = 1;
};

// Monte Carlo over [0,1]^(s-1) with the degree-one equation integrated exactly.
// Throws NoRealSolution.
IntegralEstimate band_volume_estimate(const DiagonalSystem& sys, const BandVolumeParams& params = {},
                                      const Budget& budget = {});

// N(N) / (S_trunc(Q) N^(s - k(k+1)/2)) on full intervals.
IntegralEstimate count_ratio_estimate(const DiagonalSystem& sys, const std::vector<std::int64_t>& ns,
                                      std::int64_t qmax, const Budget& budget = {});

// cs delta^s N^(s - k(k+1)/2)
double predicted_count(const DiagonalSystem& sys, double delta, std::int64_t n, double cs);

struct Progression {
    std::int64_t start = 0;
    std::int64_t step = 0;
    std::int64_t length = 0;
    std::int64_t hits = 0;
    Rational density;
};

// Densest progression of length >= min_length in [1,N]; ties go to the smallest step,
// then the smallest start, then the longest length.
Progression progression_concentration_search(const SetWindow& window, std::int64_t min_length,
                                             const Budget& budget = {});

namespace serial {

Progression progression_concentration_search(const SetWindow& window, std::int64_t min_length,
                                             const Budget& budget = {});

}  // namespace serial

}  // namespace tdi
