#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tdi/biglog.hpp"
#include "tdi/exact.hpp"

namespace tdi {

// Translation/dilation invariant diagonal system
//   sum_i lambda_i x_i^j = 0   (1 <= j <= k)
// with nonzero integer coefficients summing to zero.
class DiagonalSystem {
public:
    // Throws BadDegree (k < 1), BadArity (s < 2), ZeroCoefficient, NonzeroSum.
    DiagonalSystem(int degree, std::vector<std::int64_t> coefficients);

    int degree() const { return degree_; }
    int arity() const { return static_cast<int>(coefficients_.size()); }
    std::span<const std::int64_t> coefficients() const { return coefficients_; }
    std::int64_t coefficient(int i) const { return coefficients_[static_cast<std::size_t>(i)]; }
    std::int64_t max_abs_coefficient() const;

    DiagonalSystem negated() const;

    friend bool operator==(const DiagonalSystem&, const DiagonalSystem&) = default;

private:
    int degree_;
    std::vector<std::int64_t> coefficients_;
};

inline DiagonalSystem validate_system(int k, std::vector<std::int64_t> coefficients) {
    return DiagonalSystem(k, std::move(coefficients));
}

using SolutionTuple = std::vector<std::int64_t>;

struct ClassificationReport {
    bool is_solution = false;
    bool is_trivial = false;
    bool is_nonsingular = false;
    int distinct_values = 0;
};

// L_j(x) for j = 1..k, exact.
std::vector<Integer> evaluate_forms(const DiagonalSystem& sys, std::span<const std::int64_t> x);

bool is_solution(const DiagonalSystem& sys, std::span<const std::int64_t> x);

// True iff every class of equal values carries a zero coefficient sum.
// Throws NotASolution when x does not solve the system.
bool is_trivial(const DiagonalSystem& sys, std::span<const std::int64_t> x);

// Equivalent to the existence of a nonzero k x k Jacobian minor, since all
// coefficients are nonzero: at least k distinct values.
bool is_nonsingular(const DiagonalSystem& sys, std::span<const std::int64_t> x);

int distinct_values(std::span<const std::int64_t> x);

ClassificationReport classify(const DiagonalSystem& sys, std::span<const std::int64_t> x);

// det(d L_j / d x_{i_l}) with rows j = 1..k and columns in ascending index
// order. Indices are 0-based; throws BadIndices.
Integer jacobian(const DiagonalSystem& sys, std::span<const std::int64_t> x, std::span<const int> indices);

// k! * prod(lambda_i) * prod_{u<v} (x_{i_u} - x_{i_v}), the closed form whose
// magnitude equals |jacobian|.
Integer jacobian_closed_form(const DiagonalSystem& sys, std::span<const std::int64_t> x,
                             std::span<const int> indices);

struct TrivialCountBound {
    std::optional<Integer> exact;  // present when the value is an integer of modest size
    BigLogNumber value;
};

// [s/2]! * |A|^(s/2)
TrivialCountBound trivial_count_bound(const DiagonalSystem& sys, const Integer& cardinality);

// eta_i = y_i / (4Y) + 1/2 with Y = max |y_i| (Y = 1 for the zero vector).
std::vector<double> normalize_real_solution(std::span<const double> y);

}  // namespace tdi
