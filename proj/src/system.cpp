#include "tdi/system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace tdi {

DiagonalSystem::DiagonalSystem(int degree, std::vector<std::int64_t> coefficients)
    : degree_(degree), coefficients_(std::move(coefficients)) {
    if (degree_ < 1) throw Error(Errc::bad_degree, "degree must be at least 1");
    if (coefficients_.size() < 2) throw Error(Errc::bad_arity, "a system needs at least two variables");
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
        if (coefficients_[i] == 0)
            throw Error(Errc::zero_coefficient, "coefficient " + std::to_string(i + 1) + " is zero");
        sum = checked_add(sum, coefficients_[i]);
    }
    if (sum != 0) throw Error(Errc::nonzero_sum, "coefficients sum to " + std::to_string(sum));
}

std::int64_t DiagonalSystem::max_abs_coefficient() const {
    std::int64_t m = 0;
    for (auto c : coefficients_) m = std::max(m, c < 0 ? -c : c);
    return m;
}

DiagonalSystem DiagonalSystem::negated() const {
    std::vector<std::int64_t> c(coefficients_);
    for (auto& v : c) v = -v;
    return DiagonalSystem(degree_, std::move(c));
}

namespace {

void require_arity(const DiagonalSystem& sys, std::span<const std::int64_t> x) {
    if (static_cast<int>(x.size()) != sys.arity())
        throw Error(Errc::arity_mismatch,
                    "tuple has " + std::to_string(x.size()) + " entries, system has " + std::to_string(sys.arity()));
}

}  // namespace

std::vector<Integer> evaluate_forms(const DiagonalSystem& sys, std::span<const std::int64_t> x) {
    require_arity(sys, x);
    std::vector<Integer> forms(static_cast<std::size_t>(sys.degree()), 0);
    for (int i = 0; i < sys.arity(); ++i) {
        Integer xi(static_cast<long>(x[static_cast<std::size_t>(i)]));
        Integer term(static_cast<long>(sys.coefficient(i)));
        for (int j = 0; j < sys.degree(); ++j) {
            term *= xi;
            forms[static_cast<std::size_t>(j)] += term;
        }
    }
    return forms;
}

bool is_solution(const DiagonalSystem& sys, std::span<const std::int64_t> x) {
    auto forms = evaluate_forms(sys, x);
    return std::all_of(forms.begin(), forms.end(), [](const Integer& v) { return v == 0; });
}

bool is_trivial(const DiagonalSystem& sys, std::span<const std::int64_t> x) {
    if (!is_solution(sys, x)) throw Error(Errc::not_a_solution, "tuple does not solve the system");
    std::map<std::int64_t, std::int64_t> class_sums;
    for (int i = 0; i < sys.arity(); ++i) {
        auto& acc = class_sums[x[static_cast<std::size_t>(i)]];
        acc = checked_add(acc, sys.coefficient(i));
    }
    return std::all_of(class_sums.begin(), class_sums.end(), [](const auto& kv) { return kv.second == 0; });
}

int distinct_values(std::span<const std::int64_t> x) {
    std::set<std::int64_t> values(x.begin(), x.end());
    return static_cast<int>(values.size());
}

bool is_nonsingular(const DiagonalSystem& sys, std::span<const std::int64_t> x) {
    require_arity(sys, x);
    return distinct_values(x) >= sys.degree();
}

ClassificationReport classify(const DiagonalSystem& sys, std::span<const std::int64_t> x) {
    ClassificationReport r;
    r.is_solution = is_solution(sys, x);
    r.is_trivial = r.is_solution && is_trivial(sys, x);
    r.distinct_values = distinct_values(x);
    r.is_nonsingular = r.distinct_values >= sys.degree();
    return r;
}

namespace {

std::vector<int> sorted_indices(const DiagonalSystem& sys, std::span<const int> indices) {
    std::vector<int> idx(indices.begin(), indices.end());
    std::sort(idx.begin(), idx.end());
    if (static_cast<int>(idx.size()) != sys.degree())
        throw Error(Errc::bad_indices, "need exactly k = " + std::to_string(sys.degree()) + " indices");
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) throw Error(Errc::bad_indices, "indices repeat");
    if (idx.front() < 0 || idx.back() >= sys.arity()) throw Error(Errc::bad_indices, "index out of range");
    return idx;
}

// Fraction-free Gaussian elimination.
Integer bareiss_determinant(std::vector<std::vector<Integer>> m) {
    const std::size_t n = m.size();
    Integer prev = 1;
    int sign = 1;
    for (std::size_t c = 0; c < n; ++c) {
        if (m[c][c] == 0) {
            std::size_t r = c + 1;
            while (r < n && m[r][c] == 0) ++r;
            if (r == n) return 0;
            std::swap(m[r], m[c]);
            sign = -sign;
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            for (std::size_t j = c + 1; j < n; ++j) {
                m[r][j] = (m[r][j] * m[c][c] - m[r][c] * m[c][j]);
                mpz_divexact(m[r][j].get_mpz_t(), m[r][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = m[c][c];
    }
    return sign * m[n - 1][n - 1];
}

}  // namespace

Integer jacobian(const DiagonalSystem& sys, std::span<const std::int64_t> x, std::span<const int> indices) {
    require_arity(sys, x);
    auto idx = sorted_indices(sys, indices);
    const int k = sys.degree();
    std::vector<std::vector<Integer>> m(static_cast<std::size_t>(k), std::vector<Integer>(static_cast<std::size_t>(k)));
    for (int l = 0; l < k; ++l) {
        Integer xi(static_cast<long>(x[static_cast<std::size_t>(idx[static_cast<std::size_t>(l)])]));
        Integer power = 1;  // x^(j-1)
        for (int j = 1; j <= k; ++j) {
            m[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(l)] =
                Integer(j) * Integer(static_cast<long>(sys.coefficient(idx[static_cast<std::size_t>(l)]))) * power;
            power *= xi;
        }
    }
    return bareiss_determinant(std::move(m));
}

Integer jacobian_closed_form(const DiagonalSystem& sys, std::span<const std::int64_t> x,
                             std::span<const int> indices) {
    require_arity(sys, x);
    auto idx = sorted_indices(sys, indices);
    Integer r = 1;
    for (int j = 2; j <= sys.degree(); ++j) r *= j;
    for (int i : idx) r *= Integer(static_cast<long>(sys.coefficient(i)));
    for (std::size_t u = 0; u < idx.size(); ++u)
        for (std::size_t v = u + 1; v < idx.size(); ++v)
            r *= Integer(static_cast<long>(x[static_cast<std::size_t>(idx[u])])) -
                 Integer(static_cast<long>(x[static_cast<std::size_t>(idx[v])]));
    return r;
}

TrivialCountBound trivial_count_bound(const DiagonalSystem& sys, const Integer& cardinality) {
    if (cardinality < 0) throw Error(Errc::bad_params, "cardinality must be nonnegative");
    const int s = sys.arity();
    const int half = s / 2;
    Integer fact = 1;
    for (int i = 2; i <= half; ++i) fact *= i;

    TrivialCountBound out;
    if (cardinality == 0) {
        out.exact = Integer(0);
        return out;
    }
    double l2 = log2_abs(fact) + 0.5 * s * log2_abs(cardinality);
    out.value = BigLogNumber::from_log2(l2);

    // |A|^(s/2) is an integer for even s, or for odd s when |A| is a square
    Integer root;
    bool integral = (s % 2 == 0);
    if (!integral && mpz_perfect_square_p(cardinality.get_mpz_t())) {
        mpz_sqrt(root.get_mpz_t(), cardinality.get_mpz_t());
        integral = true;
    }
    if (integral && l2 < 65536.0) {
        Integer p;
        if (s % 2 == 0)
            mpz_pow_ui(p.get_mpz_t(), cardinality.get_mpz_t(), static_cast<unsigned long>(half));
        else
            mpz_pow_ui(p.get_mpz_t(), root.get_mpz_t(), static_cast<unsigned long>(s));
        out.exact = fact * p;
        out.value = BigLogNumber::from_integer(*out.exact);
    }
    return out;
}

std::vector<double> normalize_real_solution(std::span<const double> y) {
    if (y.empty()) throw Error(Errc::bad_params, "empty vector");
    double big = 0.0;
    for (double v : y) big = std::max(big, std::fabs(v));
    if (big == 0.0) big = 1.0;
    std::vector<double> eta(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) eta[i] = y[i] / (4.0 * big) + 0.5;
    return eta;
}

}  // namespace tdi
