#include "tdi/gowers.hpp"

#include <cmath>
#include <limits>

namespace tdi {

namespace {

void require_degree(int k) {
    if (k < 1) throw Error(Errc::bad_degree, "uniformity degree must be at least 1");
}

// Exact sum of weighted squares: u128 fast path, spilling into mpz.
class SquareAccumulator {
public:
    void add(i128 t, int shift) {
        u128 m = t < 0 ? static_cast<u128>(-t) : static_cast<u128>(t);
        constexpr u128 kMax = ~static_cast<u128>(0);
        if (m < (static_cast<u128>(1) << 62)) {
            u128 sq = m * m;
            if (sq <= (kMax >> shift)) {
                sq <<= shift;
                if (small_ > kMax - sq) flush();
                small_ += sq;
                return;
            }
        }
        Integer v = to_integer(m);
        Integer sq = v * v;
        mpz_mul_2exp(sq.get_mpz_t(), sq.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
        big_ += sq;
    }

    Integer total() const { return big_ + to_integer(small_); }

    void merge(const SquareAccumulator& other) { big_ += other.total(); }

private:
    void flush() {
        big_ += to_integer(small_);
        small_ = 0;
    }

    u128 small_ = 0;
    Integer big_ = 0;
};

// log2 of the largest inner sum |sum_x Delta_k| <= N * N^(2^k).
double inner_log2(std::int64_t n, int k) {
    return (std::ldexp(1.0, k) + 1.0) * std::log2(static_cast<double>(std::max<std::int64_t>(n, 2)));
}

template <class V>
class DifferenceWalker {
public:
    DifferenceWalker(const BalancedFunction& b, int k) : k_(k), n_(b.n), levels_(static_cast<std::size_t>(k + 1)) {
        for (auto& level : levels_) level.assign(static_cast<std::size_t>(n_ + 1), 0);
        for (std::int64_t x = 1; x <= n_; ++x) levels_[0][static_cast<std::size_t>(x)] = static_cast<V>(b.at(x));
    }

    // Extends level j by shift w >= 0 on support [lo, hi], recursing to level k.
    void descend(int j, std::int64_t w, std::int64_t lo, std::int64_t hi, int shift, SquareAccumulator& acc) {
        auto& src = levels_[static_cast<std::size_t>(j)];
        auto& dst = levels_[static_cast<std::size_t>(j + 1)];
        const std::int64_t nlo = lo + w;
        for (std::int64_t x = nlo; x <= hi; ++x)
            dst[static_cast<std::size_t>(x)] = src[static_cast<std::size_t>(x)] * src[static_cast<std::size_t>(x - w)];
        const int nshift = shift + (w > 0 ? 1 : 0);
        if (j + 1 == k_) {
            V sum = 0;
            for (std::int64_t x = nlo; x <= hi; ++x) sum += dst[static_cast<std::size_t>(x)];
            acc.add(static_cast<i128>(sum), nshift);
            return;
        }
        for (std::int64_t v = 0; v <= hi - nlo; ++v) descend(j + 1, v, nlo, hi, nshift, acc);
    }

private:
    int k_;
    std::int64_t n_;
    std::vector<std::vector<V>> levels_;
};

template <class V>
Integer fast_scaled(const BalancedFunction& b, int k) {
    const std::int64_t n = b.n;
    SquareAccumulator total;
#pragma omp parallel
    {
        DifferenceWalker<V> walker(b, k);
        SquareAccumulator local;
#pragma omp for schedule(dynamic)
        for (std::int64_t w = 0; w < n; ++w) walker.descend(0, w, 1, n, 0, local);
#pragma omp critical(tdi_gowers_merge)
        total.merge(local);
    }
    return total.total();
}

void serial_descend(const std::vector<i128>& src, int j, int k, std::int64_t n, Integer& acc) {
    std::vector<i128> dst(src.size());
    for (std::int64_t w = -(n - 1); w <= n - 1; ++w) {
        for (std::int64_t x = 1; x <= n; ++x) {
            std::int64_t y = x - w;
            dst[static_cast<std::size_t>(x)] =
                (y >= 1 && y <= n) ? src[static_cast<std::size_t>(x)] * src[static_cast<std::size_t>(y)] : 0;
        }
        if (j + 1 == k) {
            i128 sum = 0;
            for (std::int64_t x = 1; x <= n; ++x) sum += dst[static_cast<std::size_t>(x)];
            Integer t = to_integer(sum);
            acc += t * t;
        } else {
            serial_descend(dst, j + 1, k, n, acc);
        }
    }
}

Rational scaled_to_rational(const Integer& scaled, std::int64_t n, int k) {
    Integer denom;
    mpz_pow_ui(denom.get_mpz_t(), Integer(static_cast<long>(n)).get_mpz_t(), 1ul << (k + 1));
    Rational r(scaled, denom);
    r.canonicalize();
    return r;
}

}  // namespace

BalancedFunction balanced_function(const SetWindow& window) {
    BalancedFunction b;
    b.n = window.length();
    b.values.resize(static_cast<std::size_t>(b.n));
    for (std::int64_t x = 1; x <= b.n; ++x)
        b.values[static_cast<std::size_t>(x - 1)] = window.cardinality() - (window.contains(x) ? b.n : 0);
    return b;
}

namespace kernels {

Integer difference_sum_scaled(const SetWindow& window, int k, const Budget& budget) {
    require_degree(k);
    const double nd = static_cast<double>(window.length());
    budget.require_ops(std::pow(nd, k + 1) / std::tgamma(k + 1.0), "difference sum");
    const BalancedFunction b = balanced_function(window);
    const double bits = inner_log2(b.n, k);
    if (bits < 62.0) return fast_scaled<std::int64_t>(b, k);
    if (bits < 125.0) return fast_scaled<i128>(b, k);
    throw Error(Errc::overflow, "difference sum values exceed 128-bit range");
}

}  // namespace kernels

namespace serial {

Integer difference_sum_scaled(const SetWindow& window, int k, const Budget& budget) {
    require_degree(k);
    const std::int64_t n = window.length();
    budget.require_ops(std::pow(2.0 * static_cast<double>(n), k) * static_cast<double>(n), "difference sum");
    if (inner_log2(n, k) >= 125.0) throw Error(Errc::overflow, "difference sum values exceed 128-bit range");
    const BalancedFunction b = balanced_function(window);
    std::vector<i128> base(static_cast<std::size_t>(n + 1), 0);
    for (std::int64_t x = 1; x <= n; ++x) base[static_cast<std::size_t>(x)] = b.at(x);
    Integer acc = 0;
    serial_descend(base, 0, k, n, acc);
    return acc;
}

}  // namespace serial

Rational difference_sum(const SetWindow& window, int k, const Budget& budget) {
    return scaled_to_rational(kernels::difference_sum_scaled(window, k, budget), window.length(), k);
}

Rational difference_sum_naive(const SetWindow& window, int k, const Budget& budget) {
    require_degree(k);
    const std::int64_t n = window.length();
    const int dims = k + 1;
    const std::size_t corners = std::size_t{1} << dims;
    budget.require_ops(std::pow(2.0 * static_cast<double>(n), dims) * static_cast<double>(n) * static_cast<double>(corners),
                       "naive difference sum");
    if (inner_log2(n, dims) + dims * std::log2(2.0 * static_cast<double>(n)) >= 125.0)
        throw Error(Errc::overflow, "naive difference sum exceeds 128-bit range");
    const BalancedFunction b = balanced_function(window);

    std::vector<std::int64_t> w(static_cast<std::size_t>(dims), -(n - 1));
    i128 total = 0;
    for (;;) {
        std::int64_t lo = 1, hi = n;
        for (auto wi : w) {
            lo = std::max(lo, 1 + wi);
            hi = std::min(hi, n + wi);
        }
        for (std::int64_t x = lo; x <= hi; ++x) {
            i128 product = 1;
            for (std::size_t mask = 0; mask < corners && product != 0; ++mask) {
                std::int64_t y = x;
                for (int i = 0; i < dims; ++i)
                    if (mask >> i & 1u) y -= w[static_cast<std::size_t>(i)];
                product *= b.at(y);
            }
            total += product;
        }
        int pos = dims - 1;
        while (pos >= 0 && ++w[static_cast<std::size_t>(pos)] > n - 1) w[static_cast<std::size_t>(pos--)] = -(n - 1);
        if (pos < 0) break;
    }
    return scaled_to_rational(to_integer(total), n, k);
}

UniformityReport uniformity_parameter(const SetWindow& window, int k, const Budget& budget) {
    UniformityReport report;
    report.degree = k;
    report.n = window.length();
    report.difference_sum = difference_sum(window, k, budget);
    Integer denom;
    mpz_pow_ui(denom.get_mpz_t(), Integer(static_cast<long>(report.n)).get_mpz_t(), static_cast<unsigned long>(k + 2));
    report.parameter = report.difference_sum / Rational(denom);
    report.parameter.canonicalize();
    return report;
}

WeylChainReport weyl_chain_check(const SetWindow& window, const UniformityReport& uniformity,
                                 const std::vector<PhasePoint>& phases) {
    const int k = uniformity.degree;
    const double n = static_cast<double>(window.length());
    const double power = std::ldexp(1.0, k + 1);
    const double tol = 1e-9 * n;

    double chain_bound = 0.0;
    if (sgn(uniformity.difference_sum) > 0) {
        double log2_rhs = (power - k - 2.0) * std::log2(2.0 * n) + log2_abs(uniformity.difference_sum);
        chain_bound = std::exp2(log2_rhs / power);
    }
    double sup_bound = 0.0;
    if (sgn(uniformity.parameter) > 0) sup_bound = 2.0 * std::exp2(log2_abs(uniformity.parameter) / power) * n;

    WeylChainReport report;
    for (const auto& alpha : phases) {
        if (alpha.degree() != k) throw Error(Errc::bad_params, "phase dimension must equal the uniformity degree");
        double e = std::abs(eval_E(window, alpha));
        ++report.points;
        if (e > chain_bound * (1.0 + 1e-12) + tol) ++report.chain_violations;
        if (e > sup_bound * (1.0 + 1e-12) + tol) ++report.bound_violations;
        double ratio = sup_bound > 0.0 ? e / sup_bound : (e <= tol ? 0.0 : std::numeric_limits<double>::infinity());
        report.max_ratio = std::max(report.max_ratio, ratio);
    }
    return report;
}

}  // namespace tdi
