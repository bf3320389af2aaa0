#include "tdi/local.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tdi/expsums.hpp"

namespace tdi {

namespace {

Rational power_of(std::int64_t base, int exponent) {
    Integer b(static_cast<long>(base));
    Integer m;
    mpz_pow_ui(m.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(std::abs(exponent)));
    Rational r = exponent >= 0 ? Rational(m) : Rational(Integer(1), m);
    r.canonicalize();
    return r;
}

// lambda_i x^j mod q for j = 1..k
std::vector<std::int64_t> step_vector(std::int64_t lambda, std::int64_t x, std::int64_t q, int k) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(k));
    i128 pw = 1;
    i128 l = mod_floor(lambda, q);
    for (int j = 0; j < k; ++j) {
        pw = pw * x % q;
        c[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(l * pw % q);
    }
    return c;
}

template <class Count>
Integer dp_count(const DiagonalSystem& sys, std::int64_t q) {
    const int k = sys.degree();
    const int s = sys.arity();
    std::int64_t states = 1;
    for (int j = 0; j < k; ++j) states = checked_mul(states, q);

    std::vector<Count> cur(static_cast<std::size_t>(states), Count(0));
    std::vector<Count> nxt(static_cast<std::size_t>(states), Count(0));
    cur[0] = Count(1);
    for (int i = 0; i < s; ++i) {
        std::vector<std::vector<std::int64_t>> steps(static_cast<std::size_t>(q));
        for (std::int64_t x = 0; x < q; ++x) steps[static_cast<std::size_t>(x)] = step_vector(sys.coefficient(i), x, q, k);
#pragma omp parallel for schedule(static)
        for (std::int64_t t = 0; t < states; ++t) {
            std::vector<std::int64_t> digits(static_cast<std::size_t>(k));
            std::int64_t rem = t;
            for (int j = 0; j < k; ++j) {
                digits[static_cast<std::size_t>(j)] = rem % q;
                rem /= q;
            }
            Count acc(0);
            for (std::int64_t x = 0; x < q; ++x) {
                const auto& c = steps[static_cast<std::size_t>(x)];
                std::int64_t idx = 0;
                for (int j = k - 1; j >= 0; --j) {
                    std::int64_t d = digits[static_cast<std::size_t>(j)] - c[static_cast<std::size_t>(j)];
                    if (d < 0) d += q;
                    idx = idx * q + d;
                }
                acc += cur[static_cast<std::size_t>(idx)];
            }
            nxt[static_cast<std::size_t>(t)] = acc;
        }
        std::swap(cur, nxt);
    }
    if constexpr (std::is_same_v<Count, Integer>)
        return cur[0];
    else
        return to_integer(cur[0]);
}

std::vector<std::int64_t> reduced_lambdas(const DiagonalSystem& sys, std::int64_t q) {
    std::vector<std::int64_t> out;
    for (auto l : sys.coefficients()) out.push_back(mod_floor(l, q));
    return out;
}

void require_congruence_budget(const DiagonalSystem& sys, std::int64_t q, const Budget& budget) {
    if (q < 1) throw Error(Errc::bad_params, "modulus q must be positive");
    double states = std::pow(static_cast<double>(q), sys.degree());
    budget.require_ops(states * static_cast<double>(q) * sys.arity() * sys.degree(), "congruence count");
    budget.require_bytes(states * 2.0 * sizeof(u128), "congruence count state table");
}

Integer valuation_free_part(Integer v, std::int64_t p, int& val) {
    val = 0;
    Integer pp(static_cast<long>(p));
    if (v == 0) return v;
    while (mpz_divisible_p(v.get_mpz_t(), pp.get_mpz_t())) {
        v /= pp;
        ++val;
    }
    return v;
}

int valuation(const Integer& v, std::int64_t p) {
    int val = 0;
    valuation_free_part(v, p, val);
    return val;
}

int valuation(const Rational& v, std::int64_t p) {
    return valuation(Integer(v.get_num()), p) - valuation(Integer(v.get_den()), p);
}

Integer pos_mod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

// Solves J c = L over Q by Gaussian elimination.
std::vector<Rational> solve_rational(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) throw Error(Errc::singular_jacobian, "Jacobian is singular over Q");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return b;
}

}  // namespace

int moebius(std::int64_t n) {
    if (n < 1) throw Error(Errc::bad_params, "moebius requires n >= 1");
    int mu = 1;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        mu = -mu;
    }
    if (n > 1) mu = -mu;
    return mu;
}

bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
    std::vector<std::int64_t> out;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        out.push_back(d);
        if (d * d != n) out.push_back(n / d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace kernels {

Integer congruence_count(const DiagonalSystem& sys, std::int64_t q, const Budget& budget) {
    require_congruence_budget(sys, q, budget);
    if (q == 1) return 1;
    if (sys.arity() * std::log2(static_cast<double>(q)) < 126.0) return dp_count<u128>(sys, q);
    return dp_count<Integer>(sys, q);
}

}  // namespace kernels

namespace serial {

Integer congruence_count(const DiagonalSystem& sys, std::int64_t q, const Budget& budget) {
    if (q < 1) throw Error(Errc::bad_params, "modulus q must be positive");
    const int s = sys.arity();
    const int k = sys.degree();
    budget.require_ops(std::pow(static_cast<double>(q), s) * s * k, "brute-force congruence count");
    std::vector<std::int64_t> x(static_cast<std::size_t>(s), 0);
    Integer count = 0;
    for (;;) {
        bool ok = true;
        for (int j = 1; j <= k && ok; ++j) {
            i128 acc = 0;
            for (int i = 0; i < s; ++i) {
                i128 pw = 1;
                for (int e = 0; e < j; ++e) pw = pw * x[static_cast<std::size_t>(i)] % q;
                acc = (acc + static_cast<i128>(mod_floor(sys.coefficient(i), q)) * pw) % q;
            }
            ok = (acc == 0);
        }
        if (ok) ++count;
        int pos = s - 1;
        while (pos >= 0 && ++x[static_cast<std::size_t>(pos)] == q) x[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
    }
    return count;
}

}  // namespace serial

Integer congruence_count(const DiagonalSystem& sys, std::int64_t q, const Budget& budget) {
    return kernels::congruence_count(sys, q, budget);
}

std::complex<double> series_term_direct(const DiagonalSystem& sys, std::int64_t q, const Budget& budget) {
    if (q < 1) throw Error(Errc::bad_params, "modulus q must be positive");
    const int k = sys.degree();
    const int s = sys.arity();
    std::map<std::int64_t, int> multiplicity;
    for (auto l : reduced_lambdas(sys, q)) ++multiplicity[l];
    const double vectors = std::pow(static_cast<double>(q), k);
    budget.require_ops(vectors * static_cast<double>(multiplicity.size() + 1) * static_cast<double>(q),
                       "direct series term");

    const double scale = std::pow(static_cast<double>(q), -s);
    std::vector<std::int64_t> a(static_cast<std::size_t>(k), 0);
    std::vector<Complex> terms;
    for (;;) {
        std::int64_t g = q;
        for (auto v : a) g = gcd_i64(g, v);
        if (g == 1) {
            Complex product = scale;
            for (const auto& [lambda, mult] : multiplicity) {
                Complex sum = complete_sum(q, a, lambda);
                for (int m = 0; m < mult; ++m) product *= sum;
            }
            terms.push_back(product);
        }
        int pos = k - 1;
        while (pos >= 0 && ++a[static_cast<std::size_t>(pos)] == q) a[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
    }
    Complex value = pairwise_sum(terms);
    if (std::abs(value.imag()) > 1e-9 * (1.0 + std::abs(value)))
        throw Error(Errc::numerical, "series term has non-negligible imaginary part");
    return value;
}

Rational series_term_moebius(const DiagonalSystem& sys, std::int64_t q, const Budget& budget) {
    if (q < 1) throw Error(Errc::bad_params, "modulus q must be positive");
    const int shift = sys.degree() - sys.arity();
    Rational total = 0;
    for (auto d : divisors(q)) {
        int mu = moebius(q / d);
        if (mu == 0) continue;
        Rational term = power_of(d, shift) * Rational(congruence_count(sys, d, budget));
        total += mu > 0 ? term : -term;
    }
    total.canonicalize();
    return total;
}

MultiplicativityReport multiplicativity_check(const DiagonalSystem& sys, std::int64_t q, std::int64_t r,
                                              bool with_direct, const Budget& budget) {
    if (q < 1 || r < 1) throw Error(Errc::bad_params, "moduli must be positive");
    if (gcd_i64(q, r) != 1) throw Error(Errc::not_coprime, std::to_string(q) + " and " + std::to_string(r) + " share a factor");
    MultiplicativityReport report;
    report.s_qr = series_term_moebius(sys, q * r, budget);
    report.product = series_term_moebius(sys, q, budget) * series_term_moebius(sys, r, budget);
    report.exact_equal = report.s_qr == report.product;
    report.passed = report.exact_equal;
    if (with_direct) {
        auto sq = series_term_direct(sys, q, budget);
        auto sr = series_term_direct(sys, r, budget);
        auto sqr = series_term_direct(sys, q * r, budget);
        report.direct_gap = std::abs(sqr - sq * sr);
        report.passed = report.passed && report.direct_gap <= 1e-9 * (1.0 + std::abs(sq * sr));
    }
    return report;
}

EulerFactorReport euler_factor(const DiagonalSystem& sys, std::int64_t p, int h_max, const Budget& budget) {
    if (!is_prime(p)) throw Error(Errc::bad_params, std::to_string(p) + " is not prime");
    if (h_max < 0) throw Error(Errc::bad_params, "h_max must be >= 0");
    const int shift = sys.degree() - sys.arity();
    EulerFactorReport report;
    report.p = p;
    std::int64_t pt = 1;
    Rational partial = 0;
    for (int t = 0; t <= h_max; ++t) {
        if (t > 0) pt = checked_mul(pt, p);
        Rational normalized = power_of(pt, shift) * Rational(congruence_count(sys, pt, budget));
        normalized.canonicalize();
        partial += series_term_moebius(sys, pt, budget);
        if (t > 0) report.gaps.push_back(std::abs(Rational(normalized - report.normalized_counts.back()).get_d()));
        report.normalized_counts.push_back(normalized);
        report.partial_sums.push_back(partial);
    }
    report.value = partial;
    return report;
}

SeriesTruncation truncated_singular_series(const DiagonalSystem& sys, std::int64_t cutoff, SeriesMethod method,
                                           const Budget& budget) {
    if (cutoff < 1) throw Error(Errc::bad_params, "cutoff Q must be >= 1");
    const int k = sys.degree();
    const int shift = k - sys.arity();
    if (method == SeriesMethod::automatic) {
        double dp_ops = 0.0;
        for (std::int64_t d = 1; d <= cutoff; ++d)
            dp_ops += std::pow(static_cast<double>(d), k + 1) * sys.arity() * k;
        method = dp_ops <= budget.max_ops ? SeriesMethod::moebius : SeriesMethod::direct;
    }
    const bool want_exact = method != SeriesMethod::direct;
    const bool want_direct = method != SeriesMethod::moebius;
    const auto n = static_cast<std::size_t>(cutoff);

    std::vector<Integer> counts(n + 1);
    std::vector<Complex> direct(n + 1);
    std::vector<std::optional<Error>> failures(n + 1);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t q = 1; q <= cutoff; ++q) {
        try {
            if (want_exact) counts[static_cast<std::size_t>(q)] = congruence_count(sys, q, budget);
            if (want_direct) direct[static_cast<std::size_t>(q)] = series_term_direct(sys, q, budget);
        } catch (const Error& e) {
            failures[static_cast<std::size_t>(q)] = e;
        }
    }
    for (const auto& failure : failures)
        if (failure) throw *failure;

    SeriesTruncation out;
    out.cutoff = cutoff;
    Rational exact_sum = 0;
    double running = 0.0;
    for (std::int64_t q = 1; q <= cutoff; ++q) {
        SeriesRow row;
        row.q = q;
        if (want_exact) {
            Rational s = 0;
            for (auto d : divisors(q)) {
                int mu = moebius(q / d);
                if (mu == 0) continue;
                Rational term = power_of(d, shift) * Rational(counts[static_cast<std::size_t>(d)]);
                s += mu > 0 ? term : -term;
            }
            s.canonicalize();
            row.exact = s;
            row.value = s.get_d();
            exact_sum += s;
        }
        if (want_direct) {
            double dv = direct[static_cast<std::size_t>(q)].real();
            if (want_exact)
                row.residual = std::abs(dv - row.value);
            else
                row.value = dv;
        }
        row.method = method == SeriesMethod::both ? "both" : (want_exact ? "moebius" : "direct");
        running += row.value;
        row.cumulative = running;
        row.tail_reference = std::pow(static_cast<double>(q), -9.0 * k);
        out.rows.push_back(std::move(row));
    }
    out.partial_sum = running;
    if (want_exact) {
        exact_sum.canonicalize();
        out.exact_partial_sum = exact_sum;
        out.partial_sum = exact_sum.get_d();
    }
    return out;
}

PadicLift hensel_lift(const DiagonalSystem& sys, std::span<const std::int64_t> seed, std::int64_t p, int level,
                      std::optional<std::vector<int>> free_indices) {
    const int k = sys.degree();
    const int s = sys.arity();
    if (static_cast<int>(seed.size()) != s) throw Error(Errc::arity_mismatch, "seed length differs from arity");
    if (!is_prime(p)) throw Error(Errc::bad_params, std::to_string(p) + " is not prime");
    if (level < 1) throw Error(Errc::bad_params, "target level must be >= 1");

    std::vector<int> free;
    if (free_indices) {
        free = *free_indices;
        std::sort(free.begin(), free.end());
        if (static_cast<int>(free.size()) != k || std::adjacent_find(free.begin(), free.end()) != free.end() ||
            free.front() < 0 || free.back() >= s)
            throw Error(Errc::bad_indices, "free indices must be k distinct positions in [0, s)");
    } else {
        for (int i = 0; i < s && static_cast<int>(free.size()) < k; ++i) {
            if (mod_floor(sys.coefficient(i), p) == 0) continue;
            bool distinct = std::none_of(free.begin(), free.end(), [&](int j) {
                return mod_floor(seed[static_cast<std::size_t>(i)] - seed[static_cast<std::size_t>(j)], p) == 0;
            });
            if (distinct) free.push_back(i);
        }
        if (static_cast<int>(free.size()) < k)
            throw Error(Errc::singular_jacobian, "no k coordinates with distinct seed values mod p");
    }

    for (int u = 0; u < k; ++u)
        for (int v = u + 1; v < k; ++v)
            if (mod_floor(seed[static_cast<std::size_t>(free[static_cast<std::size_t>(u)])] -
                              seed[static_cast<std::size_t>(free[static_cast<std::size_t>(v)])],
                          p) == 0)
                throw Error(Errc::singular_jacobian, "free seed values collide mod p");

    const Integer delta0 = jacobian_closed_form(sys, seed, free);
    if (delta0 == 0) throw Error(Errc::singular_jacobian, "Jacobian vanishes");
    const int v = valuation(delta0, p);

    for (const auto& value : evaluate_forms(sys, seed)) {
        if (value != 0 && valuation(value, p) < 2 * v + 1)
            throw Error(Errc::hypothesis_violated, "seed residual not divisible by p^(2v+1)");
    }

    Integer modulus_t, modulus_w;
    const Integer pp(static_cast<long>(p));
    mpz_pow_ui(modulus_t.get_mpz_t(), pp.get_mpz_t(), static_cast<unsigned long>(level));
    mpz_pow_ui(modulus_w.get_mpz_t(), pp.get_mpz_t(), static_cast<unsigned long>(level + 2 * v + 2));

    std::vector<Integer> x(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) x[static_cast<std::size_t>(i)] = pos_mod(Integer(static_cast<long>(seed[static_cast<std::size_t>(i)])), modulus_w);

    auto forms = [&](const std::vector<Integer>& xs) {
        std::vector<Integer> out(static_cast<std::size_t>(k), 0);
        for (int i = 0; i < s; ++i) {
            Integer pw = 1;
            for (int j = 0; j < k; ++j) {
                pw *= xs[static_cast<std::size_t>(i)];
                out[static_cast<std::size_t>(j)] += sys.coefficient(i) * pw;
            }
        }
        return out;
    };
    auto solved = [&](const std::vector<Integer>& residual) {
        return std::all_of(residual.begin(), residual.end(),
                           [&](const Integer& r) { return mpz_divisible_p(r.get_mpz_t(), modulus_t.get_mpz_t()) != 0; });
    };

    PadicLift lift;
    lift.p = p;
    lift.level = level;
    lift.free_indices = free;
    lift.u = 1 + 2 * v;

    constexpr int kMaxIterations = 64;
    std::vector<Integer> residual = forms(x);
    while (!solved(residual)) {
        if (++lift.iterations > kMaxIterations) throw Error(Errc::no_convergence, "Newton iteration did not converge");
        std::vector<std::vector<Rational>> jac(static_cast<std::size_t>(k), std::vector<Rational>(static_cast<std::size_t>(k)));
        for (int j = 1; j <= k; ++j) {
            for (int l = 0; l < k; ++l) {
                Integer xv = x[static_cast<std::size_t>(free[static_cast<std::size_t>(l)])];
                Integer pw;
                mpz_pow_ui(pw.get_mpz_t(), xv.get_mpz_t(), static_cast<unsigned long>(j - 1));
                jac[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(l)] =
                    Rational(Integer(j) * sys.coefficient(free[static_cast<std::size_t>(l)]) * pw);
            }
        }
        std::vector<Rational> rhs(residual.begin(), residual.end());
        std::vector<Rational> step = solve_rational(std::move(jac), std::move(rhs));
        for (int l = 0; l < k; ++l) {
            Rational c = step[static_cast<std::size_t>(l)];
            c.canonicalize();
            if (c != 0 && valuation(c, p) < 1)
                throw Error(Errc::no_convergence, "Newton correction is not p-adically small");
            Integer den_inv;
            Integer den = c.get_den();
            mpz_invert(den_inv.get_mpz_t(), den.get_mpz_t(), modulus_w.get_mpz_t());
            Integer correction = pos_mod(Integer(c.get_num()) * den_inv, modulus_w);
            auto& xi = x[static_cast<std::size_t>(free[static_cast<std::size_t>(l)])];
            xi = pos_mod(xi - correction, modulus_w);
        }
        residual = forms(x);
    }

    lift.values.resize(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) lift.values[static_cast<std::size_t>(i)] = pos_mod(x[static_cast<std::size_t>(i)], modulus_t);
    lift.certified = true;
    return lift;
}

}  // namespace tdi
