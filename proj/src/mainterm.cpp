#include "tdi/mainterm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tdi/enumeration.hpp"
#include "tdi/expsums.hpp"
#include "tdi/local.hpp"

namespace tdi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double uniform_at(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(splitmix64(seed ^ splitmix64(counter)) >> 11) * 0x1.0p-53;
}

// Solves a small dense system in place; false when singular.
bool solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t c = i + 1; c < n; ++c) b[i] -= a[i][c] * b[c];
        b[i] /= a[i][i];
    }
    return true;
}

std::vector<double> forms_real(const DiagonalSystem& sys, const std::vector<double>& g) {
    std::vector<double> out(static_cast<std::size_t>(sys.degree()), 0.0);
    for (int i = 0; i < sys.arity(); ++i) {
        double pw = 1.0;
        for (int j = 0; j < sys.degree(); ++j) {
            pw *= g[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(j)] += static_cast<double>(sys.coefficient(i)) * pw;
        }
    }
    return out;
}

int distinct_real(std::vector<double> v, double tol) {
    std::sort(v.begin(), v.end());
    int count = v.empty() ? 0 : 1;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] - v[i - 1] > tol) ++count;
    return count;
}

// true when (step, start, length, hits) beats the incumbent
bool better(const Progression& c, const Progression& best) {
    if (best.length == 0) return true;
    auto lhs = static_cast<i128>(c.hits) * best.length;
    auto rhs = static_cast<i128>(best.hits) * c.length;
    if (lhs != rhs) return lhs > rhs;
    if (c.step != best.step) return c.step < best.step;
    if (c.start != best.start) return c.start < best.start;
    return c.length > best.length;
}

std::int64_t max_step(std::int64_t n, std::int64_t min_length) {
    if (min_length <= 1) return std::max<std::int64_t>(1, n - 1);
    return std::max<std::int64_t>(1, (n - 1) / (min_length - 1));
}

void require_search(const SetWindow& window, std::int64_t min_length, const Budget& budget) {
    if (min_length < 1) throw Error(Errc::bad_params, "min_length must be >= 1");
    if (min_length > window.length()) throw Error(Errc::bad_params, "min_length exceeds N");
    double n = static_cast<double>(window.length());
    budget.require_ops(n * n * n / static_cast<double>(min_length), "progression search");
}

Progression finalize(Progression p) {
    p.density = Rational(p.hits, p.length);
    p.density.canonicalize();
    return p;
}

}  // namespace

std::int64_t s0_of(int k, BracketConvention bracket) {
    if (k < 2 || k > 60) throw Error(Errc::bad_degree, "constants require 2 <= k <= 60");
    double kd = k;
    double inner = kd * (std::log(kd) + 2.0 * std::log(std::log(kd)));
    double bracketed = bracket == BracketConvention::floor ? std::floor(inner) : std::trunc(inner);
    return 2 * k * static_cast<std::int64_t>(bracketed) + 10 * static_cast<std::int64_t>(k) * k + 6;
}

ConstantSheet constants(int k, std::optional<double> cs, BracketConvention bracket) {
    if (k < 2 || k > 60) throw Error(Errc::bad_degree, "constants require 2 <= k <= 60");
    ConstantSheet sheet;
    sheet.k = k;
    sheet.bracket = bracket;
    sheet.s0 = s0_of(k, bracket);
    sheet.sigma = arc_sigma(k);
    sheet.delta = arc_delta(k);
    sheet.gamma = BigLogNumber::from_log2(std::ldexp(1.0, k + 8) + k + 1);
    sheet.C_exp = BigLogNumber::from_double(static_cast<double>(sheet.s0 + 2)) * sheet.gamma;
    sheet.c_exp = BigLogNumber::from_log2(-std::ldexp(1.0, k + 9));
    sheet.notes.push_back("natural logarithms");
    sheet.notes.push_back(bracket == BracketConvention::floor ? "bracket read as floor" : "bracket read as truncation");
    if (k >= 3 && sheet.s0 <= 10LL * k * k + 6)
        throw Error(Errc::numerical, "s0 invariant violated");
    if (cs) {
        if (!(*cs > 0.0) || !std::isfinite(*cs)) throw Error(Errc::bad_params, "C*S must be positive");
        sheet.cs = cs;
        BigLogNumber base = BigLogNumber::from_double(*cs / 4.0);
        sheet.K_const = base.pow(sheet.gamma);
        sheet.K_uniform = base.pow(std::ldexp(1.0, k + 1));
        sheet.notes.push_back("K constants conditional on the supplied C*S");
    }
    return sheet;
}

BigLogNumber uniformity_threshold(int k, std::int64_t s0, const BigLogNumber& K, const Rational& delta) {
    if (sgn(delta) <= 0 || delta > 1) throw Error(Errc::bad_params, "delta must lie in (0, 1]");
    double exponent = std::ldexp(1.0, k + 1) * static_cast<double>(s0 + 2);
    return K * BigLogNumber::from_rational(delta).pow(exponent);
}

const char* outcome_name(IncrementOutcome outcome) {
    switch (outcome) {
        case IncrementOutcome::density_reached_one: return "density_reached_one";
        case IncrementOutcome::ambient_below_Y: return "ambient_below_Y";
        case IncrementOutcome::budget: return "budget";
    }
    return "unknown";
}

IncrementTrace increment_iteration(double delta0, double loglog_n0, std::int64_t y, const BigLogNumber& K,
                                   const BigLogNumber& C, int max_iterations) {
    if (!(delta0 > 0.0 && delta0 <= 1.0)) throw Error(Errc::bad_params, "delta0 must lie in (0, 1]");
    if (y < 3) throw Error(Errc::bad_params, "Y must be >= 3");
    if (K.sign() <= 0 || C.sign() <= 0) throw Error(Errc::bad_params, "K and C must be positive");
    if (!std::isfinite(loglog_n0)) throw Error(Errc::bad_params, "log log N0 must be finite");

    const WideReal floor_y = WideReal::from_double(std::log(std::log(static_cast<double>(y))));
    auto d_of = [&](double delta) { return K * BigLogNumber::from_double(delta).pow(C); };

    IncrementTrace trace;
    double delta = delta0;
    WideReal loglog = WideReal::from_double(loglog_n0);
    const BigLogNumber d0 = d_of(delta0);
    trace.steps.push_back({delta, loglog, d0});
    trace.ambient_exponent = BigLogNumber::from_double(1.0);
    trace.density_threshold = (BigLogNumber::from_double(2.0) * K).reciprocal().pow(C.reciprocal());
    trace.loglog_threshold = (BigLogNumber::from_double(2.0) * d0).reciprocal();
    BigLogNumber inv = d0.reciprocal();
    auto inv_d = inv.to_double();
    trace.max_iterations = inv_d ? BigLogNumber::from_double(std::ceil(*inv_d)) : inv;

    if (delta >= 1.0) {
        trace.outcome = IncrementOutcome::density_reached_one;
        return trace;
    }
    while (trace.iterations_used < max_iterations) {
        BigLogNumber d = d_of(delta);
        BigLogNumber next = BigLogNumber::from_double(delta) + d;
        delta = next >= BigLogNumber::from_double(1.0) ? 1.0 : next.to_double().value_or(delta);
        loglog = loglog + d.log2_abs().scaled(std::numbers::ln2);
        trace.ambient_exponent = trace.ambient_exponent * d;
        ++trace.iterations_used;
        trace.steps.push_back({delta, loglog, d_of(delta)});
        if (delta >= 1.0) {
            trace.outcome = IncrementOutcome::density_reached_one;
            return trace;
        }
        if (loglog < floor_y) {
            trace.outcome = IncrementOutcome::ambient_below_Y;
            return trace;
        }
    }
    trace.outcome = IncrementOutcome::budget;
    return trace;
}

std::optional<std::vector<double>> find_real_solution(const DiagonalSystem& sys, std::uint64_t seed, int attempts) {
    const int s = sys.arity();
    const int k = sys.degree();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        std::vector<double> g(static_cast<std::size_t>(s));
        for (auto& v : g) v = unit(rng);
        bool converged = false;
        for (int iter = 0; iter < 200 && !converged; ++iter) {
            std::vector<double> l = forms_real(sys, g);
            double scale = 0.0;
            for (auto c : sys.coefficients()) scale += std::abs(static_cast<double>(c));
            double resid = 0.0;
            for (auto v : l) resid = std::max(resid, std::abs(v));
            if (resid < 1e-14 * scale) {
                converged = true;
                break;
            }
            std::vector<std::vector<double>> jac(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(s)));
            for (int j = 0; j < k; ++j)
                for (int i = 0; i < s; ++i)
                    jac[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                        (j + 1) * static_cast<double>(sys.coefficient(i)) * std::pow(g[static_cast<std::size_t>(i)], j);
            std::vector<std::vector<double>> jjt(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b)
                    for (int i = 0; i < s; ++i)
                        jjt[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                            jac[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                            jac[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
            if (!solve_dense(jjt, l)) break;
            for (int i = 0; i < s; ++i) {
                double step = 0.0;
                for (int j = 0; j < k; ++j)
                    step += jac[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * l[static_cast<std::size_t>(j)];
                g[static_cast<std::size_t>(i)] -= step;
            }
            if (!std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v) && std::abs(v) < 1e6; })) break;
        }
        if (!converged) continue;
        std::vector<double> eta = normalize_real_solution(g);
        if (distinct_real(eta, 1e-6) >= k) return eta;
    }
    return std::nullopt;
}

IntegralEstimate band_volume_estimate(const DiagonalSystem& sys, const BandVolumeParams& params, const Budget& budget) {
    const int s = sys.arity();
    const int k = sys.degree();
    if (params.samples < 2) throw Error(Errc::bad_params, "need at least 2 samples");
    if (!(params.epsilon > 0.0 && params.epsilon < 0.5)) throw Error(Errc::bad_params, "epsilon must lie in (0, 1/2)");
    budget.require_ops(static_cast<double>(params.samples) * s * k, "band volume sampling");
    auto solution = find_real_solution(sys, params.seed);
    if (!solution) throw Error(Errc::no_real_solution, "no non-singular real solution found in (0,1)^s");

    int m = 0;
    for (int i = 1; i < s; ++i)
        if (std::abs(sys.coefficient(i)) > std::abs(sys.coefficient(m))) m = i;
    double scale = 0.0;
    for (auto c : sys.coefficients()) scale += std::abs(static_cast<double>(c));
    const double eps[2] = {params.epsilon * scale, 2.0 * params.epsilon * scale};
    const double lambda_m = static_cast<double>(sys.coefficient(m));

    std::uint64_t hits0 = 0, hits1 = 0;
    const auto samples = static_cast<std::int64_t>(params.samples);
#pragma omp parallel for schedule(static) reduction(+ : hits0, hits1)
    for (std::int64_t n = 0; n < samples; ++n) {
        std::vector<double> g(static_cast<std::size_t>(s));
        double linear = 0.0;
        for (int i = 0; i < s; ++i) {
            if (i == m) continue;
            g[static_cast<std::size_t>(i)] = uniform_at(params.seed, static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(s) + static_cast<std::uint64_t>(i));
            linear += static_cast<double>(sys.coefficient(i)) * g[static_cast<std::size_t>(i)];
        }
        double gm = -linear / lambda_m;
        if (gm < 0.0 || gm > 1.0) continue;
        g[static_cast<std::size_t>(m)] = gm;
        double worst = 0.0;
        for (int j = 2; j <= k; ++j) {
            double acc = 0.0;
            for (int i = 0; i < s; ++i) acc += static_cast<double>(sys.coefficient(i)) * std::pow(g[static_cast<std::size_t>(i)], j);
            worst = std::max(worst, std::abs(acc));
        }
        if (worst <= eps[0]) ++hits0;
        if (worst <= eps[1]) ++hits1;
    }

    const double nd = static_cast<double>(params.samples);
    double values[2], errors[2];
    const std::uint64_t hits[2] = {hits0, hits1};
    for (int l = 0; l < 2; ++l) {
        double weight = 1.0 / std::abs(lambda_m) / std::pow(2.0 * eps[l], k - 1);
        double p = static_cast<double>(hits[l]) / nd;
        values[l] = weight * p;
        errors[l] = weight * std::sqrt(p * (1.0 - p) / nd);
    }
    IntegralEstimate est;
    est.method = "band_volume";
    est.real_solution = *solution;
    est.levels = {params.epsilon, 2.0 * params.epsilon};
    est.level_values = {values[0], values[1]};
    if (k == 1) {
        est.value = values[0];
        est.error = errors[0];
    } else {
        est.value = (4.0 * values[0] - values[1]) / 3.0;
        est.error = std::sqrt(16.0 * errors[0] * errors[0] + errors[1] * errors[1]) / 3.0 +
                    std::abs(values[0] - values[1]) / 3.0;
    }
    return est;
}

IntegralEstimate count_ratio_estimate(const DiagonalSystem& sys, const std::vector<std::int64_t>& ns, std::int64_t qmax,
                                      const Budget& budget) {
    if (ns.empty()) throw Error(Errc::bad_params, "need at least one N");
    const double series = truncated_singular_series(sys, qmax, SeriesMethod::automatic, budget).partial_sum;
    if (!(series > 0.0)) throw Error(Errc::numerical, "truncated singular series is not positive");
    const int s = sys.arity();
    const int k = sys.degree();
    const double exponent = s - k * (k + 1) / 2.0;
    IntegralEstimate est;
    est.method = "count_ratio";
    for (auto n : ns) {
        SolutionTally tally = count_solutions(sys, SetWindow::full(n), CountMethod::automatic, budget);
        double ratio = tally.total.get_d() / (series * std::pow(static_cast<double>(n), exponent));
        est.levels.push_back(static_cast<double>(n));
        est.level_values.push_back(ratio);
    }
    est.value = est.level_values.back();
    if (est.level_values.size() > 1) est.error = std::abs(est.value - est.level_values[est.level_values.size() - 2]);
    return est;
}

double predicted_count(const DiagonalSystem& sys, double delta, std::int64_t n, double cs) {
    if (!(delta > 0.0) || !(cs > 0.0) || n < 1) throw Error(Errc::bad_params, "inputs must be positive");
    const int s = sys.arity();
    const int k = sys.degree();
    return cs * std::pow(delta, s) * std::pow(static_cast<double>(n), s - k * (k + 1) / 2.0);
}

Progression progression_concentration_search(const SetWindow& window, std::int64_t min_length, const Budget& budget) {
    require_search(window, min_length, budget);
    const std::int64_t n = window.length();
    const std::int64_t steps = max_step(n, min_length);
    std::vector<Progression> per_step(static_cast<std::size_t>(steps + 1));
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t d = 1; d <= steps; ++d) {
        Progression best;
        for (std::int64_t a = 1; a <= n; ++a) {
            std::int64_t hits = 0, length = 0;
            for (std::int64_t x = a; x <= n; x += d) {
                ++length;
                if (window.contains(x)) ++hits;
                if (length < min_length) continue;
                Progression c{a, d, length, hits, {}};
                if (better(c, best)) best = c;
            }
        }
        per_step[static_cast<std::size_t>(d)] = best;
    }
    Progression best;
    for (std::int64_t d = 1; d <= steps; ++d)
        if (per_step[static_cast<std::size_t>(d)].length > 0 && better(per_step[static_cast<std::size_t>(d)], best))
            best = per_step[static_cast<std::size_t>(d)];
    return finalize(best);
}

namespace serial {

Progression progression_concentration_search(const SetWindow& window, std::int64_t min_length, const Budget& budget) {
    require_search(window, min_length, budget);
    const std::int64_t n = window.length();
    Progression best;
    for (std::int64_t d = 1; d <= max_step(n, min_length); ++d) {
        for (std::int64_t a = 1; a <= n; ++a) {
            for (std::int64_t len = min_length; a + (len - 1) * d <= n; ++len) {
                std::int64_t hits = 0;
                for (std::int64_t i = 0; i < len; ++i)
                    if (window.contains(a + i * d)) ++hits;
                Progression c{a, d, len, hits, {}};
                if (better(c, best)) best = c;
            }
        }
    }
    return finalize(best);
}

}  // namespace serial

}  // namespace tdi
