#include "tdi/expsums.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "tdi/exact.hpp"

namespace tdi {

namespace {

constexpr std::size_t kLeaf = 32;

double frac(double t) { return t - std::floor(t); }

// frac(alpha * X) for an exactly representable integer X.
double frac_product(double alpha, double x) {
    double p = alpha * x;
    double err = std::fma(alpha, x, -p);
    return frac(frac(p) + err);
}

double power_bound_log2(std::int64_t n, int k) { return k * std::log2(static_cast<double>(n)); }

void require_exact_powers(std::int64_t n, int k) {
    if (n > 1 && power_bound_log2(n, k) >= 53.0)
        throw Error(Errc::overflow, "N^k must stay below 2^53 for exact phase reduction");
}

double phase_at(const PhasePoint& alpha, std::int64_t x) {
    double xd = static_cast<double>(x);
    double pw = 1.0;
    double t = 0.0;
    for (double a : alpha.alpha) {
        pw *= xd;
        t += frac_product(a, pw);
    }
    return frac(t);
}

struct GaussLegendre {
    static constexpr int kOrder = 20;
    std::array<double, kOrder> nodes{};
    std::array<double, kOrder> weights{};

    GaussLegendre() {
        for (int i = 0; i < kOrder; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int m = 2; m <= kOrder; ++m) {
                    double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                    p0 = p1;
                    p1 = p2;
                }
                dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[static_cast<std::size_t>(i)] = x;
            weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

const GaussLegendre& gauss_legendre() {
    static const GaussLegendre rule;
    return rule;
}

Complex composite_rule(double n, std::span<const double> c, std::int64_t panels) {
    const auto& gl = gauss_legendre();
    const double h = n / static_cast<double>(panels);
    std::vector<Complex> per_panel(static_cast<std::size_t>(panels));
    for (std::int64_t p = 0; p < panels; ++p) {
        double mid = (static_cast<double>(p) + 0.5) * h;
        Complex acc = 0.0;
        for (int i = 0; i < GaussLegendre::kOrder; ++i) {
            double t = mid + 0.5 * h * gl.nodes[static_cast<std::size_t>(i)];
            double phase = 0.0;
            for (std::size_t j = c.size(); j-- > 0;) phase = (phase + c[j]) * t;
            acc += gl.weights[static_cast<std::size_t>(i)] * unit_phase(phase);
        }
        per_panel[static_cast<std::size_t>(p)] = acc * (0.5 * h);
    }
    return pairwise_sum(per_panel);
}

}  // namespace

PhasePoint::PhasePoint(std::vector<double> components) : alpha(std::move(components)) {
    for (auto& a : alpha) {
        if (!std::isfinite(a)) throw Error(Errc::bad_params, "phase components must be finite");
        a = frac(a);
        if (a >= 1.0) a = 0.0;
    }
}

double arc_sigma(int k) {
    if (k < 2) throw Error(Errc::bad_degree, "sigma(k) requires k >= 2");
    double kd = k;
    return 1.0 / (8.0 * kd * kd * (std::log(kd) + std::log(std::log(kd)) / 2.0 + 2.0));
}

double arc_delta(int k) { return k * arc_sigma(k); }

Complex unit_phase(double t) {
    t = frac(t);
    if (t > 0.5) t -= 1.0;
    double angle = 2.0 * std::numbers::pi * t;
    return {std::cos(angle), std::sin(angle)};
}

Complex pairwise_sum(std::span<const Complex> terms) {
    if (terms.size() <= kLeaf) {
        Complex acc = 0.0;
        for (const auto& t : terms) acc += t;
        return acc;
    }
    std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

Complex eval_g(std::int64_t n, const PhasePoint& alpha) {
    if (n < 1) throw Error(Errc::bad_params, "N must be positive");
    require_exact_powers(n, alpha.degree());
    std::vector<Complex> terms(static_cast<std::size_t>(n));
    for (std::int64_t x = 1; x <= n; ++x) terms[static_cast<std::size_t>(x - 1)] = unit_phase(phase_at(alpha, x));
    return pairwise_sum(terms);
}

Complex eval_f(const SetWindow& window, const PhasePoint& alpha) {
    require_exact_powers(window.length(), alpha.degree());
    auto elements = window.elements();
    std::vector<Complex> terms(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) terms[i] = unit_phase(phase_at(alpha, elements[i]));
    return pairwise_sum(terms);
}

Complex eval_E(const SetWindow& window, const PhasePoint& alpha) {
    double density = window.density().get_d();
    return density * eval_g(window.length(), alpha) - eval_f(window, alpha);
}

Complex eval_E_balanced(const SetWindow& window, const PhasePoint& alpha) {
    const std::int64_t n = window.length();
    require_exact_powers(n, alpha.degree());
    double density = window.density().get_d();
    std::vector<Complex> terms(static_cast<std::size_t>(n));
    for (std::int64_t x = 1; x <= n; ++x) {
        double weight = density - (window.contains(x) ? 1.0 : 0.0);
        terms[static_cast<std::size_t>(x - 1)] = weight * unit_phase(phase_at(alpha, x));
    }
    return pairwise_sum(terms);
}

Complex complete_sum(std::int64_t q, std::span<const std::int64_t> a, std::int64_t lambda) {
    if (q < 1) throw Error(Errc::bad_params, "modulus q must be positive");
    std::vector<std::int64_t> c(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        c[j] = static_cast<std::int64_t>(
            (static_cast<i128>(mod_floor(lambda, q)) * mod_floor(a[j], q)) % q);
    std::vector<Complex> terms(static_cast<std::size_t>(q));
    for (std::int64_t m = 0; m < q; ++m) {
        i128 pw = 1;
        i128 r = 0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            pw = pw * m % q;
            r = (r + pw * c[j]) % q;
        }
        auto rr = static_cast<std::int64_t>(r);
        if (2 * rr > q) rr -= q;
        double angle = 2.0 * std::numbers::pi * static_cast<double>(rr) / static_cast<double>(q);
        terms[static_cast<std::size_t>(m)] = {std::cos(angle), std::sin(angle)};
    }
    return pairwise_sum(terms);
}

Complex oscillatory_w(double n, std::span<const double> beta, std::int64_t lambda) {
    if (!(n >= 0.0) || !std::isfinite(n)) throw Error(Errc::bad_params, "integration length must be finite and >= 0");
    std::vector<double> c(beta.size());
    double variation = 0.0;
    bool zero = true;
    for (std::size_t j = 0; j < beta.size(); ++j) {
        if (!std::isfinite(beta[j])) throw Error(Errc::bad_params, "beta must be finite");
        c[j] = static_cast<double>(lambda) * beta[j];
        if (c[j] != 0.0) zero = false;
        variation += std::abs(c[j]) * std::pow(n, static_cast<double>(j + 1));
    }
    if (zero || n == 0.0) return {n, 0.0};

    constexpr double kMaxPanels = 2e7;
    double start = std::ceil(1.0 + variation);
    if (start > kMaxPanels) throw Error(Errc::tolerance_not_met, "phase variation too large for quadrature");
    auto panels = static_cast<std::int64_t>(start);
    Complex previous = composite_rule(n, c, panels);
    for (int doubling = 0; doubling < 20; ++doubling) {
        panels *= 2;
        if (static_cast<double>(panels) > kMaxPanels) break;
        Complex current = composite_rule(n, c, panels);
        if (std::abs(current - previous) <= 1e-8 * std::abs(current) + 1e-13 * n) return current;
        previous = current;
    }
    throw Error(Errc::tolerance_not_met, "oscillatory integral did not converge");
}

std::optional<ArcLabel> classify_arc(const PhasePoint& alpha, std::int64_t n, std::optional<double> exponent_override) {
    if (n < 2) throw Error(Errc::bad_params, "classify_arc requires N >= 2");
    const int k = alpha.degree();
    const double delta = exponent_override ? *exponent_override : arc_delta(k);
    const double nd = static_cast<double>(n);
    const auto q_max = static_cast<std::int64_t>(std::floor(std::pow(nd, delta) * (1.0 + 1e-12)));
    std::vector<double> width(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) width[static_cast<std::size_t>(j - 1)] = std::pow(nd, delta - j);

    std::vector<std::int64_t> a(static_cast<std::size_t>(k));
    for (std::int64_t q = 1; q <= q_max; ++q) {
        bool inside = true;
        for (int j = 0; j < k && inside; ++j) {
            double qa = static_cast<double>(q) * alpha.alpha[static_cast<std::size_t>(j)];
            double r = std::nearbyint(qa);
            a[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(r);
            inside = std::abs(qa - r) <= width[static_cast<std::size_t>(j)];
        }
        if (!inside) continue;

        std::int64_t g = q;
        for (auto v : a) g = gcd_i64(g, v);
        ArcLabel label;
        label.q = q / g;
        label.a.resize(static_cast<std::size_t>(k));
        label.beta.resize(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
            std::int64_t aj = a[static_cast<std::size_t>(j)] / g;
            label.beta[static_cast<std::size_t>(j)] =
                alpha.alpha[static_cast<std::size_t>(j)] - static_cast<double>(aj) / static_cast<double>(label.q);
            label.a[static_cast<std::size_t>(j)] = mod_floor(aj, label.q);
        }
        return label;
    }
    return std::nullopt;
}

MajorArcReport major_arc_approx_check(std::int64_t n, std::int64_t q, std::span<const std::int64_t> a,
                                      std::span<const double> beta, std::int64_t lambda) {
    if (q < 1) throw Error(Errc::bad_params, "modulus q must be positive");
    if (a.size() != beta.size()) throw Error(Errc::bad_params, "a and beta must have equal length");
    std::vector<double> phase(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        std::int64_t num = mod_floor(static_cast<std::int64_t>(static_cast<i128>(mod_floor(lambda, q)) * mod_floor(a[j], q) % q), q);
        phase[j] = static_cast<double>(num) / static_cast<double>(q) + static_cast<double>(lambda) * beta[j];
    }
    MajorArcReport report;
    report.g = eval_g(n, PhasePoint(phase));
    report.approximation = complete_sum(q, a, lambda) * oscillatory_w(static_cast<double>(n), beta, lambda) /
                           static_cast<double>(q);
    report.discrepancy = std::abs(report.g - report.approximation);
    double scale = 1.0;
    for (std::size_t j = 0; j < beta.size(); ++j)
        scale += std::abs(beta[j]) * std::pow(static_cast<double>(n), static_cast<double>(j + 1));
    report.scale = static_cast<double>(q) * scale;
    report.ratio = report.discrepancy / report.scale;
    return report;
}

}  // namespace tdi
