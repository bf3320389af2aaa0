// One [PASS]/[FAIL] line per acceptance criterion; exit status is the number of failures.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tdi/cli.hpp"
#include "tdi/enumeration.hpp"
#include "tdi/expsums.hpp"
#include "tdi/gowers.hpp"
#include "tdi/local.hpp"
#include "tdi/mainterm.hpp"
#include "tdi/parallel.hpp"

using namespace tdi;

namespace {

namespace tol {
constexpr double identity_rel = 1e-9;
constexpr double multiplicative = 1e-9;
constexpr double closed_form_w = 1e-10;
constexpr double riemann_w = 1e-6;
constexpr double trend_lo = 0.8;
constexpr double trend_hi = 1.25;
constexpr double prediction_factor = 2.0;
constexpr double sigma2 = 0.0124507;
constexpr double sigma2_abs = 1e-6;
}  // namespace tol

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double max_rss_gib() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return static_cast<double>(ru.ru_maxrss) / (1024.0 * 1024.0);
}

DiagonalSystem quad4() { return validate_system(2, {1, 1, -1, -1}); }
DiagonalSystem lin3() { return validate_system(1, {2, -1, -1}); }
DiagonalSystem quad6() { return validate_system(2, {1, 1, 1, -1, -1, -1}); }
DiagonalSystem quad8() { return validate_system(2, {1, 1, 1, 1, -1, -1, -1, -1}); }

Outcome divisor_identity() {
    Outcome o;
    double worst = 0.0;
    for (const auto& sys : {quad4(), lin3()}) {
        std::vector<double> direct(51, 0.0);
        for (std::int64_t q = 1; q <= 50; ++q) direct[static_cast<std::size_t>(q)] = series_term_direct(sys, q).real();
        for (std::int64_t q = 1; q <= 50; ++q) {
            double lhs = 0.0;
            for (auto d : divisors(q)) lhs += direct[static_cast<std::size_t>(d)];
            double rhs = std::pow(static_cast<double>(q), sys.degree() - sys.arity()) * congruence_count(sys, q).get_d();
            double rel = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs));
            worst = std::max(worst, rel);
        }
    }
    o.pass = worst <= tol::identity_rel;
    o.detail = "max relative gap " + fmt("%.3g", worst);
    return o;
}

Outcome multiplicativity() {
    Outcome o;
    double worst = 0.0;
    int pairs = 0;
    for (const auto& sys : {quad4(), lin3()})
        for (std::int64_t q = 1; q <= 60; ++q)
            for (std::int64_t r = 1; q * r <= 60; ++r) {
                if (std::gcd(q, r) != 1) continue;
                auto rep = multiplicativity_check(sys, q, r, true);
                double prod = rep.product.get_d();
                double gap = std::fabs(rep.s_qr.get_d() - prod) / (1 + std::fabs(prod));
                worst = std::max({worst, gap, rep.direct_gap / (1 + std::fabs(prod))});
                if (!rep.passed || !rep.exact_equal) o.pass = false;
                ++pairs;
            }
    auto s = quad4();
    bool spots = series_term_moebius(s, 2) == 1 && series_term_moebius(s, 3) == Rational(2, 3) &&
                 series_term_moebius(s, 6) == Rational(2, 3);
    o.pass = o.pass && spots && worst <= tol::multiplicative;
    o.detail = std::to_string(pairs) + " pairs, max gap " + fmt("%.3g", worst) + ", spot values " + (spots ? "ok" : "wrong");
    return o;
}

Outcome counting_oracles() {
    Outcome o;
    std::mt19937_64 rng(2024);
    int mitm_bad = 0, trivial_bad = 0;
    for (int i = 0; i < 200; ++i) {
        int s = 2 + static_cast<int>(rng() % 5);
        int k = 1 + static_cast<int>(rng() % 3);
        auto sys = validate_system(k, oracle::random_coefficients(rng, s));
        std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 12);
        SetWindow w = oracle::random_window(rng, n, 0.3 + 0.7 * std::uniform_real_distribution<double>(0, 1)(rng));
        if (kernels::count_mitm_total(sys, w) != kernels::count_naive(sys, w).total) ++mitm_bad;
    }
    int done = 0;
    while (done < 100) {
        int s = 2 + static_cast<int>(rng() % 7);
        int k = 1 + static_cast<int>(rng() % 3);
        std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 10);
        SetWindow w = oracle::random_window(rng, n, std::uniform_real_distribution<double>(0.2, 1.0)(rng));
        if (std::pow(static_cast<double>(w.cardinality()), s) > 4e6) continue;
        auto sys = validate_system(k, oracle::random_coefficients(rng, s));
        Integer streamed_trivial = 0;
        SolutionStream stream(sys, w, StreamFilter::all);
        while (auto x = stream.next())
            if (is_trivial(sys, *x)) ++streamed_trivial;
        if (trivial_count(sys, w.cardinality()) != streamed_trivial) ++trivial_bad;
        ++done;
    }
    o.pass = mitm_bad == 0 && trivial_bad == 0;
    o.detail = "mitm mismatches " + std::to_string(mitm_bad) + "/200, trivial mismatches " + std::to_string(trivial_bad) + "/100";
    return o;
}

Outcome moments() {
    Outcome o;
    int bad = 0;
    for (std::int64_t n = 1; n <= 40; ++n) {
        Integer m = vinogradov_moment(n, 2, 2);
        if (m != 2 * n * n - n) ++bad;
        if (n <= 12 && m != oracle::brute_moment(n, 2, 2)) ++bad;
    }
    for (int k = 1; k <= 4; ++k)
        for (std::int64_t n = 1; n <= 100; ++n)
            if (vinogradov_moment(n, k, 1) != n) ++bad;
    o.pass = bad == 0;
    o.detail = std::to_string(bad) + " mismatches";
    return o;
}

Outcome gowers_identity() {
    Outcome o;
    int bad = 0;
    for (std::uint32_t mask = 0; mask < (1u << 12); ++mask) {
        SetWindow w(12);
        for (int b = 0; b < 12; ++b)
            if (mask >> b & 1u) w.insert(b + 1);
        if (difference_sum(w, 1) != difference_sum_naive(w, 1)) ++bad;
    }
    std::mt19937_64 rng(77);
    for (int i = 0; i < 200; ++i) {
        std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 16);
        SetWindow w = oracle::random_window(rng, n, std::uniform_real_distribution<double>(0, 1)(rng));
        if (difference_sum(w, 2) != difference_sum_naive(w, 2)) ++bad;
    }
    bool full_zero = uniformity_parameter(SetWindow::full(64), 2).parameter == 0 &&
                     uniformity_parameter(SetWindow::full(12), 1).parameter == 0;
    o.pass = bad == 0 && full_zero;
    o.detail = std::to_string(bad) + " mismatches over 4296 windows, full interval " + (full_zero ? "0" : "nonzero");
    return o;
}

Outcome weyl_bound() {
    Outcome o;
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t violations = 0, chain = 0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        SetWindow w = oracle::random_window(rng, 256, 0.05 + 0.9 * unit(rng));
        auto u = uniformity_parameter(w, 2);
        std::vector<PhasePoint> phases;
        phases.reserve(1000);
        for (int j = 0; j < 1000; ++j) phases.emplace_back(std::vector<double>{unit(rng), unit(rng)});
        auto rep = weyl_chain_check(w, u, phases);
        violations += rep.bound_violations;
        chain += rep.chain_violations;
        worst = std::max(worst, rep.max_ratio);
    }
    o.pass = violations == 0 && chain == 0;
    o.detail = std::to_string(violations) + " bound violations, " + std::to_string(chain) +
               " chain violations, max |E|/(2 a^(1/8) N) " + fmt("%.4f", worst);
    return o;
}

bool solves_mod(const DiagonalSystem& sys, const std::vector<Integer>& x, const Integer& m) {
    for (int j = 1; j <= sys.degree(); ++j) {
        Integer acc = 0;
        for (int i = 0; i < sys.arity(); ++i) {
            Integer pw;
            mpz_pow_ui(pw.get_mpz_t(), x[static_cast<std::size_t>(i)].get_mpz_t(), static_cast<unsigned long>(j));
            acc += Integer(static_cast<long>(sys.coefficient(i))) * pw;
        }
        Integer r;
        mpz_mod(r.get_mpz_t(), acc.get_mpz_t(), m.get_mpz_t());
        if (r != 0) return false;
    }
    return true;
}

Outcome hensel() {
    Outcome o;
    std::mt19937_64 rng(5);
    const std::vector<DiagonalSystem> systems{quad6(), quad8(), validate_system(2, {2, 1, 1, -1, -1, -2})};
    std::vector<std::vector<SolutionTuple>> pools;
    for (const auto& sys : systems) pools.push_back(stream_solutions(sys, SetWindow::full(sys.arity() > 6 ? 7 : 12), StreamFilter::nontrivial));
    const std::int64_t primes[] = {3, 5, 7};
    int lifted = 0, bad = 0, skipped = 0;
    while (lifted < 100 && skipped < 100000) {
        std::size_t which = rng() % systems.size();
        const auto& pool = pools[which];
        const auto& x = pool[rng() % pool.size()];
        std::int64_t p = primes[rng() % 3];
        int t = 1 + static_cast<int>(rng() % 4);
        std::vector<std::int64_t> seed;
        for (auto v : x) seed.push_back(v % p);
        try {
            auto lift = hensel_lift(systems[which], seed, p, t);
            Integer m;
            mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(t));
            bool ok = solves_mod(systems[which], lift.values, m);
            for (std::size_t i = 0; i < seed.size(); ++i) ok = ok && (lift.values[i] - seed[i]) % p == 0;
            if (!ok) ++bad;
            ++lifted;
        } catch (const Error& e) {
            if (e.code() != Errc::hypothesis_violated && e.code() != Errc::singular_jacobian) ++bad;
            ++skipped;
        }
    }
    int singular_ok = 0;
    for (std::int64_t p : primes)
        for (std::int64_t c = 0; c < p; ++c) {
            std::vector<std::int64_t> flat(6, c);
            flat[5] = c + p;
            try {
                hensel_lift(quad6(), flat, p, 2, std::vector<int>{0, 5});
            } catch (const Error& e) {
                if (e.code() == Errc::singular_jacobian) ++singular_ok;
            }
        }
    o.pass = lifted == 100 && bad == 0 && singular_ok == 15;
    o.detail = std::to_string(lifted) + " lifts verified (" + std::to_string(skipped) + " inadmissible draws skipped), " +
               std::to_string(bad) + " failures, singular seeds rejected " + std::to_string(singular_ok) + "/15";
    return o;
}

Outcome oscillatory() {
    Outcome o;
    bool zero_ok = true;
    for (double n : {1.0, 37.0, 1000.0})
        zero_ok = zero_ok && oscillatory_w(n, std::vector<double>{0.0, 0.0}) == Complex(n, 0.0);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> b1(-2.0, 2.0);
    double worst_closed = 0.0;
    for (int i = 0; i < 100; ++i) {
        double b = b1(rng);
        double n = 1.0 + static_cast<double>(rng() % 1000);
        if (b == 0.0) continue;
        Complex ref = (unit_phase(b * n) - 1.0) / Complex(0.0, 2 * std::numbers::pi * b);
        worst_closed = std::max(worst_closed, std::abs(oscillatory_w(n, std::vector<double>{b}) - ref) / n);
    }
    std::uniform_real_distribution<double> c1(-0.5, 0.5), c2(-0.005, 0.005);
    double worst_riemann = 0.0;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> beta{c1(rng), c2(rng)};
        Complex ref = oracle::riemann_w(100.0, beta, 1, 1000000);
        worst_riemann = std::max(worst_riemann, std::abs(oscillatory_w(100.0, beta) - ref) / 100.0);
    }
    o.pass = zero_ok && worst_closed <= tol::closed_form_w && worst_riemann <= tol::riemann_w;
    o.detail = std::string("w(0)=N ") + (zero_ok ? "exact" : "wrong") + ", closed form max gap/N " + fmt("%.3g", worst_closed) +
               ", Riemann max gap/N " + fmt("%.3g", worst_riemann);
    return o;
}

Outcome main_term() {
    Outcome o;
    auto sys = quad8();
    double r16 = count_solutions(sys, SetWindow::full(16), CountMethod::mitm).total.get_d() / std::pow(16.0, 5);
    double r32 = count_solutions(sys, SetWindow::full(32), CountMethod::mitm).total.get_d() / std::pow(32.0, 5);
    double trend = r32 / r16;
    double series = truncated_singular_series(sys, 50).partial_sum;
    auto band = band_volume_estimate(sys);
    double predicted = band.value * series;
    double factor = r32 / predicted;
    double rss = max_rss_gib();
    o.pass = trend >= tol::trend_lo && trend <= tol::trend_hi && factor <= tol::prediction_factor &&
             factor >= 1.0 / tol::prediction_factor && rss < 8.0;
    o.detail = "r(32)/r(16)=" + fmt("%.4f", trend) + ", S(50)=" + fmt("%.5f", series) + ", C_band=" + fmt("%.4f", band.value) +
               "+-" + fmt("%.4f", band.error) + ", r(32)/(C S)=" + fmt("%.4f", factor) + ", peak RSS " + fmt("%.2f", rss) + " GiB";
    return o;
}

Outcome constant_sheet() {
    Outcome o;
    auto c3 = constants(3);
    auto c2 = constants(2);
    auto log2c = c2.c_exp.log2_abs().to_double();
    auto inc = increment_iteration(0.3, 10.0, 3, BigLogNumber::from_double(1.0), BigLogNumber::from_double(0.5));
    auto amb = inc.ambient_exponent.to_double();
    bool d_big = inc.steps.size() > 1 && *inc.steps[0].D.to_double() > 0.5;
    o.pass = c3.s0 == 114 && std::fabs(c2.sigma - tol::sigma2) <= tol::sigma2_abs && log2c && *log2c == -2048.0 &&
             c2.c_exp.sign() == 1 && d_big && inc.outcome == IncrementOutcome::density_reached_one &&
             inc.iterations_used == 2 && amb && *amb >= 0.25;
    o.detail = "s0(3)=" + std::to_string(c3.s0) + ", sigma(2)=" + fmt("%.7f", c2.sigma) + ", log2 c(2)=" +
               (log2c ? fmt("%.1f", *log2c) : std::string("?")) + ", increment " + outcome_name(inc.outcome) + " in " +
               std::to_string(inc.iterations_used) + " steps, ambient exponent " + (amb ? fmt("%.4f", *amb) : std::string("?"));
    return o;
}

Outcome determinism() {
    Outcome o;
    auto dir = std::filesystem::temp_directory_path() / "tdi_acceptance";
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        auto p = dir / name;
        std::ofstream(p) << text;
        return p.string();
    };
    std::string s4 = write("s4.json", R"({"k": 2, "lambda": [1, 1, -1, -1]})");
    std::string s6 = write("s6.json", R"({"k": 2, "lambda": [1, 1, 1, -1, -1, -1]})");
    std::string s8 = write("s8.json", R"({"k": 2, "lambda": [1, 1, 1, 1, -1, -1, -1, -1]})");
    std::string set = write("set.txt", "N 60\n1 2 3 5 8 13 21 34 55 4 9 16 25 36 49 10 20 30 40 50 60\n");
    std::vector<std::vector<std::string>> commands{
        {"validate", "--system", s6, "--tuple", "1,5,6,2,3,7"},
        {"count", "--system", s6, "--n", "14"},
        {"count", "--system", s6, "--set", set, "--method", "naive"},
        {"--output", "csv", "count", "--system", s8, "--n", "12", "--method", "mitm"},
        {"stream", "--system", s6, "--n", "9", "--filter", "nontrivial"},
        {"moment", "--n", "30", "--k", "2", "--t", "3"},
        {"gowers", "--set", set, "--degree", "2", "--naive-check", "--weyl-samples", "200"},
        {"expsum", "E", "--set", set, "--alpha", "0.123,0.456"},
        {"expsum", "g", "--n", "1000", "--alpha", "0.3,0.7,0.01"},
        {"arcs", "--n", "10000", "--alpha", "0.2857142857,0.4285714286", "--arc-exponent", "0.5"},
        {"series", "--system", s6, "--qmax", "30", "--method", "both"},
        {"--output", "json", "series", "--system", s4, "--qmax", "20"},
        {"local", "--system", s4, "--q", "6", "--r", "5", "--p", "3", "--hmax", "3"},
        {"lift", "--system", s6, "-p", "5", "-t", "3", "--seed", "1,0,1,2,3,2"},
        {"constants", "--k", "2", "--cs", "2.5"},
        {"predict", "--system", s8, "--n", "16", "--qmax", "20", "--samples", "200000", "--exact"},
        {"predict", "--system", s4, "--n", "32", "--qmax", "10", "--cs-method", "ratio"},
        {"increment", "--delta", "0.3", "--loglogn", "10", "--y", "3", "--k", "2", "--kconst-log2", "0", "--cexp", "0.5"},
        {"concentrate", "--set", set, "--min-len", "4"},
        {"--seed", "7", "gen-set", "--kind", "random_density", "--n", "200", "--density", "1/3"},
        {"gen-set", "--kind", "greedy_free", "--system", s6, "--n", "25"},
        {"count", "--k", "2", "--lambda", "1,1,1,-1,-1,-1", "--n", "60", "--budget", "1000"},
    };
    const int saved = max_threads();
    int mismatches = 0;
    std::string first_bad;
    for (const auto& cmd : commands) {
        std::string reference;
        int reference_code = 0;
        for (int threads : {1, 2, 4, 1}) {
            std::vector<std::string> args{"--threads", std::to_string(threads)};
            args.insert(args.end(), cmd.begin(), cmd.end());
            auto r = run_cli(args);
            if (threads == 1 && reference.empty()) {
                reference = r.out + "\x1f" + r.err;
                reference_code = r.exit_code;
                if (r.out.empty() && r.err.empty()) reference = "\x1f";
            } else if (r.out + "\x1f" + r.err != reference || r.exit_code != reference_code) {
                ++mismatches;
                if (first_bad.empty()) first_bad = cmd[0] == "--seed" || cmd[0] == "--output" ? cmd[2] : cmd[0];
            }
        }
    }
    set_threads(saved);
    o.pass = mismatches == 0;
    o.detail = std::to_string(commands.size()) + " commands x threads {1,2,4,1}, " + std::to_string(mismatches) + " mismatches" +
               (first_bad.empty() ? "" : " (first: " + first_bad + ")");
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "divisor-sum identity for the series terms", 60, divisor_identity},
        {2, "multiplicativity of the series terms", 60, multiplicativity},
        {3, "counting oracle equivalence", 120, counting_oracles},
        {4, "Vinogradov moment values", 30, moments},
        {5, "fast vs naive difference sums", 600, gowers_identity},
        {6, "exponential sum bound from uniformity", 300, weyl_bound},
        {7, "Hensel lifting", 30, hensel},
        {8, "oscillatory integral", 60, oscillatory},
        {9, "main-term trend for the 8-variable quadratic system", 900, main_term},
        {10, "constants sheet and increment arithmetic", 1, constant_sheet},
        {11, "byte-identical CLI output across thread counts", 300, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs < c.limit_seconds;
        bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::printf("[%s] %d %s: %s; %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                    secs, c.limit_seconds);
        std::fflush(stdout);
    }
    return failures;
}
