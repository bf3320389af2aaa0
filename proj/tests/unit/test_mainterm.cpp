#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tdi/enumeration.hpp"
#include "tdi/mainterm.hpp"

using namespace tdi;

TEST_CASE("constants examples") {
    CHECK(s0_of(3) == 114);
    CHECK(s0_of(2) == 42);
    CHECK(s0_of(2, BracketConvention::truncate) == 46);
    auto c2 = constants(2);
    CHECK(c2.sigma == doctest::Approx(0.0124507).epsilon(1e-5));
    CHECK(c2.delta == doctest::Approx(0.0249015).epsilon(1e-5));
    CHECK(c2.c_exp.sign() == 1);
    CHECK(*c2.c_exp.log2_abs().to_double() == -2048.0);
    CHECK(*c2.gamma.log2_abs().to_double() == doctest::Approx(1024.0 + 3.0));
    auto c3 = constants(3, 0.5);
    CHECK(c3.s0 == 114);
    REQUIRE(c3.K_const);
    CHECK(c3.K_const->sign() == 1);
    CHECK(c3.K_const->compare(BigLogNumber::from_double(1.0)) < 0);
    CHECK_THROWS_AS(constants(1), Error);
}

TEST_CASE("constants are monotone and deterministic") {
    for (int k = 3; k < 20; ++k) {
        CHECK(s0_of(k + 1) > s0_of(k));
        CHECK(s0_of(k) > 10 * k * k + 6);
        CHECK(constants(k + 1).sigma < constants(k).sigma);
        CHECK(constants(k).sigma > 0.0);
        CHECK(constants(k).sigma < 1.0);
    }
    CHECK(constants(5, 0.7).K_const->compare(*constants(5, 0.7).K_const) == 0);
}

TEST_CASE("uniformity_threshold") {
    auto K = BigLogNumber::from_log2(-5.0);
    CHECK(uniformity_threshold(2, 42, K, Rational(1)).compare(K) == 0);
    auto t = uniformity_threshold(2, 42, K, Rational(1, 2));
    CHECK(*t.log2_abs().to_double() == doctest::Approx(-5.0 - 352.0));
    BigLogNumber prev = BigLogNumber::from_double(0.0);
    for (int d = 1; d <= 10; ++d) {
        auto v = uniformity_threshold(2, 42, K, Rational(d, 10));
        CHECK(v.compare(prev) > 0);
        prev = v;
    }
    auto bigger = BigLogNumber::from_log2(-4.0);
    CHECK(uniformity_threshold(2, 42, bigger, Rational(1, 3)).compare(uniformity_threshold(2, 42, K, Rational(1, 3))) > 0);
}

TEST_CASE("increment_iteration") {
    auto K = BigLogNumber::from_double(1.0);
    auto C = BigLogNumber::from_double(0.5);
    auto one = increment_iteration(1.0, 10.0, 3, K, C);
    CHECK(one.outcome == IncrementOutcome::density_reached_one);
    CHECK(one.iterations_used == 0);

    auto two = increment_iteration(0.3, 10.0, 3, K, C);
    CHECK(two.outcome == IncrementOutcome::density_reached_one);
    CHECK(two.iterations_used == 2);
    CHECK(*two.ambient_exponent.to_double() >= 0.25);

    auto Ksmall = BigLogNumber::from_double(0.01);
    auto C2 = BigLogNumber::from_double(2.0);
    auto tr = increment_iteration(0.2, 1e6, 3, Ksmall, C2);
    for (std::size_t i = 1; i < tr.steps.size(); ++i) {
        const auto& a = tr.steps[i - 1];
        const auto& b = tr.steps[i];
        CHECK(b.density >= a.density);
        double step = *a.D.to_double();
        CHECK(b.density == doctest::Approx(std::min(1.0, a.density + step)).epsilon(1e-12));
    }
    CHECK(static_cast<double>(tr.iterations_used) <= std::ceil(*tr.max_iterations.to_double()));
    CHECK(std::string(outcome_name(tr.outcome)).size() > 0);

    auto shrink = increment_iteration(0.2, 0.5, 1000000, Ksmall, C2);
    CHECK(shrink.outcome == IncrementOutcome::ambient_below_Y);
    auto capped = increment_iteration(0.01, 1e9, 3, Ksmall, C2, 5);
    CHECK(capped.outcome == IncrementOutcome::budget);
    CHECK(capped.iterations_used == 5);
}

TEST_CASE("find_real_solution") {
    auto sys = validate_system(2, {1, 1, 1, -1, -1, -1});
    auto y = find_real_solution(sys);
    REQUIRE(y);
    for (int j = 1; j <= 2; ++j) {
        double acc = 0.0;
        for (int i = 0; i < 6; ++i) acc += static_cast<double>(sys.coefficient(i)) * std::pow((*y)[static_cast<std::size_t>(i)], j);
        CHECK(std::fabs(acc) < 1e-9);
    }
    for (double v : *y) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    CHECK_FALSE(find_real_solution(validate_system(2, {1, -1})));
}

TEST_CASE("band_volume_estimate") {
    auto s8 = validate_system(2, {1, 1, 1, 1, -1, -1, -1, -1});
    BandVolumeParams p;
    p.samples = 400000;
    auto e = band_volume_estimate(s8, p);
    CHECK(std::isfinite(e.value));
    CHECK(e.value > 0.0);
    CHECK(e.error > 0.0);
    auto again = band_volume_estimate(s8, p);
    CHECK(again.value == e.value);
    BandVolumeParams wide = p;
    wide.epsilon = 2 * p.epsilon;
    auto w = band_volume_estimate(s8, wide);
    CHECK(std::fabs(w.value - e.value) <= w.error + e.error);
    try {
        band_volume_estimate(validate_system(2, {1, -1}), p);
        FAIL("expected NoRealSolution");
    } catch (const Error& err) {
        CHECK(err.code() == Errc::no_real_solution);
    }
    auto s4 = validate_system(2, {1, 1, -1, -1});
    auto b4 = band_volume_estimate(s4, p);
    CHECK(std::isfinite(b4.value));
    auto r4 = count_ratio_estimate(s4, {32, 64}, 10);
    CHECK(std::isfinite(r4.value));
    CHECK(r4.level_values.size() == 2);
}

TEST_CASE("predicted_count") {
    auto s4 = validate_system(2, {1, 1, -1, -1});
    CHECK(predicted_count(s4, 1.0, 10, 1.0) == doctest::Approx(10.0));
    CHECK(predicted_count(s4, 0.5, 10, 1.0) == doctest::Approx(10.0 / 16.0));
    auto s8 = validate_system(2, {1, 1, 1, 1, -1, -1, -1, -1});
    double r16 = count_solutions(s8, SetWindow::full(16)).total.get_d() / std::pow(16.0, 5);
    double r32 = count_solutions(s8, SetWindow::full(32)).total.get_d() / std::pow(32.0, 5);
    CHECK(r32 / r16 >= 0.8);
    CHECK(r32 / r16 <= 1.25);
}

TEST_CASE("progression_concentration_search") {
    auto full = progression_concentration_search(SetWindow::full(30), 3);
    CHECK(full.start == 1);
    CHECK(full.step == 1);
    CHECK(full.length == 30);
    CHECK(full.density == 1);
    SetWindow evens(20);
    for (std::int64_t x = 2; x <= 20; x += 2) evens.insert(x);
    auto ev = progression_concentration_search(evens, 5);
    CHECK(ev.step == 2);
    CHECK(ev.density == 1);
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 6; ++trial) {
        std::int64_t n = 20 + static_cast<std::int64_t>(rng() % 180);
        SetWindow w = oracle::random_window(rng, n, 0.5);
        std::int64_t L = 2 + static_cast<std::int64_t>(rng() % 10);
        auto fast = progression_concentration_search(w, L);
        auto ref = serial::progression_concentration_search(w, L);
        CHECK(fast.density == ref.density);
        CHECK(fast.start == ref.start);
        CHECK(fast.step == ref.step);
        CHECK(fast.length == ref.length);
        CHECK(fast.density >= Rational(static_cast<long>(w.cardinality()), static_cast<long>(n)));
    }
}
