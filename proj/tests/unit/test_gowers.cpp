#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tdi/gowers.hpp"

using namespace tdi;

TEST_CASE("balanced_function") {
    auto full = balanced_function(SetWindow::full(7));
    for (auto v : full.values) CHECK(v == 0);
    auto empty = balanced_function(SetWindow(7));
    for (auto v : empty.values) CHECK(v == 0);
    auto b = balanced_function(SetWindow::from_elements(2, std::vector<std::int64_t>{1}));
    CHECK(b.values == std::vector<std::int64_t>{-1, 1});
    CHECK(b.at(0) == 0);
    CHECK(b.at(3) == 0);
    std::mt19937_64 rng(3);
    auto r = balanced_function(oracle::random_window(rng, 50, 0.3));
    std::int64_t sum = 0;
    for (auto v : r.values) sum += v;
    CHECK(sum == 0);
}

TEST_CASE("difference_sum examples") {
    auto single = SetWindow::from_elements(2, std::vector<std::int64_t>{1});
    CHECK(difference_sum(single, 1) == Rational(3, 8));
    CHECK(difference_sum_naive(single, 1) == Rational(3, 8));
    auto u = uniformity_parameter(single, 1);
    CHECK(u.parameter == Rational(3, 64));
    for (int k : {1, 2, 3}) {
        CHECK(difference_sum(SetWindow::full(12), k) == 0);
        CHECK(difference_sum(SetWindow(12), k) == 0);
    }
    CHECK(uniformity_parameter(SetWindow::full(64), 2).parameter == 0);
}

TEST_CASE("fast, serial and naive evaluators agree") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        int k = 1 + trial % 3;
        std::int64_t n = 2 + static_cast<std::int64_t>(rng() % (k == 3 ? 6 : 10));
        SetWindow w = oracle::random_window(rng, n, 0.5);
        Rational fast = difference_sum(w, k);
        Integer scaled = serial::difference_sum_scaled(w, k);
        REQUIRE(kernels::difference_sum_scaled(w, k) == scaled);
        REQUIRE(fast == difference_sum_naive(w, k));
        REQUIRE(sgn(fast) >= 0);
    }
}

TEST_CASE("translation and reflection invariance") {
    const std::int64_t n = 11;
    for (std::int64_t x0 = 1; x0 <= n; ++x0) {
        auto at = [&](std::int64_t x) { return SetWindow::from_elements(n, std::vector<std::int64_t>{x}); };
        CHECK(difference_sum(at(x0), 2) == difference_sum(at(n + 1 - x0), 2));
        CHECK(difference_sum(at(x0), 2) == difference_sum_naive(at(x0), 2));
    }
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        SetWindow w = oracle::random_window(rng, 20, 0.4);
        SetWindow r(20);
        for (auto x : w.elements()) r.insert(21 - x);
        CHECK(difference_sum(w, 2) == difference_sum(r, 2));
    }
}

TEST_CASE("parameter lies in [0,1]") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 3; ++trial) {
        auto u = uniformity_parameter(oracle::random_window(rng, 256, 0.5), 2);
        CHECK(sgn(u.parameter) > 0);
        CHECK(u.parameter <= 1);
    }
}

TEST_CASE("weyl_chain_check") {
    auto full = SetWindow::full(40);
    auto uf = uniformity_parameter(full, 2);
    std::vector<PhasePoint> phases{PhasePoint({0.1, 0.7}), PhasePoint({0.33, 0.0})};
    auto rf = weyl_chain_check(full, uf, phases);
    CHECK(rf.max_ratio == 0.0);
    CHECK(rf.bound_violations == 0);

    auto single = SetWindow::from_elements(2, std::vector<std::int64_t>{1});
    auto us = uniformity_parameter(single, 1);
    auto r0 = weyl_chain_check(single, us, {PhasePoint({0.0})});
    CHECK(r0.max_ratio == doctest::Approx(0.0).epsilon(1e-12));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        SetWindow w = oracle::random_window(rng, 64, 0.5);
        auto u = uniformity_parameter(w, 2);
        std::vector<PhasePoint> ps;
        for (int i = 0; i < 200; ++i) ps.emplace_back(std::vector<double>{unit(rng), unit(rng)});
        auto rep = weyl_chain_check(w, u, ps);
        CHECK(rep.chain_violations == 0);
        CHECK(rep.bound_violations == 0);
        CHECK(rep.max_ratio <= 1.0);
    }
}

TEST_CASE("budget refusal") {
    Budget b;
    b.max_ops = 1e4;
    CHECK_THROWS_AS(difference_sum(SetWindow::full(100), 2, b), Error);
    CHECK_THROWS_AS(difference_sum(SetWindow::full(10), 0), Error);
}
