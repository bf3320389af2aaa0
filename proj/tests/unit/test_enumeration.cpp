#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "tdi/enumeration.hpp"
#include "tdi/parallel.hpp"

using namespace tdi;

TEST_CASE("count_solutions examples") {
    auto s2 = validate_system(1, {1, -1});
    for (std::int64_t n : {1, 5, 17}) {
        auto t = count_solutions(s2, SetWindow::full(n));
        CHECK(t.total == n);
        CHECK(t.trivial == n);
        CHECK(t.nontrivial == 0);
    }
    auto s4 = validate_system(2, {1, 1, -1, -1});
    for (auto m : {CountMethod::naive, CountMethod::mitm, CountMethod::automatic}) {
        auto t = count_solutions(s4, SetWindow::full(3), m);
        CHECK(t.total == 15);
        CHECK(t.trivial == 15);
        CHECK(t.nontrivial == 0);
    }
    auto s6 = validate_system(2, {1, 1, 1, -1, -1, -1});
    CHECK(count_solutions(s6, SetWindow::full(7), CountMethod::naive).nontrivial >= 1);
    CHECK(count_solutions(s6, SetWindow::full(7), CountMethod::mitm).nontrivial >= 1);
}

TEST_CASE("empty window") {
    auto s4 = validate_system(2, {1, 1, -1, -1});
    SetWindow empty(5);
    for (auto m : {CountMethod::naive, CountMethod::mitm}) {
        auto t = count_solutions(s4, empty, m);
        CHECK(t.total == 0);
        CHECK(t.trivial == 0);
    }
    CHECK(stream_solutions(s4, empty, StreamFilter::all).empty());
}

TEST_CASE("trivial_count examples") {
    CHECK(trivial_count(validate_system(1, {1, -1}), 5) == 5);
    CHECK(trivial_count(validate_system(2, {1, 1, -1, -1}), 3) == 15);
    CHECK(trivial_count(validate_system(1, {2, -1, -1}), 4) == 4);
    std::vector<std::int64_t> big(13, 1);
    big.back() = -12;
    try {
        trivial_count(validate_system(1, big), 3);
        FAIL("expected ArityTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::arity_too_large);
    }
}

TEST_CASE("stream_solutions examples and order") {
    auto s2 = validate_system(1, {1, -1});
    auto all = stream_solutions(s2, SetWindow::full(2), StreamFilter::all);
    CHECK(all == std::vector<SolutionTuple>{{1, 1}, {2, 2}});
    auto s6 = validate_system(2, {1, 1, 1, -1, -1, -1});
    auto nt = stream_solutions(s6, SetWindow::full(7), StreamFilter::nontrivial);
    CHECK(std::find(nt.begin(), nt.end(), SolutionTuple{1, 5, 6, 2, 3, 7}) != nt.end());
    CHECK(std::is_sorted(nt.begin(), nt.end()));
    CHECK(std::adjacent_find(nt.begin(), nt.end()) == nt.end());
    CHECK(static_cast<long>(nt.size()) == count_solutions(s6, SetWindow::full(7)).nontrivial.get_si());
    auto s4 = validate_system(2, {1, 1, -1, -1});
    CHECK(stream_solutions(s4, SetWindow::full(3), StreamFilter::nontrivial).empty());
}

TEST_CASE("naive, mitm, serial and brute force agree on random instances") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        int s = 2 + static_cast<int>(rng() % 4);
        int k = 1 + static_cast<int>(rng() % 3);
        auto sys = validate_system(k, oracle::random_coefficients(rng, s));
        std::int64_t n = 2 + static_cast<std::int64_t>(rng() % 8);
        SetWindow w = oracle::random_window(rng, n, 0.6);
        auto brute = oracle::brute_count(sys, w);
        auto naive = kernels::count_naive(sys, w);
        auto ser = serial::count_naive(sys, w);
        REQUIRE(naive.total == brute.total);
        REQUIRE(naive.trivial == brute.trivial);
        REQUIRE(ser.total == brute.total);
        REQUIRE(ser.trivial == brute.trivial);
        REQUIRE(kernels::count_mitm_total(sys, w) == brute.total);
        REQUIRE(serial::count_mitm_total(sys, w) == brute.total);
        REQUIRE(trivial_count(sys, w.cardinality()) == brute.trivial);
    }
}

TEST_CASE("invariance under negation and permutation") {
    auto sys = validate_system(2, {2, 1, -1, -2});
    auto neg = sys.negated();
    auto perm = validate_system(2, {-1, 2, -2, 1});
    auto w = SetWindow::full(9);
    auto base = count_solutions(sys, w).total;
    CHECK(count_solutions(neg, w).total == base);
    CHECK(count_solutions(perm, w).total == base);
}

TEST_CASE("thread count does not change results") {
    auto sys = validate_system(2, {1, 1, 1, -1, -1, -1});
    auto w = SetWindow::full(9);
    const int saved = max_threads();
    set_threads(1);
    auto a = count_solutions(sys, w, CountMethod::mitm);
    set_threads(3);
    auto b = count_solutions(sys, w, CountMethod::mitm);
    auto c = kernels::count_naive(sys, w);
    set_threads(saved);
    CHECK(a.total == b.total);
    CHECK(a.total == c.total);
    CHECK(a.trivial == c.trivial);
}

TEST_CASE("budget and overflow refusals") {
    auto sys = validate_system(2, {1, 1, 1, -1, -1, -1});
    Budget small;
    small.max_ops = 1000;
    try {
        count_solutions(sys, SetWindow::full(50), CountMethod::naive, small);
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::budget_exceeded);
    }
    CHECK_THROWS_AS(vinogradov_moment(100, 2, 4, small), Error);
    auto huge = validate_system(8, {1, -1});
    try {
        count_solutions(huge, SetWindow::from_elements(300000, std::vector<std::int64_t>{1, 300000}));
        FAIL("expected Overflow");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::overflow);
    }
}

TEST_CASE("vinogradov_moment") {
    for (std::int64_t n : {1, 3, 10, 25}) CHECK(vinogradov_moment(n, 2, 2) == 2 * n * n - n);
    CHECK(vinogradov_moment(3, 2, 2) == 15);
    for (int k = 1; k <= 4; ++k) CHECK(vinogradov_moment(17, k, 1) == 17);
    for (std::int64_t n : {3, 5, 6}) CHECK(vinogradov_moment(n, 3, 3) == oracle::brute_moment(n, 3, 3));
    CHECK(vinogradov_moment(6, 1, 2) == oracle::brute_moment(6, 1, 2));
    CHECK(vinogradov_moment(8, 2, 3) >= oracle::brute_moment(8, 3, 3));
}

TEST_CASE("greedy_solution_free") {
    CHECK(greedy_solution_free(validate_system(1, {1, -1}), 10) == SetWindow::full(10));
    CHECK(greedy_solution_free(validate_system(2, {1, 1, -1, -1}), 10) == SetWindow::full(10));
    auto g = greedy_solution_free(validate_system(2, {1, 1, 1, -1, -1, -1}), 7);
    CHECK(g.cardinality() < 7);
    CHECK(count_solutions(validate_system(2, {1, 1, 1, -1, -1, -1}), g).nontrivial == 0);
}
