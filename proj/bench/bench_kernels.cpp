// Wall-clock comparison of the serial references against the OpenMP kernels.
// Usage: bench_kernels [repeats] [threads]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tdi/enumeration.hpp"
#include "tdi/gowers.hpp"
#include "tdi/local.hpp"
#include "tdi/mainterm.hpp"
#include "tdi/parallel.hpp"

using namespace tdi;

namespace {

template <class Fn>
double best_of(int repeats, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

SetWindow random_set(std::int64_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    SetWindow w(n);
    for (std::int64_t x = 1; x <= n; ++x)
        if (coin(rng)) w.insert(x);
    return w;
}

struct Case {
    std::string name;
    std::function<std::string()> serial;
    std::function<std::string()> parallel;
};

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    const int threads = argc > 2 ? std::max(1, std::atoi(argv[2])) : max_threads();

    const auto s6 = validate_system(2, {1, 1, 1, -1, -1, -1});
    const auto s8 = validate_system(2, {1, 1, 1, 1, -1, -1, -1, -1});
    const auto s5 = validate_system(3, {1, 2, -1, -1, -1});
    const SetWindow w16 = SetWindow::full(16);
    const SetWindow w28 = SetWindow::full(28);
    const SetWindow g = random_set(160, 0.5, 3);
    const SetWindow p = random_set(400, 0.5, 4);

    std::vector<Case> cases{
        {"count_naive s=6 N=16", [&] { return to_string(serial::count_naive(s6, w16).total); },
         [&] { return to_string(kernels::count_naive(s6, w16).total); }},
        {"count_mitm s=8 N=28", [&] { return to_string(serial::count_mitm_total(s8, w28)); },
         [&] { return to_string(kernels::count_mitm_total(s8, w28)); }},
        {"difference_sum k=2 N=160", [&] { return to_string(serial::difference_sum_scaled(g, 2)); },
         [&] { return to_string(kernels::difference_sum_scaled(g, 2)); }},
        {"congruence_count k=3 q=24", [&] { return to_string(serial::congruence_count(s5, 24)); },
         [&] { return to_string(kernels::congruence_count(s5, 24)); }},
        {"progression_search N=400", [&] {
             auto r = serial::progression_concentration_search(p, 8);
             return std::to_string(r.start) + ":" + std::to_string(r.step) + ":" + std::to_string(r.length);
         },
         [&] {
             auto r = progression_concentration_search(p, 8);
             return std::to_string(r.start) + ":" + std::to_string(r.step) + ":" + std::to_string(r.length);
         }},
    };

    std::printf("threads=%d repeats=%d\n", threads, repeats);
    std::printf("%-28s %12s %12s %9s %s\n", "kernel", "serial[s]", "omp[s]", "speedup", "agree");
    int disagreements = 0;
    for (const auto& c : cases) {
        std::string a, b;
        set_threads(1);
        double ts = best_of(repeats, [&] { a = c.serial(); });
        set_threads(threads);
        double tp = best_of(repeats, [&] { b = c.parallel(); });
        bool agree = a == b;
        if (!agree) ++disagreements;
        std::printf("%-28s %12.4f %12.4f %9.2f %s\n", c.name.c_str(), ts, tp, ts / tp, agree ? "yes" : "NO");
    }
    return disagreements == 0 ? 0 : 1;
}
