#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tdi/budget.hpp"
#include "tdi/exact.hpp"
#include "tdi/system.hpp"
#include "tdi/window.hpp"

namespace tdi {

// Exact tallies of ordered s-tuples in A_N^s solving the system.
struct SolutionTally {
    Integer total;
    Integer trivial;
    Integer nontrivial;
};

enum class CountMethod { naive, mitm, automatic };

// Largest degree the enumeration kernels handle.
inline constexpr int kMaxEnumerationDegree = 8;

// Partial power sums sum_{i in half} lambda_i x_i^j, j = 1..k (unused slots 0).
using PowerSumKey = std::array<std::int64_t, kMaxEnumerationDegree>;

SolutionTally count_solutions(const DiagonalSystem& sys, const SetWindow& window,
                              CountMethod method = CountMethod::automatic, const Budget& budget = {});

// Number of tuples over an alphabet of the given size whose value-class
// partition has zero coefficient sum on every block:
//   sum over zero-sum set partitions P of |A| (|A|-1) ... (|A| - #P + 1).
// Throws ArityTooLarge for s > 12.
Integer trivial_count(const DiagonalSystem& sys, const Integer& cardinality);

enum class StreamFilter { all, nontrivial };

// Yields every solution in A_N^s once, in lexicographic order.
class SolutionStream {
public:
    SolutionStream(const DiagonalSystem& sys, const SetWindow& window, StreamFilter filter,
                   const Budget& budget = {});

    std::optional<SolutionTuple> next();

private:
    bool advance(int& changed_from);
    void refresh_sums(int from);

    DiagonalSystem sys_;
    StreamFilter filter_;
    std::vector<std::int64_t> elements_;
    std::vector<std::size_t> index_;
    std::vector<PowerSumKey> prefix_;                     // prefix_[l] = sums over positions < l
    bool started_ = false;
    bool done_ = false;
};

std::vector<SolutionTuple> stream_solutions(const DiagonalSystem& sys, const SetWindow& window,
                                            StreamFilter filter, const Budget& budget = {});

// #{(x, y) in [1,N]^(2t) : sum x_i^j = sum y_i^j for j = 1..k}
Integer vinogradov_moment(std::int64_t n, int k, int t, const Budget& budget = {});

// Scans x = 1..N, keeping x iff the enlarged set still has no nontrivial solution.
SetWindow greedy_solution_free(const DiagonalSystem& sys, std::int64_t n, const Budget& budget = {});

namespace serial {

// Direct odometer over all |A|^s tuples, per-tuple exact classification.
SolutionTally count_naive(const DiagonalSystem& sys, const SetWindow& window, const Budget& budget = {});

// Single-threaded hash join.
Integer count_mitm_total(const DiagonalSystem& sys, const SetWindow& window, const Budget& budget = {});

}  // namespace serial

namespace kernels {

// OpenMP variants, sharded over the first variable (naive) or the probe side (mitm).
SolutionTally count_naive(const DiagonalSystem& sys, const SetWindow& window, const Budget& budget = {});
Integer count_mitm_total(const DiagonalSystem& sys, const SetWindow& window, const Budget& budget = {});

}  // namespace kernels

}  // namespace tdi
