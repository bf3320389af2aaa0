#include "tdi/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "tdi/parallel.hpp"

namespace tdi {

namespace {

struct KeyHash {
    std::size_t operator()(const PowerSumKey& key) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (auto v : key) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xbf58476d1ce4e5b9ull;
        }
        return static_cast<std::size_t>(h ^ (h >> 31));
    }
};

using KeyCounts = std::unordered_map<PowerSumKey, std::uint64_t, KeyHash>;

inline void add_into(PowerSumKey& acc, const PowerSumKey& v, int k) {
    for (int j = 0; j < k; ++j) acc[static_cast<std::size_t>(j)] += v[static_cast<std::size_t>(j)];
}

inline bool is_zero_key(const PowerSumKey& key, int k) {
    for (int j = 0; j < k; ++j)
        if (key[static_cast<std::size_t>(j)] != 0) return false;
    return true;
}

inline PowerSumKey negated(PowerSumKey key) {
    for (auto& v : key) v = -v;
    return key;
}

void require_degree(const DiagonalSystem& sys) {
    if (sys.degree() > kMaxEnumerationDegree)
        throw Error(Errc::bad_degree, "enumeration supports degree <= " + std::to_string(kMaxEnumerationDegree));
}

// Every partial power sum sum_i lambda_i x_i^j with x_i <= max_value must fit in int64.
void require_key_range(std::span<const std::int64_t> coeffs, int k, std::int64_t max_value) {
    for (int j = 1; j <= k; ++j) {
        std::int64_t pw = checked_pow(max_value, j);
        std::int64_t acc = 0;
        for (auto c : coeffs) acc = checked_add(acc, checked_mul(c < 0 ? -c : c, pw));
    }
}

// w[pos][e][j] = lambda_pos * elements[e]^(j+1)
using Weighted = std::vector<std::vector<PowerSumKey>>;

Weighted weighted_powers(std::span<const std::int64_t> coeffs, int k, std::span<const std::int64_t> elements) {
    Weighted w(coeffs.size(), std::vector<PowerSumKey>(elements.size()));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        for (std::size_t e = 0; e < elements.size(); ++e) {
            PowerSumKey key{};
            std::int64_t pw = 1;
            for (int j = 0; j < k; ++j) {
                pw *= elements[e];
                key[static_cast<std::size_t>(j)] = coeffs[i] * pw;
            }
            w[i][e] = key;
        }
    }
    return w;
}

// Visits every assignment of element indices to positions [first, last),
// passing the accumulated key and the index vector.
template <class Fn>
void visit_tuples(const Weighted& w, int first, int last, std::size_t m, int k, const PowerSumKey& base,
                  std::vector<std::size_t>& idx, Fn&& fn) {
    if (first == last) {
        fn(base, idx);
        return;
    }
    if (m == 0) return;
    const int depth = last - first;
    std::vector<PowerSumKey> prefix(static_cast<std::size_t>(depth + 1));
    prefix[0] = base;
    int level = 0;
    idx[static_cast<std::size_t>(first)] = 0;
    while (level >= 0) {
        auto pos = static_cast<std::size_t>(first + level);
        if (idx[pos] == m) {
            --level;
            if (level >= 0) ++idx[static_cast<std::size_t>(first + level)];
            continue;
        }
        auto& next = prefix[static_cast<std::size_t>(level + 1)];
        next = prefix[static_cast<std::size_t>(level)];
        add_into(next, w[pos][idx[pos]], k);
        if (level == depth - 1) {
            fn(next, idx);
            ++idx[pos];
        } else {
            ++level;
            idx[static_cast<std::size_t>(first + level)] = 0;
        }
    }
}

bool trivial_by_index(std::span<const std::int64_t> coeffs, const std::vector<std::size_t>& idx) {
    const std::size_t s = coeffs.size();
    for (std::size_t i = 0; i < s; ++i) {
        std::int64_t sum = 0;
        for (std::size_t j = 0; j < s; ++j)
            if (idx[j] == idx[i]) sum += coeffs[j];
        if (sum != 0) return false;
    }
    return true;
}

double power(double base, int exp) { return std::pow(base, exp); }

KeyCounts build_left_table(const Weighted& w, int left, std::size_t m, int k) {
    KeyCounts table;
    table.reserve(static_cast<std::size_t>(std::min(power(static_cast<double>(m), left), 1e8)));
    std::vector<std::size_t> idx(w.size());
    visit_tuples(w, 0, left, m, k, PowerSumKey{}, idx,
                 [&](const PowerSumKey& key, const std::vector<std::size_t>&) { ++table[key]; });
    return table;
}

void mitm_budget(const DiagonalSystem& sys, std::size_t m, const Budget& budget) {
    const int s = sys.arity();
    const int left = (s + 1) / 2;
    double md = static_cast<double>(m);
    budget.require_ops(power(md, left) + power(md, s - left), "meet-in-the-middle count");
    budget.require_bytes(power(md, left) * 96.0, "meet-in-the-middle key table");
}

template <bool Parallel>
Integer mitm_total(const DiagonalSystem& sys, const SetWindow& window, const Budget& budget) {
    require_degree(sys);
    const auto elements = window.elements();
    const std::size_t m = elements.size();
    const int s = sys.arity();
    const int k = sys.degree();
    const int left = (s + 1) / 2;
    mitm_budget(sys, m, budget);
    if (m == 0) return 0;
    require_key_range(sys.coefficients(), k, window.length());
    const Weighted w = weighted_powers(sys.coefficients(), k, elements);
    const KeyCounts table = build_left_table(w, left, m, k);

    u128 total = 0;
    auto probe_shard = [&](std::size_t first_index, u128& acc) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(s));
        if (left == s) {
            if (first_index == 0) {
                auto it = table.find(PowerSumKey{});
                if (it != table.end()) acc += it->second;
            }
            return;
        }
        idx[static_cast<std::size_t>(left)] = first_index;
        PowerSumKey base = w[static_cast<std::size_t>(left)][first_index];
        visit_tuples(w, left + 1, s, m, k, base, idx, [&](const PowerSumKey& key, const std::vector<std::size_t>&) {
            auto it = table.find(negated(key));
            if (it != table.end()) acc += it->second;
        });
    };

    const auto shards = static_cast<std::int64_t>(m);
    if constexpr (Parallel) {
#pragma omp parallel
        {
            u128 local = 0;
#pragma omp for schedule(dynamic)
            for (std::int64_t e = 0; e < shards; ++e) probe_shard(static_cast<std::size_t>(e), local);
#pragma omp critical(tdi_mitm_merge)
            total += local;
        }
    } else {
        for (std::int64_t e = 0; e < shards; ++e) probe_shard(static_cast<std::size_t>(e), total);
    }
    return to_integer(total);
}

}  // namespace

namespace kernels {

SolutionTally count_naive(const DiagonalSystem& sys, const SetWindow& window, const Budget& budget) {
    require_degree(sys);
    const auto elements = window.elements();
    const std::size_t m = elements.size();
    const int s = sys.arity();
    const int k = sys.degree();
    budget.require_ops(power(static_cast<double>(m), s), "naive count");
    SolutionTally tally{0, 0, 0};
    if (m == 0) return tally;
    require_key_range(sys.coefficients(), k, window.length());
    const Weighted w = weighted_powers(sys.coefficients(), k, elements);
    const auto coeffs = sys.coefficients();

    std::uint64_t total = 0;
    std::uint64_t trivial = 0;
    const auto shards = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(dynamic) reduction(+ : total, trivial)
    for (std::int64_t e = 0; e < shards; ++e) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(s));
        idx[0] = static_cast<std::size_t>(e);
        visit_tuples(w, 1, s, m, k, w[0][static_cast<std::size_t>(e)], idx,
                     [&](const PowerSumKey& key, const std::vector<std::size_t>& ix) {
                         if (!is_zero_key(key, k)) return;
                         ++total;
                         if (trivial_by_index(coeffs, ix)) ++trivial;
                     });
    }
    tally.total = Integer(static_cast<unsigned long>(total));
    tally.trivial = Integer(static_cast<unsigned long>(trivial));
    tally.nontrivial = tally.total - tally.trivial;
    return tally;
}

Integer count_mitm_total(const DiagonalSystem& sys, const SetWindow& window, const Budget& budget) {
    return mitm_total<true>(sys, window, budget);
}

}  // namespace kernels

namespace serial {

SolutionTally count_naive(const DiagonalSystem& sys, const SetWindow& window, const Budget& budget) {
    require_degree(sys);
    const auto elements = window.elements();
    const std::size_t m = elements.size();
    const int s = sys.arity();
    const int k = sys.degree();
    budget.require_ops(power(static_cast<double>(m), s) * s * k, "naive count");
    SolutionTally tally{0, 0, 0};
    if (m == 0) return tally;
    require_key_range(sys.coefficients(), k, window.length());

    std::vector<std::size_t> idx(static_cast<std::size_t>(s), 0);
    SolutionTuple x(static_cast<std::size_t>(s));
    std::uint64_t total = 0, trivial = 0;
    for (;;) {
        for (int i = 0; i < s; ++i) x[static_cast<std::size_t>(i)] = elements[idx[static_cast<std::size_t>(i)]];
        bool solves = true;
        for (int j = 1; j <= k && solves; ++j) {
            std::int64_t acc = 0;
            for (int i = 0; i < s; ++i) acc += sys.coefficient(i) * checked_pow(x[static_cast<std::size_t>(i)], j);
            solves = (acc == 0);
        }
        if (solves) {
            ++total;
            if (is_trivial(sys, x)) ++trivial;
        }
        int pos = s - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == m) idx[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
    }
    tally.total = Integer(static_cast<unsigned long>(total));
    tally.trivial = Integer(static_cast<unsigned long>(trivial));
    tally.nontrivial = tally.total - tally.trivial;
    return tally;
}

Integer count_mitm_total(const DiagonalSystem& sys, const SetWindow& window, const Budget& budget) {
    return mitm_total<false>(sys, window, budget);
}

}  // namespace serial

SolutionTally count_solutions(const DiagonalSystem& sys, const SetWindow& window, CountMethod method,
                              const Budget& budget) {
    const double m = static_cast<double>(window.cardinality());
    const int s = sys.arity();
    if (method == CountMethod::automatic) {
        double naive_ops = power(m, s);
        double mitm_ops = power(m, (s + 1) / 2);
        if (naive_ops <= std::min(budget.max_ops, 1e7) || mitm_ops > budget.max_ops)
            method = CountMethod::naive;
        else
            method = CountMethod::mitm;
    }
    if (method == CountMethod::naive) return kernels::count_naive(sys, window, budget);

    SolutionTally tally;
    tally.total = kernels::count_mitm_total(sys, window, budget);
    tally.trivial = trivial_count(sys, Integer(static_cast<long>(window.cardinality())));
    tally.nontrivial = tally.total - tally.trivial;
    return tally;
}

Integer trivial_count(const DiagonalSystem& sys, const Integer& cardinality) {
    const int s = sys.arity();
    if (s > 12) throw Error(Errc::arity_too_large, "set-partition enumeration supports s <= 12");
    const auto coeffs = sys.coefficients();

    // zero-sum partitions counted by number of blocks
    std::vector<std::uint64_t> by_blocks(static_cast<std::size_t>(s + 1), 0);
    std::vector<int> rgs(static_cast<std::size_t>(s), 0);      // restricted growth string
    std::vector<int> prefix_max(static_cast<std::size_t>(s), 0);
    std::vector<std::int64_t> block_sum(static_cast<std::size_t>(s));
    for (;;) {
        int blocks = prefix_max[static_cast<std::size_t>(s - 1)] + 1;
        std::fill(block_sum.begin(), block_sum.begin() + blocks, 0);
        for (int i = 0; i < s; ++i) block_sum[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])] += coeffs[static_cast<std::size_t>(i)];
        if (std::all_of(block_sum.begin(), block_sum.begin() + blocks, [](std::int64_t v) { return v == 0; }))
            ++by_blocks[static_cast<std::size_t>(blocks)];

        int i = s - 1;
        while (i > 0 && rgs[static_cast<std::size_t>(i)] > prefix_max[static_cast<std::size_t>(i - 1)]) --i;
        if (i == 0) break;
        ++rgs[static_cast<std::size_t>(i)];
        prefix_max[static_cast<std::size_t>(i)] =
            std::max(prefix_max[static_cast<std::size_t>(i - 1)], rgs[static_cast<std::size_t>(i)]);
        for (int j = i + 1; j < s; ++j) {
            rgs[static_cast<std::size_t>(j)] = 0;
            prefix_max[static_cast<std::size_t>(j)] = prefix_max[static_cast<std::size_t>(j - 1)];
        }
    }

    Integer total = 0;
    Integer falling = 1;
    for (int b = 1; b <= s; ++b) {
        falling *= cardinality - (b - 1);
        total += falling * Integer(static_cast<unsigned long>(by_blocks[static_cast<std::size_t>(b)]));
    }
    return total;
}

SolutionStream::SolutionStream(const DiagonalSystem& sys, const SetWindow& window, StreamFilter filter,
                               const Budget& budget)
    : sys_(sys), filter_(filter), elements_(window.elements()) {
    require_degree(sys);
    const int s = sys.arity();
    budget.require_ops(power(static_cast<double>(elements_.size()), s), "solution streaming");
    require_key_range(sys.coefficients(), sys.degree(), window.length());
    index_.assign(static_cast<std::size_t>(s), 0);
    prefix_.assign(static_cast<std::size_t>(s + 1), PowerSumKey{});
    if (elements_.empty()) done_ = true;
}

void SolutionStream::refresh_sums(int from) {
    const int k = sys_.degree();
    for (int l = from; l < sys_.arity(); ++l) {
        auto& out = prefix_[static_cast<std::size_t>(l + 1)];
        out = prefix_[static_cast<std::size_t>(l)];
        std::int64_t x = elements_[index_[static_cast<std::size_t>(l)]];
        std::int64_t pw = 1;
        for (int j = 0; j < k; ++j) {
            pw *= x;
            out[static_cast<std::size_t>(j)] += sys_.coefficient(l) * pw;
        }
    }
}

bool SolutionStream::advance(int& changed_from) {
    int pos = sys_.arity() - 1;
    while (pos >= 0 && ++index_[static_cast<std::size_t>(pos)] == elements_.size())
        index_[static_cast<std::size_t>(pos--)] = 0;
    changed_from = pos;
    return pos >= 0;
}

std::optional<SolutionTuple> SolutionStream::next() {
    const int s = sys_.arity();
    const int k = sys_.degree();
    while (!done_) {
        if (!started_) {
            started_ = true;
            refresh_sums(0);
        } else {
            int from = 0;
            if (!advance(from)) {
                done_ = true;
                break;
            }
            refresh_sums(from);
        }
        if (!is_zero_key(prefix_[static_cast<std::size_t>(s)], k)) continue;
        if (filter_ == StreamFilter::nontrivial && trivial_by_index(sys_.coefficients(), index_)) continue;
        SolutionTuple x(static_cast<std::size_t>(s));
        for (int i = 0; i < s; ++i) x[static_cast<std::size_t>(i)] = elements_[index_[static_cast<std::size_t>(i)]];
        return x;
    }
    return std::nullopt;
}

std::vector<SolutionTuple> stream_solutions(const DiagonalSystem& sys, const SetWindow& window,
                                            StreamFilter filter, const Budget& budget) {
    SolutionStream stream(sys, window, filter, budget);
    std::vector<SolutionTuple> out;
    while (auto x = stream.next()) out.push_back(std::move(*x));
    return out;
}

Integer vinogradov_moment(std::int64_t n, int k, int t, const Budget& budget) {
    if (t < 1) throw Error(Errc::bad_params, "moment order t must be at least 1");
    if (k < 1 || k > kMaxEnumerationDegree) throw Error(Errc::bad_degree, "degree out of range");
    if (n < 1) throw Error(Errc::bad_params, "N must be positive");
    const double tuples = power(static_cast<double>(n), t);
    budget.require_ops(tuples, "Vinogradov moment");
    budget.require_bytes(tuples * 96.0, "Vinogradov moment key table");
    std::vector<std::int64_t> ones(static_cast<std::size_t>(t), 1);
    require_key_range(ones, k, n);

    std::vector<std::int64_t> elements(static_cast<std::size_t>(n));
    for (std::int64_t x = 1; x <= n; ++x) elements[static_cast<std::size_t>(x - 1)] = x;
    const Weighted w = weighted_powers(ones, k, elements);
    const KeyCounts table = build_left_table(w, t, elements.size(), k);

    u128 total = 0;
    for (const auto& [key, c] : table) total += static_cast<u128>(c) * c;
    return to_integer(total);
}

SetWindow greedy_solution_free(const DiagonalSystem& sys, std::int64_t n, const Budget& budget) {
    SetWindow current(n);
    for (std::int64_t x = 1; x <= n; ++x) {
        SetWindow trial = current;
        trial.insert(x);
        if (count_solutions(sys, trial, CountMethod::automatic, budget).nontrivial == 0) current = std::move(trial);
    }
    return current;
}

}  // namespace tdi
