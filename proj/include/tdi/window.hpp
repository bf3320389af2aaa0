#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tdi/exact.hpp"

namespace tdi {

// A subset A_N of [1, N] stored as a membership bitset.
class SetWindow {
public:
    explicit SetWindow(std::int64_t length);

    static SetWindow full(std::int64_t length);
    static SetWindow from_elements(std::int64_t length, std::span<const std::int64_t> elements);

    std::int64_t length() const { return n_; }
    std::int64_t cardinality() const { return count_; }
    Rational density() const {
        Rational r(count_, n_);
        r.canonicalize();
        return r;
    }

    // false for x outside [1, N]
    bool contains(std::int64_t x) const {
        if (x < 1 || x > n_) return false;
        auto b = static_cast<std::uint64_t>(x - 1);
        return (words_[b >> 6] >> (b & 63)) & 1u;
    }

    void insert(std::int64_t x);
    void erase(std::int64_t x);

    std::vector<std::int64_t> elements() const;

    friend bool operator==(const SetWindow&, const SetWindow&) = default;

private:
    std::int64_t n_;
    std::int64_t count_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace tdi
