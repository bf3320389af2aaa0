#include "tdi/window.hpp"

#include <string>

namespace tdi {

SetWindow::SetWindow(std::int64_t length) : n_(length) {
    if (length < 1) throw Error(Errc::bad_params, "window length must be positive");
    words_.assign(static_cast<std::size_t>((length + 63) / 64), 0);
}

SetWindow SetWindow::full(std::int64_t length) {
    SetWindow w(length);
    for (std::int64_t x = 1; x <= length; ++x) w.insert(x);
    return w;
}

SetWindow SetWindow::from_elements(std::int64_t length, std::span<const std::int64_t> elements) {
    SetWindow w(length);
    for (auto x : elements) w.insert(x);
    return w;
}

void SetWindow::insert(std::int64_t x) {
    if (x < 1 || x > n_)
        throw Error(Errc::bad_params, "element " + std::to_string(x) + " outside [1," + std::to_string(n_) + "]");
    if (contains(x)) return;
    auto b = static_cast<std::uint64_t>(x - 1);
    words_[b >> 6] |= std::uint64_t{1} << (b & 63);
    ++count_;
}

void SetWindow::erase(std::int64_t x) {
    if (!contains(x)) return;
    auto b = static_cast<std::uint64_t>(x - 1);
    words_[b >> 6] &= ~(std::uint64_t{1} << (b & 63));
    --count_;
}

std::vector<std::int64_t> SetWindow::elements() const {
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(count_));
    for (std::int64_t x = 1; x <= n_; ++x)
        if (contains(x)) out.push_back(x);
    return out;
}

}  // namespace tdi
