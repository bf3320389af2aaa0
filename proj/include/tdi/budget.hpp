#pragma once

#include <string_view>

namespace tdi {

// Explicit work limits. Operations estimate their cost up front and refuse
// deterministically instead of truncating.
struct Budget {
    double max_ops = 1e9;
    double max_bytes = 4.0 * 1024.0 * 1024.0 * 1024.0;

    void require_ops(double ops, std::string_view what) const;
    void require_bytes(double bytes, std::string_view what) const;
};

}  // namespace tdi
