#include "tdi/budget.hpp"

#include <sstream>

#include "tdi/error.hpp"

namespace tdi {

void Budget::require_ops(double ops, std::string_view what) const {
    if (!(ops <= max_ops)) {
        std::ostringstream os;
        os << what << " needs ~" << ops << " operations, budget is " << max_ops;
        throw Error(Errc::budget_exceeded, os.str());
    }
}

void Budget::require_bytes(double bytes, std::string_view what) const {
    if (!(bytes <= max_bytes)) {
        std::ostringstream os;
        os << what << " needs ~" << bytes << " bytes, budget is " << max_bytes;
        throw Error(Errc::budget_exceeded, os.str());
    }
}

}  // namespace tdi
