#pragma once

#include <iosfwd>

namespace qsd::tools {

/// Fast invariant checks; prints one PASS/FAIL line each. True if all pass.
bool run_validation(std::ostream& out);

}  // namespace qsd::tools
