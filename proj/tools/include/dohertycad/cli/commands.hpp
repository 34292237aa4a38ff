#pragma once

#include <ostream>

namespace doherty::cli {

/// Entry point of the doherty-cad tool. Returns the process exit code:
/// 0 success, 2 validation or usage error, 3 internal consistency failure,
/// 1 anything else. Errors are written to `err` as one JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace doherty::cli
