#pragma once

#include <iosfwd>

namespace foodchain::cli {

/// Exit codes: 0 ok, 1 failed validation, 2 domain/usage error, 3 numerical
/// failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace foodchain::cli
