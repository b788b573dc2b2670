#pragma once

#include <iosfwd>

namespace adess::cli {

// Exit status: 0 success, 1 domain or config error, 2 usage error.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adess::cli
