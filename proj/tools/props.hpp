#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace adess::cli {

[[nodiscard]] const std::vector<std::string>& property_suites();

// Runs one suite ("fork-choice", "economics", "mining", "net-sim" or "all"),
// printing a PASS/FAIL line per property. Returns the number of failures.
// Throws UsageError for an unknown suite.
int run_property_suite(const std::string& suite, std::uint64_t seed, std::ostream& out);

}  // namespace adess::cli
