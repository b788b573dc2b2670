#pragma once

#include "adess/economics.hpp"
#include "adess/mining.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace adess::cli {

// Malformed command-line input; mapped to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

// "xi=0.1:2.0:0.1;v=10,100": ranges are start:stop:step with stop included.
[[nodiscard]] std::vector<GridAxis> parse_grid(const std::string& spec);

// Cartesian product, last axis varying fastest.
[[nodiscard]] std::vector<std::vector<std::pair<std::string, double>>> expand_grid(const std::vector<GridAxis>& axes);

enum class SweepKind { Profit, Hashrate, Malicious };

[[nodiscard]] SweepKind parse_sweep_kind(const std::string& s);
[[nodiscard]] const char* to_string(SweepKind k) noexcept;

struct SweepSettings {
  SweepKind kind = SweepKind::Profit;
  AttackParams base;
  DifficultyRule rule;
  int horizon = 50;
};

// Writes one header row and one row per grid point. Returns the row count.
std::size_t emit_sweep(const std::vector<GridAxis>& axes, const SweepSettings& settings, std::ostream& csv);

}  // namespace adess::cli
