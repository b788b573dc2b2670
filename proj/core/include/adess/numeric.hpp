#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

namespace adess {

// Relative slack used when rounding block counts such as ceil(N * (1 + xi)).
// 10 * 1.1 evaluates to 11.000000000000002 in binary; without slack that
// would demand a twelfth block.
inline constexpr double kBlockCountSlack = 1e-9;

[[nodiscard]] inline std::int64_t ceil_blocks(double x) {
  return static_cast<std::int64_t>(std::ceil(x - kBlockCountSlack * std::max(1.0, std::abs(x))));
}

// True when an integer block count `blocks` meets or exceeds the real-valued
// requirement `required` (same slack as ceil_blocks).
[[nodiscard]] inline bool meets_block_requirement(std::int64_t blocks, double required) {
  return static_cast<double>(blocks) >= required - kBlockCountSlack * std::max(1.0, std::abs(required));
}

// Shortest round-trip decimal form. Used by every text writer so outputs are
// byte-identical across runs.
[[nodiscard]] inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace adess
