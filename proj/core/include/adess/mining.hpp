#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace adess {

enum class AdjustmentMode { Full, Partial, Epoch };

[[nodiscard]] const char* to_string(AdjustmentMode m) noexcept;

struct DifficultyRule {
  AdjustmentMode mode = AdjustmentMode::Full;
  double beta = 1.0;              // Partial only, in (0, 1]
  int epoch = 2016;               // Epoch only, blocks per retarget
  double target_block_time = 1.0;

  static DifficultyRule full() { return {}; }
  static DifficultyRule partial(double beta) { return {AdjustmentMode::Partial, beta}; }
  static DifficultyRule every(int blocks) { return {AdjustmentMode::Epoch, 1.0, blocks}; }

  void validate() const;  // throws ConfigError
};

enum class MiningKind { CertaintyEquivalent, Stochastic };

// Which hashrate feeds the retarget. Applied uses the hashrate that actually
// mined the block; Observed uses difficulty / observed block time.
enum class ImpliedHashrate { Applied, Observed };

struct MiningMode {
  MiningKind kind = MiningKind::CertaintyEquivalent;
  std::uint64_t seed = 0;
  double tick = 0.01;
  ImpliedHashrate implied = ImpliedHashrate::Applied;

  void validate() const;  // throws ConfigError
};

[[nodiscard]] const char* to_string(MiningKind k) noexcept;

// Returned by next_block_time when nothing is mining.
inline constexpr double kNeverFound = std::numeric_limits<double>::infinity();

// Fixed generator: std::mt19937_64 (its output sequence is pinned by the C++
// standard) with hand-rolled transforms so that results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on (0, 1] with 53 bits of resolution.
  double uniform();

  // Number of Bernoulli(p) trials up to and including the first success.
  std::uint64_t geometric(double p);

 private:
  std::mt19937_64 engine_;
};

// Certainty-equivalent: exactly D / h. Stochastic: geometric number of ticks
// with per-tick success probability min(h * tick / D, 1).
[[nodiscard]] double next_block_time(double difficulty, double hashrate, const MiningMode& mode, Rng& rng);

// Running state for epoch retargeting.
struct EpochHistory {
  int blocks = 0;
  double elapsed = 0.0;
};

// Difficulty for the next block after a block mined at `prev_difficulty` in
// `block_time` with implied hashrate `implied_hashrate`.
[[nodiscard]] double adjust_difficulty(double prev_difficulty, double implied_hashrate, const DifficultyRule& rule,
                                       EpochHistory& history, double block_time);

// Difficulty of each of `n_blocks` consecutive blocks mined so that every block
// takes target / (1 + growth), starting from difficulty 1.
[[nodiscard]] std::vector<double> difficulty_series(double growth, int n_blocks, const DifficultyRule& rule);

// Hashrate needed on each of those blocks: difficulty * (1 + growth) / target.
[[nodiscard]] std::vector<double> required_hashrate_series(double growth, int n_blocks, const DifficultyRule& rule);

// Undiscounted cost of sustaining `growth` for `n_blocks`: c * sum of
// hashrate * block time, which equals c * sum of difficulties.
[[nodiscard]] double sustain_cost(double growth, int n_blocks, const DifficultyRule& rule, double c);

}  // namespace adess
