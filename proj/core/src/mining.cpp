#include "adess/mining.hpp"

#include "adess/errors.hpp"
#include "adess/numeric.hpp"

#include <cmath>

namespace adess {

const char* to_string(AdjustmentMode m) noexcept {
  switch (m) {
    case AdjustmentMode::Full: return "full";
    case AdjustmentMode::Partial: return "partial";
    case AdjustmentMode::Epoch: return "epoch";
  }
  return "?";
}

const char* to_string(MiningKind k) noexcept {
  return k == MiningKind::Stochastic ? "stochastic" : "certainty-equivalent";
}

void DifficultyRule::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("difficulty.beta must lie in (0, 1]");
  if (epoch < 1) throw ConfigError("difficulty.epoch must be >= 1");
  if (!(target_block_time > 0.0)) throw ConfigError("difficulty.target_block_time must be > 0");
}

void MiningMode::validate() const {
  if (!(tick > 0.0) || !std::isfinite(tick)) throw ConfigError("mining.tick must be > 0");
}

double Rng::uniform() {
  // 53 high bits, shifted to (0, 1] so that log(u) is always finite.
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t Rng::geometric(double p) {
  if (p >= 1.0) return 1;
  const double u = uniform();
  const double k = std::ceil(std::log(u) / std::log1p(-p));
  return k < 1.0 ? 1 : static_cast<std::uint64_t>(k);
}

double next_block_time(double difficulty, double hashrate, const MiningMode& mode, Rng& rng) {
  if (!(difficulty > 0.0)) throw InvalidDifficulty("difficulty must be positive, got " + format_double(difficulty));
  if (!(hashrate > 0.0)) return kNeverFound;
  if (mode.kind == MiningKind::CertaintyEquivalent) return difficulty / hashrate;
  const double p = std::min(hashrate * mode.tick / difficulty, 1.0);
  return static_cast<double>(rng.geometric(p)) * mode.tick;
}

double adjust_difficulty(double prev_difficulty, double implied_hashrate, const DifficultyRule& rule,
                         EpochHistory& history, double block_time) {
  switch (rule.mode) {
    case AdjustmentMode::Full:
      return implied_hashrate * rule.target_block_time;
    case AdjustmentMode::Partial:
      return prev_difficulty + rule.beta * (implied_hashrate * rule.target_block_time - prev_difficulty);
    case AdjustmentMode::Epoch: {
      ++history.blocks;
      history.elapsed += block_time;
      if (history.blocks < rule.epoch) return prev_difficulty;
      const double next = prev_difficulty * (rule.epoch * rule.target_block_time / history.elapsed);
      history = EpochHistory{};
      return next;
    }
  }
  return prev_difficulty;
}

std::vector<double> difficulty_series(double growth, int n_blocks, const DifficultyRule& rule) {
  if (!(growth > -1.0)) throw DomainError("growth must exceed -1");
  rule.validate();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(n_blocks, 0)));
  EpochHistory history;
  double d = 1.0;
  const double block_time = rule.target_block_time / (1.0 + growth);
  for (int k = 0; k < n_blocks; ++k) {
    out.push_back(d);
    const double h = d * (1.0 + growth) / rule.target_block_time;
    d = adjust_difficulty(d, h, rule, history, block_time);
  }
  return out;
}

std::vector<double> required_hashrate_series(double growth, int n_blocks, const DifficultyRule& rule) {
  std::vector<double> out = difficulty_series(growth, n_blocks, rule);
  for (double& d : out) d = d * (1.0 + growth) / rule.target_block_time;
  return out;
}

double sustain_cost(double growth, int n_blocks, const DifficultyRule& rule, double c) {
  double total = 0.0;
  for (double d : difficulty_series(growth, n_blocks, rule)) total += d;
  return c * total;
}

}  // namespace adess
