#pragma once

#include "adess/fork_choice.hpp"
#include "adess/mining.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace adess {

// Economic parameters of one attack. Money is in abstract dollars at an
// exchange rate of 1; time is in target block intervals.
struct AttackParams {
  double v = 0.0;              // value of the double-spent transaction
  double p_B = 1.0;            // block reward
  double c = 1.0;              // cost of one hashrate unit per unit time
  double delta = 1.0;          // time discount per unit time, in (0, 1]
  double xi = 1.0;             // penalty parameter
  int alpha = 6;               // confirmation depth
  int sigma = 0;               // fork-to-transaction blocks on the incumbent chain
  double epsilon_extra = 0.01; // surplus hashrate of the Nakamoto attacker
  double beta = 1.0;           // partial difficulty adjustment factor
  double latency = 0.0;        // propagation delay bound
  std::optional<int> N;        // incumbent post-fork blocks at the boundary; alpha + sigma when unset
  int B = 0;                   // extra secret blocks mined past the boundary

  [[nodiscard]] int effective_N() const noexcept { return N ? *N : alpha + sigma; }
  void validate() const;  // throws ConfigError
};

struct ProfitBreakdown {
  double discounted_revenue = 0.0;
  double discounted_cost = 0.0;
  double profit = 0.0;
  std::int64_t blocks_on_A = 0;
};

// ---- Nakamoto baseline -----------------------------------------------------

// delta^(N-1) (v + p_B N) - c [sum_{n=1}^{N-1} delta^(n-1) + (1 + eps) delta^(N-1)]
[[nodiscard]] ProfitBreakdown nakamoto_attack_profit(const AttackParams& p);

// (c - p_B) N + c eps, the delta -> 1 limit of the break-even value.
[[nodiscard]] double nakamoto_min_profitable_v(const AttackParams& p);

// The v at which nakamoto_attack_profit is exactly zero for the given delta.
[[nodiscard]] double nakamoto_break_even_v(const AttackParams& p);

// v + p_B (N + 1) - c (1 + gamma)^(N + 1)
[[nodiscard]] double moroz_round_payoff(double v, double p_B, double c, int N, double gamma);

// ---- Security bound for the confirmation depth --------------------------------

enum class BoundVariant { Literal, AbsCorrected };

[[nodiscard]] const char* to_string(BoundVariant v) noexcept;

// p = rho * exp(lambda * delta_prop), then
//   Literal:      (2 + 2 sqrt(1 / (p - 1)))  * 4 p (1 - p)^k, needs p > 1
//   AbsCorrected: (2 + 2 sqrt(1 / |p - 1|)) * 4 p (1 - p)^k, needs p in (0, 1)
// Out-of-domain inputs raise DomainError.
[[nodiscard]] double guo_ren_bound(int k, double rho, double lambda_rate, double delta_prop, BoundVariant variant);
[[nodiscard]] double guo_ren_bound_p(int k, double p, BoundVariant variant);

// ---- ADESS attack plan ---------------------------------------------------------

// Growth rate that lets a chain forked tau blocks below the head reach the
// boundary together with an N-block incumbent: xi + tau / N.
[[nodiscard]] double fork_depth_growth(int N, double xi, double tau);

// c * sum_{n=0}^{K-1} delta^(n/(1+xi)) (1+xi)^n with K = ceil(N (1 + xi)).
[[nodiscard]] double adess_attack_cost(int N, double xi, double delta, double c);

// Same sum for a fork tau blocks below the head: ceil(N (1 + xi) + tau) blocks
// at growth fork_depth_growth(N, xi, tau).
[[nodiscard]] double adess_attack_cost_with_lead(int N, double xi, double tau, double delta, double c);

// Profit of the plan (fork depth tau, boundary at N incumbent blocks, B extra
// secret blocks). With tau = 0 and N = alpha + sigma this is the closed form
// used by adess_attack_profit.
[[nodiscard]] ProfitBreakdown adess_plan_profit(const AttackParams& p, double tau, int N, int B);

// delta^(N+B-1) (v + p_B (K + B)) - c [cost(N, xi) + sum_{b<B} delta^(N+b)]
[[nodiscard]] ProfitBreakdown adess_attack_profit(const AttackParams& p);

// Marginal profit of one extra secret block past the boundary:
// (delta^N - delta^(N-1)) (v + p_B (K + 1)) + delta^N (p_B - c).
[[nodiscard]] double broadcast_margin(const AttackParams& p);

// d/dxi of delta^(n/(1+xi)) (1+xi)^n = n (1+xi)^(n-2) delta^(n/(1+xi)) [(1+xi) - ln delta].
[[nodiscard]] double cost_term_derivative(int n, double xi, double delta);

// d2/dxi2 of the same term:
// n u^(n-4) delta^(n/u) [(n-1) u^2 - 2 (n-1) u ln delta + n (ln delta)^2], u = 1 + xi.
[[nodiscard]] double cost_term_second_derivative(int n, double xi, double delta);

// Marginal profit with respect to xi. Between ceiling jumps this is
// -c * sum of cost_term_derivative; when xi + dxi adds a block to the
// boundary count, delta^N p_B - delta^N c is added.
[[nodiscard]] double penalty_margin(double xi, int N, double delta, double c, double p_B, double dxi = 1e-6);

// Derivative of penalty_margin between jumps: -c * sum of cost_term_second_derivative.
[[nodiscard]] double penalty_margin_slope(double xi, int N, double delta, double c);

struct SolverOptions {
  double xi_min = 1e-6;      // smallest xi considered
  double tolerance = 1e-9;   // bisection stops when the bracket is narrower (relative)
  int max_iterations = 200;
  int tail_samples = 64;     // points checked above the answer
  double tail_span = 8.0;    // tail covers (xi*, xi* * tail_span + tail_span]
};

// Smallest xi (to solver tolerance) with profit(xi) < 0 and profit < 0 at
// every sampled point above it. Throws SolverFailure.
[[nodiscard]] double min_deterring_xi(const std::function<double(double)>& profit, const SolverOptions& opts = {});

// Convenience overload on adess_attack_profit with p.v = v and xi free.
[[nodiscard]] double min_deterring_xi(double v, const AttackParams& p, const SolverOptions& opts = {});

// v_max = -adess_attack_profit(xi, v = 0).profit. The attack is unprofitable on
// [0, v_max); at delta = 1 the profit at v_max is exactly zero.
[[nodiscard]] double safe_value_interval(double xi, const AttackParams& p);

// The v with adess_attack_profit exactly zero: v_max / delta^(N+B-1).
[[nodiscard]] double adess_break_even_v(double xi, const AttackParams& p);

// ---- Affine growth schedule gamma(n, xi) = rho + xi f(n) ---------------------

using GrowthShape = std::function<double(int)>;

// c sum_{n<K} delta^(n/(1+gamma_n)) (1+gamma_n)^n, K = ceil(N (1 + xi)).
[[nodiscard]] double affine_attack_cost(double xi, double rho, const GrowthShape& f, int N, double delta, double c);

// Revenue as in adess_attack_profit with B = 0, cost from affine_attack_cost.
[[nodiscard]] ProfitBreakdown affine_attack_profit(double xi, double rho, const GrowthShape& f, const AttackParams& p);

// d/dxi of delta^(n/w) w^n with w = 1 + rho + xi f: f n w^(n-2) delta^(n/w) (w - ln delta).
[[nodiscard]] double affine_cost_term_derivative(int n, double xi, double rho, double f, double delta);

// The closed form as commonly printed for this derivative:
//   n f g^(n-1) delta^(n/w) - n f ln(delta) (g^n + 1) delta^(n/w) w^(-2),  g = w - 1.
// It is the derivative of delta^(n/w) (g^n + 1), not of the cost term; kept
// for comparison only.
[[nodiscard]] double affine_cost_term_derivative_printed(int n, double xi, double rho, double f, double delta);

// p_B - c * sum of affine_cost_term_derivative - c, with the two block terms
// present only when xi + dxi adds a block to the boundary count.
[[nodiscard]] double affine_growth_cost_margin(double xi, double rho, const GrowthShape& f, int N, double delta,
                                               double c, double p_B, double dxi = 1e-6);

// ---- Malicious split: ADESS versus Nakamoto ------------------------------------

struct MaliciousCost {
  std::vector<double> per_period;  // cost incurred in [t, t+1), t = 0 .. horizon-1
  double present_value = 0.0;
};

// ADESS: c (1+xi)^n for each block n up to the boundary, booked at its start
// time n / (1 + xi); zero afterwards. Nakamoto: c every period.
[[nodiscard]] MaliciousCost malicious_cost_series(Protocol protocol, const AttackParams& p, int horizon);

struct PvOrdering {
  AttackParams adess_dearer;  // parameters where PV(ADESS) > PV(Nakamoto)
  AttackParams nakamoto_dearer;
  double adess_dearer_gap = 0.0;     // PV(ADESS) - PV(Nakamoto) at adess_dearer
  double nakamoto_dearer_gap = 0.0;  // same difference at nakamoto_dearer (negative)
};

// Scans xi and delta from `base` for one parameterization of each ordering.
// Returns nullopt when the scan does not find both.
[[nodiscard]] std::optional<PvOrdering> find_pv_orderings(const AttackParams& base, int horizon);

// ---- Total attacker hashrate: ADESS versus Nakamoto ----------------------------

struct HashrateComparison {
  double xi = 0.0;
  double epsilon_extra = 0.0;
  int N = 0;
  DifficultyRule rule;
  double adess = 0.0;     // sum of required_hashrate_series(xi, N, rule)
  double nakamoto = 0.0;  // N + epsilon_extra
  [[nodiscard]] bool holds() const noexcept { return adess >= nakamoto; }
};

[[nodiscard]] HashrateComparison compare_attack_hashrate(double xi, double epsilon_extra, int N,
                                                         const DifficultyRule& rule);

}  // namespace adess
