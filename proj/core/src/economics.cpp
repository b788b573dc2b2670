#include "adess/economics.hpp"

#include "adess/errors.hpp"
#include "adess/numeric.hpp"

#include <cmath>

namespace adess {

void AttackParams::validate() const {
  if (!(v >= 0.0)) throw ConfigError("attack.v must be >= 0");
  if (!(p_B > 0.0)) throw ConfigError("attack.p_B must be > 0");
  if (!(c > 0.0)) throw ConfigError("attack.c must be > 0");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("attack.delta must lie in (0, 1]");
  if (!(xi >= 0.0)) throw ConfigError("attack.xi must be >= 0");
  if (alpha < 1) throw ConfigError("attack.alpha must be >= 1");
  if (sigma < 0) throw ConfigError("attack.sigma must be >= 0");
  if (!(epsilon_extra > 0.0)) throw ConfigError("attack.epsilon_extra must be > 0");
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("attack.beta must lie in (0, 1]");
  if (!(latency >= 0.0)) throw ConfigError("attack.latency must be >= 0");
  if (N && *N < 1) throw ConfigError("attack.N must be >= 1");
  if (B < 0) throw ConfigError("attack.B must be >= 0");
}

ProfitBreakdown nakamoto_attack_profit(const AttackParams& p) {
  const int N = p.effective_N();
  if (N < 1) throw DomainError("N must be >= 1");
  ProfitBreakdown r;
  const double last = std::pow(p.delta, N - 1);
  r.discounted_revenue = last * (p.v + p.p_B * N);
  double cost = 0.0;
  for (int n = 1; n <= N - 1; ++n) cost += std::pow(p.delta, n - 1);
  cost += (1.0 + p.epsilon_extra) * last;
  r.discounted_cost = p.c * cost;
  r.profit = r.discounted_revenue - r.discounted_cost;
  r.blocks_on_A = N;
  return r;
}

double nakamoto_min_profitable_v(const AttackParams& p) {
  return (p.c - p.p_B) * p.effective_N() + p.c * p.epsilon_extra;
}

double nakamoto_break_even_v(const AttackParams& p) {
  AttackParams q = p;
  q.v = 0.0;
  const ProfitBreakdown r = nakamoto_attack_profit(q);
  return -r.profit / std::pow(p.delta, p.effective_N() - 1);
}

double moroz_round_payoff(double v, double p_B, double c, int N, double gamma) {
  if (N < 0) throw DomainError("N must be >= 0");
  return v + p_B * (N + 1) - c * std::pow(1.0 + gamma, N + 1);
}

const char* to_string(BoundVariant v) noexcept {
  return v == BoundVariant::Literal ? "literal" : "abs";
}

double guo_ren_bound_p(int k, double p, BoundVariant variant) {
  if (k < 1) throw DomainError("k must be >= 1");
  double gap = 0.0;
  if (variant == BoundVariant::Literal) {
    if (!(p > 1.0)) {
      throw DomainError("literal bound needs p > 1 for sqrt(1/(p-1)); got p = " + format_double(p));
    }
    gap = p - 1.0;
  } else {
    if (!(p > 0.0 && p < 1.0)) {
      throw DomainError("corrected bound needs p in (0, 1); got p = " + format_double(p));
    }
    gap = std::abs(p - 1.0);
  }
  return (2.0 + 2.0 * std::sqrt(1.0 / gap)) * 4.0 * p * std::pow(1.0 - p, k);
}

double guo_ren_bound(int k, double rho, double lambda_rate, double delta_prop, BoundVariant variant) {
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("rho must lie in (0, 1]");
  if (!(lambda_rate > 0.0)) throw DomainError("lambda must be > 0");
  if (!(delta_prop >= 0.0)) throw DomainError("propagation delay must be >= 0");
  return guo_ren_bound_p(k, rho * std::exp(lambda_rate * delta_prop), variant);
}

double fork_depth_growth(int N, double xi, double tau) {
  if (N < 1) throw DomainError("N must be >= 1");
  if (!(tau >= 0.0)) throw DomainError("tau must be >= 0");
  return xi + tau / N;
}

namespace {

double growth_cost_sum(std::int64_t blocks, double growth, double delta) {
  const double u = 1.0 + growth;
  double total = 0.0;
  for (std::int64_t n = 0; n < blocks; ++n) {
    total += std::pow(delta, static_cast<double>(n) / u) * std::pow(u, static_cast<double>(n));
  }
  return total;
}

}  // namespace

double adess_attack_cost(int N, double xi, double delta, double c) {
  if (N < 1) throw DomainError("N must be >= 1");
  if (!(xi >= 0.0)) throw DomainError("xi must be >= 0");
  return c * growth_cost_sum(ceil_blocks(N * (1.0 + xi)), xi, delta);
}

double adess_attack_cost_with_lead(int N, double xi, double tau, double delta, double c) {
  const double gamma = fork_depth_growth(N, xi, tau);
  return c * growth_cost_sum(ceil_blocks(N * (1.0 + xi) + tau), gamma, delta);
}

ProfitBreakdown adess_plan_profit(const AttackParams& p, double tau, int N, int B) {
  if (N < 1) throw DomainError("N must be >= 1");
  if (B < 0) throw DomainError("B must be >= 0");
  const std::int64_t K = ceil_blocks(N * (1.0 + p.xi) + tau);
  ProfitBreakdown r;
  r.discounted_revenue = std::pow(p.delta, N + B - 1) * (p.v + p.p_B * static_cast<double>(K + B));
  double extra = 0.0;
  for (int b = 0; b < B; ++b) extra += std::pow(p.delta, N + b);
  r.discounted_cost = adess_attack_cost_with_lead(N, p.xi, tau, p.delta, p.c) + p.c * extra;
  r.profit = r.discounted_revenue - r.discounted_cost;
  r.blocks_on_A = K + B;
  return r;
}

ProfitBreakdown adess_attack_profit(const AttackParams& p) { return adess_plan_profit(p, 0.0, p.effective_N(), p.B); }

double broadcast_margin(const AttackParams& p) {
  const int N = p.effective_N();
  const double K = static_cast<double>(ceil_blocks(N * (1.0 + p.xi)));
  const double dN = std::pow(p.delta, N);
  return (dN - std::pow(p.delta, N - 1)) * (p.v + p.p_B * (K + 1.0)) + dN * (p.p_B - p.c);
}

double cost_term_derivative(int n, double xi, double delta) {
  if (n == 0) return 0.0;
  const double u = 1.0 + xi;
  return n * std::pow(u, n - 2) * std::pow(delta, n / u) * (u - std::log(delta));
}

double cost_term_second_derivative(int n, double xi, double delta) {
  if (n == 0) return 0.0;
  const double u = 1.0 + xi;
  const double L = std::log(delta);
  return n * std::pow(u, n - 4) * std::pow(delta, n / u) *
         ((n - 1) * u * u - 2.0 * (n - 1) * u * L + n * L * L);
}

double penalty_margin(double xi, int N, double delta, double c, double p_B, double dxi) {
  const std::int64_t K = ceil_blocks(N * (1.0 + xi));
  double sum = 0.0;
  for (std::int64_t n = 0; n < K; ++n) sum += cost_term_derivative(static_cast<int>(n), xi, delta);
  double m = -c * sum;
  if (ceil_blocks(N * (1.0 + xi + dxi)) > K) {
    const double dN = std::pow(delta, N);
    m += dN * p_B - dN * c;
  }
  return m;
}

double penalty_margin_slope(double xi, int N, double delta, double c) {
  const std::int64_t K = ceil_blocks(N * (1.0 + xi));
  double sum = 0.0;
  for (std::int64_t n = 0; n < K; ++n) sum += cost_term_second_derivative(static_cast<int>(n), xi, delta);
  return -c * sum;
}

double min_deterring_xi(const std::function<double(double)>& profit, const SolverOptions& opts) {
  // The tail check guards against non-monotone stretches: if any sampled
  // point above a candidate is still profitable, the search restarts there.
  const auto first_profitable_above = [&](double x) -> std::optional<double> {
    const double span = x * opts.tail_span + opts.tail_span;
    for (int i = opts.tail_samples; i >= 1; --i) {
      const double s = x + span * static_cast<double>(i) / opts.tail_samples;
      if (!(profit(s) < 0.0)) return s;
    }
    return std::nullopt;
  };

  double lo = opts.xi_min;
  for (int restart = 0; restart < 32; ++restart) {
    if (profit(lo) < 0.0) {
      auto bad = first_profitable_above(lo);
      if (!bad) return lo;
      lo = *bad;
      continue;
    }
    double hi = std::max(2.0 * lo, 1.0);
    int grow = 0;
    while (!(profit(hi) < 0.0)) {
      lo = hi;
      hi *= 2.0;
      if (++grow > 60) throw SolverFailure("no deterring xi found while bracketing", lo, hi);
    }
    for (int it = 0; it < opts.max_iterations && hi - lo > opts.tolerance * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (profit(mid) < 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    if (hi - lo > opts.tolerance * std::max(1.0, hi)) {
      throw SolverFailure("bisection did not converge", lo, hi);
    }
    auto bad = first_profitable_above(hi);
    if (!bad) return hi;
    lo = *bad;
  }
  throw SolverFailure("profit keeps turning positive above candidate", lo, lo);
}

double min_deterring_xi(double v, const AttackParams& p, const SolverOptions& opts) {
  AttackParams q = p;
  q.v = v;
  return min_deterring_xi(
      [&q](double xi) {
        AttackParams r = q;
        r.xi = xi;
        return adess_attack_profit(r).profit;
      },
      opts);
}

double safe_value_interval(double xi, const AttackParams& p) {
  if (!(xi > 0.0)) throw DomainError("xi must be > 0");
  AttackParams q = p;
  q.xi = xi;
  q.v = 0.0;
  return -adess_attack_profit(q).profit;
}

double adess_break_even_v(double xi, const AttackParams& p) {
  return safe_value_interval(xi, p) / std::pow(p.delta, p.effective_N() + p.B - 1);
}

double affine_attack_cost(double xi, double rho, const GrowthShape& f, int N, double delta, double c) {
  if (N < 1) throw DomainError("N must be >= 1");
  const std::int64_t K = ceil_blocks(N * (1.0 + xi));
  double total = 0.0;
  for (std::int64_t n = 0; n < K; ++n) {
    const double w = 1.0 + rho + xi * f(static_cast<int>(n));
    total += std::pow(delta, static_cast<double>(n) / w) * std::pow(w, static_cast<double>(n));
  }
  return c * total;
}

ProfitBreakdown affine_attack_profit(double xi, double rho, const GrowthShape& f, const AttackParams& p) {
  const int N = p.effective_N();
  const std::int64_t K = ceil_blocks(N * (1.0 + xi));
  ProfitBreakdown r;
  r.discounted_revenue = std::pow(p.delta, N - 1) * (p.v + p.p_B * static_cast<double>(K));
  r.discounted_cost = affine_attack_cost(xi, rho, f, N, p.delta, p.c);
  r.profit = r.discounted_revenue - r.discounted_cost;
  r.blocks_on_A = K;
  return r;
}

double affine_cost_term_derivative(int n, double xi, double rho, double f, double delta) {
  if (n == 0) return 0.0;
  const double w = 1.0 + rho + xi * f;
  return f * n * std::pow(w, n - 2) * std::pow(delta, n / w) * (w - std::log(delta));
}

double affine_cost_term_derivative_printed(int n, double xi, double rho, double f, double delta) {
  const double g = xi * f + rho;
  const double w = g + 1.0;
  const double dw = std::pow(delta, n / w);
  return n * f * std::pow(g, n - 1) * dw - n * f * std::log(delta) * (std::pow(g, n) + 1.0) * dw / (w * w);
}

double affine_growth_cost_margin(double xi, double rho, const GrowthShape& f, int N, double delta, double c,
                                 double p_B, double dxi) {
  if (!(rho > 0.0)) throw DomainError("rho must be > 0");
  const std::int64_t K = ceil_blocks(N * (1.0 + xi));
  double sum = 0.0;
  for (std::int64_t n = 0; n < K; ++n) {
    const int i = static_cast<int>(n);
    const double fn = f(i);
    if (!(fn > 0.0)) throw DomainError("growth shape f(n) must be > 0");
    sum += affine_cost_term_derivative(i, xi, rho, fn, delta);
  }
  double m = -c * sum;
  if (ceil_blocks(N * (1.0 + xi + dxi)) > K) m += p_B - c;
  return m;
}

MaliciousCost malicious_cost_series(Protocol protocol, const AttackParams& p, int horizon) {
  const int N = p.effective_N();
  if (horizon < N) throw DomainError("horizon must be >= the boundary block count N");
  MaliciousCost out;
  out.per_period.assign(static_cast<std::size_t>(horizon), 0.0);
  if (protocol == Protocol::Nakamoto) {
    for (int t = 0; t < horizon; ++t) {
      out.per_period[static_cast<std::size_t>(t)] = p.c;
      out.present_value += p.c * std::pow(p.delta, t);
    }
    return out;
  }
  const double u = 1.0 + p.xi;
  const std::int64_t K = ceil_blocks(N * u);
  for (std::int64_t n = 0; n < K; ++n) {
    const double start = static_cast<double>(n) / u;
    const double cost = p.c * std::pow(u, static_cast<double>(n));
    const auto bucket = static_cast<std::size_t>(std::floor(start));
    if (bucket < out.per_period.size()) out.per_period[bucket] += cost;
    out.present_value += cost * std::pow(p.delta, start);
  }
  return out;
}

std::optional<PvOrdering> find_pv_orderings(const AttackParams& base, int horizon) {
  std::optional<std::pair<AttackParams, double>> adess_dearer;
  std::optional<std::pair<AttackParams, double>> nakamoto_dearer;
  for (int i = 1; i <= 40; ++i) {
    for (double delta : {0.5, 0.8, 0.9, 0.95, 0.99, 0.999, 1.0}) {
      AttackParams q = base;
      q.xi = 0.05 * i;
      q.delta = delta;
      const double gap = malicious_cost_series(Protocol::Adess, q, horizon).present_value -
                         malicious_cost_series(Protocol::Nakamoto, q, horizon).present_value;
      if (gap > 0.0 && !adess_dearer) adess_dearer.emplace(q, gap);
      if (gap < 0.0 && !nakamoto_dearer) nakamoto_dearer.emplace(q, gap);
    }
  }
  if (!adess_dearer || !nakamoto_dearer) return std::nullopt;
  return PvOrdering{adess_dearer->first, nakamoto_dearer->first, adess_dearer->second, nakamoto_dearer->second};
}

HashrateComparison compare_attack_hashrate(double xi, double epsilon_extra, int N, const DifficultyRule& rule) {
  if (N < 1) throw DomainError("N must be >= 1");
  HashrateComparison r;
  r.xi = xi;
  r.epsilon_extra = epsilon_extra;
  r.N = N;
  r.rule = rule;
  for (double h : required_hashrate_series(xi, N, rule)) r.adess += h;
  r.nakamoto = N + epsilon_extra;
  return r;
}

}  // namespace adess
