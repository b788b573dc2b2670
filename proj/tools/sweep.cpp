#include "sweep.hpp"

#include "adess/errors.hpp"
#include "adess/numeric.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string_view>

namespace adess::cli {

namespace {

double parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw UsageError("grid: bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int as_int(const std::string& name, double v) {
  if (std::floor(v) != v) throw UsageError("grid: " + name + " must be an integer");
  return static_cast<int>(v);
}

struct Point {
  AttackParams p;
  int n = 0;  // block index for hashrate sweeps; 0 means N
  int t = 0;  // period for malicious sweeps
  int horizon = 0;
};

void apply(Point& pt, const std::string& name, double v) {
  AttackParams& p = pt.p;
  if (name == "v") p.v = v;
  else if (name == "p_B" || name == "pb") p.p_B = v;
  else if (name == "c") p.c = v;
  else if (name == "delta") p.delta = v;
  else if (name == "xi") p.xi = v;
  else if (name == "alpha") p.alpha = as_int(name, v);
  else if (name == "sigma") p.sigma = as_int(name, v);
  else if (name == "epsilon_extra") p.epsilon_extra = v;
  else if (name == "beta") p.beta = v;
  else if (name == "latency") p.latency = v;
  else if (name == "N") p.N = as_int(name, v);
  else if (name == "B") p.B = as_int(name, v);
  else if (name == "n") pt.n = as_int(name, v);
  else if (name == "t") pt.t = as_int(name, v);
  else if (name == "horizon") pt.horizon = as_int(name, v);
  else throw UsageError("grid: unknown parameter '" + name + "'");
}

std::string label(const std::vector<std::pair<std::string, double>>& point) {
  std::string s;
  for (const auto& [name, value] : point) {
    if (!s.empty()) s += ';';
    s += name + "=" + format_double(value);
  }
  return s;
}

}  // namespace

std::vector<GridAxis> parse_grid(const std::string& spec) {
  std::vector<GridAxis> axes;
  if (spec.empty()) throw UsageError("grid: empty specification");
  for (std::string_view part : split(spec, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string_view::npos || eq == 0) throw UsageError("grid: expected name=values in '" + std::string(part) + "'");
    GridAxis axis;
    axis.name = std::string(part.substr(0, eq));
    const std::string_view values = part.substr(eq + 1);
    if (values.find(':') != std::string_view::npos) {
      const auto r = split(values, ':');
      if (r.size() != 3) throw UsageError("grid: range must be start:stop:step for " + axis.name);
      const double a = parse_number(r[0]);
      const double b = parse_number(r[1]);
      const double step = parse_number(r[2]);
      if (!(step > 0.0) || b < a) throw UsageError("grid: empty or inverted range for " + axis.name);
      const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < count; ++i) {
        // Snap to 1e-12 so that 0.1 + 2 * 0.1 prints as 0.3.
        const double raw = a + static_cast<double>(i) * step;
        axis.values.push_back(std::round(raw * 1e12) / 1e12);
      }
    } else {
      for (std::string_view v : split(values, ',')) {
        if (!v.empty()) axis.values.push_back(parse_number(v));
      }
    }
    if (axis.values.empty()) throw UsageError("grid: no values for " + axis.name);
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw UsageError("grid: empty specification");
  return axes;
}

std::vector<std::vector<std::pair<std::string, double>>> expand_grid(const std::vector<GridAxis>& axes) {
  std::vector<std::vector<std::pair<std::string, double>>> out{{}};
  for (const GridAxis& axis : axes) {
    std::vector<std::vector<std::pair<std::string, double>>> next;
    next.reserve(out.size() * axis.values.size());
    for (const auto& prefix : out) {
      for (double v : axis.values) {
        auto row = prefix;
        row.emplace_back(axis.name, v);
        next.push_back(std::move(row));
      }
    }
    out = std::move(next);
  }
  return out;
}

SweepKind parse_sweep_kind(const std::string& s) {
  if (s == "profit") return SweepKind::Profit;
  if (s == "hashrate") return SweepKind::Hashrate;
  if (s == "malicious") return SweepKind::Malicious;
  throw UsageError("sweep: --kind must be profit, hashrate or malicious");
}

const char* to_string(SweepKind k) noexcept {
  switch (k) {
    case SweepKind::Profit: return "profit";
    case SweepKind::Hashrate: return "hashrate";
    case SweepKind::Malicious: return "malicious";
  }
  return "?";
}

std::size_t emit_sweep(const std::vector<GridAxis>& axes, const SweepSettings& settings, std::ostream& csv) {
  const auto points = expand_grid(axes);
  switch (settings.kind) {
    case SweepKind::Profit: csv << "param_point,revenue,cost,profit,xi_star,v_max\n"; break;
    case SweepKind::Hashrate: csv << "param_point,hashrate,cumulative\n"; break;
    case SweepKind::Malicious: csv << "param_point,adess_pv,nakamoto_pv,adess_period_cost,nakamoto_period_cost\n"; break;
  }
  for (const auto& point : points) {
    Point pt;
    pt.p = settings.base;
    pt.horizon = settings.horizon;
    for (const auto& [name, value] : point) apply(pt, name, value);
    pt.p.validate();
    csv << label(point);
    switch (settings.kind) {
      case SweepKind::Profit: {
        const ProfitBreakdown r = adess_attack_profit(pt.p);
        std::string xi_star = "-";
        try {
          xi_star = format_double(min_deterring_xi(pt.p.v, pt.p));
        } catch (const SolverFailure&) {
        }
        const double v_max = pt.p.xi > 0.0 ? safe_value_interval(pt.p.xi, pt.p) : 0.0;
        csv << ',' << format_double(r.discounted_revenue) << ',' << format_double(r.discounted_cost) << ','
            << format_double(r.profit) << ',' << xi_star << ',' << format_double(v_max) << '\n';
        break;
      }
      case SweepKind::Hashrate: {
        DifficultyRule rule = settings.rule;
        if (rule.mode == AdjustmentMode::Partial) rule.beta = pt.p.beta;
        const int n = pt.n > 0 ? pt.n : pt.p.effective_N();
        const auto series = required_hashrate_series(pt.p.xi, n, rule);
        double total = 0.0;
        for (double h : series) total += h;
        csv << ',' << format_double(series.back()) << ',' << format_double(total) << '\n';
        break;
      }
      case SweepKind::Malicious: {
        const MaliciousCost a = malicious_cost_series(Protocol::Adess, pt.p, pt.horizon);
        const MaliciousCost b = malicious_cost_series(Protocol::Nakamoto, pt.p, pt.horizon);
        if (pt.t < 0 || pt.t >= pt.horizon) throw UsageError("grid: t must lie in [0, horizon)");
        const auto t = static_cast<std::size_t>(pt.t);
        csv << ',' << format_double(a.present_value) << ',' << format_double(b.present_value) << ','
            << format_double(a.per_period[t]) << ',' << format_double(b.per_period[t]) << '\n';
        break;
      }
    }
  }
  return points.size();
}

}  // namespace adess::cli
