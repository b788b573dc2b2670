#include "cli.hpp"

#include "config_io.hpp"
#include "props.hpp"
#include "sweep.hpp"

#include "adess/economics.hpp"
#include "adess/errors.hpp"
#include "adess/net_sim.hpp"
#include "adess/numeric.hpp"

#include <CLI/CLI.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace adess::cli {

namespace {

namespace fs = std::filesystem;

std::shared_ptr<spdlog::logger> make_logger() {
  auto logger = spdlog::get("adess");
  if (!logger) logger = spdlog::stderr_logger_st("adess");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("ADESS_LOG")) {
    const std::string s = env;
    if (s == "error") level = spdlog::level::err;
    else if (s == "info") level = spdlog::level::info;
    else if (s == "debug") level = spdlog::level::debug;
  }
  logger->set_level(level);
  logger->set_pattern("[%l] %v");
  return logger;
}

// Attack flags shared by the economics subcommands.
struct AttackFlags {
  AttackParams p;
  int N = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--v", p.v, "value of the double-spent transaction");
    cmd->add_option("--xi", p.xi, "penalty parameter");
    cmd->add_option("--alpha", p.alpha, "confirmation depth");
    cmd->add_option("--sigma", p.sigma, "fork-to-transaction blocks");
    cmd->add_option("--delta", p.delta, "discount factor per block interval");
    cmd->add_option("--c", p.c, "cost per hashrate unit and time");
    cmd->add_option("--pb", p.p_B, "block reward");
    cmd->add_option("--eps-extra", p.epsilon_extra, "surplus hashrate of the Nakamoto attacker");
    cmd->add_option("--beta", p.beta, "partial difficulty adjustment factor");
    cmd->add_option("--latency", p.latency, "propagation delay bound");
    cmd->add_option("--N", N, "incumbent post-fork blocks at the boundary (default alpha + sigma)");
    cmd->add_option("--B", p.B, "extra secret blocks past the boundary");
  }

  AttackParams resolve() const {
    AttackParams q = p;
    if (N > 0) q.N = N;
    q.validate();
    return q;
  }
};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << content;
}

void print_profit(std::ostream& out, const ProfitBreakdown& r) {
  out << "revenue " << format_double(r.discounted_revenue) << '\n'
      << "cost " << format_double(r.discounted_cost) << '\n'
      << "profit " << format_double(r.profit) << '\n'
      << "blocks_on_A " << r.blocks_on_A << '\n';
}

std::pair<int, int> parse_k_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int k = std::stoi(s);
      return {k, k};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("security-bound: --k must be an integer or a..b");
  }
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ADESS fork-choice and attack-economics lab", "adess"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) {
    seed = s;
    seed_given = true;
  }, "random seed");

  std::string config_path;
  AttackFlags attack;

  auto* simulate = app.add_subcommand("simulate", "run a network scenario from a JSON config");
  simulate->add_option("--config", config_path, "scenario config")->required();

  auto* min_xi = app.add_subcommand("min-xi", "smallest penalty that deters the attack");
  attack.attach(min_xi);

  auto* safe_v = app.add_subcommand("safe-v", "largest transaction value that is safe at a given xi");
  attack.attach(safe_v);

  std::string protocol_name = "adess";
  auto* profit = app.add_subcommand("profit", "attacker profit under one protocol");
  attack.attach(profit);
  profit->add_option("--protocol", protocol_name, "adess or nakamoto")->capture_default_str();

  int horizon = 50;
  auto* compare = app.add_subcommand("compare-protocols", "attack profit and malicious cost under both protocols");
  attack.attach(compare);
  compare->add_option("--horizon", horizon, "periods for the malicious cost series")->capture_default_str();

  std::string k_range = "1..12";
  double rho = 0.0;
  double lambda_rate = 0.0;
  double delta_prop = 0.0;
  std::string variant = "abs";
  auto* bound = app.add_subcommand("security-bound", "confirmation-depth security bound");
  bound->add_option("--k", k_range, "depth or range a..b")->capture_default_str();
  bound->add_option("--rho", rho, "adversarial hashrate share")->required();
  bound->add_option("--lambda", lambda_rate, "block rate")->required();
  bound->add_option("--delta-prop", delta_prop, "propagation delay")->required();
  bound->add_option("--variant", variant, "abs or literal")->capture_default_str();

  std::string grid_spec;
  std::string kind_name = "profit";
  std::string rule_name = "full";
  int epoch = 2016;
  auto* sweep = app.add_subcommand("sweep", "evaluate a parameter grid to CSV");
  sweep->add_option("--config", config_path, "JSON file with base attack parameters");
  sweep->add_option("--grid", grid_spec, "name=a:b:step or name=x,y,... separated by ';'")->required();
  sweep->add_option("--kind", kind_name, "profit, hashrate or malicious")->capture_default_str();
  sweep->add_option("--rule", rule_name, "difficulty rule for hashrate sweeps: full, partial or epoch")
      ->capture_default_str();
  sweep->add_option("--epoch", epoch, "blocks per retarget for --rule epoch")->capture_default_str();
  sweep->add_option("--horizon", horizon, "periods for malicious sweeps")->capture_default_str();
  attack.attach(sweep);

  std::string suite = "all";
  auto* props = app.add_subcommand("check-props", "run randomized property checks");
  props->add_option("--suite", suite, "fork-choice, economics, mining, net-sim or all")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  auto log = make_logger();
  const fs::path outp(out_dir);

  try {
    if (*simulate) {
      ScenarioConfig cfg = load_scenario(config_path);
      if (seed_given) cfg.seed = seed;
      log->info("simulate {} seed={} horizon={}", config_path, cfg.seed, cfg.horizon);
      const RunReport rep = run_scenario(cfg);
      std::ostringstream text;
      rep.write_text(text);
      std::ostringstream csv;
      rep.write_head_csv(csv);
      write_file(outp / "report.txt", text.str());
      write_file(outp / "heads.csv", csv.str());
      out << "attack_succeeded " << (rep.attack_succeeded ? 1 : 0) << '\n'
          << "attacker_cost " << format_double(rep.attacker_cost) << '\n'
          << "attacker_revenue " << format_double(rep.attacker_revenue) << '\n'
          << "split_persists " << (rep.split_persists ? 1 : 0) << '\n'
          << "report " << (outp / "report.txt").string() << '\n';
      return 0;
    }
    if (*min_xi) {
      AttackParams p = attack.resolve();
      const double xs = min_deterring_xi(p.v, p);
      p.xi = xs;
      out << "xi_star " << format_double(xs) << '\n'
          << "profit_at_xi_star " << format_double(adess_attack_profit(p).profit) << '\n';
      return 0;
    }
    if (*safe_v) {
      const AttackParams p = attack.resolve();
      out << "v_max " << format_double(safe_value_interval(p.xi, p)) << '\n'
          << "break_even_v " << format_double(adess_break_even_v(p.xi, p)) << '\n';
      return 0;
    }
    if (*profit) {
      const AttackParams p = attack.resolve();
      const Protocol proto = parse_protocol(protocol_name);
      print_profit(out, proto == Protocol::Adess ? adess_attack_profit(p) : nakamoto_attack_profit(p));
      return 0;
    }
    if (*compare) {
      const AttackParams p = attack.resolve();
      if (horizon <= 0) throw UsageError("compare-protocols: --horizon must be positive");
      const ProfitBreakdown a = adess_attack_profit(p);
      const ProfitBreakdown n = nakamoto_attack_profit(p);
      const MaliciousCost ma = malicious_cost_series(Protocol::Adess, p, horizon);
      const MaliciousCost mn = malicious_cost_series(Protocol::Nakamoto, p, horizon);
      out << "protocol,revenue,cost,profit,malicious_pv\n"
          << "adess," << format_double(a.discounted_revenue) << ',' << format_double(a.discounted_cost) << ','
          << format_double(a.profit) << ',' << format_double(ma.present_value) << '\n'
          << "nakamoto," << format_double(n.discounted_revenue) << ',' << format_double(n.discounted_cost) << ','
          << format_double(n.profit) << ',' << format_double(mn.present_value) << '\n';
      std::ostringstream csv;
      csv << "t,adess,nakamoto\n";
      for (int t = 0; t < horizon; ++t) {
        const auto i = static_cast<std::size_t>(t);
        csv << t << ',' << format_double(ma.per_period[i]) << ',' << format_double(mn.per_period[i]) << '\n';
      }
      write_file(outp / "malicious_cost.csv", csv.str());
      return 0;
    }
    if (*bound) {
      const auto [k0, k1] = parse_k_range(k_range);
      if (k0 < 0 || k1 < k0) throw UsageError("security-bound: empty --k range");
      BoundVariant var;
      if (variant == "abs") var = BoundVariant::AbsCorrected;
      else if (variant == "literal") var = BoundVariant::Literal;
      else throw UsageError("security-bound: --variant must be abs or literal");
      std::ostringstream csv;
      csv << "k,bound\n";
      for (int k = k0; k <= k1; ++k) {
        csv << k << ',' << format_double(guo_ren_bound(k, rho, lambda_rate, delta_prop, var)) << '\n';
      }
      out << csv.str();
      write_file(outp / "security_bound.csv", csv.str());
      return 0;
    }
    if (*sweep) {
      SweepSettings settings;
      settings.kind = parse_sweep_kind(kind_name);
      settings.horizon = horizon;
      if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw ConfigError("cannot open " + config_path);
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(f);
        } catch (const nlohmann::json::parse_error& e) {
          throw ConfigError(config_path + ": " + e.what());
        }
        settings.base = attack_from_json(j.contains("attack") ? j.at("attack") : j);
      } else {
        settings.base = attack.resolve();
      }
      const AdjustmentMode mode = parse_adjustment(rule_name);
      if (mode == AdjustmentMode::Partial) settings.rule = DifficultyRule::partial(settings.base.beta);
      else if (mode == AdjustmentMode::Epoch) settings.rule = DifficultyRule::every(epoch);
      settings.rule.validate();
      const auto axes = parse_grid(grid_spec);
      std::ostringstream csv;
      const std::size_t rows = emit_sweep(axes, settings, csv);
      write_file(outp / "sweep.csv", csv.str());
      nlohmann::ordered_json meta;
      meta["kind"] = to_string(settings.kind);
      meta["grid"] = grid_spec;
      meta["rows"] = rows;
      meta["rule"] = to_string(settings.rule.mode);
      meta["epoch"] = settings.rule.epoch;
      meta["horizon"] = settings.horizon;
      meta["seed"] = seed;
      meta["attack"] = to_json(settings.base);
      write_file(outp / "sweep_meta.json", meta.dump(2) + "\n");
      out << "rows " << rows << '\n' << "csv " << (outp / "sweep.csv").string() << '\n';
      return 0;
    }
    if (*props) {
      const int failures = run_property_suite(suite, seed, out);
      return failures == 0 ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace adess::cli
