#include "config_io.hpp"

#include "adess/errors.hpp"

#include <fstream>
#include <set>

namespace adess::cli {

using nlohmann::json;

namespace {

// Reads the members of one JSON object, remembering which keys were consumed
// so that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    T value{};
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    get(key, value);
    out = value;
  }

  [[nodiscard]] const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  [[nodiscard]] std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError(path_ + "." + it.key() + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string get_string(ObjectReader& r, const char* key, const std::string& fallback) {
  std::string s = fallback;
  r.get(key, s);
  return s;
}

}  // namespace

Protocol parse_protocol(const std::string& s) {
  if (s == "adess") return Protocol::Adess;
  if (s == "nakamoto") return Protocol::Nakamoto;
  throw ConfigError("protocol: expected adess or nakamoto, got '" + s + "'");
}

AdjustmentMode parse_adjustment(const std::string& s) {
  if (s == "full") return AdjustmentMode::Full;
  if (s == "partial") return AdjustmentMode::Partial;
  if (s == "epoch") return AdjustmentMode::Epoch;
  throw ConfigError("difficulty.mode: expected full, partial or epoch, got '" + s + "'");
}

AttackerStrategy parse_strategy(const std::string& s) {
  for (auto k : {AttackerStrategy::None, AttackerStrategy::PaperOptimal, AttackerStrategy::FixedGrowth,
                 AttackerStrategy::AcceleratedLatency}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("strategy.kind: expected none, optimal, fixed-growth or accelerated, got '" + s + "'");
}

AttackParams attack_from_json(const json& j, const std::string& path) {
  AttackParams p;
  ObjectReader r(j, path);
  r.get("v", p.v);
  r.get("p_B", p.p_B);
  r.get("c", p.c);
  r.get("delta", p.delta);
  r.get("xi", p.xi);
  r.get("alpha", p.alpha);
  r.get("sigma", p.sigma);
  r.get("epsilon_extra", p.epsilon_extra);
  r.get("beta", p.beta);
  r.get("latency", p.latency);
  r.get("N", p.N);
  r.get("B", p.B);
  r.finish();
  return p;
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig cfg;
  ObjectReader r(j, "config");
  cfg.protocol = parse_protocol(get_string(r, "protocol", "adess"));

  if (const json* a = r.child("adess")) {
    ObjectReader ar(*a, r.path("adess"));
    ar.get("alpha", cfg.adess.alpha);
    ar.get("xi", cfg.adess.xi);
    ar.get("epsilon", cfg.adess.epsilon);
    ar.get("latency_bound", cfg.adess.latency_bound);
    ar.finish();
  }
  if (const json* a = r.child("attack")) cfg.attack = attack_from_json(*a, r.path("attack"));
  if (const json* m = r.child("mining")) {
    ObjectReader mr(*m, r.path("mining"));
    const std::string kind = get_string(mr, "kind", to_string(cfg.mining.kind));
    if (kind == "stochastic") {
      cfg.mining.kind = MiningKind::Stochastic;
    } else if (kind == "certainty-equivalent") {
      cfg.mining.kind = MiningKind::CertaintyEquivalent;
    } else {
      throw ConfigError("config.mining.kind: expected stochastic or certainty-equivalent, got '" + kind + "'");
    }
    mr.get("seed", cfg.mining.seed);
    mr.get("tick", cfg.mining.tick);
    const std::string implied = get_string(mr, "implied", "applied");
    if (implied == "applied") {
      cfg.mining.implied = ImpliedHashrate::Applied;
    } else if (implied == "observed") {
      cfg.mining.implied = ImpliedHashrate::Observed;
    } else {
      throw ConfigError("config.mining.implied: expected applied or observed, got '" + implied + "'");
    }
    mr.finish();
  }
  if (const json* d = r.child("difficulty")) {
    ObjectReader dr(*d, r.path("difficulty"));
    cfg.difficulty.mode = parse_adjustment(get_string(dr, "mode", "full"));
    dr.get("beta", cfg.difficulty.beta);
    dr.get("epoch", cfg.difficulty.epoch);
    dr.get("target_block_time", cfg.difficulty.target_block_time);
    dr.finish();
  }
  r.get("n_honest_nodes", cfg.n_honest_nodes);
  r.get("delay", cfg.delay);
  r.get("delay_matrix", cfg.delay_matrix);
  if (const json* s = r.child("strategy")) {
    ObjectReader sr(*s, r.path("strategy"));
    cfg.strategy.kind = parse_strategy(get_string(sr, "kind", "optimal"));
    sr.get("growth", cfg.strategy.growth);
    sr.finish();
  }
  if (const json* e = r.child("eclipse")) {
    ObjectReader er(*e, r.path("eclipse"));
    er.get("hidden_from_attacker", cfg.eclipse.hidden_from_attacker);
    er.get("hidden_from_honest", cfg.eclipse.hidden_from_honest);
    er.finish();
  }
  r.get("horizon", cfg.horizon);
  r.get("seed", cfg.seed);
  r.get("late_join_time", cfg.late_join_time);
  r.get("record_heads", cfg.record_heads);
  r.finish();
  cfg.validate();
  return cfg;
}

json to_json(const AttackParams& p) {
  json j = {{"v", p.v},         {"p_B", p.p_B},     {"c", p.c},
            {"delta", p.delta}, {"xi", p.xi},       {"alpha", p.alpha},
            {"sigma", p.sigma}, {"epsilon_extra", p.epsilon_extra},
            {"beta", p.beta},   {"latency", p.latency}, {"B", p.B}};
  if (p.N) j["N"] = *p.N;
  return j;
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["protocol"] = to_string(cfg.protocol);
  j["adess"] = {{"alpha", cfg.adess.alpha},
                {"xi", cfg.adess.xi},
                {"epsilon", cfg.adess.epsilon},
                {"latency_bound", cfg.adess.latency_bound}};
  j["attack"] = to_json(cfg.attack);
  j["mining"] = {{"kind", to_string(cfg.mining.kind)},
                 {"seed", cfg.mining.seed},
                 {"tick", cfg.mining.tick},
                 {"implied", cfg.mining.implied == ImpliedHashrate::Applied ? "applied" : "observed"}};
  j["difficulty"] = {{"mode", to_string(cfg.difficulty.mode)},
                     {"beta", cfg.difficulty.beta},
                     {"epoch", cfg.difficulty.epoch},
                     {"target_block_time", cfg.difficulty.target_block_time}};
  j["n_honest_nodes"] = cfg.n_honest_nodes;
  j["delay"] = cfg.delay;
  if (!cfg.delay_matrix.empty()) j["delay_matrix"] = cfg.delay_matrix;
  j["strategy"] = {{"kind", to_string(cfg.strategy.kind)}, {"growth", cfg.strategy.growth}};
  j["eclipse"] = {{"hidden_from_attacker", cfg.eclipse.hidden_from_attacker},
                  {"hidden_from_honest", cfg.eclipse.hidden_from_honest}};
  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  if (cfg.late_join_time) j["late_join_time"] = *cfg.late_join_time;
  j["record_heads"] = cfg.record_heads;
  return j;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace adess::cli
