#include "newsgame/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "newsgame/classify.hpp"
#include "newsgame/dynamics.hpp"
#include "newsgame/io.hpp"
#include "newsgame/stationary.hpp"
#include "newsgame/stats.hpp"
#include "newsgame/strategy.hpp"
#include "newsgame/sweep.hpp"

namespace newsgame {
namespace {

using nlohmann::json;

// Config and validation problems exit with 2, broken input data with 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError(msg); }

const TransmitterStrategy kTruthful{1.0, 1.0, 0.0, 0.0};
const TransmitterStrategy kFabricating{0.0, 0.0, 0.0, 0.0};

// --- json access helpers (strict: typos must not fall back to defaults) ---

void check_keys(const json& j, const char* where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    config_fail(std::string(where) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) { known = true; break; }
    if (!known)
      config_fail(std::string(where) + ": unknown key \"" + it.key() + "\"");
  }
}

json sub_object(const json& cfg, const char* key) {
  if (!cfg.contains(key)) return json::object();
  if (!cfg.at(key).is_object())
    config_fail(std::string(key) + ": expected an object");
  return cfg.at(key);
}

double jnum(const json& j, const char* key, double def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number()) config_fail(std::string(key) + ": expected a number");
  return v.get<double>();
}

long long jint(const json& j, const char* key, long long def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    config_fail(std::string(key) + ": expected an integer");
  return v.get<long long>();
}

uint64_t juint(const json& j, const char* key, uint64_t def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    config_fail(std::string(key) + ": expected a nonnegative integer");
  return v.get<uint64_t>();
}

bool jbool(const json& j, const char* key, bool def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_boolean()) config_fail(std::string(key) + ": expected a boolean");
  return v.get<bool>();
}

std::string jstr(const json& j, const char* key, const std::string& def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_string()) config_fail(std::string(key) + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> jvecd(const json& j, const char* key,
                          std::vector<double> def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_array() || v.empty())
    config_fail(std::string(key) + ": expected a non-empty array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number())
      config_fail(std::string(key) + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<long long> jveci(const json& j, const char* key,
                             std::vector<long long> def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_array() || v.empty())
    config_fail(std::string(key) + ": expected a non-empty array");
  std::vector<long long> out;
  for (const json& e : v) {
    if (!e.is_number_integer())
      config_fail(std::string(key) + ": expected integers");
    out.push_back(e.get<long long>());
  }
  return out;
}

// full-string numeric parse for CSV inputs
bool parse_num(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

// --- domain-struct parsers ---

TransmitterStrategy parse_transmitter(const json& j, const char* where,
                                      const TransmitterStrategy& def) {
  check_keys(j, where, {"alpha", "beta", "gamma", "theta"});
  TransmitterStrategy r = def;
  r.alpha = jnum(j, "alpha", def.alpha);
  r.beta = jnum(j, "beta", def.beta);
  r.gamma = jnum(j, "gamma", def.gamma);
  r.theta = jnum(j, "theta", def.theta);
  Validity v = validate_strategy(r);
  if (!v.ok) config_fail(std::string(where) + ": " + v.reason);
  return r;
}

ReceiverStrategy parse_receiver(const json& j, const char* where) {
  check_keys(j, where,
             {"a0", "a1", "p0", "p_ct", "p_cf", "p_nt", "p_nf", "memory_len"});
  ReceiverStrategy q;
  q.a0 = jnum(j, "a0", 0);
  q.a1 = jnum(j, "a1", 0);
  q.p0 = jnum(j, "p0", 0);
  q.p_ct = jnum(j, "p_ct", 0);
  q.p_cf = jnum(j, "p_cf", 0);
  q.p_nt = jnum(j, "p_nt", 0);
  q.p_nf = jnum(j, "p_nf", 0);
  q.memory_len = int(jint(j, "memory_len", 1));
  Validity v = validate_receiver(q);
  if (!v.ok) config_fail(std::string(where) + ": " + v.reason);
  return q;
}

PayoffConfig parse_payoffs(const json& j) {
  check_keys(j, "payoffs", {"B", "C", "b_t", "b_f", "receiver_prefers"});
  PayoffConfig pc;
  pc.B = jnum(j, "B", pc.B);
  pc.C = jnum(j, "C", pc.C);
  pc.b_t = jnum(j, "b_t", pc.b_t);
  pc.b_f = jnum(j, "b_f", pc.b_f);
  std::string pref = jstr(j, "receiver_prefers", "truth");
  if (pref == "truth") pc.receiver_prefers = Preference::Truth;
  else if (pref == "falsehood") pc.receiver_prefers = Preference::Falsehood;
  else config_fail("receiver_prefers: expected \"truth\" or \"falsehood\"");
  return pc;
}

SimConfig parse_sim(const json& j, uint64_t seed) {
  check_keys(j, "sim", {"epsilon", "rounds", "burn_in"});
  SimConfig cfg;
  cfg.epsilon = jnum(j, "epsilon", cfg.epsilon);
  cfg.rounds = jint(j, "rounds", cfg.rounds);
  cfg.burn_in = jint(j, "burn_in", cfg.burn_in);
  cfg.seed = seed;
  Validity v = validate_sim(cfg);
  if (!v.ok) config_fail("sim: " + v.reason);
  return cfg;
}

OptimizerConfig parse_optimizer(const json& j) {
  check_keys(j, "optimizer",
             {"sigma", "delta_max", "burn_in_events", "measure_events"});
  OptimizerConfig oc;
  oc.sigma = jnum(j, "sigma", oc.sigma);
  oc.delta_max = jnum(j, "delta_max", oc.delta_max);
  oc.burn_in_events = jint(j, "burn_in_events", oc.burn_in_events);
  oc.measure_events = jint(j, "measure_events", oc.measure_events);
  return oc;
}

// --- output plumbing ---

json num_or_null(double x) { return std::isnan(x) ? json() : json(x); }

json transmitter_json(const TransmitterStrategy& r) {
  json j;
  j["alpha"] = r.alpha;
  j["beta"] = r.beta;
  j["gamma"] = r.gamma;
  j["theta"] = r.theta;
  return j;
}

json receiver_json(const ReceiverStrategy& q) {
  json j;
  j["a0"] = q.a0;
  j["a1"] = q.a1;
  j["p0"] = q.p0;
  j["p_ct"] = q.p_ct;
  j["p_cf"] = q.p_cf;
  j["p_nt"] = q.p_nt;
  j["p_nf"] = q.p_nf;
  j["memory_len"] = q.memory_len;
  return j;
}

void fill_cells(json& j, const Stationary& v) {
  j["v_tc"] = v.v_tc;
  j["v_tn"] = v.v_tn;
  j["v_fc"] = v.v_fc;
  j["v_fn"] = v.v_fn;
  j["v_t"] = v.v_t();
  j["v_f"] = v.v_f();
  j["v_c"] = v.v_c();
}

// Where outputs go; every file carries the config hash and tool version so a
// result can always be traced back to the exact run that produced it (CSV via
// the comment line, JSON via the meta object).
struct Sink {
  std::string out_dir, cmd, hash;

  json meta() const {
    json m;
    m["command"] = cmd;
    m["config_hash"] = hash;
    m["version"] = kToolVersion;
    return m;
  }
  json summary(const json& cfg) const {
    json j;
    j["meta"] = meta();
    j["config"] = cfg;
    return j;
  }
  void file(const std::string& name, const std::string& content) const {
    std::filesystem::create_directories(out_dir);
    write_file((std::filesystem::path(out_dir) / name).string(), content);
  }
  void file(const std::string& name, const json& j) const {
    file(name, j.dump(2) + "\n");
  }
};

// --- presets (canned recipes, one per headline experiment) ---

json preset_config(const std::string& cmd, const std::string& name) {
  auto owned_by = [&](const char* owner) {
    if (cmd != owner)
      config_fail("preset \"" + name + "\" belongs to the \"" + owner +
                  "\" command");
  };
  if (name == "sweep-misinfo") {
    owned_by("sweep");
    return json::parse(R"({
      "n": 10000, "seed": 1, "workers": 8, "delta": 0.05,
      "optimizer": {"sigma": 1.0, "delta_max": 0.05,
                    "burn_in_events": 10000, "measure_events": 10000},
      "sim": {"epsilon": 0.001},
      "payoffs": {"B": 2.0, "C": 1.0},
      "receiver": {"a0": 0.0, "a1": 0.0},
      "filters": {"engagement_percentile": 90.0, "share_threshold": 0.5,
                  "thresholds": [0.3, 0.4, 0.5, 0.6, 0.7]}
    })");
  }
  if (name == "coopt-baseline" || name == "coopt-attentive") {
    owned_by("coopt");
    json cfg = json::parse(R"({
      "assumption": "prefers_fake", "replicates": 10000, "seed": 1,
      "coopt": {"sigma_receiver": 1.0, "sigma_transmitter": 100.0,
                "delta_max": 0.05, "pairs": 1000, "record_every": 10,
                "tail_fraction": 0.25},
      "receiver": {"a0": 0.0, "a1": 0.2},
      "payoffs": {"B": 2.0, "C": 1.0, "b_t": 1.0, "b_f": 1.0},
      "sim": {"epsilon": 0.001}
    })");
    if (name == "coopt-attentive") cfg["receiver"]["a0"] = 0.9;
    return cfg;
  }
  if (name == "micro-split") {
    owned_by("micro");
    return json::parse(R"({
      "transmitter": {"alpha": 0.9, "beta": 0.9, "gamma": -0.9, "theta": -0.9},
      "groups": [1, 32], "seed": 1,
      "micro": {"sigma": 1.0, "delta_max": 0.05,
                "burn_in_events": 10000, "measure_events": 10000},
      "payoffs": {"B": 2.0, "C": 1.0},
      "sim": {"epsilon": 0.001, "rounds": 10000}
    })");
  }
  if (name == "compete-scale") {
    owned_by("compete");
    return json::parse(R"({
      "fake": {"alpha": 0.0, "beta": 0.0, "gamma": 0.0, "theta": 0.0},
      "mainstream": {"alpha": 1.0, "beta": 1.0, "gamma": 0.0, "theta": 0.0},
      "n_values": [1, 2, 4, 8, 16], "n_fake": 1, "seed": 1,
      "compete": {"sigma": 1.0, "delta_max": 0.05,
                  "burn_in_events": 10000, "measure_events": 10000},
      "payoffs": {"B": 2.0, "C": 1.0},
      "sim": {"epsilon": 0.001}
    })");
  }
  if (name == "attention-grid") {
    owned_by("optimize");
    return json::parse(R"({
      "transmitter": {"alpha": 0.9, "beta": 0.9, "gamma": -0.9, "theta": -0.9},
      "grid": {"a0": [0.0, 0.3, 0.6, 0.9], "sigma": [0.1, 1.0, 10.0]},
      "seed": 1,
      "optimizer": {"sigma": 1.0, "delta_max": 0.05,
                    "burn_in_events": 10000, "measure_events": 10000},
      "receiver": {"a0": 0.0, "a1": 1.0},
      "payoffs": {"B": 2.0, "C": 1.0},
      "sim": {"epsilon": 0.001}
    })");
  }
  config_fail("unknown preset \"" + name + "\"");
}

// --- commands ---

void cmd_stationary(const json& cfg, const Sink& sink) {
  check_keys(cfg, "config",
             {"transmitter", "receiver", "receivers", "group_size", "sim",
              "seed", "workers"});
  uint64_t seed = juint(cfg, "seed", 0);
  TransmitterStrategy r =
      parse_transmitter(sub_object(cfg, "transmitter"), "transmitter", kTruthful);
  SimConfig sim = parse_sim(sub_object(cfg, "sim"), seed);

  std::vector<ReceiverStrategy> qs;
  if (cfg.contains("receivers")) {
    const json& arr = cfg.at("receivers");
    if (!arr.is_array() || arr.empty())
      config_fail("receivers: expected a non-empty array");
    for (const json& e : arr) qs.push_back(parse_receiver(e, "receivers"));
    long long declared = jint(cfg, "group_size", (long long)qs.size());
    if (declared != (long long)qs.size())
      config_fail("group_size disagrees with the receivers array length");
  } else {
    long long n = jint(cfg, "group_size", 1);
    if (n < 1) config_fail("group_size must be >= 1");
    qs.assign(size_t(n), parse_receiver(sub_object(cfg, "receiver"), "receiver"));
  }

  Stationary v;
  if (qs.size() == 1 && qs[0].memory_len == 1)
    v = exact_stationary_single(r, qs[0], sim);
  else
    v = simulate_group(r, qs, sim);

  json out = sink.summary(cfg);
  fill_cells(out, v);
  out["group_size"] = v.group_size;
  sink.file("stationary.json", out);

  if (!v.mass_true.empty()) {
    CsvWriter csv(sink.hash, {"k", "type", "mass"});
    for (size_t k = 0; k < v.mass_true.size(); ++k) {
      csv.add_row({std::to_string(k), "true", format_double(v.mass_true[k])});
      csv.add_row({std::to_string(k), "fake", format_double(v.mass_fake[k])});
    }
    sink.file("stationary_mass.csv", csv.str());
  }
}

void cmd_classify(const json& cfg, const Sink& sink, const std::string& input) {
  check_keys(cfg, "config", {"input", "delta", "seed", "workers"});
  double delta = jnum(cfg, "delta", 0.05);
  if (!(delta >= 0)) config_fail("delta must be >= 0");
  std::string path = input.empty() ? jstr(cfg, "input", "") : input;
  if (path.empty())
    config_fail("classify needs an input CSV (positional argument or "
                "\"input\" in the config)");

  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
  std::vector<std::vector<std::string>> rows;
  try {
    rows = parse_csv(text);
  } catch (const std::runtime_error& e) {
    throw DataError(path + ": " + e.what());
  }

  CsvWriter csv(sink.hash,
                {"alpha", "beta", "gamma", "theta", "coercion", "extortion",
                 "delta_extortion", "kappa", "lambda", "chi"});
  long long kept = 0, skipped = 0;
  if (!rows.empty()) {
    const std::vector<std::string>& header = rows[0];
    auto col = [&](const char* name) {
      for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return (long long)i;
      return -1ll;
    };
    long long ca = col("alpha"), cb = col("beta"), cg = col("gamma"),
              ct = col("theta");
    if (ca < 0 || cb < 0 || cg < 0 || ct < 0)
      throw DataError(path + ": header must name columns alpha,beta,gamma,theta");
    size_t need = size_t(std::max({ca, cb, cg, ct})) + 1;
    for (size_t i = 1; i < rows.size(); ++i) {
      const std::vector<std::string>& row = rows[i];
      TransmitterStrategy r;
      bool ok = row.size() >= need && parse_num(row[size_t(ca)], r.alpha) &&
                parse_num(row[size_t(cb)], r.beta) &&
                parse_num(row[size_t(cg)], r.gamma) &&
                parse_num(row[size_t(ct)], r.theta);
      std::string reason = ok ? "" : "malformed numeric fields";
      if (ok) {
        Validity val = validate_strategy(r);
        if (!val.ok) { ok = false; reason = val.reason; }
      }
      if (!ok) {
        std::cerr << "classify: skipping row " << i + 1 << ": " << reason
                  << "\n";
        ++skipped;
        continue;
      }
      StrategyClass cls = classify(r, delta);
      double kappa = cls.params ? cls.params->kappa
                                : std::numeric_limits<double>::quiet_NaN();
      double lambda = cls.params ? cls.params->lambda
                                 : std::numeric_limits<double>::quiet_NaN();
      double chi = cls.params ? cls.params->chi
                              : std::numeric_limits<double>::quiet_NaN();
      csv.add_row({format_double(r.alpha), format_double(r.beta),
                   format_double(r.gamma), format_double(r.theta),
                   to_string(cls.coercion), to_string(cls.extortion),
                   to_string(cls.delta_extortion), format_double(kappa),
                   format_double(lambda), format_double(chi)});
      ++kept;
    }
  }
  sink.file("classify.csv", csv.str());
  if (skipped > 0)
    std::cerr << "classify: kept " << kept << " rows, skipped " << skipped
              << "\n";
}

void cmd_optimize(const json& cfg, const Sink& sink) {
  check_keys(cfg, "config",
             {"transmitter", "receiver", "payoffs", "optimizer", "sim", "seed",
              "workers", "grid"});
  uint64_t seed = juint(cfg, "seed", 0);
  TransmitterStrategy r =
      parse_transmitter(sub_object(cfg, "transmitter"), "transmitter", kTruthful);
  ReceiverStrategy q0 = parse_receiver(sub_object(cfg, "receiver"), "receiver");
  PayoffConfig pc = parse_payoffs(sub_object(cfg, "payoffs"));
  OptimizerConfig oc = parse_optimizer(sub_object(cfg, "optimizer"));
  SimConfig sim = parse_sim(sub_object(cfg, "sim"), seed);

  if (!cfg.contains("grid")) {
    OptimizeResult res = optimize_receiver(r, q0, pc, oc, sim, seed);
    json out = sink.summary(cfg);
    fill_cells(out, res.mean);
    out["engagement_true"] = num_or_null(res.engagement_true);
    out["engagement_false"] = num_or_null(res.engagement_false);
    out["receiver_payoff"] = res.receiver_payoff_mean;
    out["transmitter_payoff"] = transmitter_payoff(res.mean, pc);
    out["acceptance_rate"] = res.acceptance_rate;
    out["final_receiver"] = receiver_json(res.final_strategy);
    sink.file("optimize.json", out);
    return;
  }

  json grid = sub_object(cfg, "grid");
  check_keys(grid, "grid", {"a0", "sigma"});
  std::vector<double> a0s = jvecd(grid, "a0", {q0.a0});
  std::vector<double> sigmas = jvecd(grid, "sigma", {oc.sigma});
  CsvWriter csv(sink.hash,
                {"a0", "sigma", "engagement_true", "engagement_false",
                 "consumption", "receiver_payoff", "transmitter_payoff",
                 "acceptance_rate"});
  uint64_t idx = 0;
  for (double a0 : a0s) {
    for (double sigma : sigmas) {
      ReceiverStrategy q = q0;
      q.a0 = a0;
      Validity vq = validate_receiver(q);
      if (!vq.ok) config_fail("grid.a0: " + vq.reason);
      OptimizerConfig o = oc;
      o.sigma = sigma;
      OptimizeResult res =
          optimize_receiver(r, q, pc, o, sim, mix_seed(seed, idx++));
      csv.add_row({format_double(a0), format_double(sigma),
                   format_double(res.engagement_true),
                   format_double(res.engagement_false),
                   format_double(res.mean.v_c()),
                   format_double(res.receiver_payoff_mean),
                   format_double(transmitter_payoff(res.mean, pc)),
                   format_double(res.acceptance_rate)});
    }
  }
  sink.file("optimize_grid.csv", csv.str());
  json out = sink.summary(cfg);
  out["grid_rows"] = (long long)(a0s.size() * sigmas.size());
  sink.file("optimize.json", out);
}

json enrichment_json(const Enrichment& e) {
  json j;
  j["successful_n"] = e.successful_n;
  j["successful_extortioners"] = e.successful_extortioners;
  j["successful_rate"] = e.successful_rate;
  j["null_rate"] = e.null_rate;
  j["p_value"] = e.p_value;
  return j;
}

void cmd_sweep(const json& cfg, const Sink& sink) {
  check_keys(cfg, "config",
             {"n", "seed", "workers", "optimizer", "sim", "payoffs", "receiver",
              "delta", "filters"});
  SweepConfig sc;
  sc.n = jint(cfg, "n", 1000);
  sc.master_seed = juint(cfg, "seed", 0);
  sc.workers = int(jint(cfg, "workers", 1));
  sc.opt = parse_optimizer(sub_object(cfg, "optimizer"));
  sc.sim = parse_sim(sub_object(cfg, "sim"), 0);
  sc.payoffs = parse_payoffs(sub_object(cfg, "payoffs"));
  sc.q0 = parse_receiver(sub_object(cfg, "receiver"), "receiver");
  sc.delta = jnum(cfg, "delta", 0.05);

  json filters = sub_object(cfg, "filters");
  check_keys(filters, "filters",
             {"engagement_percentile", "share_threshold", "thresholds"});
  double pct = jnum(filters, "engagement_percentile", 90.0);
  double share = jnum(filters, "share_threshold", 0.5);
  std::vector<double> thresholds =
      jvecd(filters, "thresholds", {0.3, 0.4, 0.5, 0.6, 0.7});

  std::vector<SweepRecord> records = run_sweep(sc);

  CsvWriter csv(sink.hash,
                {"index", "sample_seed", "alpha", "beta", "gamma", "theta",
                 "v_t", "v_f", "v_tc", "v_fc", "engagement_true",
                 "engagement_false", "receiver_payoff", "transmitter_payoff",
                 "coercion", "extortion", "delta_extortion", "kappa", "lambda",
                 "chi"});
  for (const SweepRecord& rec : records) {
    csv.add_row({std::to_string(rec.index), std::to_string(rec.sample_seed),
                 format_double(rec.r.alpha), format_double(rec.r.beta),
                 format_double(rec.r.gamma), format_double(rec.r.theta),
                 format_double(rec.v_t), format_double(rec.v_f),
                 format_double(rec.v_tc), format_double(rec.v_fc),
                 format_double(rec.engagement_true),
                 format_double(rec.engagement_false),
                 format_double(rec.receiver_payoff),
                 format_double(rec.transmitter_payoff),
                 to_string(rec.coercion), to_string(rec.extortion),
                 to_string(rec.delta_extortion), format_double(rec.kappa),
                 format_double(rec.lambda), format_double(rec.chi)});
  }
  sink.file("sweep.csv", csv.str());

  json out = sink.summary(cfg);
  out["n"] = (long long)records.size();
  for (SiteKind kind : {SiteKind::Misinformation, SiteKind::Mainstream}) {
    std::vector<size_t> sel = successful_filter(records, kind, pct, share);
    double esum = 0, csum = 0;
    long long edef = 0;
    for (size_t i : sel) {
      const SweepRecord& rec = records[i];
      if (!std::isnan(rec.engagement_true) &&
          !std::isnan(rec.engagement_false)) {
        esum += rec.engagement_true - rec.engagement_false;
        ++edef;
      }
      csum += rec.v_tc - rec.v_fc;
    }
    json block;
    block["successful_n"] = (long long)sel.size();
    block["mean_engagement_diff"] =
        num_or_null(edef > 0 ? esum / double(edef)
                             : std::numeric_limits<double>::quiet_NaN());
    block["mean_consumption_diff"] =
        num_or_null(!sel.empty() ? csum / double(sel.size())
                                 : std::numeric_limits<double>::quiet_NaN());
    block["enrichment"] =
        enrichment_json(extortion_prevalence(records, kind, pct, share));
    json sens = json::array();
    for (const ThresholdPoint& pt :
         threshold_sensitivity(records, kind, thresholds, pct)) {
      json p;
      p["threshold"] = pt.threshold;
      p["n"] = pt.n;
      p["mean_engagement_diff"] = num_or_null(pt.mean_engagement_diff);
      p["mean_consumption_diff"] = num_or_null(pt.mean_consumption_diff);
      sens.push_back(p);
    }
    block["threshold_sensitivity"] = sens;
    out[kind == SiteKind::Misinformation ? "misinformation" : "mainstream"] =
        block;
  }
  sink.file("sweep_summary.json", out);
}

void cmd_coopt(const json& cfg, const Sink& sink) {
  check_keys(cfg, "config",
             {"assumption", "transmitter0", "receiver", "payoffs", "coopt",
              "sim", "seed", "workers", "replicates"});
  uint64_t seed = juint(cfg, "seed", 0);
  long long replicates = jint(cfg, "replicates", 100);
  if (replicates < 1) config_fail("replicates must be >= 1");

  std::string a = jstr(cfg, "assumption", "prefers_fake");
  CoOptConfig cc;
  if (a == "prefers_fake") cc.assumption = Assumption::PrefersFake;
  else if (a == "prefers_true") cc.assumption = Assumption::PrefersTrue;
  else if (a == "none") cc.assumption = Assumption::None;
  else
    config_fail("assumption: expected \"prefers_fake\", \"prefers_true\" or "
                "\"none\"");

  json cj = sub_object(cfg, "coopt");
  check_keys(cj, "coopt",
             {"sigma_receiver", "sigma_transmitter", "delta_max", "pairs",
              "record_every", "tail_fraction"});
  cc.sigma_receiver = jnum(cj, "sigma_receiver", cc.sigma_receiver);
  cc.sigma_transmitter = jnum(cj, "sigma_transmitter", cc.sigma_transmitter);
  cc.delta_max = jnum(cj, "delta_max", cc.delta_max);
  cc.pairs = jint(cj, "pairs", cc.pairs);
  cc.record_every = jint(cj, "record_every", cc.record_every);
  cc.tail_fraction = jnum(cj, "tail_fraction", cc.tail_fraction);

  TransmitterStrategy r0 = parse_transmitter(sub_object(cfg, "transmitter0"),
                                             "transmitter0", kTruthful);
  ReceiverStrategy q0 = parse_receiver(sub_object(cfg, "receiver"), "receiver");
  PayoffConfig pc = parse_payoffs(sub_object(cfg, "payoffs"));
  SimConfig sim = parse_sim(sub_object(cfg, "sim"), 0);

  CoOptEnsemble ens =
      co_optimize_ensemble(r0, q0, pc, cc, sim, seed, replicates);

  CsvWriter csv(sink.hash, {"pair", "engagement_diff_pct", "consumption"});
  for (size_t i = 0; i < ens.pair.size(); ++i)
    csv.add_row({std::to_string(ens.pair[i]), format_double(ens.diff_pct[i]),
                 format_double(ens.consumption[i])});
  sink.file("coopt.csv", csv.str());

  json out = sink.summary(cfg);
  out["replicates"] = ens.replicates;
  out["points"] = (long long)ens.pair.size();
  out["long_run_diff_pct"] = num_or_null(ens.long_run_diff_pct);
  out["long_run_consumption"] = num_or_null(ens.long_run_consumption);
  sink.file("coopt_summary.json", out);
}

void cmd_micro(const json& cfg, const Sink& sink) {
  check_keys(cfg, "config",
             {"transmitter", "receiver", "payoffs", "micro", "sim", "seed",
              "workers", "groups"});
  uint64_t seed = juint(cfg, "seed", 0);
  TransmitterStrategy r =
      parse_transmitter(sub_object(cfg, "transmitter"), "transmitter", kTruthful);
  ReceiverStrategy q0 = parse_receiver(sub_object(cfg, "receiver"), "receiver");
  PayoffConfig pc = parse_payoffs(sub_object(cfg, "payoffs"));
  SimConfig sim = parse_sim(sub_object(cfg, "sim"), 0);

  json mj = sub_object(cfg, "micro");
  check_keys(mj, "micro",
             {"sigma", "delta_max", "burn_in_events", "measure_events"});
  MicroConfig mc;
  mc.sigma = jnum(mj, "sigma", mc.sigma);
  mc.delta_max = jnum(mj, "delta_max", mc.delta_max);
  mc.burn_in_events = jint(mj, "burn_in_events", mc.burn_in_events);
  mc.measure_events = jint(mj, "measure_events", mc.measure_events);

  std::vector<long long> groups = jveci(cfg, "groups", {1});
  for (long long g : groups)
    if (g < 1) config_fail("groups: entries must be >= 1");

  CsvWriter csv(sink.hash,
                {"groups", "engagement_true", "engagement_false",
                 "engagement_diff", "consumption"});
  json rows = json::array();
  uint64_t idx = 0;
  for (long long g : groups) {
    mc.groups = int(g);
    MicroResult res =
        microtargeting_run(r, q0, pc, mc, sim, mix_seed(seed, idx++));
    double diff = res.engagement_true - res.engagement_false;
    csv.add_row({std::to_string(g), format_double(res.engagement_true),
                 format_double(res.engagement_false), format_double(diff),
                 format_double(res.consumption)});
    json row;
    row["groups"] = g;
    row["engagement_true"] = num_or_null(res.engagement_true);
    row["engagement_false"] = num_or_null(res.engagement_false);
    row["engagement_diff"] = num_or_null(diff);
    row["consumption"] = num_or_null(res.consumption);
    rows.push_back(row);
  }
  sink.file("micro.csv", csv.str());
  json out = sink.summary(cfg);
  out["rows"] = rows;
  sink.file("micro_summary.json", out);
}

void cmd_compete(const json& cfg, const Sink& sink) {
  check_keys(cfg, "config",
             {"fake", "mainstream", "receiver", "payoffs", "compete", "sim",
              "seed", "workers", "n_values", "n_fake"});
  uint64_t seed = juint(cfg, "seed", 0);
  TransmitterStrategy fake =
      parse_transmitter(sub_object(cfg, "fake"), "fake", kFabricating);
  TransmitterStrategy mainstream =
      parse_transmitter(sub_object(cfg, "mainstream"), "mainstream", kTruthful);
  ReceiverStrategy q0 = parse_receiver(sub_object(cfg, "receiver"), "receiver");
  PayoffConfig pc = parse_payoffs(sub_object(cfg, "payoffs"));
  SimConfig sim = parse_sim(sub_object(cfg, "sim"), 0);

  json kj = sub_object(cfg, "compete");
  check_keys(kj, "compete",
             {"sigma", "delta_max", "burn_in_events", "measure_events"});
  CompeteConfig cc;
  cc.sigma = jnum(kj, "sigma", cc.sigma);
  cc.delta_max = jnum(kj, "delta_max", cc.delta_max);
  cc.burn_in_events = jint(kj, "burn_in_events", cc.burn_in_events);
  cc.measure_events = jint(kj, "measure_events", cc.measure_events);
  cc.n_fake = int(jint(cfg, "n_fake", 1));

  std::vector<long long> n_values = jveci(cfg, "n_values", {2});
  for (long long n : n_values) {
    if (n < 1) config_fail("n_values: entries must be >= 1");
    if (cc.n_fake < 0 || cc.n_fake > n)
      config_fail("n_fake must lie in [0, n] for every entry of n_values");
  }

  CsvWriter csv(sink.hash,
                {"n_transmitters", "n_fake", "fake_source_engagement",
                 "fake_news_consumption", "mainstream_engagement",
                 "total_consumption"});
  json rows = json::array();
  uint64_t idx = 0;
  for (long long n : n_values) {
    cc.n_transmitters = int(n);
    CompeteResult res = competition_run(fake, mainstream, q0, pc, cc, sim,
                                        mix_seed(seed, idx++));
    csv.add_row({std::to_string(n), std::to_string(cc.n_fake),
                 format_double(res.fake_source_engagement),
                 format_double(res.fake_news_consumption),
                 format_double(res.mainstream_engagement),
                 format_double(res.total_consumption)});
    json row;
    row["n_transmitters"] = n;
    row["n_fake"] = cc.n_fake;
    row["fake_source_engagement"] = res.fake_source_engagement;
    row["fake_news_consumption"] = res.fake_news_consumption;
    row["mainstream_engagement"] = res.mainstream_engagement;
    row["total_consumption"] = res.total_consumption;
    rows.push_back(row);
  }
  sink.file("compete.csv", csv.str());
  json out = sink.summary(cfg);
  out["rows"] = rows;
  sink.file("compete_summary.json", out);
}

const char* transform_name(Transform t) {
  switch (t) {
    case Transform::RawLog10: return "raw_log10";
    case Transform::Standardized: return "standardized";
    default: return "rank";
  }
}

void cmd_meta(const json& cfg, const Sink& sink, const std::string& input) {
  check_keys(cfg, "config",
             {"input", "transforms", "log1p", "trust", "min_articles", "seed",
              "workers"});
  std::string path = input.empty() ? jstr(cfg, "input", "") : input;
  if (path.empty())
    config_fail("meta needs an input CSV (positional argument or \"input\" in "
                "the config)");
  bool log1p = jbool(cfg, "log1p", false);

  std::vector<Transform> transforms;
  if (cfg.contains("transforms")) {
    const json& arr = cfg.at("transforms");
    if (!arr.is_array() || arr.empty())
      config_fail("transforms: expected a non-empty array");
    for (const json& e : arr) {
      if (!e.is_string()) config_fail("transforms: expected strings");
      std::string s = e.get<std::string>();
      if (s == "raw_log10") transforms.push_back(Transform::RawLog10);
      else if (s == "standardized") transforms.push_back(Transform::Standardized);
      else if (s == "rank") transforms.push_back(Transform::Rank);
      else config_fail("transforms: unknown transform \"" + s + "\"");
    }
  } else {
    transforms = {Transform::RawLog10, Transform::Standardized, Transform::Rank};
  }

  Dataset ds;
  try {
    ds = ingest_csv(path);
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }

  // one study per site; std::map keeps the report order stable
  struct Site {
    SiteClass cls = SiteClass::Mainstream;
    std::vector<double> accuracy, engagement;
  };
  std::map<std::string, Site> sites;
  std::vector<std::string> diagnostics = ds.diagnostics;
  for (const Article& art : ds.articles) {
    auto [it, fresh] = sites.try_emplace(art.site_id);
    if (fresh) it->second.cls = art.site_class;
    else if (it->second.cls != art.site_class)
      diagnostics.push_back("site " + art.site_id +
                            ": mixed classes, keeping the first");
    it->second.accuracy.push_back(art.accuracy);
    it->second.engagement.push_back(art.engagement);
  }

  CsvWriter csv(sink.hash,
                {"site_id", "site_class", "transform", "n_articles", "slope",
                 "intercept", "stderr_slope", "t", "p_one_tailed",
                 "p_two_tailed", "r2", "n_used", "n_dropped"});
  json groups = json::object();
  for (Transform tf : transforms) {
    json per_class = json::object();
    for (SiteClass cls : {SiteClass::Mainstream, SiteClass::Fake}) {
      const char* cls_name = cls == SiteClass::Mainstream ? "mainstream" : "fake";
      // the hypothesis is directional: mainstream engagement rises with
      // accuracy, misinformation engagement falls with it
      Tail tail = cls == SiteClass::Mainstream ? Tail::Positive : Tail::Negative;
      std::vector<double> pvals, effects, variances;
      for (const auto& [id, site] : sites) {
        if (site.cls != cls) continue;
        Regression reg;
        try {
          reg = site_regression(site.accuracy, site.engagement, tf, tail, log1p);
        } catch (const std::invalid_argument& e) {
          diagnostics.push_back("site " + id + " (" + transform_name(tf) +
                                "): " + e.what());
          continue;
        }
        csv.add_row({id, cls_name, transform_name(tf),
                     std::to_string(site.accuracy.size()),
                     format_double(reg.slope), format_double(reg.intercept),
                     format_double(reg.stderr_slope), format_double(reg.t),
                     format_double(reg.p_one_tailed),
                     format_double(reg.p_two_tailed), format_double(reg.r2),
                     std::to_string(reg.n_used),
                     std::to_string(reg.n_dropped)});
        // a perfectly collinear site underflows the tail probability; keep it
        // in the combination at the smallest representable p
        pvals.push_back(reg.p_one_tailed > 0
                            ? reg.p_one_tailed
                            : std::numeric_limits<double>::denorm_min());
        if (reg.stderr_slope > 0) {
          effects.push_back(reg.slope);
          variances.push_back(reg.stderr_slope * reg.stderr_slope);
        } else {
          diagnostics.push_back("site " + id + " (" + transform_name(tf) +
                                "): zero slope stderr, excluded from pooling");
        }
      }
      json block;
      block["k"] = (long long)pvals.size();
      if (!pvals.empty()) {
        FisherResult f = fisher_combined(pvals);
        json fj;
        fj["statistic"] = f.statistic;
        fj["df"] = f.df;
        fj["p"] = f.p;
        block["fisher"] = fj;
      } else {
        block["fisher"] = json();
      }
      if (effects.size() >= 2) {
        MetaResult m = dersimonian_laird(effects, variances);
        json mj;
        mj["mu"] = m.mu;
        mj["se"] = m.se;
        mj["tau2"] = m.tau2;
        mj["q"] = m.q;
        mj["i2"] = m.i2;
        mj["p_mu"] = m.p_mu;
        mj["p_q"] = m.p_q;
        mj["k"] = m.k;
        block["random_effects"] = mj;
      } else {
        block["random_effects"] = json();
      }
      per_class[cls_name] = block;
    }
    groups[transform_name(tf)] = per_class;
  }
  sink.file("meta_sites.csv", csv.str());

  json out = sink.summary(cfg);
  out["articles"] = (long long)ds.articles.size();
  out["skipped_rows"] = ds.skipped_rows;
  out["sites"] = (long long)sites.size();
  out["groups"] = groups;
  out["diagnostics"] = diagnostics;

  std::string trust_path = jstr(cfg, "trust", "");
  if (!trust_path.empty()) {
    std::string text;
    try {
      text = read_file(trust_path);
    } catch (const std::runtime_error& e) {
      throw DataError(e.what());
    }
    std::vector<std::vector<std::string>> rows;
    try {
      rows = parse_csv(text);
    } catch (const std::runtime_error& e) {
      throw DataError(trust_path + ": " + e.what());
    }
    if (rows.empty())
      throw DataError(trust_path + ": expected a header row site_id,trust");
    long long ci = -1, ct = -1;
    for (size_t i = 0; i < rows[0].size(); ++i) {
      if (rows[0][i] == "site_id") ci = (long long)i;
      if (rows[0][i] == "trust") ct = (long long)i;
    }
    if (ci < 0 || ct < 0)
      throw DataError(trust_path + ": header must name columns site_id,trust");
    std::map<std::string, double> trust;
    for (size_t i = 1; i < rows.size(); ++i) {
      double v;
      if (rows[i].size() <= size_t(std::max(ci, ct)) ||
          !parse_num(rows[i][size_t(ct)], v)) {
        diagnostics.push_back(trust_path + ": skipping row " +
                              std::to_string(i + 1));
        continue;
      }
      trust[rows[i][size_t(ci)]] = v;
    }
    std::vector<double> slopes, ratings;
    for (const auto& [id, site] : sites) {
      auto it = trust.find(id);
      if (it == trust.end()) continue;
      try {
        Regression reg = site_regression(site.accuracy, site.engagement,
                                         Transform::Standardized,
                                         site.cls == SiteClass::Mainstream
                                             ? Tail::Positive
                                             : Tail::Negative,
                                         log1p);
        slopes.push_back(reg.slope);
        ratings.push_back(it->second);
      } catch (const std::invalid_argument&) {
        continue;  // already reported above when the transform was requested
      }
    }
    TrustRegression tr;
    try {
      tr = trust_regression(slopes, ratings);
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("trust regression: ") + e.what());
    }
    json tj;
    tj["slope"] = tr.slope;
    tj["intercept"] = tr.intercept;
    tj["p_two_tailed"] = tr.p_two_tailed;
    tj["r2"] = tr.r2;
    tj["n"] = tr.n;
    out["trust_regression"] = tj;
    out["diagnostics"] = diagnostics;
  }
  sink.file("meta_summary.json", out);
}

// --- driver ---

json build_config(const std::string& cmd, const std::string& preset,
                  const std::string& config_path,
                  const std::optional<uint64_t>& seed,
                  const std::optional<int>& workers) {
  json cfg = preset.empty() ? json::object() : preset_config(cmd, preset);
  if (!config_path.empty()) {
    std::string text;
    try {
      text = read_file(config_path);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
    json file;
    try {
      file = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
    if (!file.is_object())
      throw ConfigError(config_path + ": top level must be an object");
    cfg.merge_patch(file);
  }
  // flags override both preset and file; they are part of the hashed config
  if (seed) cfg["seed"] = *seed;
  if (workers) cfg["workers"] = *workers;
  return cfg;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{
      "Evolutionary simulation and analysis of a repeated news-sharing game",
      "newsgame"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", preset, input;
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  auto add_common = [&](CLI::App* sub, bool with_input) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--preset", preset, "named configuration preset");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers,
                    "worker threads (overrides the config)");
    sub->add_option("--out", out_dir, "output directory")
        ->capture_default_str();
    if (with_input) sub->add_option("input", input, "input CSV file");
  };
  add_common(app.add_subcommand(
                 "stationary",
                 "stationary distribution of one transmitter/receiver matchup"),
             false);
  add_common(app.add_subcommand(
                 "classify", "coercion and extortion labels for strategies"),
             true);
  add_common(app.add_subcommand(
                 "optimize", "single receiver optimising against a fixed site"),
             false);
  add_common(app.add_subcommand(
                 "sweep", "random-strategy sweep with success filters"),
             false);
  add_common(app.add_subcommand(
                 "coopt", "co-evolving transmitter and receiver ensemble"),
             false);
  add_common(app.add_subcommand(
                 "micro", "one site splitting its audience into groups"),
             false);
  add_common(app.add_subcommand(
                 "compete", "one receiver following several competing sites"),
             false);
  add_common(app.add_subcommand(
                 "meta", "per-site regressions and pooled significance tests"),
             true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    json cfg = build_config(cmd, preset, config_path, seed, workers);
    Sink sink{out_dir, cmd, hash_hex(cmd + "\n" + cfg.dump())};
    if (cmd == "stationary") cmd_stationary(cfg, sink);
    else if (cmd == "classify") cmd_classify(cfg, sink, input);
    else if (cmd == "optimize") cmd_optimize(cfg, sink);
    else if (cmd == "sweep") cmd_sweep(cfg, sink);
    else if (cmd == "coopt") cmd_coopt(cfg, sink);
    else if (cmd == "micro") cmd_micro(cfg, sink);
    else if (cmd == "compete") cmd_compete(cfg, sink);
    else cmd_meta(cfg, sink, input);
    return 0;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace newsgame
