#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "newsgame/classify.hpp"
#include "newsgame/cli.hpp"
#include "newsgame/io.hpp"

using namespace newsgame;

TEST_CASE("format_double: shortest round-trip forms, empty for NaN") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "");

  // round trip through strtod is exact
  for (double x : {3.141592653589793, 1e-17, -7.25e88, 123456789.123456789}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("fnv1a and hash_hex are stable and input-sensitive") {
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 12638187200555641996ull);  // published FNV-1a vector
  CHECK(hash_hex("").size() == 16);
  CHECK(hash_hex("abc") != hash_hex("abd"));
  CHECK(hash_hex("config") == hash_hex("config"));
}

TEST_CASE("parse_csv: quoting, embedded separators, newline forms") {
  auto rows = parse_csv("a,b,c\n1,2,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});

  rows = parse_csv("\"x,y\",\"he said \"\"hi\"\"\",\"multi\nline\"\r\nlast,,\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "x,y");
  CHECK(rows[0][1] == "he said \"hi\"");
  CHECK(rows[0][2] == "multi\nline");
  CHECK(rows[1] == std::vector<std::string>{"last", "", ""});

  // no trailing newline; lone field; blank lines ignored
  CHECK(parse_csv("solo").size() == 1);
  CHECK(parse_csv("a\n\nb\n").size() == 2);
  CHECK(parse_csv("").empty());
  CHECK(parse_csv("\"\"\n")[0] == std::vector<std::string>{""});

  CHECK_THROWS_AS(parse_csv("\"unterminated"), std::runtime_error);
}

TEST_CASE("csv_escape mirrors the parser") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("with,comma") == "\"with,comma\"");
  CHECK(csv_escape("with \"quote\"") == "\"with \"\"quote\"\"\"");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");

  // escape -> parse is the identity on one-field rows
  for (std::string s : {"a,b", "\"\"", "x\ny", "plain", ""}) {
    std::string esc = csv_escape(s);
    if (esc.empty()) continue;  // the empty field round-trips via row shape
    auto rows = parse_csv(esc + "\n");
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].size() == 1);
    CHECK(rows[0][0] == s);
  }
}

TEST_CASE("CsvWriter: traceability header, width enforcement") {
  CsvWriter w("0123456789abcdef", {"x", "note"});
  w.add_row({"1", "plain"});
  w.add_row({"2.5", "a,b"});
  std::string text = w.str();
  CHECK(text ==
        "# config_hash=0123456789abcdef version=0.1.0\n"
        "x,note\n"
        "1,plain\n"
        "2.5,\"a,b\"\n");
  CHECK_THROWS_AS(w.add_row({"only-one"}), std::invalid_argument);

  // the body below the comment line parses back to header + rows
  auto rows = parse_csv(text.substr(text.find('\n') + 1));
  REQUIRE(rows.size() == 3);
  CHECK(rows[2][1] == "a,b");
}

TEST_CASE("read_file and write_file round-trip binary-ish content") {
  const char* path = "/tmp/newsgame_io_test.bin";
  std::string payload = "line1\nline2\r\nquote\" and, comma";
  write_file(path, payload);
  CHECK(read_file(path) == payload);
  std::remove(path);
  CHECK_THROWS_AS(read_file("/tmp/newsgame_definitely_missing"),
                  std::runtime_error);
}

// --- command-line driver (in-process, no spawning) ---

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// fresh scratch directory per test case
fs::path cli_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "newsgame_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json read_json(const fs::path& p) { return json::parse(read_file(p.string())); }

}  // namespace

TEST_CASE("cli: stationary run emits a traceable, reproducible summary") {
  fs::path dir = cli_dir("stationary");
  fs::path cfg = dir / "cfg.json";
  write_file(cfg.string(), R"({
    "transmitter": {"alpha": 1, "beta": 1, "gamma": 0, "theta": 0},
    "receiver": {"p0": 1, "p_ct": 1, "p_cf": 1, "p_nt": 1, "p_nf": 1},
    "sim": {"epsilon": 0}
  })");
  fs::path out = dir / "out";
  CHECK(cli_main({"stationary", "--config", cfg.string(), "--out",
                  out.string()}) == 0);
  json j = read_json(out / "stationary.json");
  CHECK(j["v_tc"].get<double>() == 1.0);
  CHECK(j["v_f"].get<double>() == 0.0);
  CHECK(j["meta"]["version"].get<std::string>() == kToolVersion);
  CHECK(j["meta"]["command"].get<std::string>() == "stationary");
  CHECK(j["meta"]["config_hash"].get<std::string>().size() == 16);
  CHECK(j["config"]["transmitter"]["alpha"].get<double>() == 1.0);

  fs::path out2 = dir / "out2";
  CHECK(cli_main({"stationary", "--config", cfg.string(), "--out",
                  out2.string()}) == 0);
  CHECK(read_file((out / "stationary.json").string()) ==
        read_file((out2 / "stationary.json").string()));
}

TEST_CASE("cli: stationary rejects an out-of-bounds strategy with exit 2") {
  fs::path dir = cli_dir("stationary_bad");
  fs::path cfg = dir / "cfg.json";
  write_file(cfg.string(),
             R"({"transmitter": {"alpha": 0.5, "beta": 0, "gamma": 0.9,
                                 "theta": 0}})");
  CHECK(cli_main({"stationary", "--config", cfg.string(), "--out",
                  (dir / "out").string()}) == 2);
}

TEST_CASE("cli: stationary group run tabulates all engagement counts") {
  fs::path dir = cli_dir("stationary_group");
  fs::path cfg = dir / "cfg.json";
  write_file(cfg.string(), R"({
    "transmitter": {"alpha": 0.6, "beta": 0.4, "gamma": 0.2, "theta": -0.1},
    "receiver": {"p0": 0.5, "p_ct": 0.5, "p_cf": 0.5, "p_nt": 0.5,
                 "p_nf": 0.5},
    "group_size": 5,
    "sim": {"epsilon": 0.001, "rounds": 2000},
    "seed": 7
  })");
  fs::path out = dir / "out";
  CHECK(cli_main({"stationary", "--config", cfg.string(), "--out",
                  out.string()}) == 0);
  auto rows = parse_csv(read_file((out / "stationary_mass.csv").string()));
  REQUIRE(rows.size() == 14);  // hash comment + header + 6 counts x 2 types
  CHECK(rows[1] == std::vector<std::string>{"k", "type", "mass"});
  double total = 0;
  for (size_t i = 2; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 3);
    total += std::stod(rows[i][2]);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cli: classify round-trips labels through file I/O") {
  fs::path dir = cli_dir("classify");
  fs::path in = dir / "strategies.csv";
  // fake extortioner, mainstream extortioner, fake-coercive, one broken row
  write_file(in.string(),
             "alpha,beta,gamma,theta\n"
             "0.5,0.3,0.1,-0.3\n"
             "0.6,0.2,0.4,0.3\n"
             "0.5,0.5,-0.3,-0.2\n"
             "0.5,not_a_number,0,0\n");
  fs::path out = dir / "out";
  CHECK(cli_main({"classify", in.string(), "--out", out.string()}) == 0);
  auto rows = parse_csv(read_file((out / "classify.csv").string()));
  REQUIRE(rows.size() == 5);  // comment + header + 3 kept rows
  const std::vector<TransmitterStrategy> fixtures{
      {0.5, 0.3, 0.1, -0.3}, {0.6, 0.2, 0.4, 0.3}, {0.5, 0.5, -0.3, -0.2}};
  for (size_t i = 0; i < fixtures.size(); ++i) {
    StrategyClass cls = classify(fixtures[i], 0.05);
    const std::vector<std::string>& row = rows[i + 2];
    REQUIRE(row.size() == 10);
    CHECK(row[4] == to_string(cls.coercion));
    CHECK(row[5] == to_string(cls.extortion));
    CHECK(row[6] == to_string(cls.delta_extortion));
    REQUIRE(cls.params.has_value());
    CHECK(std::stod(row[7]) == doctest::Approx(cls.params->kappa));
    CHECK(std::stod(row[8]) == doctest::Approx(cls.params->lambda));
    CHECK(std::stod(row[9]) == doctest::Approx(cls.params->chi));
  }
  CHECK(rows[2][5] == "fake-extortioner");
  CHECK(rows[3][5] == "mainstream-extortioner");
  CHECK(rows[4][4] == "fake-coercive");

  // an empty input still produces the header, a missing one is a data error
  fs::path empty = dir / "empty.csv";
  write_file(empty.string(), "");
  CHECK(cli_main({"classify", empty.string(), "--out", out.string()}) == 0);
  CHECK(parse_csv(read_file((out / "classify.csv").string())).size() == 2);
  CHECK(cli_main({"classify", (dir / "missing.csv").string(), "--out",
                  out.string()}) == 3);
  CHECK(cli_main({"classify", "--out", out.string()}) == 2);  // no input
}

TEST_CASE("cli: optimize emits a coherent summary and a grid on request") {
  fs::path dir = cli_dir("optimize");
  fs::path cfg = dir / "cfg.json";
  write_file(cfg.string(), R"({
    "transmitter": {"alpha": 0.9, "beta": 0.9, "gamma": -0.9, "theta": -0.9},
    "receiver": {"a1": 1},
    "optimizer": {"burn_in_events": 200, "measure_events": 200},
    "sim": {"epsilon": 0.001},
    "seed": 11
  })");
  fs::path out = dir / "out";
  CHECK(cli_main({"optimize", "--config", cfg.string(), "--out",
                  out.string()}) == 0);
  json j = read_json(out / "optimize.json");
  CHECK(j["v_t"].get<double>() + j["v_f"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(j["acceptance_rate"].get<double>() >= 0);
  CHECK(j["acceptance_rate"].get<double>() <= 1);
  if (!j["engagement_true"].is_null())
    CHECK(j["engagement_true"].get<double>() ==
          doctest::Approx(j["v_tc"].get<double>() / j["v_t"].get<double>()));
  CHECK(j["final_receiver"]["p0"].get<double>() >= 0);
  CHECK(j["final_receiver"]["p0"].get<double>() <= 1);

  fs::path gcfg = dir / "grid.json";
  write_file(gcfg.string(), R"({
    "transmitter": {"alpha": 0.9, "beta": 0.9, "gamma": -0.9, "theta": -0.9},
    "receiver": {"a1": 1},
    "grid": {"a0": [0.0, 0.9], "sigma": [1.0]},
    "optimizer": {"burn_in_events": 200, "measure_events": 200},
    "sim": {"epsilon": 0.001},
    "seed": 11
  })");
  CHECK(cli_main({"optimize", "--config", gcfg.string(), "--out",
                  out.string()}) == 0);
  auto rows = parse_csv(read_file((out / "optimize_grid.csv").string()));
  REQUIRE(rows.size() == 4);  // comment + header + 2 cells
  CHECK(rows[1][0] == "a0");
  CHECK(std::stod(rows[2][0]) == 0.0);
  CHECK(std::stod(rows[3][0]) == 0.9);
  CHECK(read_json(out / "optimize.json")["grid_rows"].get<long long>() == 2);
}

TEST_CASE("cli: sweep outputs rows, summary blocks, and honours overrides") {
  fs::path dir = cli_dir("sweep");
  fs::path cfg = dir / "cfg.json";
  write_file(cfg.string(), R"({
    "n": 24, "seed": 3,
    "optimizer": {"burn_in_events": 120, "measure_events": 120},
    "sim": {"epsilon": 0.001}
  })");
  fs::path out = dir / "out";
  CHECK(cli_main({"sweep", "--config", cfg.string(), "--workers", "3", "--out",
                  out.string()}) == 0);
  auto rows = parse_csv(read_file((out / "sweep.csv").string()));
  REQUIRE(rows.size() == 26);  // comment + header + 24 records
  REQUIRE(rows[1].size() == 20);
  CHECK(rows[1][0] == "index");
  CHECK(rows[2][0] == "0");
  CHECK(rows[25][0] == "23");

  json j = read_json(out / "sweep_summary.json");
  CHECK(j["n"].get<long long>() == 24);
  CHECK(j["config"]["workers"].get<int>() == 3);  // flag folded into config
  for (const char* kind : {"misinformation", "mainstream"}) {
    REQUIRE(j.contains(kind));
    const json& block = j[kind];
    CHECK(block["successful_n"].get<long long>() >= 0);
    CHECK(block["enrichment"]["p_value"].get<double>() >= 0);
    CHECK(block["enrichment"]["p_value"].get<double>() <= 1);
    CHECK(block["threshold_sensitivity"].size() == 5);
  }

  // identical invocation reproduces the bytes
  fs::path out2 = dir / "out2";
  CHECK(cli_main({"sweep", "--config", cfg.string(), "--workers", "3", "--out",
                  out2.string()}) == 0);
  CHECK(read_file((out / "sweep.csv").string()) ==
        read_file((out2 / "sweep.csv").string()));
  CHECK(read_file((out / "sweep_summary.json").string()) ==
        read_file((out2 / "sweep_summary.json").string()));
}

TEST_CASE("cli: coopt validates replicates and reports the pooled tail") {
  fs::path dir = cli_dir("coopt");
  fs::path cfg = dir / "cfg.json";
  write_file(cfg.string(), R"({
    "assumption": "prefers_fake", "replicates": 0, "seed": 2,
    "coopt": {"pairs": 100, "record_every": 10},
    "receiver": {"a1": 0.2},
    "sim": {"epsilon": 0.001}
  })");
  fs::path out = dir / "out";
  CHECK(cli_main({"coopt", "--config", cfg.string(), "--out",
                  out.string()}) == 2);

  write_file(cfg.string(), R"({
    "assumption": "prefers_fake", "replicates": 20, "seed": 2,
    "coopt": {"pairs": 100, "record_every": 10},
    "receiver": {"a1": 0.2},
    "sim": {"epsilon": 0.001}
  })");
  CHECK(cli_main({"coopt", "--config", cfg.string(), "--out",
                  out.string()}) == 0);
  json j = read_json(out / "coopt_summary.json");
  CHECK(j["replicates"].get<long long>() == 20);
  CHECK(j["points"].get<long long>() == 10);
  CHECK(!j["long_run_diff_pct"].is_null());
  auto rows = parse_csv(read_file((out / "coopt.csv").string()));
  REQUIRE(rows.size() == 12);  // comment + header + 10 points
  CHECK(rows[1] ==
        std::vector<std::string>{"pair", "engagement_diff_pct", "consumption"});
  CHECK(rows[2][0] == "10");
  CHECK(rows[11][0] == "100");
}

TEST_CASE("cli: micro and compete emit one row per grid entry") {
  fs::path dir = cli_dir("micro_compete");
  fs::path mcfg = dir / "micro.json";
  write_file(mcfg.string(), R"({
    "transmitter": {"alpha": 0.9, "beta": 0.9, "gamma": -0.9, "theta": -0.9},
    "groups": [1, 2], "seed": 5,
    "micro": {"burn_in_events": 100, "measure_events": 100},
    "sim": {"epsilon": 0.001, "rounds": 200}
  })");
  fs::path out = dir / "out";
  CHECK(cli_main({"micro", "--config", mcfg.string(), "--out",
                  out.string()}) == 0);
  auto mrows = parse_csv(read_file((out / "micro.csv").string()));
  REQUIRE(mrows.size() == 4);
  CHECK(mrows[2][0] == "1");
  CHECK(mrows[3][0] == "2");
  CHECK(read_json(out / "micro_summary.json")["rows"].size() == 2);

  fs::path ccfg = dir / "compete.json";
  write_file(ccfg.string(), R"({
    "n_values": [1, 2], "n_fake": 1, "seed": 6,
    "compete": {"burn_in_events": 100, "measure_events": 100},
    "sim": {"epsilon": 0.001}
  })");
  CHECK(cli_main({"compete", "--config", ccfg.string(), "--out",
                  out.string()}) == 0);
  auto crows = parse_csv(read_file((out / "compete.csv").string()));
  REQUIRE(crows.size() == 4);
  CHECK(crows[2][0] == "1");
  CHECK(crows[3][0] == "2");

  // a fake-site count exceeding the smallest grid entry cannot run
  write_file(ccfg.string(), R"({"n_values": [1, 4], "n_fake": 2})");
  CHECK(cli_main({"compete", "--config", ccfg.string(), "--out",
                  out.string()}) == 2);
}

TEST_CASE("cli: meta reports per-site regressions and pooled groups") {
  fs::path dir = cli_dir("meta");
  fs::path in = dir / "articles.csv";
  // two mainstream sites rising with accuracy, two misinformation sites
  // falling; one inversion in the middle keeps even the rank regression off
  // the exact line, so every transform yields a finite standard error
  std::string csv = "site_id,site_class,headline,accuracy_mean,engagement,published\n";
  const double up[5] = {1.0, 2.3, 1.8, 4.2, 4.8};
  for (int s = 0; s < 4; ++s) {
    bool mainstream = s < 2;
    for (int i = 0; i < 5; ++i) {
      double exponent = mainstream ? up[i] : up[4 - i];
      long long eng = (long long)std::llround(std::pow(10.0, exponent)) + s;
      csv += "site" + std::to_string(s) + "," +
             (mainstream ? "mainstream" : "fake") + ",headline " +
             std::to_string(i) + "," + std::to_string(i + 2) + "," +
             std::to_string(eng) + ",2019-01-0" + std::to_string(i + 1) + "\n";
    }
  }
  write_file(in.string(), csv);
  write_file((dir / "trust.csv").string(),
             "site_id,trust\nsite0,5.0\nsite1,5.5\nsite2,2.0\nsite3,1.5\n");
  fs::path ccfg = dir / "cfg.json";
  write_file(ccfg.string(),
             "{\"trust\": \"" + (dir / "trust.csv").string() + "\"}");

  fs::path out = dir / "out";
  CHECK(cli_main({"meta", in.string(), "--config", ccfg.string(), "--out",
                  out.string()}) == 0);
  auto rows = parse_csv(read_file((out / "meta_sites.csv").string()));
  REQUIRE(rows.size() == 14);  // comment + header + 4 sites x 3 transforms

  json j = read_json(out / "meta_summary.json");
  CHECK(j["articles"].get<long long>() == 20);
  CHECK(j["sites"].get<long long>() == 4);
  for (const char* tf : {"raw_log10", "standardized", "rank"}) {
    const json& g = j["groups"][tf];
    CHECK(g["mainstream"]["k"].get<long long>() == 2);
    CHECK(g["mainstream"]["fisher"]["p"].get<double>() < 0.05);
    CHECK(g["mainstream"]["random_effects"]["mu"].get<double>() > 0);
    CHECK(g["fake"]["fisher"]["p"].get<double>() < 0.05);
    CHECK(g["fake"]["random_effects"]["mu"].get<double>() < 0);
  }
  CHECK(j["trust_regression"]["r2"].get<double>() > 0.8);
  CHECK(j["trust_regression"]["n"].get<int>() == 4);

  CHECK(cli_main({"meta", (dir / "missing.csv").string(), "--out",
                  out.string()}) == 3);
  fs::path bad = dir / "bad.csv";
  write_file(bad.string(), "a,b\n1,2\n");
  CHECK(cli_main({"meta", bad.string(), "--out", out.string()}) == 3);
}

TEST_CASE("cli: argument and preset errors exit 2") {
  fs::path dir = cli_dir("errors");
  CHECK(cli_main({}) == 2);
  CHECK(cli_main({"bogus"}) == 2);
  CHECK(cli_main({"sweep", "--no-such-flag"}) == 2);
  CHECK(cli_main({"coopt", "--preset", "no-such"}) == 2);
  CHECK(cli_main({"sweep", "--preset", "coopt-baseline"}) == 2);
  fs::path cfg = dir / "cfg.json";
  write_file(cfg.string(), "{\"typo_key\": 1}");
  CHECK(cli_main({"sweep", "--config", cfg.string(), "--out",
                  (dir / "out").string()}) == 2);
  write_file(cfg.string(), "{not json");
  CHECK(cli_main({"sweep", "--config", cfg.string()}) == 2);
  CHECK(cli_main({"sweep", "--config", (dir / "missing.json").string()}) == 2);
}

TEST_CASE("cli: presets merge with config files, flags override both") {
  fs::path dir = cli_dir("preset_merge");
  fs::path cfg = dir / "shrink.json";
  write_file(cfg.string(), R"({"replicates": 10, "coopt": {"pairs": 60}})");
  fs::path out = dir / "out";
  CHECK(cli_main({"coopt", "--preset", "coopt-baseline", "--config",
                  cfg.string(), "--seed", "99", "--out", out.string()}) == 0);
  json c = read_json(out / "coopt_summary.json")["config"];
  CHECK(c["replicates"].get<long long>() == 10);          // file overrode preset
  CHECK(c["coopt"]["pairs"].get<long long>() == 60);      // nested merge
  CHECK(c["coopt"]["sigma_transmitter"].get<double>() == 100.0);  // preset kept
  CHECK(c["receiver"]["a1"].get<double>() == 0.2);
  CHECK(c["seed"].get<uint64_t>() == 99);                 // flag overrode file
}
