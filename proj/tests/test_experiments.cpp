#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ratiotv/experiments.hpp"

using namespace ratiotv;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("ratiotv_test_" + tag);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void dump(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p);
  f << text;
}

// strips the trailing seconds column from every CSV line
std::string drop_timing(const std::string& csv) {
  std::string out;
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) {
    const auto comma = line.rfind(',');
    out += line.substr(0, comma);
    out += '\n';
  }
  return out;
}

std::map<std::string, std::string> tiny_onebar_keys() {
  return {{"s_min", "19"}, {"s_max", "21"}, {"restarts", "2"}, {"methods", "tv,l1l2"},
          {"tv_kmax", "3000"}};
}

}  // namespace

TEST_CASE("config file parsing") {
  const fs::path dir = temp_dir("cfg");
  dump(dir / "good.cfg",
       "# a comment line\n"
       "n = 100\n"
       "  lines = 20, 25 , 30  # trailing comment\n"
       "flag = yes\n"
       "name = shepp\n"
       "\n");
  const ExperimentConfig cfg = ExperimentConfig::from_file((dir / "good.cfg").string());
  CHECK(cfg.get_int("n", 0) == 100);
  const auto lines = cfg.get_num_list("lines", "");
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] == 25.0);
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_str("name", "") == "shepp");
  CHECK(cfg.get_num("absent", 2.5) == 2.5);  // falls back and records the default
  CHECK(cfg.resolved().at("absent") == "2.5");
  CHECK(cfg.unused_keys().empty());

  dump(dir / "noeq.cfg", "n 100\n");
  CHECK_THROWS_WITH_AS(ExperimentConfig::from_file((dir / "noeq.cfg").string()),
                       doctest::Contains("noeq.cfg:1"), std::runtime_error);
  dump(dir / "nokey.cfg", " = 3\n");
  CHECK_THROWS_AS(ExperimentConfig::from_file((dir / "nokey.cfg").string()), std::runtime_error);
  CHECK_THROWS_AS(ExperimentConfig::from_file((dir / "missing.cfg").string()), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("config value validation") {
  ExperimentConfig cfg(std::map<std::string, std::string>{
      {"num", "1.5x"}, {"int", "2.5"}, {"bool", "maybe"}, {"ok", "42"}});
  CHECK_THROWS_WITH_AS(cfg.get_num("num", 0.0), doctest::Contains("not a number"), std::runtime_error);
  CHECK_THROWS_WITH_AS(cfg.get_int("int", 0), doctest::Contains("integer"), std::runtime_error);
  CHECK_THROWS_AS(cfg.get_bool("bool", true), std::runtime_error);
  CHECK(cfg.get_int("ok", 0) == 42);
  // the three bad keys were still consumed by the attempted reads
  CHECK(cfg.unused_keys().empty());

  ExperimentConfig untouched(std::map<std::string, std::string>{{"typo_key", "1"}});
  const auto unused = untouched.unused_keys();
  REQUIRE(unused.size() == 1);
  CHECK(unused[0] == "typo_key");
}

TEST_CASE("cell seeds separate cells and restarts") {
  CHECK(cell_seed(0, 0) == cell_seed(0, 0));
  CHECK(cell_seed(0, 0) != cell_seed(0, 1));
  CHECK(cell_seed(0, 0) != cell_seed(1, 0));
  CHECK(cell_seed(0, 3, 0) != cell_seed(0, 3, 1));
  CHECK(cell_seed(7, 3, 1) == cell_seed(7, 3, 1));
}

TEST_CASE("parallel cell driver matches serial and propagates failures") {
  std::vector<Index> serial(64, -1), parallel(64, -1);
  parallel_for_cells(64, 1, [&](Index i) { serial[size_t(i)] = i * i; });
  parallel_for_cells(64, 4, [&](Index i) { parallel[size_t(i)] = i * i; });
  CHECK(serial == parallel);

  CHECK_THROWS_WITH_AS(parallel_for_cells(16, 3,
                                          [&](Index i) {
                                            if (i == 7) throw std::runtime_error("cell 7 exploded");
                                          }),
                       doctest::Contains("cell 7"), std::runtime_error);
  parallel_for_cells(0, 4, [&](Index) { throw std::logic_error("never called"); });
}

TEST_CASE("csv schema and formatting") {
  Diagnostics diag;
  diag.outer_iterations = 12;
  ImageXd truth(1, 4);
  truth << 0.0, 1.0, 1.0, 0.0;
  ImageXd approx = truth;
  approx(0, 1) = 1.5;
  ResultRow row = make_result_row("tv", {{"s", "20"}, {"t", "1.30"}}, approx, truth, diag);
  row.seconds = 1.23456;
  CHECK_FALSE(row.exact_recovery);
  CHECK(row.iters == 12);

  ResultRow exact = make_result_row("l1l2", {{"s", "21"}, {"t", "1.35"}}, truth, truth, diag);
  const std::string csv = rows_to_csv({row, exact});
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "method,s,t,re,psnr,exact_recovery,iters,seconds");
  std::getline(ss, line);
  CHECK(line == "tv,20,1.30,0.353553390593,12.0411998266,0,12,1.235");
  std::getline(ss, line);
  CHECK(line == "l1l2,21,1.35,0,inf,1,12,0.000");
  CHECK_FALSE(std::getline(ss, line));
}

TEST_CASE("onebar driver is deterministic and ordered") {
  ExperimentConfig cfg(tiny_onebar_keys());
  const RunOutput a = run_onebar_sweep(cfg);
  const RunOutput b = run_onebar_sweep(ExperimentConfig(tiny_onebar_keys()));
  REQUIRE(a.rows.size() == 6);  // 2 methods x 3 widths
  CHECK(a.traces.empty());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].method == b.rows[i].method);
    CHECK(a.rows[i].re == b.rows[i].re);  // bitwise: same seeds, same order
    CHECK(a.rows[i].instance == b.rows[i].instance);
  }
  // both methods recover every interior width here
  for (const auto& row : a.rows) CHECK(row.exact_recovery);

  // a width nothing recovers still reproduces bitwise under the same seed
  std::map<std::string, std::string> hard = {{"s_min", "5"}, {"s_max", "5"}, {"restarts", "2"},
                                             {"methods", "l1l2"}};
  const RunOutput h0 = run_onebar_sweep(ExperimentConfig(hard));
  const RunOutput h1 = run_onebar_sweep(ExperimentConfig(hard));
  REQUIRE(h0.rows.size() == 1);
  CHECK_FALSE(h0.rows[0].exact_recovery);
  CHECK(h0.rows[0].re == h1.rows[0].re);
  CHECK(h0.rows[0].iters == h1.rows[0].iters);
}

TEST_CASE("parallel workers do not change results") {
  ExperimentConfig cfg(tiny_onebar_keys());
  setenv("RATIOTV_WORKERS", "1", 1);
  const RunOutput serial = run_onebar_sweep(cfg);
  setenv("RATIOTV_WORKERS", "3", 1);
  const RunOutput parallel = run_onebar_sweep(ExperimentConfig(tiny_onebar_keys()));
  setenv("RATIOTV_WORKERS", "1", 1);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(serial.rows[i].re == parallel.rows[i].re);
    CHECK(serial.rows[i].method == parallel.rows[i].method);
  }
}

TEST_CASE("unknown method or config key fails loudly") {
  auto keys = tiny_onebar_keys();
  keys["methods"] = "tv,magic";
  CHECK_THROWS_WITH_AS(run_onebar_sweep(ExperimentConfig(keys)), doctest::Contains("magic"),
                       std::invalid_argument);

  auto typo = tiny_onebar_keys();
  typo["smin"] = "5";  // misspelled s_min
  ExperimentConfig cfg(typo);
  run_onebar_sweep(cfg);  // driver itself cannot see the typo...
  const auto unused = cfg.unused_keys();
  REQUIRE(unused.size() == 1);  // ...but the unused-key audit does
  CHECK(unused[0] == "smin");
}

TEST_CASE("experiment writer produces csv, manifest, and replays identically") {
  const fs::path out1 = temp_dir("write1");
  const fs::path out2 = temp_dir("write2");

  ExperimentConfig cfg(tiny_onebar_keys());
  REQUIRE(run_experiment("onebar", cfg, out1.string()) == 0);
  REQUIRE(fs::exists(out1 / "results.csv"));
  REQUIRE(fs::exists(out1 / "manifest.json"));

  const auto manifest = nlohmann::json::parse(slurp(out1 / "manifest.json"));
  CHECK(manifest.at("subcommand") == "onebar");
  CHECK(manifest.at("config").contains("s_min"));
  CHECK(manifest.at("config").contains("seed"));  // defaults are resolved into the manifest

  // replay from the manifest's resolved config
  std::map<std::string, std::string> replay_keys;
  for (const auto& [k, v] : manifest.at("config").items()) replay_keys[k] = v.get<std::string>();
  REQUIRE(run_experiment(manifest.at("subcommand").get<std::string>(), ExperimentConfig(replay_keys),
                         out2.string()) == 0);
  CHECK(drop_timing(slurp(out1 / "results.csv")) == drop_timing(slurp(out2 / "results.csv")));

  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST_CASE("experiment writer rejects unused keys without creating outputs") {
  const fs::path out = temp_dir("reject");
  ExperimentConfig cfg(std::map<std::string, std::string>{{"s_min", "19"}, {"s_max", "19"},
                                                          {"bogus_key", "1"}});
  CHECK_THROWS_WITH_AS(run_experiment("onebar", cfg, out.string()), doctest::Contains("bogus_key"),
                       std::runtime_error);
  CHECK_FALSE(fs::exists(out));
  fs::remove_all(out);
}

TEST_CASE("cli front end runs a sweep end to end") {
  const fs::path out = temp_dir("cli");
  const int rc = cli_main({"onebar", "--out", out.string(), "--set", "s_min=20", "--set", "s_max=20",
                           "--set", "restarts=1", "--set", "methods=tv", "--set", "tv_kmax=3000"});
  CHECK(rc == 0);
  const std::string csv = slurp(out / "results.csv");
  CHECK(csv.find("method,s,re") == 0);
  CHECK(csv.find("tv,20,") != std::string::npos);

  // rerun subcommand replays the manifest into a second directory
  const fs::path out2 = temp_dir("cli2");
  CHECK(cli_main({"rerun", (out / "manifest.json").string(), "--out", out2.string()}) == 0);
  CHECK(drop_timing(slurp(out / "results.csv")) == drop_timing(slurp(out2 / "results.csv")));

  CHECK(cli_main({"onebar", "--set", "not_an_assignment"}) != 0);
  CHECK(cli_main({"no_such_subcommand"}) != 0);
  fs::remove_all(out);
  fs::remove_all(out2);
}
