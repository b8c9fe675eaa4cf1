#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "percotree/csv.hpp"
#include "percotree_app/app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using percotree::app::run_cli;

namespace {

fs::path scratch_dir() {
  static std::atomic<int> counter{0};
  auto d = fs::temp_directory_path() / ("percotree_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(percotree::csv_body(text));
  for (std::string line; std::getline(ss, line);) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

fs::path binary_spec(const fs::path& dir) {
  auto p = dir / "binary.json";
  write(p, R"({"kind":"spherical","rule":{"type":"constant","c":2}})");
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("construct writes a loadable spec") {
  auto d = scratch_dir();
  auto r = cli({"construct", "--name", "lemma23", "--param", "p=0.6", "--param", "q=0.9", "--out",
                (d / "g.json").string()});
  REQUIRE(r.code == 0);
  auto spec = json::parse(slurp(d / "g.json"));
  CHECK(spec["kind"] == "construction");
  CHECK(spec["name"] == "lemma23");
  CHECK(spec["params"]["q"].get<double>() == doctest::Approx(0.9));
  auto t = cli({"theta", "--tree", (d / "g.json").string(), "--p-grid", "0.6", "--out", d.string()});
  CHECK(t.code == 0);
}

TEST_CASE("criteria on the binary tree") {
  auto d = scratch_dir();
  auto r = cli({"criteria", "--tree", binary_spec(d).string(), "--pc", "0.5", "--out", d.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("no-exceptional-times") != std::string::npos);
  auto rep = json::parse(slurp(d / "criteria.json"));
  CHECK(rep["verdict"] == "no-exceptional-times");
  CHECK(fs::exists(d / "series.csv"));
  auto rows = csv_rows(slurp(d / "series.csv"));
  REQUIRE(rows.size() > 10);
  CHECK(rows[0] == std::vector<std::string>{"tree_id", "k", "partial_sum"});
  CHECK(std::stod(rows[1][2]) == doctest::Approx(1.0));
}

TEST_CASE("strict turns an inconclusive verdict into exit 2") {
  auto d = scratch_dir();
  auto spec = d / "mt.json";
  write(spec, R"({"kind":"general","rule":{"type":"multitype","types":[[[0,2]]]}})");
  auto loose = cli({"criteria", "--tree", spec.string(), "--pc", "0.9", "--no-integral", "--out", d.string()});
  CHECK(loose.code == 0);
  auto strict = cli({"--strict", "criteria", "--tree", spec.string(), "--pc", "0.9", "--no-integral", "--out",
                     d.string()});
  CHECK(strict.code == percotree::app::kExitInconclusive);
  CHECK(strict.code == 2);
}

TEST_CASE("malformed specs name the field") {
  auto d = scratch_dir();
  struct Case {
    const char* text;
    const char* field;
  };
  for (auto c : {Case{R"({"kind":"spherical","rule":{"type":"constant","c":0}})", "tree.rule.c"},
                 Case{R"({"kind":"spherical","rule":{"type":"wobbly"}})", "tree.rule.type"},
                 Case{R"({"rule":{}})", "tree.kind"},
                 Case{R"({"kind":"general","rule":{"type":"glue","components":[]}})", "tree.rule.components"},
                 Case{R"({"kind":"construction","name":"lemma23","params":{"p":1.5,"q":0.5}})", "p"},
                 Case{R"({"kind":"spherical")", "tree"}}) {
    auto spec = d / "bad.json";
    write(spec, c.text);
    auto r = cli({"theta", "--tree", spec.string(), "--p-grid", "0.6", "--out", d.string()});
    INFO(c.text);
    CHECK(r.code == 1);
    CHECK(r.err.find(c.field) != std::string::npos);
  }
  auto missing = cli({"theta", "--tree", (d / "nope.json").string(), "--p-grid", "0.6"});
  CHECK(missing.code == 1);
  auto grid = cli({"theta", "--tree", binary_spec(d).string(), "--p-grid", "0.5:x:0.1"});
  CHECK(grid.code == 1);
  CHECK(grid.err.find("p-grid") != std::string::npos);
}

TEST_CASE("theta grid lies within the closed form brackets") {
  auto d = scratch_dir();
  auto r = cli({"theta", "--tree", binary_spec(d).string(), "--p-grid", "0.5:1:0.01", "--out", d.string()});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(slurp(d / "theta.csv"));
  REQUIRE(rows.size() == 52);
  CHECK(rows[0] == std::vector<std::string>{"tree_id", "p", "n", "theta_n", "lo", "hi", "method"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double p = std::stod(rows[i][1]);
    double exact = p <= 0.5 ? 0.0 : (2 * p - 1) / (p * p);
    double lo = std::stod(rows[i][4]), hi = std::stod(rows[i][5]);
    INFO(p);
    CHECK(lo <= exact + 1e-12);
    CHECK(exact <= hi + 1e-12);
    CHECK(std::stod(rows[i][3]) >= exact - 1e-12);
  }
}

TEST_CASE("config file supplies options") {
  auto d = scratch_dir();
  auto cfg = d / "cfg.json";
  json c{{"seed", 5},
         {"out", d.string()},
         {"simulate", {{"tree", binary_spec(d).string()}, {"p", 0.7}, {"T", 50}, {"depth", 3}, {"replicas", 2}}}};
  write(cfg, c.dump());
  auto r = cli({"--config", cfg.string(), "simulate"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(slurp(d / "simulate.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"replica", "seed", "occupation", "switches", "mean_on", "mean_off"});

  // command line wins over the file
  auto d2 = scratch_dir();
  auto r2 = cli({"--config", cfg.string(), "--out", d2.string(), "simulate", "--replicas", "3"});
  REQUIRE(r2.code == 0);
  CHECK(csv_rows(slurp(d2 / "simulate.csv")).size() == 4);
  CHECK(csv_rows(slurp(d / "simulate.csv"))[1] == csv_rows(slurp(d2 / "simulate.csv"))[1]);

  write(cfg, R"({"simulate": 3})");
  auto bad = cli({"--config", cfg.string(), "simulate"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("config.simulate") != std::string::npos);
}

TEST_CASE("conductance and flow outputs") {
  auto d = scratch_dir();
  auto spec = binary_spec(d).string();
  auto r = cli({"conductance", "--tree", spec, "--p", "0.75", "--depth", "20", "--out", d.string()});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(slurp(d / "conductance.csv"));
  CHECK(rows[0] ==
        std::vector<std::string>{"tree_id", "kind", "normalization", "p", "n", "C_n", "tail_lo", "tail_hi"});
  // C_n for the binary tree at 3/4 decreases to 1/2
  const auto& last = rows.back();
  CHECK(std::stod(last[6]) <= 0.5 + 1e-15);
  CHECK(std::stod(last[7]) >= 0.5);
  CHECK(std::stod(last[5]) == doctest::Approx(0.5 + 0.5 * std::pow(1.5, -20) / (1 + std::pow(1.5, -20))).epsilon(1e-6));
  auto f = cli({"flow", "--tree", spec, "--p", "0.5", "--depth", "4", "--kind", "dynamical", "--out", d.string()});
  CHECK(f.code == 0);
  CHECK(fs::exists(d / "flow.csv"));
  auto bad = cli({"conductance", "--tree", spec, "--p", "0.75", "--kind", "weird"});
  CHECK(bad.code == 1);
}

TEST_CASE("reruns give identical CSV bodies") {
  auto a = scratch_dir(), b = scratch_dir();
  auto spec = binary_spec(a).string();
  for (const auto& dir : {a, b}) {
    REQUIRE(cli({"--seed", "9", "simulate", "--tree", spec, "--p", "0.6", "--T", "100", "--depth", "4", "--replicas",
                 "3", "--trace", "--out", dir.string()})
                .code == 0);
    REQUIRE(cli({"--seed", "9", "theta", "--tree", spec, "--p-grid", "0.55,0.8", "--replicas", "500", "--mc-depth",
                 "6", "--out", dir.string()})
                .code == 0);
  }
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    INFO(e.path().filename().string());
    CHECK(percotree::csv_body(slurp(e.path())) == percotree::csv_body(slurp(b / e.path().filename())));
  }
  CHECK(slurp(a / "simulate.csv").find("# config_hash:") != std::string::npos);
}

TEST_CASE("reproduce lists the criteria") {
  auto r = cli({"reproduce", "--list"});
  CHECK(r.code == 0);
  CHECK(r.out.find("determinism") != std::string::npos);
}

TEST_CASE("unknown subcommands and missing arguments") {
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"theta"}).code == 1);
}

TEST_CASE("grid parsing") {
  auto g = percotree::app::parse_grid("0.1:0.3:0.1");
  REQUIRE(g.size() == 3);
  CHECK(g[2] == doctest::Approx(0.3));
  CHECK(percotree::app::parse_grid("0.2,0.4").size() == 2);
  CHECK_THROWS(percotree::app::parse_grid(""));
  CHECK_THROWS(percotree::app::parse_grid("0.5:0.1:0.1"));
}

}  // TEST_SUITE
