#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chaoslab/experiments.hpp"

using namespace chaoslab;

namespace {

// Field indices in the CSV schema.
enum Col {
  kExperiment = 0,
  kN = 1,
  kQ = 2,
  kSeed = 3,
  kSamples = 4,
  kDelta = 5,
  kKolmogorov = 6,
  kW1 = 7,
  kNegmomEstimate = 8,
  kNegmomTopDecile = 9,
  kDensitySupQ = 10,
  kEntropy = 11,
  kFisher = 12,
  kRuntimeMs = 13,
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double num(const std::string& s) {
  REQUIRE(!s.empty());
  return std::strtod(s.c_str(), nullptr);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config text parses every key") {
  const std::string text =
      "# full schema\n"
      "experiment = breuer-major\n"
      "n_list = 16, 32, 64\n"
      "q_list = 0, 1, 2.5\n"
      "samples = 5000\n"
      "seed = 42\n"
      "workers = 4\n"
      "output = /tmp/out.csv   # trailing comment\n"
      "model.kind = ar1\n"
      "model.a = -0.25\n"
      "model.hurst = 0.6\n"
      "model.rho = 1, 0.5, 0.25\n"
      "poly.c1 = 2\n"
      "poly.c3 = 1\n"
      "goe.p = 3\n"
      "goe.backend = symbolic\n"
      "wishart.cols = 3\n";
  const ExperimentConfig c = parse_config_text(text);
  CHECK(c.experiment == "breuer-major");
  CHECK(c.n_list == std::vector<std::size_t>{16, 32, 64});
  CHECK(c.q_list == std::vector<double>{0.0, 1.0, 2.5});
  CHECK(c.samples == 5000);
  CHECK(c.seed == 42);
  CHECK(c.workers == 4);
  CHECK(c.output == "/tmp/out.csv");
  CHECK(c.model_kind == "ar1");
  CHECK(c.model_a == -0.25);
  CHECK(c.model_hurst == 0.6);
  CHECK(c.model_rho == std::vector<double>{1.0, 0.5, 0.25});
  CHECK(c.poly.size() == 2);
  CHECK(c.poly.at(1) == 2.0);
  CHECK(c.poly.at(3) == 1.0);
  CHECK(c.goe_p == 3);
  CHECK(c.goe_backend == "symbolic");
  CHECK(c.wishart_cols == 3);
}

TEST_CASE("empty config falls back to schema defaults") {
  const ExperimentConfig c = parse_config_text("\n# nothing here\n\n");
  CHECK(c.experiment == "superconv");
  CHECK(c.n_list == std::vector<std::size_t>{10, 40, 160});
  CHECK(c.q_list.empty());
  CHECK(c.samples == 100000);
  CHECK(c.seed == 1);
  CHECK(c.workers == 1);
  CHECK(c.output == "results.csv");

  CHECK(resolved_q_list(c) == std::vector<double>{0.0, 1.0, 2.0});
  ExperimentConfig d = c;
  d.experiment = "negmom";
  CHECK(resolved_q_list(d) == std::vector<double>{1.0, 2.0});
  d.experiment = "counterexample";
  CHECK(resolved_q_list(d) == std::vector<double>{1.0});
  d.experiment = "wishart";
  CHECK(resolved_q_list(d) == std::vector<double>{1.0});
  d.experiment = "goe";
  CHECK(resolved_q_list(d).empty());
  d.q_list = {2.0};
  CHECK(resolved_q_list(d) == std::vector<double>{2.0});
}

TEST_CASE("schema violations carry line and field diagnostics") {
  try {
    (void)parse_config_text("samples = 100\nnumber_of_bins = 7\n");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(e.line == 2);
    CHECK(e.field == "number_of_bins");
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("number_of_bins") != std::string::npos);
    CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
  }

  try {
    (void)parse_config_text("\n\nsamples = frog\n");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(e.line == 3);
    CHECK(e.field == "samples");
  }

  CHECK_THROWS_AS((void)parse_config_text("experiment = sampling\n"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("just some words\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("n_list = 0\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("q_list = -1\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("workers = 0\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("model.a = 1\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("model.hurst = 0\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("model.rho = 0.5, 0.2\n"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("model.kind = brownian\n"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("poly.c0 = 1\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("poly.cx = 1\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("goe.p = 0\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("goe.backend = exact\n"),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_config_text("wishart.cols = 0\n"), ConfigError);
  CHECK_THROWS_AS((void)parse_config_file("/nonexistent/path.cfg"),
                  ConfigError);

  // Orders are validated against the experiment at run time.
  ExperimentConfig bad;
  bad.experiment = "counterexample";
  bad.n_list = {5};
  bad.q_list = {0.0};
  bad.samples = 200;
  CHECK_THROWS_AS((void)run_experiment_csv(bad), ConfigError);
  bad.experiment = "superconv";
  bad.q_list = {1.5};
  CHECK_THROWS_AS((void)run_experiment_csv(bad), ConfigError);
  bad.experiment = "wishart";
  bad.n_list = {10};
  bad.q_list = {0.5};
  CHECK_THROWS_AS((void)run_experiment_csv(bad), ConfigError);
}

TEST_CASE("counterexample runs are byte identical and flag divergence") {
  ExperimentConfig c;
  c.experiment = "counterexample";
  c.n_list = {5};
  c.q_list = {1.0};
  c.samples = 20000;
  c.seed = 10;

  const std::string first = run_experiment_csv(c);
  const std::string second = run_experiment_csv(c);
  CHECK(first == second);
  ExperimentConfig wide = c;
  wide.workers = 4;
  CHECK(run_experiment_csv(wide) == first);

  const auto rows = parse_csv(first);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][kExperiment] == "experiment");
  CHECK(rows[0][kRuntimeMs] == "runtime_ms");
  REQUIRE(rows[1].size() == 14);
  CHECK(rows[1][kExperiment] == "counterexample");
  CHECK(rows[1][kN] == "5");
  CHECK(rows[1][kQ] == "1");
  CHECK(rows[1][kSeed] == "10");
  CHECK(rows[1][kSamples] == "20000");
  CHECK(rows[1][kNegmomEstimate] == "divergent");
  CHECK(num(rows[1][kNegmomTopDecile]) >= 0.9);
  CHECK(rows[1][kDelta].empty());
  CHECK(rows[1][kRuntimeMs].empty());
}

TEST_CASE("superconv table shows the density derivative trend") {
  ExperimentConfig c;
  c.n_list = {10, 20};
  c.q_list = {0.0, 1.0};
  c.samples = 20000;
  c.seed = 3;
  const auto rows = parse_csv(run_experiment_csv(c));
  REQUIRE(rows.size() == 5);

  // Rows iterate n outer, q inner.
  CHECK(rows[1][kN] == "10");
  CHECK(rows[1][kQ] == "0");
  CHECK(rows[2][kQ] == "1");
  CHECK(rows[3][kN] == "20");

  for (std::size_t i = 1; i <= 4; ++i) {
    CHECK(num(rows[i][kDensitySupQ]) > 0.0);
    CHECK(num(rows[i][kKolmogorov]) > 0.0);
    CHECK(num(rows[i][kW1]) > 0.0);
    CHECK(rows[i][kNegmomEstimate].empty());
    CHECK(rows[i][kEntropy].empty());
  }
  // Distances shrink when n quadruples at both derivative orders.
  CHECK(num(rows[3][kDensitySupQ]) < num(rows[1][kDensitySupQ]));
  CHECK(num(rows[4][kDensitySupQ]) < num(rows[2][kDensitySupQ]));
  // The fourth-moment gap tracks 12/n.
  CHECK(num(rows[1][kDelta]) == doctest::Approx(1.2).epsilon(0.35));
  CHECK(num(rows[3][kDelta]) == doctest::Approx(0.6).epsilon(0.35));
}

TEST_CASE("negmom rows report estimates with the decile diagnostic") {
  ExperimentConfig c;
  c.experiment = "negmom";
  c.n_list = {24};
  c.q_list = {1.0};
  c.samples = 20000;
  c.seed = 5;
  const auto rows = parse_csv(run_experiment_csv(c));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][kNegmomEstimate] != "divergent");
  // E[Gamma^{-1}] = n / (2 (n - 2)) = 0.545... at n = 24.
  CHECK(num(rows[1][kNegmomEstimate]) ==
        doctest::Approx(24.0 / 44.0).epsilon(0.1));
  CHECK(num(rows[1][kNegmomTopDecile]) < 0.9);
  CHECK(rows[1][kDensitySupQ].empty());
}

TEST_CASE("fourthmoment rows carry exact delta and entropy trend") {
  ExperimentConfig c;
  c.experiment = "fourthmoment";
  c.n_list = {10, 20};
  c.samples = 20000;
  c.seed = 7;
  const auto rows = parse_csv(run_experiment_csv(c));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][kQ].empty());
  CHECK(std::fabs(num(rows[1][kDelta]) - 1.2) < 1e-9);
  CHECK(std::fabs(num(rows[2][kDelta]) - 0.6) < 1e-9);
  CHECK(num(rows[1][kEntropy]) > num(rows[2][kEntropy]));
  CHECK(num(rows[2][kEntropy]) > 0.0);
  CHECK(num(rows[1][kFisher]) > 0.0);
  CHECK(num(rows[1][kKolmogorov]) > num(rows[2][kKolmogorov]));
}

TEST_CASE("breuer major rows hold distances to the fitted gaussian") {
  ExperimentConfig c;
  c.experiment = "breuer-major";
  c.model_kind = "ar1";
  c.model_a = 0.5;
  c.n_list = {32, 128};
  c.samples = 20000;
  c.seed = 13;
  const auto rows = parse_csv(run_experiment_csv(c));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][kQ].empty());
  CHECK(!rows[1][kDelta].empty());
  // At n = 32 the quadratic sum is still visibly skewed; quadrupling n
  // moves both distances toward the Gaussian limit.
  CHECK(num(rows[1][kKolmogorov]) < 0.12);
  CHECK(num(rows[2][kKolmogorov]) < num(rows[1][kKolmogorov]));
  CHECK(num(rows[2][kW1]) < num(rows[1][kW1]));
}

TEST_CASE("goe rows work on both backends") {
  ExperimentConfig c;
  c.experiment = "goe";
  c.goe_p = 1;
  c.goe_backend = "symbolic";
  c.n_list = {3, 5};
  c.samples = 10000;
  c.seed = 17;
  const auto rows = parse_csv(run_experiment_csv(c));
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i <= 2; ++i) {
    CHECK(rows[i][kQ] == "1");
    // A linear trace is exactly Gaussian, so the standardized excess
    // kurtosis sits at zero up to sampling noise.
    CHECK(std::fabs(num(rows[i][kDelta])) < 0.2);
    CHECK(num(rows[i][kKolmogorov]) < 0.03);
  }

  ExperimentConfig s = c;
  s.goe_backend = "sampling";
  s.goe_p = 2;
  s.n_list = {6};
  const auto srows = parse_csv(run_experiment_csv(s));
  REQUIRE(srows.size() == 2);
  CHECK(srows[1][kQ] == "2");
  CHECK(!srows[1][kDelta].empty());
  CHECK(num(srows[1][kKolmogorov]) < 0.2);

  const std::string again = run_experiment_csv(s);
  ExperimentConfig s4 = s;
  s4.workers = 4;
  CHECK(run_experiment_csv(s4) == again);
}

TEST_CASE("wishart rows report the inverse determinant mean") {
  ExperimentConfig c;
  c.experiment = "wishart";
  c.wishart_cols = 2;
  c.n_list = {10};
  c.samples = 5000;
  c.seed = 19;
  const auto rows = parse_csv(run_experiment_csv(c));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][kQ] == "1");
  CHECK(rows[1][kNegmomEstimate] != "divergent");
  // E[det A^{-1}] = n^2 / ((n-2)(n-3)) = 100/56 at n = 10.
  CHECK(num(rows[1][kNegmomEstimate]) ==
        doctest::Approx(100.0 / 56.0).epsilon(0.15));
  CHECK(rows[1][kNegmomTopDecile].empty());
}

TEST_CASE("sidecar json round trips the config") {
  ExperimentConfig c;
  c.experiment = "breuer-major";
  c.n_list = {16, 32};
  c.q_list = {1.0};
  c.samples = 777;
  c.seed = 99;
  c.workers = 4;
  c.output = "/tmp/rt.csv";
  c.model_kind = "fgn";
  c.model_hurst = 0.7;
  c.poly = {{1, 2.0}, {3, 1.0}};

  const std::string text = config_to_json_text(c);
  const ExperimentConfig back = config_from_json_text(text);
  CHECK(back.experiment == c.experiment);
  CHECK(back.n_list == c.n_list);
  CHECK(back.q_list == c.q_list);
  CHECK(back.samples == c.samples);
  CHECK(back.seed == c.seed);
  CHECK(back.output == c.output);
  CHECK(back.model_kind == c.model_kind);
  CHECK(back.model_hurst == c.model_hurst);
  CHECK(back.poly == c.poly);
  CHECK(back.goe_p == c.goe_p);
  CHECK(back.goe_backend == c.goe_backend);
  CHECK(back.wishart_cols == c.wishart_cols);
  // The worker count is a scheduling knob, not part of the sidecar.
  CHECK(back.workers == 1);
  CHECK(text.find("\"workers\"") == std::string::npos);
  CHECK(text.find("\"version\"") != std::string::npos);

  // Defaults are resolved on the way out.
  ExperimentConfig d;
  const ExperimentConfig rd = config_from_json_text(config_to_json_text(d));
  CHECK(rd.q_list == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(rd.poly == std::map<unsigned, double>{{2, 1.0}});

  CHECK_THROWS_AS((void)config_from_json_text("{\"frolic\": 1}"), ConfigError);
  CHECK_THROWS_AS((void)config_from_json_text("not json"), ConfigError);
}

TEST_CASE("run_experiment writes matching files") {
  ExperimentConfig c;
  c.experiment = "counterexample";
  c.n_list = {5};
  c.q_list = {1.0};
  c.samples = 5000;
  c.seed = 10;
  c.output = "/tmp/chaoslab_test_run.csv";

  run_experiment(c, false);
  const std::string csv = slurp(c.output);
  CHECK(csv == run_experiment_csv(c));
  const std::string side = slurp(c.output + ".json");
  CHECK(side == config_to_json_text(c));
  const ExperimentConfig back = config_from_json_text(side);
  CHECK(back.experiment == "counterexample");
  CHECK(back.samples == 5000);

  run_experiment(c, false);
  CHECK(slurp(c.output) == csv);
  CHECK(slurp(c.output + ".json") == side);
  std::remove(c.output.c_str());
  std::remove((c.output + ".json").c_str());
}

TEST_CASE("selftest and oracles print reference lines") {
  const std::string st = selftest_text();
  std::size_t count = 0;
  std::istringstream in(st);
  std::string line;
  while (std::getline(in, line)) {
    CHECK(line.rfind("ok ", 0) == 0);
    ++count;
  }
  CHECK(count == 9);

  CHECK(oracle_text("quadrature").find("k=10") != std::string::npos);
  CHECK(oracle_text("cauchy-binet").find("n=6 q=3") != std::string::npos);
  CHECK(oracle_text("wick").find("factorial=40320") != std::string::npos);
  CHECK(oracle_text("catalan").find("catalan=132") != std::string::npos);
  CHECK_THROWS_AS((void)oracle_text("entropy"), std::invalid_argument);
}
