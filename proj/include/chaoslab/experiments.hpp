#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace chaoslab {

inline constexpr const char* kVersion = "0.1.0";

// Schema violations carry the offending line (1-based, 0 when the problem
// is not tied to a line) and the field name, both already formatted into
// what().
struct ConfigError : std::runtime_error {
  ConfigError(std::size_t line_, std::string field_, const std::string& what_);
  std::size_t line;
  std::string field;
};

// Flat key = value experiment description.  Every field has a default, so
// an empty file is a valid config.  q_list empty means "use the
// experiment's canonical orders" (superconv 0,1,2; negmom 1,2; wishart and
// counterexample 1; others none).
struct ExperimentConfig {
  std::string experiment = "superconv";
  std::vector<std::size_t> n_list = {10, 40, 160};
  std::vector<double> q_list;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output = "results.csv";

  std::string model_kind = "white";  // white | ar1 | fgn | finite_range
  double model_a = 0.5;
  double model_hurst = 0.7;
  std::vector<double> model_rho = {1.0};

  // Wick coefficients of the Breuer-Major polynomial: poly[k] multiplies
  // H_k.  Empty means the pure quadratic H_2.
  std::map<unsigned, double> poly;

  unsigned goe_p = 2;
  std::string goe_backend = "sampling";  // symbolic | sampling
  std::size_t wishart_cols = 2;
};

// Accepted experiment names, in canonical order.
const std::vector<std::string>& experiment_names();

// The q orders a config will actually run.
std::vector<double> resolved_q_list(const ExperimentConfig& c);

// Parses one assignment per line; '#' starts a comment.  Unknown keys and
// malformed values raise ConfigError with line and field diagnostics.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Sidecar serialization.  The JSON records the resolved experiment
// definition (q_list and poly made explicit) plus the library version;
// the worker count is a scheduling knob and deliberately stays out, so
// sidecar bytes match across worker settings.  from-text reparses a
// sidecar into the equivalent config.
std::string config_to_json_text(const ExperimentConfig& c);
ExperimentConfig config_from_json_text(const std::string& text);

// Runs every (n, q) cell of the config and returns the CSV table.  Columns:
// experiment,n,q,seed,samples,delta,kolmogorov,w1,negmom_estimate,
// negmom_top_decile,density_sup_q,entropy,fisher,runtime_ms.
// Cells a column does not apply to stay empty.  Divergent negative moments
// print the literal token `divergent`.  The bytes depend only on the
// config's experiment definition, never on scheduling; per-cell timings go
// to stderr when echo_progress is set.
std::string run_experiment_csv(const ExperimentConfig& c,
                               bool echo_progress = false);

// run_experiment_csv plus files: writes the CSV to c.output and the JSON
// sidecar next to it at c.output + ".json".
void run_experiment(const ExperimentConfig& c, bool echo_progress = true);

// Invariant spot checks, one "ok" line each; throws on the first failure.
std::string selftest_text();

// Reference tables printed by `chaoslab oracle <name>`:
// quadrature | cauchy-binet | wick | catalan.
std::string oracle_text(const std::string& name);

}  // namespace chaoslab
