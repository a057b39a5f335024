#include "chaoslab/experiments.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "chaoslab/applications.hpp"
#include "chaoslab/gauss_poly.hpp"
#include "chaoslab/malliavin.hpp"
#include "chaoslab/montecarlo.hpp"
#include "chaoslab/numeric.hpp"
#include "chaoslab/spectral.hpp"

namespace chaoslab {

ConfigError::ConfigError(std::size_t line_, std::string field_,
                         const std::string& what_)
    : std::runtime_error(
          (line_ > 0 ? "line " + std::to_string(line_) + ": " : "") +
          "field '" + field_ + "': " + what_),
      line(line_),
      field(std::move(field_)) {}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "superconv", "negmom",  "fourthmoment", "breuer-major",
      "goe",       "wishart", "counterexample"};
  return names;
}

std::vector<double> resolved_q_list(const ExperimentConfig& c) {
  if (!c.q_list.empty()) return c.q_list;
  if (c.experiment == "superconv") return {0.0, 1.0, 2.0};
  if (c.experiment == "negmom") return {1.0, 2.0};
  if (c.experiment == "wishart" || c.experiment == "counterexample")
    return {1.0};
  return {};
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    parts.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

double parse_double(std::size_t line, const std::string& field,
                    const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError(line, field, "expected a number, got '" + t + "'");
  if (!std::isfinite(v))
    throw ConfigError(line, field, "value must be finite");
  return v;
}

std::uint64_t parse_u64(std::size_t line, const std::string& field,
                        const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError(line, field,
                      "expected a nonnegative integer, got '" + t + "'");
  return v;
}

void check_model_rho(std::size_t line, const std::vector<double>& rho) {
  if (rho.empty() || rho[0] != 1.0)
    throw ConfigError(line, "model.rho", "the lag-0 value must be 1");
  for (double r : rho)
    if (!(std::fabs(r) <= 1.0))
      throw ConfigError(line, "model.rho", "correlations must lie in [-1, 1]");
}

void apply_key(ExperimentConfig& c, std::size_t line, const std::string& key,
               const std::string& value) {
  if (key == "experiment") {
    const std::string v = trim(value);
    for (const auto& name : experiment_names())
      if (v == name) {
        c.experiment = v;
        return;
      }
    std::string names;
    for (const auto& name : experiment_names())
      names += (names.empty() ? "" : ", ") + name;
    throw ConfigError(line, key,
                      "unknown experiment '" + v + "' (expected one of " +
                          names + ")");
  }
  if (key == "n_list") {
    std::vector<std::size_t> ns;
    for (const auto& part : split_list(value)) {
      const std::uint64_t n = parse_u64(line, key, part);
      if (n == 0) throw ConfigError(line, key, "sizes must be at least 1");
      ns.push_back(static_cast<std::size_t>(n));
    }
    if (ns.empty()) throw ConfigError(line, key, "need at least one size");
    c.n_list = std::move(ns);
    return;
  }
  if (key == "q_list") {
    std::vector<double> qs;
    for (const auto& part : split_list(value)) {
      const double q = parse_double(line, key, part);
      if (q < 0.0) throw ConfigError(line, key, "orders must be nonnegative");
      qs.push_back(q);
    }
    if (qs.empty()) throw ConfigError(line, key, "need at least one order");
    c.q_list = std::move(qs);
    return;
  }
  if (key == "samples") {
    const std::uint64_t v = parse_u64(line, key, value);
    if (v == 0) throw ConfigError(line, key, "need at least one sample");
    c.samples = static_cast<std::size_t>(v);
    return;
  }
  if (key == "seed") {
    c.seed = parse_u64(line, key, value);
    return;
  }
  if (key == "workers") {
    const std::uint64_t v = parse_u64(line, key, value);
    if (v == 0 || v > 64)
      throw ConfigError(line, key, "worker count must be in 1..64");
    c.workers = static_cast<unsigned>(v);
    return;
  }
  if (key == "output") {
    const std::string v = trim(value);
    if (v.empty()) throw ConfigError(line, key, "output path must be nonempty");
    c.output = v;
    return;
  }
  if (key == "model.kind") {
    const std::string v = trim(value);
    if (v != "white" && v != "ar1" && v != "fgn" && v != "finite_range")
      throw ConfigError(line, key,
                        "unknown correlation kind '" + v +
                            "' (expected white, ar1, fgn or finite_range)");
    c.model_kind = v;
    return;
  }
  if (key == "model.a") {
    const double v = parse_double(line, key, value);
    if (!(std::fabs(v) < 1.0))
      throw ConfigError(line, key, "the ar1 coefficient must satisfy |a| < 1");
    c.model_a = v;
    return;
  }
  if (key == "model.hurst") {
    const double v = parse_double(line, key, value);
    if (!(v > 0.0) || !(v < 1.0))
      throw ConfigError(line, key, "the Hurst index must lie in (0, 1)");
    c.model_hurst = v;
    return;
  }
  if (key == "model.rho") {
    std::vector<double> rho;
    for (const auto& part : split_list(value))
      rho.push_back(parse_double(line, key, part));
    check_model_rho(line, rho);
    c.model_rho = std::move(rho);
    return;
  }
  if (key == "goe.p") {
    const std::uint64_t v = parse_u64(line, key, value);
    if (v == 0 || v > 16)
      throw ConfigError(line, key, "trace power must be in 1..16");
    c.goe_p = static_cast<unsigned>(v);
    return;
  }
  if (key == "goe.backend") {
    const std::string v = trim(value);
    if (v != "symbolic" && v != "sampling")
      throw ConfigError(line, key,
                        "unknown backend '" + v +
                            "' (expected symbolic or sampling)");
    c.goe_backend = v;
    return;
  }
  if (key == "wishart.cols") {
    const std::uint64_t v = parse_u64(line, key, value);
    if (v == 0) throw ConfigError(line, key, "need at least one column");
    c.wishart_cols = static_cast<std::size_t>(v);
    return;
  }
  if (key.rfind("poly.c", 0) == 0) {
    const std::string suffix = key.substr(6);
    std::uint64_t k = 0;
    const auto res =
        std::from_chars(suffix.data(), suffix.data() + suffix.size(), k);
    if (res.ec != std::errc() || res.ptr != suffix.data() + suffix.size() ||
        k == 0 || k > 60)
      throw ConfigError(line, key,
                        "polynomial keys look like poly.c1 .. poly.c60");
    c.poly[static_cast<unsigned>(k)] = parse_double(line, key, value);
    return;
  }
  throw ConfigError(line, key, "unknown key");
}

std::map<unsigned, double> resolved_poly(const ExperimentConfig& c) {
  if (!c.poly.empty()) return c.poly;
  return {{2u, 1.0}};
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, line, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = line.substr(eq + 1);
    if (key.empty()) throw ConfigError(lineno, line, "missing key");
    apply_key(c, lineno, key, value);
  }
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "config", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = c.experiment;
  j["n_list"] = c.n_list;
  j["q_list"] = resolved_q_list(c);
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["model"] = {{"kind", c.model_kind},
                {"a", c.model_a},
                {"hurst", c.model_hurst},
                {"rho", c.model_rho}};
  nlohmann::json poly = nlohmann::json::object();
  for (const auto& [k, v] : resolved_poly(c))
    poly["c" + std::to_string(k)] = v;
  j["poly"] = poly;
  j["goe"] = {{"p", c.goe_p}, {"backend", c.goe_backend}};
  j["wishart"] = {{"cols", c.wishart_cols}};
  j["version"] = kVersion;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(0, "json", e.what());
  }
  if (!j.is_object()) throw ConfigError(0, "json", "expected an object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "version") continue;
    if (key == "experiment") {
      apply_key(c, 0, key, value.get<std::string>());
    } else if (key == "n_list") {
      std::string joined;
      for (const auto& v : value)
        joined += (joined.empty() ? "" : ",") +
                  std::to_string(v.get<std::uint64_t>());
      apply_key(c, 0, key, joined);
    } else if (key == "q_list") {
      std::vector<double> qs;
      for (const auto& v : value) qs.push_back(v.get<double>());
      for (double q : qs)
        if (q < 0.0)
          throw ConfigError(0, key, "orders must be nonnegative");
      c.q_list = std::move(qs);
    } else if (key == "samples") {
      c.samples = value.get<std::size_t>();
      if (c.samples == 0)
        throw ConfigError(0, key, "need at least one sample");
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else if (key == "output") {
      c.output = value.get<std::string>();
    } else if (key == "model") {
      for (const auto& [mk, mv] : value.items()) {
        if (mk == "kind")
          apply_key(c, 0, "model.kind", mv.get<std::string>());
        else if (mk == "a")
          c.model_a = mv.get<double>();
        else if (mk == "hurst")
          c.model_hurst = mv.get<double>();
        else if (mk == "rho") {
          std::vector<double> rho;
          for (const auto& r : mv) rho.push_back(r.get<double>());
          check_model_rho(0, rho);
          c.model_rho = std::move(rho);
        } else
          throw ConfigError(0, "model." + mk, "unknown key");
      }
    } else if (key == "poly") {
      for (const auto& [pk, pv] : value.items())
        apply_key(c, 0, "poly." + pk, format_double(pv.get<double>()));
    } else if (key == "goe") {
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "p")
          apply_key(c, 0, "goe.p", std::to_string(gv.get<std::uint64_t>()));
        else if (gk == "backend")
          apply_key(c, 0, "goe.backend", gv.get<std::string>());
        else
          throw ConfigError(0, "goe." + gk, "unknown key");
      }
    } else if (key == "wishart") {
      for (const auto& [wk, wv] : value.items()) {
        if (wk == "cols")
          apply_key(c, 0, "wishart.cols",
                    std::to_string(wv.get<std::uint64_t>()));
        else
          throw ConfigError(0, "wishart." + wk, "unknown key");
      }
    } else {
      throw ConfigError(0, key, "unknown key");
    }
  }
  return c;
}

namespace {

constexpr const char* kCsvHeader =
    "experiment,n,q,seed,samples,delta,kolmogorov,w1,negmom_estimate,"
    "negmom_top_decile,density_sup_q,entropy,fisher,runtime_ms\n";

struct Row {
  std::string n, q, delta, kolmogorov, w1, negmom_estimate, negmom_top_decile,
      density_sup_q, entropy, fisher;
};

void emit(std::string& out, const ExperimentConfig& c, const Row& r) {
  out += c.experiment;
  out += ',';
  out += r.n;
  out += ',';
  out += r.q;
  out += ',';
  out += std::to_string(c.seed);
  out += ',';
  out += std::to_string(c.samples);
  out += ',';
  out += r.delta;
  out += ',';
  out += r.kolmogorov;
  out += ',';
  out += r.w1;
  out += ',';
  out += r.negmom_estimate;
  out += ',';
  out += r.negmom_top_decile;
  out += ',';
  out += r.density_sup_q;
  out += ',';
  out += r.entropy;
  out += ',';
  out += r.fisher;
  out += ",\n";  // runtime_ms stays empty so output bytes are schedule-free
}

unsigned as_order(double q, const char* field, unsigned lo, unsigned hi) {
  const double r = std::floor(q);
  if (r != q || q < static_cast<double>(lo) || q > static_cast<double>(hi))
    throw ConfigError(0, field,
                      "orders for this experiment must be integers in " +
                          std::to_string(lo) + ".." + std::to_string(hi));
  return static_cast<unsigned>(q);
}

std::string negmom_cell(double estimate, double top_decile_share) {
  if (!std::isfinite(estimate) || top_decile_share >= 0.9) return "divergent";
  return format_double(estimate);
}

// Exact fourth-moment gap of a second-chaos element: 48 sum lambda_i^4 over
// the eigenvalues of its coefficient matrix.
double exact_second_chaos_delta(const GaussPoly& f) {
  const Eigen::MatrixXd a = second_chaos_matrix(f);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  double sum4 = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l2 = es.eigenvalues()[i] * es.eigenvalues()[i];
    sum4 += l2 * l2;
  }
  return 48.0 * sum4;
}

// Centers and scales a value vector by its own mean and standard deviation,
// packed as a univariate batch, so distances compare against the fitted
// Gaussian rather than the standard one.
SampleBatch standardized_batch(const std::vector<double>& values,
                               std::uint64_t seed) {
  const std::size_t n = values.size();
  std::size_t kept = 0;
  for (double v : values)
    if (std::isfinite(v)) ++kept;
  if (kept < 2)
    throw std::invalid_argument("standardized_batch: too few finite values");
  const double mean =
      chunked_sum(n, [&](std::size_t i) {
        return std::isfinite(values[i]) ? values[i] : 0.0;
      }) /
      static_cast<double>(kept);
  const double ss = chunked_sum(n, [&](std::size_t i) {
    if (!std::isfinite(values[i])) return 0.0;
    const double d = values[i] - mean;
    return d * d;
  });
  const double sd = std::sqrt(ss / static_cast<double>(kept - 1));
  if (!(sd > 0.0))
    throw std::invalid_argument("standardized_batch: zero variance");
  SampleBatch b;
  b.seed = seed;
  b.size = n;
  b.dimension = 1;
  b.values.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    b.values[i] = std::isfinite(values[i])
                      ? (values[i] - mean) / sd
                      : std::numeric_limits<double>::quiet_NaN();
  for (double v : values)
    if (!std::isfinite(v)) ++b.nan_count;
  return b;
}

CorrelationModel model_from_config(const ExperimentConfig& c) {
  if (c.model_kind == "white") return CorrelationModel::white_noise();
  if (c.model_kind == "ar1") return CorrelationModel::ar1(c.model_a);
  if (c.model_kind == "fgn") return CorrelationModel::fgn(c.model_hurst);
  return CorrelationModel::finite_range(c.model_rho);
}

GaussPoly poly_from_config(const ExperimentConfig& c) {
  GaussPoly p;
  p.basis = Basis::wick;
  for (const auto& [k, v] : resolved_poly(c))
    p.set_term(Monomial{{{1, k}}}, v);
  return p;
}

}  // namespace

std::string run_experiment_csv(const ExperimentConfig& c, bool echo_progress) {
  std::string out = kCsvHeader;
  const std::vector<double> qs = resolved_q_list(c);

  const auto cell_start = [] { return std::chrono::steady_clock::now(); };
  const auto cell_done = [&](auto t0, std::size_t n, const std::string& qtag) {
    if (!echo_progress) return;
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    const std::string suffix = qtag.empty() ? "" : " q=" + qtag;
    std::fprintf(stderr, "[chaoslab] %s n=%zu%s: %.0f ms\n",
                 c.experiment.c_str(), n, suffix.c_str(), ms);
  };

  if (c.experiment == "superconv") {
    for (std::size_t n : c.n_list) {
      const GaussPoly f = second_chaos_family(n);
      const SampleBatch b = sample_batch(f, c.samples, c.seed, {}, c.workers);
      const MomentReport mo = estimate_moments(b);
      const DistributionDistances dd = distribution_distances(b);
      for (double q : qs) {
        const auto t0 = cell_start();
        const unsigned order = as_order(q, "q_list", 0, 4);
        const DensityEstimate d = kde_density(b, order, 0.0, c.workers);
        Row r;
        r.n = std::to_string(n);
        r.q = format_double(q);
        r.delta = format_double(mo.delta);
        r.kolmogorov = format_double(dd.kolmogorov);
        r.w1 = format_double(dd.wasserstein1);
        r.density_sup_q = format_double(density_distance(d));
        emit(out, c, r);
        cell_done(t0, n, r.q);
      }
    }
    return out;
  }

  if (c.experiment == "negmom" || c.experiment == "counterexample") {
    SampleWants wants;
    wants.gamma = true;
    for (std::size_t n : c.n_list) {
      const GaussPoly f = c.experiment == "negmom" ? second_chaos_family(n)
                                                   : counterexample_family(n);
      const SampleBatch b =
          sample_batch(f, c.samples, c.seed, wants, c.workers);
      for (double q : qs) {
        const auto t0 = cell_start();
        if (!(q > 0.0))
          throw ConfigError(0, "q_list",
                            "negative-moment orders must be positive");
        const NegativeMomentReport r = estimate_negative_moment(b, q);
        Row row;
        row.n = std::to_string(n);
        row.q = format_double(q);
        row.negmom_estimate = negmom_cell(r.estimate, r.top_decile_share);
        row.negmom_top_decile = format_double(r.top_decile_share);
        emit(out, c, row);
        cell_done(t0, n, row.q);
      }
    }
    return out;
  }

  if (c.experiment == "fourthmoment") {
    for (std::size_t n : c.n_list) {
      const auto t0 = cell_start();
      const GaussPoly f = second_chaos_family(n);
      const SampleBatch b = sample_batch(f, c.samples, c.seed, {}, c.workers);
      const DistributionDistances dd = distribution_distances(b);
      const EntropyFisherReport ef = entropy_fisher(b, c.workers);
      Row r;
      r.n = std::to_string(n);
      r.delta = format_double(exact_second_chaos_delta(f));
      r.kolmogorov = format_double(dd.kolmogorov);
      r.w1 = format_double(dd.wasserstein1);
      r.entropy = format_double(ef.entropy);
      r.fisher = format_double(ef.fisher);
      emit(out, c, r);
      cell_done(t0, n, "");
    }
    return out;
  }

  if (c.experiment == "breuer-major") {
    const CorrelationModel model = model_from_config(c);
    const GaussPoly P = poly_from_config(c);
    for (std::size_t n : c.n_list) {
      const auto t0 = cell_start();
      const BreuerMajorResult bm = breuer_major(model, P, n);
      const SampleBatch b =
          sample_batch(bm.functional, c.samples, c.seed, {}, c.workers);
      const MomentReport mo = estimate_moments(b);
      const SampleBatch z = standardized_batch(b.values, c.seed);
      const DistributionDistances dd = distribution_distances(z);
      Row r;
      r.n = std::to_string(n);
      r.delta = format_double(mo.delta);
      r.kolmogorov = format_double(dd.kolmogorov);
      r.w1 = format_double(dd.wasserstein1);
      emit(out, c, r);
      cell_done(t0, n, "");
    }
    return out;
  }

  if (c.experiment == "goe") {
    for (std::size_t n : c.n_list) {
      const auto t0 = cell_start();
      MatrixFunctionalSpec spec;
      spec.family = MatrixFamily::goe;
      spec.n = n;
      spec.p = c.goe_p;
      std::vector<double> values;
      if (c.goe_backend == "symbolic") {
        spec.backend = MatrixBackend::symbolic;
        const GaussPoly f = goe_functional(spec);
        values = sample_batch(f, c.samples, c.seed, {}, c.workers).values;
      } else {
        spec.backend = MatrixBackend::sampling;
        values = goe_sampler(spec).sample(c.samples, c.seed, c.workers);
      }
      const SampleBatch z = standardized_batch(values, c.seed);
      const MomentReport mo = estimate_moments(z);
      const DistributionDistances dd = distribution_distances(z);
      Row r;
      r.n = std::to_string(n);
      r.q = std::to_string(c.goe_p);
      r.delta = format_double(mo.delta);
      r.kolmogorov = format_double(dd.kolmogorov);
      r.w1 = format_double(dd.wasserstein1);
      emit(out, c, r);
      cell_done(t0, n, "");
    }
    return out;
  }

  if (c.experiment == "wishart") {
    for (std::size_t n : c.n_list) {
      for (double q : qs) {
        const auto t0 = cell_start();
        const unsigned order = as_order(q, "q_list", 1, 8);
        const WishartReport r = wishart_experiment(
            n, c.wishart_cols, order, c.samples, c.seed, c.workers);
        Row row;
        row.n = std::to_string(n);
        row.q = format_double(q);
        row.negmom_estimate = std::isfinite(r.det_inverse_mean)
                                  ? format_double(r.det_inverse_mean)
                                  : "divergent";
        emit(out, c, row);
        cell_done(t0, n, row.q);
      }
    }
    return out;
  }

  throw ConfigError(0, "experiment", "unknown experiment '" + c.experiment +
                                         "'");
}

void run_experiment(const ExperimentConfig& c, bool echo_progress) {
  const std::string csv = run_experiment_csv(c, echo_progress);
  {
    std::ofstream out(c.output, std::ios::binary);
    if (!out)
      throw ConfigError(0, "output", "cannot write '" + c.output + "'");
    out << csv;
  }
  const std::string sidecar_path = c.output + ".json";
  std::ofstream side(sidecar_path, std::ios::binary);
  if (!side)
    throw ConfigError(0, "output", "cannot write '" + sidecar_path + "'");
  side << config_to_json_text(c);
}

std::string selftest_text() {
  std::string s;
  const auto ok = [&s](bool cond, const char* label) {
    if (!cond) throw std::runtime_error(std::string("selftest failed: ") + label);
    s += "ok ";
    s += label;
    s += '\n';
  };
  const auto near = [](double a, double b, double tol) {
    return std::fabs(a - b) <= tol * (1.0 + std::fabs(b));
  };

  GaussPoly f;
  f.set_term(Monomial{{{1, 3}}}, 1.0);
  f.set_term(Monomial{{{1, 1}, {2, 1}}}, 2.0);
  const GaussPoly back = from_wick(to_wick(f));
  bool round = back.terms.size() == f.terms.size();
  for (const auto& [m, cf] : f.terms) {
    const auto it = back.terms.find(m);
    round = round && it != back.terms.end() && near(it->second, cf, 1e-12);
  }
  ok(round, "wick round trip");

  bool norms = true;
  double fact = 1.0;
  for (unsigned k = 1; k <= 6; ++k) {
    fact *= k;
    const GaussPoly h = GaussPoly::hermite(1, k);
    norms = norms && near(inner_product(h, h), fact, 1e-12);
  }
  ok(norms, "hermite squared norms are factorials");

  const GaussPoly fam = second_chaos_family(7);
  ok(near(expectation(gamma(fam, fam)), 2.0 * inner_product(fam, fam), 1e-12),
     "square field balances 2 E[F^2]");

  const SymmetricSpectrum sp = SymmetricSpectrum::from_values({0.5, 0.5, 0.5});
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(3, 3);
  diag(0, 0) = diag(1, 1) = diag(2, 2) = 0.5;
  ok(near(remainder_Rq(sp, 2), cauchy_binet_Rq(diag, 2), 1e-12),
     "spectral remainder matches the determinant route");

  const QuadratureResult qr = negative_moment_quadrature(sp, 1);
  ok(!qr.divergent && near(qr.value, 1.0, 1e-6),
     "negative-moment quadrature hits the closed form");
  ok(negative_moment_quadrature(
         SymmetricSpectrum::from_values({0.5, 0.5}), 1)
         .divergent,
     "quadrature flags thin spectra as divergent");

  ok(near(inner_product(fam, fam), 1.0, 1e-12), "family has unit variance");

  MatrixFunctionalSpec goe1;
  goe1.n = 4;
  goe1.p = 1;
  const GaussPoly tr = goe_functional(goe1);
  ok(near(inner_product(tr, tr), 2.0, 1e-12), "goe linear trace variance");

  ok(near(semicircle_moment(4), 2.0, 1e-10), "semicircle fourth moment");
  return s;
}

std::string oracle_text(const std::string& name) {
  std::string s;
  if (name == "quadrature") {
    s += "eigenvalues (1/2 x k), q = 1: exact 1/(k-2)\n";
    for (unsigned k = 3; k <= 10; ++k) {
      const SymmetricSpectrum sp =
          SymmetricSpectrum::from_values(std::vector<double>(k, 0.5));
      const QuadratureResult r = negative_moment_quadrature(sp, 1);
      s += "k=" + std::to_string(k) +
           " exact=" + format_double(1.0 / (k - 2.0)) +
           " quadrature=" + format_double(r.value) +
           " abscissas=" + std::to_string(r.abscissa_count) + "\n";
    }
    return s;
  }
  if (name == "cauchy-binet") {
    s += "R_q by elementary symmetric sums vs det expansion\n";
    for (std::size_t n = 3; n <= 6; ++n) {
      std::vector<double> vals(n);
      Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(
          static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        vals[i] = static_cast<double>(i + 1) / static_cast<double>(n);
        diag(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            vals[i];
      }
      const SymmetricSpectrum sp = SymmetricSpectrum::from_values(vals);
      for (unsigned q = 1; q <= 3; ++q)
        s += "n=" + std::to_string(n) + " q=" + std::to_string(q) +
             " spectral=" + format_double(remainder_Rq(sp, q)) +
             " determinant=" + format_double(cauchy_binet_Rq(diag, q)) + "\n";
    }
    return s;
  }
  if (name == "wick") {
    s += "E[H_k(N)^2] = k! and E[N^{2k}] = (2k-1)!!\n";
    double fact = 1.0;
    for (unsigned k = 1; k <= 8; ++k) {
      fact *= k;
      const GaussPoly h = GaussPoly::hermite(1, k);
      s += "k=" + std::to_string(k) + " factorial=" + format_double(fact) +
           " inner_product=" + format_double(inner_product(h, h)) + "\n";
    }
    double dfact = 1.0;
    for (unsigned k = 1; k <= 5; ++k) {
      dfact *= 2 * k - 1;
      GaussPoly m;
      m.set_term(Monomial{{{1, 2 * k}}}, 1.0);
      s += "2k=" + std::to_string(2 * k) +
           " double_factorial=" + format_double(dfact) +
           " expectation=" + format_double(expectation(m)) + "\n";
    }
    return s;
  }
  if (name == "catalan") {
    s += "semicircle moments: c_{2k} = Catalan(k)\n";
    const double catalan[] = {1.0, 1.0, 2.0, 5.0, 14.0, 42.0, 132.0};
    for (unsigned k = 0; k <= 6; ++k)
      s += "k=" + std::to_string(k) + " catalan=" + format_double(catalan[k]) +
           " integral=" + format_double(semicircle_moment(2 * k)) + "\n";
    return s;
  }
  throw std::invalid_argument(
      "unknown oracle '" + name +
      "' (expected quadrature, cauchy-binet, wick or catalan)");
}

}  // namespace chaoslab
