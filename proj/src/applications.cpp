#include "chaoslab/applications.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "chaoslab/malliavin.hpp"
#include "chaoslab/numeric.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

// ---------------------------------------------------------------------------
// Correlation models
// ---------------------------------------------------------------------------

CorrelationModel CorrelationModel::finite_range(std::vector<double> rho) {
  if (rho.empty() || rho[0] != 1.0)
    throw std::invalid_argument(
        "CorrelationModel: rho(0) must be 1, got " +
        std::string(rho.empty() ? "an empty profile"
                                : std::to_string(rho[0])));
  for (double r : rho)
    if (!(std::fabs(r) <= 1.0))
      throw std::invalid_argument(
          "CorrelationModel: |rho(k)| <= 1 violated by " + std::to_string(r));
  CorrelationModel m;
  m.kind = CorrelationKind::finite_range;
  m.rho_values = std::move(rho);
  return m;
}

CorrelationModel CorrelationModel::white_noise() { return finite_range({1.0}); }

CorrelationModel CorrelationModel::ar1(double a) {
  if (!(std::fabs(a) < 1.0))
    throw std::invalid_argument(
        "CorrelationModel: ar1 coefficient must satisfy |a| < 1, got " +
        std::to_string(a));
  CorrelationModel m;
  m.kind = CorrelationKind::ar1;
  m.a = a;
  return m;
}

CorrelationModel CorrelationModel::fgn(double h) {
  if (!(h > 0.0) || !(h < 1.0))
    throw std::invalid_argument(
        "CorrelationModel: Hurst index must lie in (0,1), got " +
        std::to_string(h));
  CorrelationModel m;
  m.kind = CorrelationKind::fgn;
  m.hurst = h;
  return m;
}

double CorrelationModel::rho(std::int64_t k) const {
  const std::uint64_t ak = static_cast<std::uint64_t>(k < 0 ? -k : k);
  if (ak == 0) return 1.0;
  switch (kind) {
    case CorrelationKind::finite_range:
      return ak < rho_values.size() ? rho_values[ak] : 0.0;
    case CorrelationKind::ar1:
      return std::pow(a, static_cast<double>(ak));
    case CorrelationKind::fgn: {
      const double x = static_cast<double>(ak);
      const double e = 2.0 * hurst;
      return 0.5 * (std::pow(x + 1.0, e) - 2.0 * std::pow(x, e) +
                    std::pow(x - 1.0, e));
    }
  }
  return 0.0;
}

double CorrelationModel::ell_s_tail(double s, std::int64_t from) const {
  if (!(s > 0.0))
    throw std::invalid_argument("ell_s_tail: exponent must be positive");
  const std::int64_t horizon = 200000;
  NeumaierSum acc;
  for (std::int64_t k = std::max<std::int64_t>(from, 0); k <= horizon; ++k) {
    const double term = std::pow(std::fabs(rho(k)), s);
    acc.add(term);
    if (kind == CorrelationKind::finite_range &&
        k + 1 >= static_cast<std::int64_t>(rho_values.size()))
      break;
    if (term < 1e-14 * (1.0 + acc.value()) && k > from + 8) break;
  }
  return acc.value();
}

Eigen::MatrixXd toeplitz_covariance(const CorrelationModel& m, std::size_t n) {
  if (n == 0)
    throw std::invalid_argument("toeplitz_covariance: need n >= 1");
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m.rho(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      cov, Eigen::EigenvaluesOnly);
  const double floor = solver.eigenvalues().minCoeff();
  if (floor < -1e-8)
    throw std::invalid_argument(
        "toeplitz_covariance: correlation profile is not positive "
        "semidefinite (smallest eigenvalue " +
        std::to_string(floor) + ")");
  return cov;
}

// ---------------------------------------------------------------------------
// Second chaos families
// ---------------------------------------------------------------------------

GaussPoly second_chaos_family(std::size_t n) {
  if (n == 0) throw std::invalid_argument("second_chaos_family: need n >= 1");
  const double lambda = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  GaussPoly f;
  f.basis = Basis::wick;
  for (std::size_t i = 1; i <= n; ++i)
    f.set_term(Monomial{{{static_cast<std::uint32_t>(i), 2}}}, lambda);
  return f;
}

GaussPoly second_chaos_family(std::vector<double> lambdas, bool normalize) {
  double sum2 = 0.0;
  for (double l : lambdas) sum2 += 2.0 * l * l;
  if (sum2 == 0.0)
    throw std::invalid_argument(
        "second_chaos_family: eigenvalue profile is identically zero");
  if (normalize) {
    const double scale = 1.0 / std::sqrt(sum2);
    for (double& l : lambdas) l *= scale;
  }
  GaussPoly f;
  f.basis = Basis::wick;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (lambdas[i] != 0.0)
      f.set_term(Monomial{{{static_cast<std::uint32_t>(i + 1), 2}}},
                 lambdas[i]);
  return f;
}

GaussPoly counterexample_family(std::size_t n) {
  if (n == 0) throw std::invalid_argument("counterexample_family: need n >= 1");
  GaussPoly f;
  f.basis = Basis::wick;
  f.set_term(Monomial{{{1, 2}}}, 1.0 / static_cast<double>(n));
  f.set_term(Monomial{{{1, 1}}}, 1.0);
  return f;
}

// ---------------------------------------------------------------------------
// Breuer-Major sums
// ---------------------------------------------------------------------------

unsigned hermite_rank(const GaussPoly& P) {
  if (P.support().size() > 1)
    throw std::invalid_argument(
        "hermite_rank: polynomial must involve a single coordinate");
  const GaussPoly w = to_wick(P);
  unsigned rank = 0;
  for (const auto& [m, c] : w.terms) {
    const unsigned deg = m.total_degree();
    if (deg == 0 || c == 0.0) continue;
    if (rank == 0 || deg < rank) rank = deg;
  }
  if (rank == 0)
    throw std::invalid_argument(
        "hermite_rank: polynomial is constant after centering");
  return rank;
}

BreuerMajorResult breuer_major(const CorrelationModel& model,
                               const GaussPoly& P, std::size_t n,
                               std::size_t term_budget) {
  if (n < 2) throw std::invalid_argument("breuer_major: need n >= 2");
  const unsigned rank = hermite_rank(P);

  const Eigen::MatrixXd cov = toeplitz_covariance(model, n);
  Eigen::MatrixXd L;
  {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
    } else {
      // Semidefinite profiles (constant sequences, fgn at the PSD edge)
      // break the strict Cholesky; the pivoted LDL^T with clipped D gives
      // the same covariance.
      Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
      const Eigen::MatrixXd unit = ldlt.matrixL();
      const Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
      L = ldlt.transpositionsP().transpose() *
          Eigen::MatrixXd(unit * d.asDiagonal());
    }
  }

  const GaussPoly Pm = P.basis == Basis::wick ? from_wick(P) : P;
  unsigned max_exp = Pm.degree();

  GaussPoly total;
  for (std::size_t k = 0; k < n; ++k) {
    GaussPoly x;
    for (std::size_t j = 0; j <= k; ++j) {
      const double l = L(static_cast<Eigen::Index>(k),
                         static_cast<Eigen::Index>(j));
      if (l != 0.0)
        x.set_term(Monomial{{{static_cast<std::uint32_t>(j + 1), 1}}}, l);
    }
    std::vector<GaussPoly> powers(max_exp + 1);
    powers[0] = GaussPoly::constant(1.0);
    for (unsigned e = 1; e <= max_exp; ++e)
      powers[e] = multiply(powers[e - 1], x, term_budget);

    for (const auto& [m, c] : Pm.terms) {
      const unsigned e = m.total_degree();
      total = total + scale(powers[e], c);
    }
  }

  GaussPoly w = to_wick(total);
  w.set_term(Monomial{}, 0.0);  // center
  BreuerMajorResult out;
  out.functional = scale(w, 1.0 / std::sqrt(static_cast<double>(n)));
  out.rank = rank;
  out.ell_s_mass = model.ell_s_tail(static_cast<double>(rank));
  return out;
}

// ---------------------------------------------------------------------------
// GOE trace moments
// ---------------------------------------------------------------------------

std::uint32_t goe_coordinate(std::size_t n, std::size_t i, std::size_t j) {
  if (i > j || j >= n)
    throw std::invalid_argument("goe_coordinate: need i <= j < n");
  const std::size_t offset = i * n - i * (i - 1) / 2 + (j - i);
  return static_cast<std::uint32_t>(offset + 1);
}

double semicircle_moment(unsigned p) {
  if (p % 2 == 1) return 0.0;
  // x = 2 sin(t) turns the endpoint square-root singularity into a smooth
  // trigonometric integrand on [0, pi/2].
  const double pi = std::acos(-1.0);
  const double factor =
      std::pow(2.0, static_cast<double>(p) + 2.0) / pi;
  const double integral = integrate_adaptive(
      [p](double t) {
        const double s = std::sin(t);
        const double c = std::cos(t);
        return std::pow(s, static_cast<double>(p)) * c * c;
      },
      0.0, 0.5 * pi, 1e-13);
  return factor * integral;
}

GaussPoly goe_functional(const MatrixFunctionalSpec& spec,
                         std::size_t term_budget) {
  if (spec.family != MatrixFamily::goe)
    throw std::invalid_argument("goe_functional: spec is not a goe family");
  if (spec.backend != MatrixBackend::symbolic)
    throw std::invalid_argument(
        "goe_functional: sampling specs go through goe_sampler");
  if (spec.n == 0 || spec.p == 0)
    throw std::invalid_argument("goe_functional: need n >= 1 and p >= 1");

  const std::size_t n = spec.n;
  const double dn = static_cast<double>(n);
  std::vector<GaussPoly> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      GaussPoly e;
      e.set_term(Monomial{{{goe_coordinate(n, i, j), 1}}},
                 std::sqrt((i == j ? 2.0 : 1.0) / dn));
      a[i * n + j] = e;
      a[j * n + i] = e;
    }

  try {
    std::vector<GaussPoly> power = a;
    for (unsigned step = 1; step < spec.p; ++step) {
      std::vector<GaussPoly> next(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          GaussPoly cell;
          for (std::size_t k = 0; k < n; ++k)
            cell = cell + multiply(power[i * n + k], a[k * n + j], term_budget);
          next[i * n + j] = cell;
        }
      power.swap(next);
    }
    GaussPoly trace;
    for (std::size_t i = 0; i < n; ++i) trace = trace + power[i * n + i];
    trace = trace - GaussPoly::constant(dn * semicircle_moment(spec.p));
    return to_wick(trace);
  } catch (const TermBudgetExceeded&) {
    throw std::invalid_argument(
        "goe_functional: symbolic tr(A^p) for n=" + std::to_string(n) +
        ", p=" + std::to_string(spec.p) +
        " exceeds the term budget; use the sampling backend (goe_sampler)");
  }
}

GoeSampler goe_sampler(const MatrixFunctionalSpec& spec) {
  if (spec.family != MatrixFamily::goe)
    throw std::invalid_argument("goe_sampler: spec is not a goe family");
  if (spec.n == 0 || spec.p == 0)
    throw std::invalid_argument("goe_sampler: need n >= 1 and p >= 1");
  GoeSampler s;
  s.n = spec.n;
  s.p = spec.p;
  s.centering = static_cast<double>(spec.n) * semicircle_moment(spec.p);
  return s;
}

std::vector<double> GoeSampler::sample(std::size_t count, std::uint64_t seed,
                                       unsigned workers) const {
  if (count == 0)
    throw std::invalid_argument("GoeSampler: need at least one sample");
  const std::size_t m = n * (n + 1) / 2;
  const std::size_t K = m + 1;  // slot 0 unused, coordinates start at N1
  const GaussianStream stream(seed, 0);
  const double dn = static_cast<double>(n);

  std::vector<double> out(count, 0.0);
  const std::size_t chunks = (count + kSumChunk - 1) / kSumChunk;
  parallel_chunks(chunks, workers, [&](std::size_t ci) {
    Eigen::MatrixXd a;
    if (p != 2) a.resize(static_cast<Eigen::Index>(n),
                         static_cast<Eigen::Index>(n));
    const std::size_t lo = ci * kSumChunk;
    const std::size_t hi = std::min(count, lo + kSumChunk);
    for (std::size_t s = lo; s < hi; ++s) {
      const std::uint64_t base = static_cast<std::uint64_t>(s) * K;
      if (p == 2) {
        // tr(A^2) is the sum of squared entries; diagonal (variance 2/n)
        // and doubled off-diagonal terms carry the same 2 v^2 / n weight.
        double acc = 0.0;
        for (std::size_t c = 1; c <= m; ++c) {
          const double v = stream.normal_at(base + c);
          acc += v * v;
        }
        out[s] = (2.0 / dn) * acc - centering;
      } else {
        std::size_t c = 1;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i; j < n; ++j) {
            const double v = stream.normal_at(base + c) *
                             std::sqrt((i == j ? 2.0 : 1.0) / dn);
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
            ++c;
          }
        Eigen::MatrixXd power = a;
        for (unsigned step = 1; step < p; ++step)
          power = Eigen::MatrixXd(power * a);
        out[s] = power.trace() - centering;
      }
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Wishart inverse determinants
// ---------------------------------------------------------------------------

WishartReport wishart_experiment(const std::vector<GaussPoly>& b_entries,
                                 std::size_t rows, std::size_t cols,
                                 unsigned q, std::size_t samples,
                                 std::uint64_t seed, unsigned workers) {
  if (cols == 0 || rows == 0)
    throw std::invalid_argument("wishart_experiment: need rows, cols >= 1");
  if (cols > rows)
    throw std::invalid_argument(
        "wishart_experiment: cols > rows makes tB B almost surely singular");
  if (q == 0)
    throw std::invalid_argument("wishart_experiment: need q >= 1");
  if (samples == 0)
    throw std::invalid_argument("wishart_experiment: need samples >= 1");
  if (b_entries.size() != rows * cols)
    throw std::invalid_argument(
        "wishart_experiment: entry matrix must be rows*cols in row-major "
        "order");
  std::uint32_t bound = 1;
  for (const auto& e : b_entries) {
    const GaussPoly w = to_wick(e);
    if (w.terms.empty())
      throw std::invalid_argument(
          "wishart_experiment: entries must be nonzero first-chaos "
          "polynomials");
    for (const auto& [mono, c] : w.terms)
      if (mono.total_degree() != 1 && c != 0.0)
        throw std::invalid_argument(
            "wishart_experiment: entries must be centered first-chaos "
            "polynomials");
    bound = std::max(bound, e.coordinate_bound());
  }

  // F_j = sum_i B_ij N_{bound+i}: a second-chaos vector whose square-field
  // matrix is tB B plus a positive semidefinite remainder.
  std::vector<GaussPoly> comps(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    GaussPoly f;
    for (std::size_t i = 0; i < rows; ++i) {
      const GaussPoly& e = b_entries[i * cols + j];
      GaussPoly g;
      g.set_term(Monomial{{{static_cast<std::uint32_t>(bound + i), 1}}}, 1.0);
      f = f + multiply(e.basis == Basis::wick ? from_wick(e) : e, g);
    }
    comps[j] = f;
  }
  const ChaosVector v(comps, std::vector<unsigned>(cols, 2));
  const PolyMatrix gam = malliavin_matrix(v);

  const std::size_t K = bound + rows;
  const GaussianStream stream(seed, 0);

  std::vector<double> dets(samples, 0.0);
  const std::size_t chunks = (samples + kSumChunk - 1) / kSumChunk;
  std::vector<double> floor_per_chunk(chunks, 0.0);
  std::vector<std::size_t> fail_per_chunk(chunks, 0);
  std::vector<std::size_t> excl_per_chunk(chunks, 0);

  parallel_chunks(chunks, workers, [&](std::size_t ci) {
    std::vector<double> point(K, 0.0);
    Eigen::MatrixXd b(static_cast<Eigen::Index>(rows),
                      static_cast<Eigen::Index>(cols));
    Eigen::MatrixXd gnum(static_cast<Eigen::Index>(cols),
                         static_cast<Eigen::Index>(cols));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    double chunk_floor = std::numeric_limits<double>::infinity();
    const std::size_t lo = ci * kSumChunk;
    const std::size_t hi = std::min(samples, lo + kSumChunk);
    for (std::size_t s = lo; s < hi; ++s) {
      for (std::size_t c = 0; c < K; ++c)
        point[c] = stream.normal_at(static_cast<std::uint64_t>(s) * K + c);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
          b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              evaluate(b_entries[i * cols + j], point);
      const Eigen::MatrixXd A = b.transpose() * b;
      for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j)
          gnum(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              evaluate(gam.at(i, j), point);
      solver.compute(gnum - A, Eigen::EigenvaluesOnly);
      const double mineig = solver.eigenvalues().minCoeff();
      chunk_floor = std::min(chunk_floor, mineig);
      if (mineig < -1e-8) ++fail_per_chunk[ci];

      const double det = A.determinant();
      if (det <= 0.0) {
        ++excl_per_chunk[ci];
        dets[s] = 0.0;
      } else {
        dets[s] = std::pow(det, -static_cast<double>(q));
      }
    }
    floor_per_chunk[ci] = chunk_floor;
  });

  WishartReport r;
  r.samples = samples;
  r.domination_floor = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < chunks; ++c) {
    r.domination_floor = std::min(r.domination_floor, floor_per_chunk[c]);
    r.domination_failures += fail_per_chunk[c];
    r.excluded += excl_per_chunk[c];
  }
  const double kept = static_cast<double>(samples - r.excluded);
  if (kept == 0.0)
    throw std::invalid_argument(
        "wishart_experiment: every sample had a singular A");
  r.det_inverse_mean = chunked_sum(dets) / kept;
  const double mean = r.det_inverse_mean;
  const double var =
      chunked_sum(dets.size(),
                  [&](std::size_t i) {
                    if (dets[i] == 0.0) return 0.0;
                    const double d = dets[i] - mean;
                    return d * d;
                  }) /
      kept;
  r.det_inverse_se = std::sqrt(var / kept);
  return r;
}

WishartReport wishart_experiment(std::size_t rows, std::size_t cols,
                                 unsigned q, std::size_t samples,
                                 std::uint64_t seed, unsigned workers) {
  if (rows == 0) throw std::invalid_argument("wishart_experiment: rows >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  std::vector<GaussPoly> b(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      GaussPoly e;
      e.set_term(
          Monomial{{{static_cast<std::uint32_t>(1 + i * cols + j), 1}}},
          scale);
      b[i * cols + j] = e;
    }
  return wishart_experiment(b, rows, cols, q, samples, seed, workers);
}

}  // namespace chaoslab
