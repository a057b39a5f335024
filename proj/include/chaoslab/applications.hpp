#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "chaoslab/gauss_poly.hpp"

namespace chaoslab {

// ---------------------------------------------------------------------------
// Stationary correlation models
// ---------------------------------------------------------------------------

enum class CorrelationKind { finite_range, ar1, fgn };

// Correlation function rho(k) of a stationary Gaussian sequence.  Three
// concrete families: finitely supported values, geometric decay rho(k) =
// a^|k|, and fractional Gaussian noise increments with Hurst index H,
// rho(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
struct CorrelationModel {
  CorrelationKind kind = CorrelationKind::finite_range;
  std::vector<double> rho_values = {1.0};  // finite_range lags 0,1,...
  double a = 0.0;                          // ar1 coefficient
  double hurst = 0.5;                      // fgn Hurst index

  // Constructors validate rho(0) = 1 and |rho(k)| <= 1.
  static CorrelationModel finite_range(std::vector<double> rho);
  static CorrelationModel white_noise();  // finite_range with rho = (1)
  static CorrelationModel ar1(double a);
  static CorrelationModel fgn(double h);

  double rho(std::int64_t k) const;

  // Numeric partial sum of sum_{k >= from} |rho(k)|^s, truncated at a fixed
  // horizon once increments stop mattering.  Reported, never assumed: slow
  // polynomial tails (fgn near H = 1) are summed as far as the horizon
  // reaches.
  double ell_s_tail(double s, std::int64_t from = 0) const;
};

// n x n Toeplitz matrix rho(|i-j|).  Throws when the smallest eigenvalue
// drops below -1e-8, since such a matrix is no covariance.
Eigen::MatrixXd toeplitz_covariance(const CorrelationModel& m, std::size_t n);

// ---------------------------------------------------------------------------
// Second chaos families
// ---------------------------------------------------------------------------

// F_n = sum_{i<=n} lambda_i (N_i^2 - 1) with the default profile
// lambda_i = 1 / sqrt(2n), which makes Var F_n = 1.
GaussPoly second_chaos_family(std::size_t n);

// Explicit eigenvalue profile; normalize scales it so sum 2 lambda^2 = 1.
// Throws when every eigenvalue is zero.
GaussPoly second_chaos_family(std::vector<double> lambdas, bool normalize);

// Centered variant of the classical non-integrable example: F_n =
// n^{-1}(N_1^2 - 1) + N_1.  Its square field (2 N_1 / n + 1)^2 vanishes on
// a set of positive Gaussian measure, so E[Gamma^{-q}] is infinite for
// every n; negative-moment estimates on it must flag divergence.
GaussPoly counterexample_family(std::size_t n);

// ---------------------------------------------------------------------------
// Breuer-Major sums
// ---------------------------------------------------------------------------

// Smallest s >= 1 with a nonzero H_s coefficient of P - E[P].  P must be a
// polynomial in a single coordinate; throws if P is constant after
// centering or touches several coordinates.
unsigned hermite_rank(const GaussPoly& P);

struct BreuerMajorResult {
  GaussPoly functional;  // Z_n, centered, in the wick basis
  unsigned rank = 0;     // hermite rank of P
  double ell_s_mass = 0.0;  // numeric sum of |rho(k)|^rank, k >= 0
};

// Z_n = n^{-1/2} (sum_{k<n} P(X_k) - E), where X_k = sum_j L_{kj} N_{j+1}
// and L is the Cholesky factor of the n x n Toeplitz covariance (with a
// pivoted LDL^T fallback when the matrix is only semidefinite).  Also
// reports the hermite rank of P and the numeric ell^s mass of rho at
// s = rank, the quantity whose finiteness drives the central limit.
BreuerMajorResult breuer_major(const CorrelationModel& model,
                               const GaussPoly& P, std::size_t n,
                               std::size_t term_budget = kDefaultTermBudget);

// ---------------------------------------------------------------------------
// Matrix functionals
// ---------------------------------------------------------------------------

enum class MatrixFamily { goe, wishart };
enum class MatrixBackend { symbolic, sampling };

struct MatrixFunctionalSpec {
  MatrixFamily family = MatrixFamily::goe;
  std::size_t n = 2;                // matrix size
  unsigned p = 1;                   // trace moment order
  MatrixBackend backend = MatrixBackend::symbolic;
};

// Coordinate index of the GOE entry (i, j), i <= j < n: upper-triangle
// row-major, starting at N_1.  Shared by the symbolic functional and the
// sampling backend so both read the same randomness.
std::uint32_t goe_coordinate(std::size_t n, std::size_t i, std::size_t j);

// (1/2pi) integral of x^p sqrt(4 - x^2) over [-2, 2]: the p-th moment of
// the semicircle law.  Odd p returns exactly 0; even p = 2k equals the
// k-th Catalan number.
double semicircle_moment(unsigned p);

// tr(A_n^p) - n c_p as a polynomial in the upper-triangle entries, where
// A_n has centered Gaussian entries with variance 2/n on the diagonal and
// 1/n off it.  Throws with a pointer to the sampling backend when the
// symbolic trace would blow the term budget.
GaussPoly goe_functional(const MatrixFunctionalSpec& spec,
                         std::size_t term_budget = kDefaultTermBudget);

// Sampling backend: draws the matrix entries from the same coordinate
// layout and evaluates tr(A^p) - n c_p numerically.  p = 2 streams the sum
// of squared entries without materializing the matrix.
struct GoeSampler {
  std::size_t n = 2;
  unsigned p = 1;
  double centering = 0.0;  // n * c_p

  std::vector<double> sample(std::size_t count, std::uint64_t seed,
                             unsigned workers = 1) const;
};

GoeSampler goe_sampler(const MatrixFunctionalSpec& spec);

// ---------------------------------------------------------------------------
// Wishart inverse determinants
// ---------------------------------------------------------------------------

struct WishartReport {
  double det_inverse_mean = 0.0;  // Monte Carlo E[det(A)^{-q}]
  double det_inverse_se = 0.0;    // sqrt(var / samples) of the same terms
  double domination_floor = 0.0;  // min over samples of lambda_min(Gamma - A)
  std::size_t domination_failures = 0;  // samples with floor < -1e-8
  std::size_t excluded = 0;             // samples with det(A) <= 0
  std::size_t samples = 0;
};

// Samples the p-vector F = tB G (G a fresh Gaussian column), forms
// A = tB B, and reports E[det A^{-q}] together with the per-sample check
// that the square-field matrix Gamma(F) dominates A.  b_entries is the
// n x p matrix of B in row-major order; every entry must be a centered
// first-chaos polynomial.  Requires cols <= rows, q >= 1.
WishartReport wishart_experiment(const std::vector<GaussPoly>& b_entries,
                                 std::size_t rows, std::size_t cols,
                                 unsigned q, std::size_t samples,
                                 std::uint64_t seed, unsigned workers = 1);

// Same with B filled by independent standard coordinates scaled by
// rows^{-1/2}, so A is a Wishart matrix with identity/n scale.
WishartReport wishart_experiment(std::size_t rows, std::size_t cols,
                                 unsigned q, std::size_t samples,
                                 std::uint64_t seed, unsigned workers = 1);

}  // namespace chaoslab
