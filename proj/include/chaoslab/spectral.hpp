#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "chaoslab/gauss_poly.hpp"

namespace chaoslab {

// Eigenvalues of a symmetric matrix, or singular values of a rectangular one,
// together with the shape they came from.  Values are kept exactly as the
// solver produced them; rank-style counting applies a relative floor so that
// floating noise does not register as extra rank.
struct SymmetricSpectrum {
  std::vector<double> values;
  std::size_t source_rows = 0;
  std::size_t source_cols = 0;

  // A spectrum that is already known; the shape is recorded as square.
  static SymmetricSpectrum from_values(std::vector<double> vals);
  // Eigenvalues; the input must be symmetric up to 1e-10 relative.
  static SymmetricSpectrum from_symmetric(const Eigen::MatrixXd& a);
  // Singular values, computed through the eigenvalues of the smaller Gram
  // matrix, so they come back nonnegative.
  static SymmetricSpectrum from_rectangular(const Eigen::MatrixXd& a);

  // Number of values with |value| > 1e-12 * max |value|.
  std::size_t nonzero_count() const;
};

// Result of the exact negative-moment integral.  A divergent moment is a
// legitimate outcome, not an error: divergent is set and value is +infinity.
struct QuadratureResult {
  double value = 0.0;
  bool divergent = false;
  std::size_t abscissa_count = 0;
  double tail_bound = 0.0;
};

// Slacks of the spectral remainder inequalities at order q, each one written
// as "bound minus bounded side" so every field must be nonnegative up to
// rounding.  The radius bound R_q >= prod_{k<q} (1 - k rho) only applies when
// the squared values sum to 1 and the spectral radius rho is at most 1/q.
struct RemainderBoundsReport {
  double remainder = 0.0;      // R_q itself
  double chain_lower = 0.0;    // R_q - R_{q-1} r_q
  double chain_upper = 0.0;    // q R_{q-1} r_q - R_q
  double product_lower = 0.0;  // R_q - prod_{i<=q} r_i
  double product_upper = 0.0;  // q! prod_{i<=q} r_i - R_q
  double power_lower = 0.0;    // R_q - r_q^q
  double power_upper = 0.0;    // q! r_1^{q-1} r_q - R_q
  bool radius_applicable = false;
  double radius_slack = 0.0;   // R_q - prod_{k<q} (1 - k rho), 0 if not applicable
};

// Spectral remainder R_q: the sum over ordered q-tuples of distinct indices
// of products of squared values, i.e. q! e_q(lambda_1^2, ..., lambda_n^2)
// with e_q the elementary symmetric polynomial.  Zero when the rank is
// below q.
double remainder_Rq(const SymmetricSpectrum& s, unsigned q);

// Squared distance to the closest matrix of rank below q: the sum of all but
// the q-1 largest squared values.  Counting is 1-based, so q = 1 returns the
// full squared Frobenius norm.
double rank_distance_rq(const SymmetricSpectrum& s, unsigned q);

// R_q by direct enumeration: q! times the sum of squared q x q minors over
// all row and column subsets.  Exponential in the size, so inputs are capped
// at 12 x 12; larger matrices should go through remainder_Rq on the spectrum.
double cauchy_binet_Rq(const Eigen::MatrixXd& a, unsigned q);

// All remainder inequality slacks at order q.
RemainderBoundsReport remainder_bounds_report(const SymmetricSpectrum& s,
                                              unsigned q);

// Coefficient matrix A of a pure second-chaos element, so that
// F = sum_ij a_ij N_i N_j - E[...]: the wick coefficient of H_2(N_i) lands on
// the diagonal and half the N_i N_j coefficient on each off-diagonal slot.
// Throws when F carries mass outside the second chaos.
Eigen::MatrixXd second_chaos_matrix(const GaussPoly& f);

// E[exp(-t^2/2 Gamma)] = prod (1 + 4 t^2 lambda_i^2)^(-1/2), the Laplace
// transform of the square field of the second-chaos element with spectrum s.
double gamma_laplace(const SymmetricSpectrum& s, double t);

// E[Gamma^{-q}] = (1/(q-1)!) int_0^inf s^{q-1} prod (1+8 s lambda_i^2)^{-1/2} ds
// for the square field of a second-chaos element.  The integral diverges
// exactly when at most 2q values are nonzero; otherwise it is computed by
// adaptive quadrature on dyadic panels with an analytic bound on the
// truncated tail.
QuadratureResult negative_moment_quadrature(const SymmetricSpectrum& s,
                                            unsigned q);

// The computable factor R_{2q+1}^{-1/2} of the negative-moment upper bound.
// Returns +infinity when fewer than 2q+1 values are nonzero, which is exactly
// the regime where the quadrature diverges.
double estiRq_upper_bound(const SymmetricSpectrum& s, unsigned q);

// Normalized integer grid {b / |b| : b in [-N, N]^d, b != 0}, which covers
// the unit sphere with radius at most 4 sqrt(d) / N.  One point per row.
// Requires N >= 2 sqrt(d); grids beyond 2e7 points are rejected.
Eigen::MatrixXd sphere_net(unsigned d, unsigned n_steps);

// Gram determinant det(t(AX) AX) of the q compressed columns AX.  X must
// have exactly q columns and as many rows as A has columns.
double compressed_remainder(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x,
                            unsigned q);

// CSV round trip for matrices: a literal "rows,cols" header, a shape line,
// then one comma-separated line per row with shortest round-trip formatting,
// so parsing back is bit-exact.
std::string matrix_to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_csv(const std::string& text);

}  // namespace chaoslab
