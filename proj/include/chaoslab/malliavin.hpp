#pragma once

#include <cstdint>
#include <vector>

#include "chaoslab/gauss_poly.hpp"

namespace chaoslab {

// Rectangular array of polynomials, row-major.  For a Hessian, rows and
// columns both range over coords, the sorted coordinates the polynomial
// actually uses; for a Malliavin matrix coords stays empty and positions are
// plain component indices.
struct PolyMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<GaussPoly> entries;
  std::vector<std::uint32_t> coords;

  PolyMatrix() = default;
  PolyMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c) {}

  GaussPoly& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const GaussPoly& at(std::size_t i, std::size_t j) const {
    return entries[i * cols + j];
  }
};

// Z = numerator / denominator with the denominator a power of the square
// field of F, hence nonnegative everywhere it is defined.  Z satisfies the
// integration-by-parts identity E[Z Phi(F)] = E[Phi'(F)], and the score of
// the density of F is the conditional expectation E[Z | F].
struct RationalScoreKernel {
  GaussPoly numerator;
  GaussPoly denominator;

  double evaluate(const std::vector<double>& point) const;
};

// Square field Sum_i (dF/dN_i)(dG/dN_i), returned in the monomial basis.
GaussPoly gamma(const GaussPoly& f, const GaussPoly& g,
                std::size_t term_budget = kDefaultTermBudget);

// Symmetric matrix of pairwise square fields of the components.
PolyMatrix malliavin_matrix(const ChaosVector& v,
                            std::size_t term_budget = kDefaultTermBudget);

// Second derivatives d2F/dN_i dN_j over the coordinates F uses; the result's
// coords field lists them in increasing order.
PolyMatrix hessian(const GaussPoly& f);

// D_x F = Sum_k x[k-1] dF/dN_k; x must cover every coordinate of F, so its
// length must be at least the largest coordinate index.
GaussPoly directional_derivative(const GaussPoly& f,
                                 const std::vector<double>& x);

// One directional derivative per direction vector, packaged with the degrees
// the components actually carry.
ChaosVector directional_derivatives(
    const GaussPoly& f, const std::vector<std::vector<double>>& directions);

// Iterated sharp operator over an enlarged Gaussian space:
//   sharp^k[F] = Sum d^k F / dN_{i_1}..dN_{i_k} * G_{1,i_1} .. G_{k,i_k}
// where the G are fresh independent coordinates.  With K the coordinate
// bound of F, G_{j,i} is stored at index fresh_offset + (j-1)*K + i, so row j
// occupies the block fresh_offset + (j-1)*K .. fresh_offset + j*K - 1.
// fresh_offset must be at least K so the blocks cannot collide with F.
GaussPoly sharp_k(const GaussPoly& f, unsigned k, std::uint32_t fresh_offset,
                  std::size_t term_budget = kDefaultTermBudget);

// Score kernel of a polynomial declared to live in the chaos of degree m:
//   Z = (m F Gamma + Gamma[F, Gamma]) / Gamma^2,   Gamma = gamma(F, F).
// Throws if F is constant.
RationalScoreKernel score_kernel(const GaussPoly& f, unsigned m,
                                 std::size_t term_budget = kDefaultTermBudget);

// Entry-wise evaluation, row-major.
std::vector<double> evaluate(const PolyMatrix& mat,
                             const std::vector<double>& point);

}  // namespace chaoslab
