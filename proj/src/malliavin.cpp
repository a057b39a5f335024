#include "chaoslab/malliavin.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace chaoslab {

double RationalScoreKernel::evaluate(const std::vector<double>& point) const {
  return chaoslab::evaluate(numerator, point) /
         chaoslab::evaluate(denominator, point);
}

GaussPoly gamma(const GaussPoly& f, const GaussPoly& g,
                std::size_t term_budget) {
  const std::vector<std::uint32_t> sf = f.support();
  const std::vector<std::uint32_t> sg = g.support();
  std::vector<std::uint32_t> common;
  std::set_intersection(sf.begin(), sf.end(), sg.begin(), sg.end(),
                        std::back_inserter(common));
  GaussPoly out;
  for (std::uint32_t i : common) {
    GaussPoly df = derivative(f, i);
    if (df.is_zero()) continue;
    GaussPoly dg = derivative(g, i);
    if (dg.is_zero()) continue;
    out = add(out, multiply(df, dg, term_budget));
  }
  return out;
}

PolyMatrix malliavin_matrix(const ChaosVector& v, std::size_t term_budget) {
  const std::size_t d = v.size();
  PolyMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      GaussPoly g = gamma(v.components[i], v.components[j], term_budget);
      m.at(j, i) = g;
      m.at(i, j) = std::move(g);
    }
  return m;
}

PolyMatrix hessian(const GaussPoly& f) {
  const std::vector<std::uint32_t> s = f.support();
  PolyMatrix h(s.size(), s.size());
  h.coords = s;
  for (std::size_t a = 0; a < s.size(); ++a) {
    const GaussPoly da = derivative(f, s[a]);
    for (std::size_t b = a; b < s.size(); ++b) {
      GaussPoly dab = derivative(da, s[b]);
      h.at(b, a) = dab;
      h.at(a, b) = std::move(dab);
    }
  }
  return h;
}

GaussPoly directional_derivative(const GaussPoly& f,
                                 const std::vector<double>& x) {
  const std::vector<std::uint32_t> s = f.support();
  if (!s.empty() && s.front() == 0)
    throw std::invalid_argument(
        "directional_derivative: coordinates must start at N1");
  if (!s.empty() && s.back() > x.size())
    throw std::invalid_argument(
        "directional_derivative: direction of length " +
        std::to_string(x.size()) + " does not cover coordinate N" +
        std::to_string(s.back()));
  GaussPoly out;
  out.basis = f.basis;
  for (std::uint32_t k : s) {
    const double xk = x[k - 1];
    if (xk == 0.0) continue;
    out = add(out, scale(derivative(f, k), xk));
  }
  return out;
}

ChaosVector directional_derivatives(
    const GaussPoly& f, const std::vector<std::vector<double>>& directions) {
  std::vector<GaussPoly> comps;
  std::vector<unsigned> degs;
  comps.reserve(directions.size());
  degs.reserve(directions.size());
  for (const std::vector<double>& x : directions) {
    GaussPoly d = directional_derivative(f, x);
    degs.push_back(d.degree());
    comps.push_back(std::move(d));
  }
  return ChaosVector(std::move(comps), std::move(degs));
}

GaussPoly sharp_k(const GaussPoly& f, unsigned k, std::uint32_t fresh_offset,
                  std::size_t term_budget) {
  if (k == 0) throw std::invalid_argument("sharp_k: order k must be at least 1");
  const std::uint32_t bound = f.coordinate_bound();
  if (fresh_offset < bound)
    throw std::invalid_argument(
        "sharp_k: fresh_offset " + std::to_string(fresh_offset) +
        " collides with the coordinates of F (need at least " +
        std::to_string(bound) + ")");
  if (static_cast<std::uint64_t>(fresh_offset) +
          static_cast<std::uint64_t>(k) * bound >
      std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument(
        "sharp_k: fresh coordinate indices would overflow");
  GaussPoly cur = f.basis == Basis::wick ? from_wick(f) : f;
  for (unsigned j = 1; j <= k; ++j) {
    GaussPoly next;
    for (std::uint32_t i = 0; i < bound; ++i) {
      GaussPoly d = derivative(cur, i);
      if (d.is_zero()) continue;
      const std::uint32_t fresh = fresh_offset + (j - 1) * bound + i;
      next = add(next, multiply(d, GaussPoly::coordinate(fresh), term_budget));
    }
    cur = std::move(next);
  }
  return cur;
}

RationalScoreKernel score_kernel(const GaussPoly& f, unsigned m,
                                 std::size_t term_budget) {
  if (f.degree() == 0)
    throw std::invalid_argument("score_kernel: F must be non-constant");
  const GaussPoly g = gamma(f, f, term_budget);
  GaussPoly num = add(scale(multiply(f, g, term_budget), static_cast<double>(m)),
                      gamma(f, g, term_budget));
  GaussPoly den = multiply(g, g, term_budget);
  return RationalScoreKernel{std::move(num), std::move(den)};
}

std::vector<double> evaluate(const PolyMatrix& mat,
                             const std::vector<double>& point) {
  std::vector<double> out;
  out.reserve(mat.entries.size());
  for (const GaussPoly& e : mat.entries) out.push_back(evaluate(e, point));
  return out;
}

}  // namespace chaoslab
