#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chaoslab {

// Product of coordinate powers; factors are (coordinate index, exponent >= 1)
// pairs sorted by coordinate.  The empty list is the constant monomial.
struct Monomial {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;

  unsigned total_degree() const;
  bool is_constant() const { return factors.empty(); }
  bool operator==(const Monomial&) const = default;
};

// Graded lexicographic order: lower total degree first; within a degree the
// term with the larger exponent on the smallest differing coordinate comes
// first, so iteration yields N1^2, N1 N2, N2^2, ...
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

enum class Basis { monomial, wick };

// Raised when a symbolic product would create more intermediate terms than
// the budget allows.  Callers treat it as the fallback-to-Monte-Carlo signal.
struct TermBudgetExceeded : std::runtime_error {
  std::size_t attempted;
  explicit TermBudgetExceeded(std::size_t n);
};

inline constexpr std::size_t kDefaultTermBudget = 10'000'000;

// Sparse polynomial in independent standard Gaussian coordinates N_i.
// In the wick basis a monomial with exponents (k_i) denotes prod H_{k_i}(N_i).
// Stored coefficients are never exactly zero.
struct GaussPoly {
  Basis basis = Basis::monomial;
  std::map<Monomial, double, MonomialLess> terms;

  static GaussPoly constant(double c);
  static GaussPoly coordinate(std::uint32_t i);           // N_i
  static GaussPoly hermite(std::uint32_t i, unsigned k);  // H_k(N_i), wick tag

  bool is_zero() const { return terms.empty(); }
  unsigned degree() const;  // max total degree over terms, 0 when zero
  std::vector<std::uint32_t> support() const;  // sorted distinct coordinates
  std::uint32_t coordinate_bound() const;      // 1 + max coordinate, 0 if none

  void set_term(const Monomial& m, double coeff);  // inserts or erases at 0
  double coeff_of(const Monomial& m) const;
};

GaussPoly add(const GaussPoly& a, const GaussPoly& b);
GaussPoly sub(const GaussPoly& a, const GaussPoly& b);
GaussPoly scale(const GaussPoly& a, double c);
// Product; converts wick operands to the monomial basis first, and the result
// is always tagged monomial.
GaussPoly multiply(const GaussPoly& a, const GaussPoly& b,
                   std::size_t term_budget = kDefaultTermBudget);

inline GaussPoly operator+(const GaussPoly& a, const GaussPoly& b) { return add(a, b); }
inline GaussPoly operator-(const GaussPoly& a, const GaussPoly& b) { return sub(a, b); }
inline GaussPoly operator*(const GaussPoly& a, const GaussPoly& b) { return multiply(a, b); }
inline GaussPoly operator*(double c, const GaussPoly& a) { return scale(a, c); }
inline GaussPoly operator-(const GaussPoly& a) { return scale(a, -1.0); }

// Exact basis change in both directions; mutually inverse term-for-term.
GaussPoly to_wick(const GaussPoly& f);
GaussPoly from_wick(const GaussPoly& f);

// E[F]; equals the constant term of the wick form.
double expectation(const GaussPoly& f);

// E[FG] via wick orthogonality: matching monomials contribute
// coeff_F * coeff_G * prod k_i!.
double inner_product(const GaussPoly& f, const GaussPoly& g);

// Projection onto the chaos of total wick degree k; returned in the basis the
// input carried.  Summing over k recovers F.
GaussPoly chaos_project(const GaussPoly& f, unsigned k);

// d/dN_i, valid in either basis (H_k' = k H_{k-1}).
GaussPoly derivative(const GaussPoly& f, std::uint32_t i);

// Plain evaluation; point[i] is the value of N_i.  Throws std::out_of_range
// naming the first coordinate the point does not cover.
double evaluate(const GaussPoly& f, const std::vector<double>& point);

// One term per line in canonical map order after a "basis: <tag>" header.
// Coefficients print in shortest round-trip form so parse(to_text(F)) is
// bit-identical on canonical input.
std::string to_text(const GaussPoly& f);
GaussPoly parse_text(const std::string& text);

// Tuple of polynomials with declared chaos orders; construction checks that
// no component carries wick mass above its declared degree.
struct ChaosVector {
  std::vector<GaussPoly> components;
  std::vector<unsigned> degrees;

  ChaosVector(std::vector<GaussPoly> comps, std::vector<unsigned> degs);
  std::size_t size() const { return components.size(); }
};

}  // namespace chaoslab
