#include "chaoslab/gauss_poly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <sstream>

#include "chaoslab/numeric.hpp"

namespace chaoslab {

unsigned Monomial::total_degree() const {
  unsigned d = 0;
  for (const auto& [idx, exp] : factors) d += exp;
  return d;
}

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  const unsigned da = a.total_degree(), db = b.total_degree();
  if (da != db) return da < db;
  auto ia = a.factors.begin(), ib = b.factors.begin();
  while (ia != a.factors.end() && ib != b.factors.end()) {
    if (ia->first != ib->first) {
      // Smaller coordinate owns a positive exponent only on one side; that
      // side precedes.
      return ia->first < ib->first;
    }
    if (ia->second != ib->second) return ia->second > ib->second;
    ++ia;
    ++ib;
  }
  return ia != a.factors.end();
}

TermBudgetExceeded::TermBudgetExceeded(std::size_t n)
    : std::runtime_error("symbolic term budget exceeded: " + std::to_string(n) +
                         " intermediate terms; fall back to Monte Carlo"),
      attempted(n) {}

GaussPoly GaussPoly::constant(double c) {
  GaussPoly f;
  if (c != 0.0) f.terms.emplace(Monomial{}, c);
  return f;
}

GaussPoly GaussPoly::coordinate(std::uint32_t i) {
  GaussPoly f;
  f.terms.emplace(Monomial{{{i, 1}}}, 1.0);
  return f;
}

GaussPoly GaussPoly::hermite(std::uint32_t i, unsigned k) {
  GaussPoly f;
  f.basis = Basis::wick;
  if (k == 0)
    f.terms.emplace(Monomial{}, 1.0);
  else
    f.terms.emplace(Monomial{{{i, k}}}, 1.0);
  return f;
}

unsigned GaussPoly::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms) d = std::max(d, m.total_degree());
  return d;
}

std::vector<std::uint32_t> GaussPoly::support() const {
  std::vector<std::uint32_t> s;
  for (const auto& [m, c] : terms)
    for (const auto& [idx, exp] : m.factors) s.push_back(idx);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::uint32_t GaussPoly::coordinate_bound() const {
  std::uint32_t b = 0;
  for (const auto& [m, c] : terms)
    if (!m.factors.empty()) b = std::max(b, m.factors.back().first + 1);
  return b;
}

void GaussPoly::set_term(const Monomial& m, double coeff) {
  if (coeff == 0.0)
    terms.erase(m);
  else
    terms.insert_or_assign(m, coeff);
}

double GaussPoly::coeff_of(const Monomial& m) const {
  auto it = terms.find(m);
  return it == terms.end() ? 0.0 : it->second;
}

namespace {

void accumulate(GaussPoly& f, const Monomial& m, double coeff) {
  if (coeff == 0.0) return;
  auto [it, inserted] = f.terms.emplace(m, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) f.terms.erase(it);
  }
}

Monomial merge_factors(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors.reserve(a.factors.size() + b.factors.size());
  auto ia = a.factors.begin(), ib = b.factors.begin();
  while (ia != a.factors.end() || ib != b.factors.end()) {
    if (ib == b.factors.end() || (ia != a.factors.end() && ia->first < ib->first))
      out.factors.push_back(*ia++);
    else if (ia == a.factors.end() || ib->first < ia->first)
      out.factors.push_back(*ib++);
    else {
      out.factors.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  return out;
}

// Basis-change tables.  Row n of mono2herm holds c_{n,j} with
// x^n = sum_j c_{n,j} H_j(x); row n of herm2mono holds the coefficients of
// H_n in powers of x.  Entries are exact integers in double precision.
constexpr unsigned kMaxConvDegree = 90;

struct ConvTables {
  // dense rows indexed [n][j], j <= n
  std::vector<std::vector<double>> mono2herm, herm2mono;
};

const ConvTables& conv_tables() {
  static ConvTables t;
  static std::once_flag once;
  std::call_once(once, [] {
    t.mono2herm.resize(kMaxConvDegree + 1);
    t.herm2mono.resize(kMaxConvDegree + 1);
    t.mono2herm[0] = {1.0};
    t.herm2mono[0] = {1.0};
    for (unsigned n = 1; n <= kMaxConvDegree; ++n) {
      // x * H_k = H_{k+1} + k H_{k-1}
      const auto& prev = t.mono2herm[n - 1];
      std::vector<double> row(n + 1, 0.0);
      for (unsigned k = 0; k < prev.size(); ++k) {
        if (prev[k] == 0.0) continue;
        row[k + 1] += prev[k];
        if (k > 0) row[k - 1] += prev[k] * static_cast<double>(k);
      }
      t.mono2herm[n] = std::move(row);
      // H_n = x H_{n-1} - (n-1) H_{n-2}
      const auto& h1 = t.herm2mono[n - 1];
      std::vector<double> hn(n + 1, 0.0);
      for (unsigned k = 0; k < h1.size(); ++k) hn[k + 1] += h1[k];
      if (n >= 2) {
        const auto& h2 = t.herm2mono[n - 2];
        for (unsigned k = 0; k < h2.size(); ++k)
          hn[k] -= static_cast<double>(n - 1) * h2[k];
      }
      t.herm2mono[n] = std::move(hn);
    }
  });
  return t;
}

const std::vector<double>& conv_row(unsigned n, bool to_herm) {
  if (n > kMaxConvDegree)
    throw std::invalid_argument("basis conversion supports degree <= " +
                                std::to_string(kMaxConvDegree));
  const auto& t = conv_tables();
  return to_herm ? t.mono2herm[n] : t.herm2mono[n];
}

// Expand one term across the per-coordinate conversion rows (tensor product).
void convert_term(const Monomial& m, double coeff, bool to_herm, GaussPoly& out,
                  std::size_t factor_pos, Monomial& partial) {
  if (factor_pos == m.factors.size()) {
    Monomial copy = partial;
    std::sort(copy.factors.begin(), copy.factors.end());
    accumulate(out, copy, coeff);
    return;
  }
  const auto [idx, exp] = m.factors[factor_pos];
  const auto& row = conv_row(exp, to_herm);
  for (unsigned j = 0; j < row.size(); ++j) {
    if (row[j] == 0.0) continue;
    if (j > 0) partial.factors.emplace_back(idx, j);
    convert_term(m, coeff * row[j], to_herm, out, factor_pos + 1, partial);
    if (j > 0) partial.factors.pop_back();
  }
}

GaussPoly convert(const GaussPoly& f, bool to_herm) {
  GaussPoly out;
  out.basis = to_herm ? Basis::wick : Basis::monomial;
  for (const auto& [m, c] : f.terms) {
    Monomial partial;
    convert_term(m, c, to_herm, out, 0, partial);
  }
  return out;
}

double double_factorial_odd(unsigned n) {
  // (n-1)!! for even n
  double r = 1.0;
  for (unsigned k = 1; k < n; k += 2) r *= static_cast<double>(k);
  return r;
}

}  // namespace

GaussPoly add(const GaussPoly& a, const GaussPoly& b) {
  const GaussPoly& bb = (a.basis == b.basis)
                            ? b
                            : (a.basis == Basis::wick ? to_wick(b) : from_wick(b));
  GaussPoly out = a;
  for (const auto& [m, c] : bb.terms) accumulate(out, m, c);
  return out;
}

GaussPoly sub(const GaussPoly& a, const GaussPoly& b) { return add(a, scale(b, -1.0)); }

GaussPoly scale(const GaussPoly& a, double c) {
  GaussPoly out;
  out.basis = a.basis;
  if (c == 0.0) return out;
  out.terms = a.terms;
  for (auto& [m, v] : out.terms) v *= c;
  return out;
}

GaussPoly multiply(const GaussPoly& a, const GaussPoly& b, std::size_t term_budget) {
  const GaussPoly& am = (a.basis == Basis::wick) ? from_wick(a) : a;
  const GaussPoly& bm = (b.basis == Basis::wick) ? from_wick(b) : b;
  const std::size_t products = am.terms.size() * bm.terms.size();
  if (products > term_budget) throw TermBudgetExceeded(products);
  GaussPoly out;
  for (const auto& [ma, ca] : am.terms)
    for (const auto& [mb, cb] : bm.terms)
      accumulate(out, merge_factors(ma, mb), ca * cb);
  return out;
}

GaussPoly to_wick(const GaussPoly& f) {
  if (f.basis == Basis::wick) return f;
  return convert(f, true);
}

GaussPoly from_wick(const GaussPoly& f) {
  if (f.basis == Basis::monomial) return f;
  return convert(f, false);
}

double expectation(const GaussPoly& f) {
  if (f.basis == Basis::wick) {
    auto it = f.terms.find(Monomial{});
    return it == f.terms.end() ? 0.0 : it->second;
  }
  // E[prod N_i^{k_i}] = prod (k_i - 1)!! over even exponents, 0 otherwise.
  NeumaierSum s;
  for (const auto& [m, c] : f.terms) {
    double t = c;
    for (const auto& [idx, exp] : m.factors) {
      if (exp % 2 == 1) {
        t = 0.0;
        break;
      }
      t *= double_factorial_odd(exp);
    }
    s.add(t);
  }
  return s.value();
}

double inner_product(const GaussPoly& f, const GaussPoly& g) {
  const GaussPoly fw = to_wick(f);
  const GaussPoly gw = to_wick(g);
  const GaussPoly& small = fw.terms.size() <= gw.terms.size() ? fw : gw;
  const GaussPoly& large = fw.terms.size() <= gw.terms.size() ? gw : fw;
  NeumaierSum s;
  for (const auto& [m, c] : small.terms) {
    auto it = large.terms.find(m);
    if (it == large.terms.end()) continue;
    double t = c * it->second;
    for (const auto& [idx, exp] : m.factors) t *= factorial(exp);
    s.add(t);
  }
  return s.value();
}

GaussPoly chaos_project(const GaussPoly& f, unsigned k) {
  const GaussPoly w = to_wick(f);
  GaussPoly out;
  out.basis = Basis::wick;
  for (const auto& [m, c] : w.terms)
    if (m.total_degree() == k) out.terms.emplace(m, c);
  return f.basis == Basis::monomial ? from_wick(out) : out;
}

GaussPoly derivative(const GaussPoly& f, std::uint32_t i) {
  // Power rule in the monomial basis, H_k' = k H_{k-1} in the wick basis:
  // both drop the exponent by one and scale by it.
  GaussPoly out;
  out.basis = f.basis;
  for (const auto& [m, c] : f.terms) {
    for (std::size_t p = 0; p < m.factors.size(); ++p) {
      if (m.factors[p].first != i) continue;
      Monomial d = m;
      const double k = d.factors[p].second;
      if (--d.factors[p].second == 0) d.factors.erase(d.factors.begin() + p);
      accumulate(out, d, c * k);
      break;
    }
  }
  return out;
}

namespace {

double ipow(double x, unsigned k) {
  double r = 1.0;
  while (k) {
    if (k & 1u) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

}  // namespace

double evaluate(const GaussPoly& f, const std::vector<double>& point) {
  const bool wick = f.basis == Basis::wick;
  NeumaierSum s;
  for (const auto& [m, c] : f.terms) {
    double t = c;
    for (const auto& [idx, exp] : m.factors) {
      if (idx >= point.size())
        throw std::out_of_range("evaluate: coordinate N" + std::to_string(idx) +
                                " not covered by a point of length " +
                                std::to_string(point.size()));
      t *= wick ? hermite_eval(exp, point[idx]) : ipow(point[idx], exp);
    }
    s.add(t);
  }
  return s.value();
}


std::string to_text(const GaussPoly& f) {
  std::string out = f.basis == Basis::wick ? "basis: wick\n" : "basis: monomial\n";
  for (const auto& [m, c] : f.terms) {
    out += format_double(c);
    if (!m.factors.empty()) {
      out += " *";
      for (const auto& [idx, exp] : m.factors) {
        out += " N" + std::to_string(idx) + "^" + std::to_string(exp);
      }
    }
    out += "\n";
  }
  return out;
}

GaussPoly parse_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  GaussPoly out;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line == "basis: monomial")
        out.basis = Basis::monomial;
      else if (line == "basis: wick")
        out.basis = Basis::wick;
      else
        throw std::invalid_argument("line 1: expected 'basis: monomial' or 'basis: wick'");
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok))
      throw std::invalid_argument("line " + std::to_string(lineno) + ": empty term");
    double coeff = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), coeff);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": bad coefficient '" + tok + "'");
    Monomial m;
    if (ls >> tok) {
      if (tok != "*")
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": expected '*' after coefficient");
      while (ls >> tok) {
        const auto caret = tok.find('^');
        if (tok.size() < 4 || tok[0] != 'N' || caret == std::string::npos)
          throw std::invalid_argument("line " + std::to_string(lineno) +
                                      ": bad factor '" + tok + "'");
        unsigned long idx = 0, exp = 0;
        try {
          idx = std::stoul(tok.substr(1, caret - 1));
          exp = std::stoul(tok.substr(caret + 1));
        } catch (const std::exception&) {
          throw std::invalid_argument("line " + std::to_string(lineno) +
                                      ": bad factor '" + tok + "'");
        }
        if (exp == 0)
          throw std::invalid_argument("line " + std::to_string(lineno) +
                                      ": zero exponent in '" + tok + "'");
        m.factors.emplace_back(static_cast<std::uint32_t>(idx),
                               static_cast<std::uint32_t>(exp));
      }
      std::sort(m.factors.begin(), m.factors.end());
      for (std::size_t p = 1; p < m.factors.size(); ++p)
        if (m.factors[p].first == m.factors[p - 1].first)
          throw std::invalid_argument("line " + std::to_string(lineno) +
                                      ": repeated coordinate");
    }
    accumulate(out, m, coeff);
  }
  if (!header_seen) throw std::invalid_argument("missing basis header line");
  return out;
}

ChaosVector::ChaosVector(std::vector<GaussPoly> comps, std::vector<unsigned> degs)
    : components(std::move(comps)), degrees(std::move(degs)) {
  if (components.size() != degrees.size())
    throw std::invalid_argument("ChaosVector: component/degree count mismatch");
  for (std::size_t i = 0; i < components.size(); ++i) {
    const GaussPoly w = to_wick(components[i]);
    for (const auto& [m, c] : w.terms) {
      if (m.total_degree() > degrees[i])
        throw std::invalid_argument(
            "ChaosVector: component " + std::to_string(i) + " has chaos mass at degree " +
            std::to_string(m.total_degree()) + " > declared " + std::to_string(degrees[i]));
    }
  }
}

}  // namespace chaoslab
