#include "chaoslab/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "chaoslab/numeric.hpp"

namespace chaoslab {

namespace {

constexpr double kRankFloor = 1e-12;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Squared values sorted descending, the common input of the remainder ops.
std::vector<double> sorted_squares(const SymmetricSpectrum& s) {
  std::vector<double> sq;
  sq.reserve(s.values.size());
  for (double v : s.values) sq.push_back(v * v);
  std::sort(sq.begin(), sq.end(), std::greater<double>());
  return sq;
}

// Elementary symmetric polynomials e_0..e_q of the given values.  All inputs
// are squares, so the recursion only ever adds nonnegative products.
std::vector<double> elementary_symmetric(const std::vector<double>& x,
                                         unsigned q) {
  std::vector<double> e(q + 1, 0.0);
  e[0] = 1.0;
  for (double v : x)
    for (unsigned j = std::min<std::size_t>(q, x.size()); j >= 1; --j)
      e[j] += v * e[j - 1];
  return e;
}

bool next_combination(std::vector<int>& c, int n) {
  const int q = static_cast<int>(c.size());
  int i = q - 1;
  while (i >= 0 && c[i] == n - q + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < q; ++j) c[j] = c[j - 1] + 1;
  return true;
}

}  // namespace

SymmetricSpectrum SymmetricSpectrum::from_values(std::vector<double> vals) {
  SymmetricSpectrum s;
  s.source_rows = vals.size();
  s.source_cols = vals.size();
  s.values = std::move(vals);
  return s;
}

SymmetricSpectrum SymmetricSpectrum::from_symmetric(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("from_symmetric: matrix is " +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", not square");
  if (a.rows() > 0) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw std::invalid_argument("from_symmetric: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a, Eigen::EigenvaluesOnly);
  SymmetricSpectrum s;
  s.source_rows = static_cast<std::size_t>(a.rows());
  s.source_cols = static_cast<std::size_t>(a.cols());
  s.values.assign(solver.eigenvalues().data(),
                  solver.eigenvalues().data() + a.rows());
  return s;
}

SymmetricSpectrum SymmetricSpectrum::from_rectangular(const Eigen::MatrixXd& a) {
  const Eigen::MatrixXd gram = a.rows() >= a.cols()
                                   ? Eigen::MatrixXd(a.transpose() * a)
                                   : Eigen::MatrixXd(a * a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      gram, Eigen::EigenvaluesOnly);
  SymmetricSpectrum s;
  s.source_rows = static_cast<std::size_t>(a.rows());
  s.source_cols = static_cast<std::size_t>(a.cols());
  s.values.reserve(static_cast<std::size_t>(gram.rows()));
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    s.values.push_back(std::sqrt(std::max(0.0, solver.eigenvalues()[i])));
  return s;
}

std::size_t SymmetricSpectrum::nonzero_count() const {
  const double floor = kRankFloor * max_abs(values);
  std::size_t n = 0;
  for (double v : values)
    if (std::fabs(v) > floor) ++n;
  return n;
}

double remainder_Rq(const SymmetricSpectrum& s, unsigned q) {
  if (q == 0) throw std::invalid_argument("remainder_Rq: q must be >= 1");
  if (q > s.values.size()) return 0.0;
  std::vector<double> sq;
  sq.reserve(s.values.size());
  for (double v : s.values) sq.push_back(v * v);
  return factorial(q) * elementary_symmetric(sq, q)[q];
}

double rank_distance_rq(const SymmetricSpectrum& s, unsigned q) {
  if (q == 0) throw std::invalid_argument("rank_distance_rq: q must be >= 1");
  const std::vector<double> sq = sorted_squares(s);
  if (q > sq.size()) return 0.0;
  NeumaierSum sum;
  for (std::size_t i = sq.size(); i >= q; --i) sum.add(sq[i - 1]);
  return sum.value();
}

double cauchy_binet_Rq(const Eigen::MatrixXd& a, unsigned q) {
  if (q == 0) throw std::invalid_argument("cauchy_binet_Rq: q must be >= 1");
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  if (rows > 12 || cols > 12)
    throw std::invalid_argument(
        "cauchy_binet_Rq: enumeration is capped at 12x12; use remainder_Rq "
        "on the matrix spectrum instead");
  if (static_cast<int>(q) > std::min(rows, cols)) return 0.0;

  NeumaierSum sum;
  std::vector<int> ri(q), ci(q);
  Eigen::MatrixXd minor(q, q);
  std::iota(ri.begin(), ri.end(), 0);
  do {
    std::iota(ci.begin(), ci.end(), 0);
    do {
      for (unsigned i = 0; i < q; ++i)
        for (unsigned j = 0; j < q; ++j) minor(i, j) = a(ri[i], ci[j]);
      const double d = minor.determinant();
      sum.add(d * d);
    } while (next_combination(ci, cols));
  } while (next_combination(ri, rows));
  return factorial(q) * sum.value();
}

RemainderBoundsReport remainder_bounds_report(const SymmetricSpectrum& s,
                                              unsigned q) {
  if (q == 0)
    throw std::invalid_argument("remainder_bounds_report: q must be >= 1");
  const std::vector<double> sq = sorted_squares(s);
  std::vector<double> e = elementary_symmetric(sq, q);

  const double rq = factorial(q) * e[q];
  const double rq_prev = factorial(q - 1) * e[q - 1];
  std::vector<double> tail(q + 1, 0.0);  // tail[i] = r_i, 1-based
  for (unsigned i = 1; i <= q; ++i) {
    NeumaierSum sum;
    for (std::size_t j = sq.size(); j >= i && j >= 1; --j) sum.add(sq[j - 1]);
    tail[i] = sum.value();
  }

  RemainderBoundsReport rep;
  rep.remainder = rq;
  rep.chain_lower = rq - rq_prev * tail[q];
  rep.chain_upper = q * rq_prev * tail[q] - rq;
  double prod = 1.0;
  for (unsigned i = 1; i <= q; ++i) prod *= tail[i];
  rep.product_lower = rq - prod;
  rep.product_upper = factorial(q) * prod - rq;
  rep.power_lower = rq - std::pow(tail[q], static_cast<double>(q));
  rep.power_upper =
      factorial(q) * std::pow(tail[1], static_cast<double>(q - 1)) * tail[q] -
      rq;

  const double trace_sq = tail.size() > 1 ? tail[1] : 0.0;
  const double rho = std::sqrt(sq.empty() ? 0.0 : sq.front());
  if (std::fabs(trace_sq - 1.0) <= 1e-9 && rho * q <= 1.0 + 1e-12) {
    rep.radius_applicable = true;
    double bound = 1.0;
    for (unsigned k = 1; k < q; ++k) bound *= 1.0 - k * rho;
    rep.radius_slack = rq - bound;
  }
  return rep;
}

Eigen::MatrixXd second_chaos_matrix(const GaussPoly& f) {
  const GaussPoly w = to_wick(f);
  for (const auto& [m, c] : w.terms)
    if (m.total_degree() != 2)
      throw std::invalid_argument(
          "second_chaos_matrix: term of degree " +
          std::to_string(m.total_degree()) + " lies outside the second chaos");
  const std::uint32_t bound = w.coordinate_bound();
  if (!w.terms.empty() && w.terms.begin()->first.factors.front().first == 0)
    throw std::invalid_argument(
        "second_chaos_matrix: coordinates must start at N1");
  const Eigen::Index n = bound == 0 ? 0 : static_cast<Eigen::Index>(bound) - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [m, c] : w.terms) {
    if (m.factors.size() == 1) {
      const Eigen::Index i = m.factors[0].first - 1;
      a(i, i) = c;
    } else {
      const Eigen::Index i = m.factors[0].first - 1;
      const Eigen::Index j = m.factors[1].first - 1;
      a(i, j) = c / 2.0;
      a(j, i) = c / 2.0;
    }
  }
  return a;
}

double gamma_laplace(const SymmetricSpectrum& s, double t) {
  double log_prod = 0.0;
  for (double v : s.values) log_prod += std::log1p(4.0 * t * t * v * v);
  return std::exp(-0.5 * log_prod);
}

namespace {

// Integral over [0, upper] split into dyadic panels [0,1], [1,2], [2,4], ...
// so an upper limit far beyond the integrand's mass cannot starve the
// adaptive bisection.
double dyadic_integral(const std::function<double(double)>& f, double upper,
                       double abs_tol, std::size_t* evals) {
  std::vector<std::pair<double, double>> panels;
  double lo = 0.0, hi = std::min(1.0, upper);
  panels.emplace_back(lo, hi);
  while (hi < upper) {
    lo = hi;
    hi = std::min(hi * 2.0, upper);
    panels.emplace_back(lo, hi);
  }
  const double panel_tol = abs_tol / static_cast<double>(panels.size());
  NeumaierSum sum;
  for (const auto& [a, b] : panels)
    sum.add(integrate_adaptive(f, a, b, panel_tol, evals));
  return sum.value();
}

}  // namespace

QuadratureResult negative_moment_quadrature(const SymmetricSpectrum& s,
                                            unsigned q) {
  if (q == 0)
    throw std::invalid_argument("negative_moment_quadrature: q must be >= 1");
  const double floor = kRankFloor * max_abs(s.values);
  std::vector<double> a;
  for (double v : s.values)
    if (std::fabs(v) > floor) a.push_back(8.0 * v * v);

  QuadratureResult out;
  if (a.size() <= 2 * static_cast<std::size_t>(q)) {
    out.value = std::numeric_limits<double>::infinity();
    out.divergent = true;
    return out;
  }

  const double log_fact = std::lgamma(static_cast<double>(q));
  auto integrand = [&](double t) {
    if (t <= 0.0) return q == 1 ? 1.0 : 0.0;
    double log_prod = 0.0;
    for (double ai : a) log_prod += std::log1p(ai * t);
    return std::exp((q - 1) * std::log(t) - 0.5 * log_prod - log_fact);
  };
  // log of the analytic bound on the tail beyond S: each factor satisfies
  // (1+a s)/(1+a S) >= (s/S)^theta with theta = aS/(1+aS), so the tail is at
  // most P(S) S^q / ((Theta/2 - q) (q-1)!) once Theta/2 exceeds q.
  auto log_tail = [&](double S) {
    double theta = 0.0, log_p = 0.0;
    for (double ai : a) {
      const double x = ai * S;
      theta += x / (1.0 + x);
      log_p += std::log1p(x);
    }
    const double decay = 0.5 * theta - q;
    if (decay <= 1e-3) return std::numeric_limits<double>::infinity();
    return -0.5 * log_p + q * std::log(S) - std::log(decay) - log_fact;
  };

  double upper = 1.0;
  for (int i = 0; i < 200 && !std::isfinite(log_tail(upper)); ++i) upper *= 2.0;

  std::size_t evals = 0;
  const double rough =
      dyadic_integral(integrand, upper, 1e300, &evals);
  const double target = std::max(1e-300, 1e-11 * rough);
  for (int i = 0; i < 2000 && std::exp(log_tail(upper)) > target; ++i)
    upper *= 2.0;

  out.value = dyadic_integral(integrand, upper, target, &evals);
  out.abscissa_count = evals;
  out.tail_bound = std::exp(log_tail(upper)) + target;
  return out;
}

double estiRq_upper_bound(const SymmetricSpectrum& s, unsigned q) {
  if (q == 0)
    throw std::invalid_argument("estiRq_upper_bound: q must be >= 1");
  if (s.nonzero_count() <= 2 * static_cast<std::size_t>(q))
    return std::numeric_limits<double>::infinity();
  return 1.0 / std::sqrt(remainder_Rq(s, 2 * q + 1));
}

Eigen::MatrixXd sphere_net(unsigned d, unsigned n_steps) {
  if (d < 2)
    throw std::invalid_argument("sphere_net: dimension must be at least 2");
  const double min_steps = 2.0 * std::sqrt(static_cast<double>(d));
  if (static_cast<double>(n_steps) < min_steps)
    throw std::invalid_argument(
        "sphere_net: need at least 2 sqrt(d) = " + std::to_string(min_steps) +
        " grid steps, got " + std::to_string(n_steps));
  const double width = 2.0 * n_steps + 1.0;
  const double total = std::pow(width, static_cast<double>(d)) - 1.0;
  if (total > 2e7)
    throw std::invalid_argument("sphere_net: grid of " +
                                std::to_string(total) +
                                " points is too large");

  Eigen::MatrixXd net(static_cast<Eigen::Index>(total), d);
  std::vector<long> digit(d, -static_cast<long>(n_steps));
  Eigen::Index row = 0;
  while (true) {
    bool zero = true;
    for (unsigned i = 0; i < d; ++i)
      if (digit[i] != 0) zero = false;
    if (!zero) {
      double norm_sq = 0.0;
      for (unsigned i = 0; i < d; ++i)
        norm_sq += static_cast<double>(digit[i]) * digit[i];
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (unsigned i = 0; i < d; ++i) net(row, i) = digit[i] * inv;
      ++row;
    }
    unsigned pos = 0;
    while (pos < d && digit[pos] == static_cast<long>(n_steps))
      digit[pos++] = -static_cast<long>(n_steps);
    if (pos == d) break;
    ++digit[pos];
  }
  return net;
}

double compressed_remainder(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x,
                            unsigned q) {
  if (q == 0)
    throw std::invalid_argument("compressed_remainder: q must be >= 1");
  if (x.cols() != static_cast<Eigen::Index>(q))
    throw std::invalid_argument("compressed_remainder: X has " +
                                std::to_string(x.cols()) +
                                " columns, expected q = " + std::to_string(q));
  if (a.cols() != x.rows())
    throw std::invalid_argument(
        "compressed_remainder: A is " + std::to_string(a.rows()) + "x" +
        std::to_string(a.cols()) + " but X has " + std::to_string(x.rows()) +
        " rows");
  const Eigen::MatrixXd m = a * x;
  const Eigen::MatrixXd gram = m.transpose() * m;
  return gram.determinant();
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out = "rows,cols\n";
  out += std::to_string(m.rows()) + "," + std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

Eigen::MatrixXd matrix_from_csv(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  if (lines.empty() || lines[0] != "rows,cols")
    throw std::invalid_argument(
        "matrix_from_csv: line 1 must be the header \"rows,cols\"");
  if (lines.size() < 2)
    throw std::invalid_argument("matrix_from_csv: missing shape line");
  const std::vector<std::string> shape = split_line(lines[1]);
  long rows = 0, cols = 0;
  if (shape.size() != 2 ||
      std::from_chars(shape[0].data(), shape[0].data() + shape[0].size(), rows)
              .ec != std::errc{} ||
      std::from_chars(shape[1].data(), shape[1].data() + shape[1].size(), cols)
              .ec != std::errc{} ||
      rows < 0 || cols < 0)
    throw std::invalid_argument(
        "matrix_from_csv: line 2 must be \"<rows>,<cols>\"");
  if (lines.size() != static_cast<std::size_t>(rows) + 2)
    throw std::invalid_argument("matrix_from_csv: expected " +
                                std::to_string(rows) + " data lines, found " +
                                std::to_string(lines.size() - 2));

  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    const std::vector<std::string> cells = split_line(lines[i + 2]);
    if (cells.size() != static_cast<std::size_t>(cols))
      throw std::invalid_argument(
          "matrix_from_csv: line " + std::to_string(i + 3) + " has " +
          std::to_string(cells.size()) + " cells, expected " +
          std::to_string(cols));
    for (long j = 0; j < cols; ++j) {
      double v = 0.0;
      const auto res = std::from_chars(
          cells[j].data(), cells[j].data() + cells[j].size(), v);
      if (res.ec != std::errc{} || res.ptr != cells[j].data() + cells[j].size())
        throw std::invalid_argument("matrix_from_csv: line " +
                                    std::to_string(i + 3) + ", cell " +
                                    std::to_string(j + 1) +
                                    " is not a number: \"" + cells[j] + "\"");
      m(i, j) = v;
    }
  }
  return m;
}

}  // namespace chaoslab
