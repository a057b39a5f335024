#include "chaoslab/numeric.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace chaoslab {

double hermite_eval(unsigned k, double x) {
  if (k == 0) return 1.0;
  if (k == 1) return x;
  double hm = 1.0, h = x;
  for (unsigned j = 1; j < k; ++j) {
    double hn = x * h - static_cast<double>(j) * hm;
    hm = h;
    h = hn;
  }
  return h;
}

double factorial(unsigned k) {
  if (k > 170) throw std::invalid_argument("factorial: k > 170 overflows double");
  double r = 1.0;
  for (unsigned j = 2; j <= k; ++j) r *= static_cast<double>(j);
  return r;
}

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// PPND16 (Wichura, Applied Statistics 37, 1988, algorithm AS 241).
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    x = num / den;
  }
  return (q < 0.0) ? -x : x;
}

double normal_pdf_derivative(unsigned q, double x) {
  const double sign = (q % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite_eval(q, x) * normal_pdf(x);
}

void NeumaierSum::add(double x) {
  const double t = sum + x;
  if (std::fabs(sum) >= std::fabs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

double chunked_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
  NeumaierSum total;
  for (std::size_t c = 0; c * kSumChunk < n; ++c) {
    NeumaierSum part;
    const std::size_t hi = std::min(n, (c + 1) * kSumChunk);
    for (std::size_t i = c * kSumChunk; i < hi; ++i) part.add(f(i));
    total.add(part.value());
  }
  return total.value();
}

double chunked_sum(const std::vector<double>& values) {
  return chunked_sum(values.size(), [&](std::size_t i) { return values[i]; });
}

void parallel_chunks(std::size_t chunks, unsigned workers,
                     const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      fn(c);
    }
  };
  const unsigned nthreads = static_cast<unsigned>(
      std::min<std::size_t>(workers, chunks));
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (unsigned t = 0; t + 1 < nthreads; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
}

namespace {

// 16-point Gauss-Legendre nodes (positive half) and weights on [-1, 1].
constexpr double kGl16X[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGl16W[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

double gl16(const std::function<double(double)>& f, double a, double b,
            std::size_t* evals) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 8; ++i)
    s += kGl16W[i] * (f(c - h * kGl16X[i]) + f(c + h * kGl16X[i]));
  if (evals) *evals += 16;
  return s * h;
}

double integrate_rec(const std::function<double(double)>& f, double a,
                     double b, double whole, double tol, int depth,
                     std::size_t* evals) {
  const double m = 0.5 * (a + b);
  const double left = gl16(f, a, m, evals);
  const double right = gl16(f, m, b, evals);
  const double err = std::fabs(left + right - whole);
  if (err <= tol || depth >= 48) return left + right;
  return integrate_rec(f, a, m, left, 0.5 * tol, depth + 1, evals) +
         integrate_rec(f, m, b, right, 0.5 * tol, depth + 1, evals);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, std::size_t* evals) {
  if (!(b > a)) return 0.0;
  const double whole = gl16(f, a, b, evals);
  return integrate_rec(f, a, b, whole, abs_tol, 0, evals);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace chaoslab
