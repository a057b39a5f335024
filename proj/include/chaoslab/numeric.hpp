#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace chaoslab {

// Probabilists' Hermite polynomial H_k(x), three-term recurrence
// H_{k+1} = x H_k - k H_{k-1}, H_0 = 1, H_1 = x.
double hermite_eval(unsigned k, double x);

// k! as a double; throws std::invalid_argument for k > 170 (overflow).
double factorial(unsigned k);

// Standard normal density, distribution function and quantile.
// The quantile is Wichura's PPND16 rational approximation, accurate to
// full double precision for p in (0,1).
double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

// Derivative of the standard normal density:
// phi^(q)(x) = (-1)^q H_q(x) phi(x).
double normal_pdf_derivative(unsigned q, double x);

// Neumaier compensated accumulator.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x);
  double value() const { return sum + comp; }
};

// Sum of f(i) for i in [0, n) with a fixed chunk layout: each 4096-element
// chunk is accumulated with compensation, chunk partials are combined in
// chunk order.  The result does not depend on how callers distribute chunks
// over threads, which is what the reproducibility contract needs.
inline constexpr std::size_t kSumChunk = 4096;
double chunked_sum(std::size_t n, const std::function<double(std::size_t)>& f);
double chunked_sum(const std::vector<double>& values);

// Runs fn(chunk_index) for chunk_index in [0, chunks) on up to `workers`
// threads.  Chunks are claimed from an atomic counter; every chunk body must
// write only to its own slot so the schedule cannot leak into results.
void parallel_chunks(std::size_t chunks, unsigned workers,
                     const std::function<void(std::size_t)>& fn);

// Shortest decimal string that round-trips to the same double (to_chars).
// Used by every CSV writer so exported files are bit-faithful.
std::string format_double(double v);

// Adaptive Gauss-Legendre (16-point panels, bisection refinement) on [a, b].
// Stops when the local interval estimate is within tol (absolute, distributed
// proportionally to subinterval width).  Increments *evals per integrand call
// when the pointer is given.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol,
                          std::size_t* evals = nullptr);

}  // namespace chaoslab
