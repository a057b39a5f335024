#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chaoslab/gauss_poly.hpp"

namespace chaoslab {

// Optional per-sample extras computed while a batch is drawn.
struct SampleWants {
  bool gamma = false;             // square field evaluated at each point
  bool hessian_spectrum = false;  // eigenvalues of the Hessian at each point
};

// One Monte Carlo draw of a functional (or vector of functionals).
//
// Sample i reads its coordinates from GaussianStream(seed, 0): the value of
// N_c for sample i comes from stream index i*K + c, where K is the
// coordinate bound of the sampled functional.  The layout fixes every
// sample's randomness by index alone, so batches are bit-for-bit
// reproducible for a given (seed, size) no matter how many worker threads
// filled them.
struct SampleBatch {
  std::uint64_t seed = 0;
  std::size_t size = 0;
  std::size_t dimension = 1;

  // size*dimension entries, sample-major.  Evaluations that overflow to a
  // non-finite value are stored as NaN and counted in nan_count.
  std::vector<double> values;

  // One entry per sample when wants.gamma was set (univariate only).
  std::vector<double> gamma_values;

  // One eigenvalue list per sample when wants.hessian_spectrum was set.
  std::vector<std::vector<double>> spectra;

  std::size_t nan_count = 0;

  double value(std::size_t i) const { return values[i * dimension]; }
};

struct MomentReport {
  double mean = 0.0;
  double variance = 0.0;
  // Central fourth moment for scalars; E[|F|^4] for vectors.
  double fourth_moment = 0.0;
  // Fourth-moment gap: E[(F - EF)^4] - 3 Var[F]^2 for scalars, and
  // E[|F|^4] - d(d+2) for d-dimensional vectors (the value a standard
  // Gaussian vector would give is subtracted).
  double delta = 0.0;
};

struct NegativeMomentReport {
  double estimate = 0.0;
  // Fraction of the Gamma^{-q} mass carried by the largest tenth of the
  // kept terms.  Values near 1 mean a handful of near-singular samples
  // dominate, the signature of a divergent negative moment.
  double top_decile_share = 0.0;
  std::size_t excluded = 0;  // samples with Gamma <= 0 or non-finite
};

// Kernel density estimate of the q-th derivative of the sample density on a
// fixed grid.  Derivatives come from differentiating the Gaussian kernel
// analytically, never from finite differences of the order-0 estimate.
struct DensityEstimate {
  double lo = -5.0;
  double hi = 5.0;
  double step = 0.01;
  unsigned order = 0;
  double bandwidth = 0.0;
  std::vector<double> values;

  std::size_t grid_size() const { return values.size(); }
  double x_at(std::size_t i) const { return lo + step * static_cast<double>(i); }
  // Linear interpolation between grid nodes; zero outside [lo, hi].
  double value_at(double x) const;
};

struct DistributionDistances {
  double kolmogorov = 0.0;
  double wasserstein1 = 0.0;
};

struct SteinDiscrepancy {
  double value = 0.0;
  // True when the symbolic route ran out of term budget and the value is a
  // Monte Carlo estimate instead of an exact L2 norm.
  bool monte_carlo_fallback = false;
  std::size_t samples_used = 0;
};

// Paired observations (F(omega), Z(omega)) of a functional and its score
// kernel, used by the regression route to the Fisher information.
struct ScorePairs {
  std::vector<double> f;
  std::vector<double> z;
};

struct EntropyFisherReport {
  double entropy = 0.0;
  double fisher = 0.0;
  double entropy_se = 0.0;
  double fisher_se = 0.0;
  std::size_t excluded = 0;  // samples where the density estimate vanished
};

// Draws n samples of f.  wants.gamma evaluates Gamma[f, f] at the same
// points (values match evaluate() on the symbolic square field bit for
// bit); wants.hessian_spectrum records Hessian eigenvalues per sample.
// Throws std::invalid_argument when n is zero.
SampleBatch sample_batch(const GaussPoly& f, std::size_t n,
                         std::uint64_t seed, SampleWants wants = {},
                         unsigned workers = 1);

// Vector version; values are stored sample-major.  The per-sample extras
// are defined for scalar functionals only, so wants must be empty here.
SampleBatch sample_batch(const ChaosVector& v, std::size_t n,
                         std::uint64_t seed, SampleWants wants = {},
                         unsigned workers = 1);

// Mean, variance, fourth moment and fourth-moment gap of a batch.
// Non-finite samples are skipped.  For vector batches the fourth moment and
// delta are computed from |F|^2 and mean/variance refer to |F|^2 as well.
MomentReport estimate_moments(const SampleBatch& b);

// Monte Carlo estimate of E[Gamma^{-q}] from a batch drawn with
// wants.gamma.  Samples with Gamma <= 0 or non-finite are excluded and
// counted.  q may be any positive real.
NegativeMomentReport estimate_negative_moment(const SampleBatch& b, double q);

// Gaussian-kernel estimate of the order-th density derivative on the grid
// [-5, 5] with step 0.01.  bandwidth == 0 selects n^{-1/(2*order+5)} times
// the sample standard deviation.  Univariate batches with at least 100
// finite samples only.
DensityEstimate kde_density(const SampleBatch& b, unsigned order,
                            double bandwidth = 0.0, unsigned workers = 1);

// sup over the grid of |f_hat^(q) - phi^(q)| against the standard normal.
double density_distance(const DensityEstimate& d);

// Kolmogorov distance and a quantile-coupling Wasserstein-1 distance
// between the empirical law of a univariate batch and the standard normal.
DistributionDistances distribution_distances(const SampleBatch& b);

// L2 discrepancy ||Gamma(V) - diag(m_i E[F_i^2])||_{L2}, the quantity that
// controls the distance of a chaos vector to a Gaussian limit.  Computed
// exactly from symbolic square fields when the term budget allows; on
// budget exhaustion falls back to a Monte Carlo estimate with
// fallback_samples draws at fallback_seed and says so in the report.
SteinDiscrepancy stein_discrepancy(const ChaosVector& v,
                                   std::size_t term_budget = kDefaultTermBudget,
                                   std::size_t fallback_samples = 200000,
                                   std::uint64_t fallback_seed = 719,
                                   unsigned workers = 1);

// Relative entropy and Fisher information of a univariate batch against
// the standard normal.  Entropy is mean log(f_hat(F)/phi(F)) with f_hat a
// kernel density estimate; Fisher uses the estimated score
// f_hat'/f_hat(F) + F.  Samples where f_hat < 1e-12 are excluded and
// counted.  Standard errors are the usual sqrt(var/n) of the averaged
// per-sample terms.
EntropyFisherReport entropy_fisher(const SampleBatch& b, unsigned workers = 1);

// Same, but the Fisher information uses observed score pairs: Fisher is
// mean (F - m(F))^2 where m is a kernel regression of Z on F.  Entropy is
// still estimated from the batch density.
EntropyFisherReport entropy_fisher(const SampleBatch& b,
                                   const ScorePairs& score,
                                   unsigned workers = 1);

// Bootstrap standard error of the mean of values: n_boot resampled means,
// indices drawn from a mix of (seed, replicate, position).
double bootstrap_se(const std::vector<double>& values, unsigned n_boot,
                    std::uint64_t seed);

// CSV exports.  Batches write "index,value" (plus a gamma column when the
// batch carries one); densities write "x,fq_hat,phi_q,abs_diff".  Numbers
// are shortest-round-trip formatted, so files are bit-faithful.
std::string batch_to_csv(const SampleBatch& b);
std::string density_to_csv(const DensityEstimate& d);

}  // namespace chaoslab
