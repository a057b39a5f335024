#include "chaoslab/montecarlo.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "chaoslab/malliavin.hpp"
#include "chaoslab/numeric.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Same binary exponentiation as the symbolic evaluator uses, so compiled
// and symbolic evaluations of one polynomial agree bit for bit.
double ipow(double x, unsigned k) {
  double r = 1.0;
  while (k) {
    if (k & 1u) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

// A polynomial flattened into a factor program.  eval() walks terms in the
// same order as evaluate() walks the term map and multiplies factors the
// same way, so both paths produce identical doubles.
class CompiledPoly {
 public:
  CompiledPoly() = default;

  explicit CompiledPoly(const GaussPoly& f) : wick_(f.basis == Basis::wick) {
    terms_.reserve(f.terms.size());
    for (const auto& [m, c] : f.terms) {
      Term t;
      t.coeff = c;
      t.begin = static_cast<std::uint32_t>(factors_.size());
      for (const auto& [idx, exp] : m.factors) factors_.push_back({idx, exp});
      t.end = static_cast<std::uint32_t>(factors_.size());
      terms_.push_back(t);
    }
  }

  double eval(const double* point) const {
    NeumaierSum s;
    for (const auto& t : terms_) {
      double v = t.coeff;
      for (std::uint32_t k = t.begin; k < t.end; ++k) {
        const auto& f = factors_[k];
        v *= wick_ ? hermite_eval(f.exp, point[f.slot])
                   : ipow(point[f.slot], f.exp);
      }
      s.add(v);
    }
    return s.value();
  }

 private:
  struct Factor {
    std::uint32_t slot;
    std::uint32_t exp;
  };
  struct Term {
    double coeff;
    std::uint32_t begin;
    std::uint32_t end;
  };

  std::vector<Factor> factors_;
  std::vector<Term> terms_;
  bool wick_ = false;
};

// Fills point[0..K) for sample i from the batch stream.
void fill_point(const GaussianStream& stream, std::size_t i, std::size_t K,
                double* point) {
  for (std::size_t c = 0; c < K; ++c)
    point[c] = stream.normal_at(i * K + c);
}

std::vector<double> finite_values(const SampleBatch& b) {
  if (b.dimension != 1)
    throw std::invalid_argument("univariate batches only; this batch has " +
                                std::to_string(b.dimension) + " components");
  std::vector<double> xs;
  xs.reserve(b.size);
  for (double v : b.values)
    if (std::isfinite(v)) xs.push_back(v);
  return xs;
}

double sample_sd(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  const double mean = chunked_sum(xs) / static_cast<double>(n);
  const double ss = chunked_sum(n, [&](std::size_t i) {
    const double d = xs[i] - mean;
    return d * d;
  });
  return std::sqrt(ss / static_cast<double>(n - 1));
}

constexpr double kGridLo = -5.0;
constexpr double kGridHi = 5.0;
constexpr double kGridStep = 0.01;

std::size_t grid_points() {
  return static_cast<std::size_t>(
             std::llround((kGridHi - kGridLo) / kGridStep)) +
         1;
}

// Windowed kernel sums on the standard grid:
//   out[g] = sum over |x_g - xs[j]| <= 10h of w[j] * phi^(order)((x_g-xs[j])/h)
// xs must be sorted; weights (optional) are aligned with xs.  Each grid
// point owns its own compensated sum, so the worker count cannot change
// the result.
std::vector<double> kernel_grid_sums(const std::vector<double>& xs,
                                     const std::vector<double>* w,
                                     unsigned order, double h,
                                     unsigned workers) {
  const std::size_t m = grid_points();
  std::vector<double> out(m, 0.0);
  const double cut = 10.0 * h;
  const std::size_t per_chunk = 64;
  parallel_chunks((m + per_chunk - 1) / per_chunk, workers,
                  [&](std::size_t ci) {
                    const std::size_t g_lo = ci * per_chunk;
                    const std::size_t g_hi = std::min(m, g_lo + per_chunk);
                    for (std::size_t g = g_lo; g < g_hi; ++g) {
                      const double x =
                          kGridLo + kGridStep * static_cast<double>(g);
                      const std::size_t first =
                          std::lower_bound(xs.begin(), xs.end(), x - cut) -
                          xs.begin();
                      const std::size_t last =
                          std::upper_bound(xs.begin(), xs.end(), x + cut) -
                          xs.begin();
                      NeumaierSum s;
                      for (std::size_t j = first; j < last; ++j)
                        s.add((w ? (*w)[j] : 1.0) *
                              normal_pdf_derivative(order, (x - xs[j]) / h));
                      out[g] = s.value();
                    }
                  });
  return out;
}

// Linear interpolation on the standard grid; zero outside it.
double grid_interp(const std::vector<double>& vals, double x) {
  if (vals.empty() || x < kGridLo || x > kGridHi) return 0.0;
  const double u = (x - kGridLo) / kGridStep;
  const std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= vals.size()) return vals.back();
  const double t = u - static_cast<double>(i);
  return vals[i] * (1.0 - t) + vals[i + 1] * t;
}

}  // namespace

double DensityEstimate::value_at(double x) const { return grid_interp(values, x); }

SampleBatch sample_batch(const GaussPoly& f, std::size_t n, std::uint64_t seed,
                         SampleWants wants, unsigned workers) {
  if (n == 0)
    throw std::invalid_argument("sample_batch: need at least one sample");

  const std::size_t K = std::max<std::size_t>(f.coordinate_bound(), 1);
  const GaussianStream stream(seed, 0);

  SampleBatch b;
  b.seed = seed;
  b.size = n;
  b.dimension = 1;
  b.values.assign(n, 0.0);

  const CompiledPoly cf(f);

  std::optional<CompiledPoly> cg;
  if (wants.gamma) {
    cg.emplace(gamma(f, f));
    b.gamma_values.assign(n, 0.0);
  }

  std::size_t hdim = 0;
  std::vector<CompiledPoly> ch;
  if (wants.hessian_spectrum) {
    const PolyMatrix hess = hessian(f);
    hdim = hess.rows;
    ch.reserve(hess.entries.size());
    for (const auto& e : hess.entries) ch.emplace_back(e);
    b.spectra.assign(n, {});
  }

  const std::size_t chunks = (n + kSumChunk - 1) / kSumChunk;
  std::vector<std::size_t> bad_per_chunk(chunks, 0);

  parallel_chunks(chunks, workers, [&](std::size_t ci) {
    std::vector<double> point(K, 0.0);
    Eigen::MatrixXd hmat(hdim, hdim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    const std::size_t lo = ci * kSumChunk;
    const std::size_t hi = std::min(n, lo + kSumChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      fill_point(stream, i, K, point.data());
      bool bad = false;

      double v = cf.eval(point.data());
      if (!std::isfinite(v)) {
        v = kNaN;
        bad = true;
      }
      b.values[i] = v;

      if (cg) {
        double g = cg->eval(point.data());
        if (!std::isfinite(g)) {
          g = kNaN;
          bad = true;
        }
        b.gamma_values[i] = g;
      }

      if (hdim) {
        bool entry_bad = false;
        for (std::size_t r = 0; r < hdim && !entry_bad; ++r)
          for (std::size_t c = 0; c < hdim; ++c) {
            const double e = ch[r * hdim + c].eval(point.data());
            hmat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                e;
            if (!std::isfinite(e)) {
              entry_bad = true;
              break;
            }
          }
        if (entry_bad) {
          b.spectra[i].assign(hdim, kNaN);
          bad = true;
        } else {
          solver.compute(hmat, Eigen::EigenvaluesOnly);
          b.spectra[i].assign(solver.eigenvalues().data(),
                              solver.eigenvalues().data() +
                                  static_cast<std::size_t>(hdim));
        }
      }

      if (bad) ++bad_per_chunk[ci];
    }
  });

  for (std::size_t c : bad_per_chunk) b.nan_count += c;
  return b;
}

SampleBatch sample_batch(const ChaosVector& v, std::size_t n,
                         std::uint64_t seed, SampleWants wants,
                         unsigned workers) {
  if (n == 0)
    throw std::invalid_argument("sample_batch: need at least one sample");
  if (v.size() == 0)
    throw std::invalid_argument("sample_batch: empty chaos vector");
  if (wants.gamma || wants.hessian_spectrum)
    throw std::invalid_argument(
        "sample_batch: per-sample extras are defined for scalar functionals "
        "only");

  const std::size_t d = v.size();
  std::size_t K = 1;
  for (const auto& comp : v.components)
    K = std::max<std::size_t>(K, comp.coordinate_bound());
  const GaussianStream stream(seed, 0);

  SampleBatch b;
  b.seed = seed;
  b.size = n;
  b.dimension = d;
  b.values.assign(n * d, 0.0);

  std::vector<CompiledPoly> comps;
  comps.reserve(d);
  for (const auto& comp : v.components) comps.emplace_back(comp);

  const std::size_t chunks = (n + kSumChunk - 1) / kSumChunk;
  std::vector<std::size_t> bad_per_chunk(chunks, 0);

  parallel_chunks(chunks, workers, [&](std::size_t ci) {
    std::vector<double> point(K, 0.0);
    const std::size_t lo = ci * kSumChunk;
    const std::size_t hi = std::min(n, lo + kSumChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      fill_point(stream, i, K, point.data());
      bool bad = false;
      for (std::size_t j = 0; j < d; ++j) {
        double x = comps[j].eval(point.data());
        if (!std::isfinite(x)) {
          x = kNaN;
          bad = true;
        }
        b.values[i * d + j] = x;
      }
      if (bad) ++bad_per_chunk[ci];
    }
  });

  for (std::size_t c : bad_per_chunk) b.nan_count += c;
  return b;
}

MomentReport estimate_moments(const SampleBatch& b) {
  const std::size_t d = b.dimension;
  std::vector<double> s;
  s.reserve(b.size);
  if (d == 1) {
    for (double v : b.values)
      if (std::isfinite(v)) s.push_back(v);
  } else {
    for (std::size_t i = 0; i < b.size; ++i) {
      double norm2 = 0.0;
      bool ok = true;
      for (std::size_t j = 0; j < d; ++j) {
        const double x = b.values[i * d + j];
        if (!std::isfinite(x)) {
          ok = false;
          break;
        }
        norm2 += x * x;
      }
      if (ok) s.push_back(norm2);
    }
  }
  if (s.empty())
    throw std::invalid_argument("estimate_moments: no finite samples");

  const double n = static_cast<double>(s.size());
  MomentReport r;
  r.mean = chunked_sum(s) / n;
  r.variance = chunked_sum(s.size(), [&](std::size_t i) {
                 const double dev = s[i] - r.mean;
                 return dev * dev;
               }) /
               n;
  if (d == 1) {
    r.fourth_moment = chunked_sum(s.size(), [&](std::size_t i) {
                        const double dev = s[i] - r.mean;
                        const double dev2 = dev * dev;
                        return dev2 * dev2;
                      }) /
                      n;
    r.delta = r.fourth_moment - 3.0 * r.variance * r.variance;
  } else {
    // s already holds |F|^2, so its raw second moment is E[|F|^4]; the
    // Gaussian reference value d(d+2) is subtracted.
    const double dd = static_cast<double>(d);
    r.fourth_moment =
        chunked_sum(s.size(), [&](std::size_t i) { return s[i] * s[i]; }) / n;
    r.delta = r.fourth_moment - dd * (dd + 2.0);
  }
  return r;
}

NegativeMomentReport estimate_negative_moment(const SampleBatch& b, double q) {
  if (b.gamma_values.size() != b.size)
    throw std::invalid_argument(
        "estimate_negative_moment: batch carries no gamma values; draw it "
        "with wants.gamma");
  if (!(q > 0.0))
    throw std::invalid_argument(
        "estimate_negative_moment: order must be positive");

  std::vector<double> t;
  t.reserve(b.size);
  NegativeMomentReport r;
  bool has_inf = false;
  for (double g : b.gamma_values) {
    if (!std::isfinite(g) || g <= 0.0) {
      ++r.excluded;
      continue;
    }
    const double x = std::pow(g, -q);
    if (std::isinf(x)) has_inf = true;
    t.push_back(x);
  }
  if (t.empty()) {
    r.estimate = kNaN;
    return r;
  }
  if (has_inf) {
    // A sample with Gamma so small that Gamma^{-q} overflows dominates any
    // finite rest, so the estimate is infinite by inspection.
    r.estimate = std::numeric_limits<double>::infinity();
    r.top_decile_share = 1.0;
    return r;
  }

  const double total = chunked_sum(t);
  r.estimate = total / static_cast<double>(t.size());

  std::sort(t.begin(), t.end(), std::greater<double>());
  const std::size_t k = (t.size() + 9) / 10;
  const double top =
      chunked_sum(k, [&](std::size_t i) { return t[i]; });
  r.top_decile_share = total > 0.0 ? top / total : 0.0;
  return r;
}

DensityEstimate kde_density(const SampleBatch& b, unsigned order,
                            double bandwidth, unsigned workers) {
  std::vector<double> xs = finite_values(b);
  if (xs.size() < 100)
    throw std::invalid_argument("kde_density: need at least 100 finite "
                                "samples, have " +
                                std::to_string(xs.size()));
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();

  double h = bandwidth;
  if (h == 0.0)
    h = std::pow(static_cast<double>(n),
                 -1.0 / (2.0 * static_cast<double>(order) + 5.0)) *
        sample_sd(xs);
  if (!(h > 0.0))
    throw std::invalid_argument(
        "kde_density: bandwidth must be positive (degenerate sample needs an "
        "explicit one)");

  DensityEstimate d;
  d.lo = kGridLo;
  d.hi = kGridHi;
  d.step = kGridStep;
  d.order = order;
  d.bandwidth = h;
  d.values = kernel_grid_sums(xs, nullptr, order, h, workers);

  const double norm =
      1.0 / (static_cast<double>(n) *
             std::pow(h, static_cast<double>(order) + 1.0));
  for (double& v : d.values) v *= norm;
  return d;
}

double density_distance(const DensityEstimate& d) {
  double sup = 0.0;
  for (std::size_t i = 0; i < d.grid_size(); ++i) {
    const double x = d.x_at(i);
    sup = std::max(sup,
                   std::fabs(d.values[i] - normal_pdf_derivative(d.order, x)));
  }
  return sup;
}

DistributionDistances distribution_distances(const SampleBatch& b) {
  std::vector<double> xs = finite_values(b);
  if (xs.empty())
    throw std::invalid_argument("distribution_distances: no finite samples");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  const double dn = static_cast<double>(n);

  DistributionDistances out;
  for (std::size_t i = 0; i < n; ++i) {
    const double F = normal_cdf(xs[i]);
    const double above = static_cast<double>(i + 1) / dn - F;
    const double below = F - static_cast<double>(i) / dn;
    out.kolmogorov = std::max({out.kolmogorov, above, below});
  }
  out.wasserstein1 =
      chunked_sum(n,
                  [&](std::size_t i) {
                    const double p = (static_cast<double>(i) + 0.5) / dn;
                    return std::fabs(xs[i] - normal_quantile(p));
                  }) /
      dn;
  return out;
}

SteinDiscrepancy stein_discrepancy(const ChaosVector& v,
                                   std::size_t term_budget,
                                   std::size_t fallback_samples,
                                   std::uint64_t fallback_seed,
                                   unsigned workers) {
  const std::size_t d = v.size();
  if (d == 0)
    throw std::invalid_argument("stein_discrepancy: empty chaos vector");

  std::vector<double> target(d);
  for (std::size_t i = 0; i < d; ++i)
    target[i] = static_cast<double>(v.degrees[i]) *
                inner_product(v.components[i], v.components[i]);

  try {
    NeumaierSum total;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        const GaussPoly g = gamma(v.components[i], v.components[j], term_budget);
        const double m = i == j ? target[i] : 0.0;
        const double term =
            inner_product(g, g) - 2.0 * m * expectation(g) + m * m;
        total.add((i == j ? 1.0 : 2.0) * term);
      }
    return {std::sqrt(std::max(0.0, total.value())), false, 0};
  } catch (const TermBudgetExceeded&) {
    // The symbolic square fields are too large to multiply out; estimate
    // E sum_ij (Gamma_ij - M_ij)^2 by sampling instead.  Per sample the
    // entries come from first derivatives alone, which stay within budget.
  }

  if (fallback_samples == 0)
    throw std::invalid_argument(
        "stein_discrepancy: term budget exceeded and no fallback samples "
        "allowed");

  std::vector<std::uint32_t> coords;
  for (const auto& comp : v.components) {
    std::vector<std::uint32_t> s = comp.support();
    std::vector<std::uint32_t> merged;
    std::set_union(coords.begin(), coords.end(), s.begin(), s.end(),
                   std::back_inserter(merged));
    coords.swap(merged);
  }
  std::size_t K = 1;
  for (const auto& comp : v.components)
    K = std::max<std::size_t>(K, comp.coordinate_bound());

  const std::size_t nc = coords.size();
  std::vector<std::vector<CompiledPoly>> deriv(d);
  for (std::size_t i = 0; i < d; ++i) {
    deriv[i].reserve(nc);
    for (std::uint32_t c : coords)
      deriv[i].emplace_back(derivative(v.components[i], c));
  }

  const std::size_t n = fallback_samples;
  const GaussianStream stream(fallback_seed, 0);
  std::vector<double> per(n, 0.0);
  const std::size_t chunks = (n + kSumChunk - 1) / kSumChunk;
  parallel_chunks(chunks, workers, [&](std::size_t ci) {
    std::vector<double> point(K, 0.0);
    std::vector<double> dv(d * nc, 0.0);
    const std::size_t lo = ci * kSumChunk;
    const std::size_t hi = std::min(n, lo + kSumChunk);
    for (std::size_t s = lo; s < hi; ++s) {
      fill_point(stream, s, K, point.data());
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t c = 0; c < nc; ++c)
          dv[i * nc + c] = deriv[i][c].eval(point.data());
      NeumaierSum acc;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
          double gij = 0.0;
          for (std::size_t c = 0; c < nc; ++c)
            gij += dv[i * nc + c] * dv[j * nc + c];
          const double m = i == j ? target[i] : 0.0;
          const double dev = gij - m;
          acc.add((i == j ? 1.0 : 2.0) * dev * dev);
        }
      per[s] = acc.value();
    }
  });
  const double mean = chunked_sum(per) / static_cast<double>(n);
  return {std::sqrt(std::max(0.0, mean)), true, n};
}

namespace {

EntropyFisherReport entropy_fisher_impl(const SampleBatch& b,
                                        const ScorePairs* score,
                                        unsigned workers) {
  const std::vector<double> vs = finite_values(b);
  const DensityEstimate f0 = kde_density(b, 0, 0.0, workers);

  EntropyFisherReport r;

  // Entropy terms, and the KDE-route Fisher terms when no score pairs are
  // given.  Both use the order-0 exclusion rule.
  std::optional<DensityEstimate> f1;
  if (!score) f1 = kde_density(b, 1, 0.0, workers);

  std::vector<double> ent;
  std::vector<double> fis;
  ent.reserve(vs.size());
  if (!score) fis.reserve(vs.size());
  for (double x : vs) {
    const double fh = f0.value_at(x);
    if (fh < 1e-12) {
      ++r.excluded;
      continue;
    }
    ent.push_back(std::log(fh / normal_pdf(x)));
    if (!score) {
      const double s = f1->value_at(x) / fh + x;
      fis.push_back(s * s);
    }
  }

  if (score) {
    if (score->f.size() != score->z.size() || score->f.empty())
      throw std::invalid_argument(
          "entropy_fisher: score pairs must be non-empty and aligned");
    // Kernel regression of Z on F on the shared grid; Fisher is the mean
    // squared residual F - m(F) over the pair points.
    std::vector<std::size_t> idx(score->f.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b2) {
      return score->f[a] < score->f[b2];
    });
    std::vector<double> fs;
    std::vector<double> zs;
    fs.reserve(idx.size());
    zs.reserve(idx.size());
    for (std::size_t i : idx) {
      if (!std::isfinite(score->f[i]) || !std::isfinite(score->z[i])) continue;
      fs.push_back(score->f[i]);
      zs.push_back(score->z[i]);
    }
    if (fs.size() < 100)
      throw std::invalid_argument(
          "entropy_fisher: need at least 100 finite score pairs, have " +
          std::to_string(fs.size()));
    const double h =
        std::pow(static_cast<double>(fs.size()), -0.2) * sample_sd(fs);
    if (!(h > 0.0))
      throw std::invalid_argument(
          "entropy_fisher: score regression bandwidth collapsed");
    const std::vector<double> den = kernel_grid_sums(fs, nullptr, 0, h, workers);
    const std::vector<double> num = kernel_grid_sums(fs, &zs, 0, h, workers);
    fis.reserve(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const double dn = grid_interp(den, fs[i]);
      if (dn < 1e-12) {
        ++r.excluded;
        continue;
      }
      const double m = grid_interp(num, fs[i]) / dn;
      const double dev = fs[i] - m;
      fis.push_back(dev * dev);
    }
  }

  if (ent.empty() || fis.empty())
    throw std::invalid_argument(
        "entropy_fisher: every sample was excluded");

  const auto mean_and_se = [](const std::vector<double>& t, double* se) {
    const double n = static_cast<double>(t.size());
    const double mean = chunked_sum(t) / n;
    const double var = chunked_sum(t.size(),
                                   [&](std::size_t i) {
                                     const double d = t[i] - mean;
                                     return d * d;
                                   }) /
                       n;
    *se = std::sqrt(var / n);
    return mean;
  };
  r.entropy = mean_and_se(ent, &r.entropy_se);
  r.fisher = mean_and_se(fis, &r.fisher_se);
  return r;
}

}  // namespace

EntropyFisherReport entropy_fisher(const SampleBatch& b, unsigned workers) {
  return entropy_fisher_impl(b, nullptr, workers);
}

EntropyFisherReport entropy_fisher(const SampleBatch& b,
                                   const ScorePairs& score, unsigned workers) {
  return entropy_fisher_impl(b, &score, workers);
}

double bootstrap_se(const std::vector<double>& values, unsigned n_boot,
                    std::uint64_t seed) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("bootstrap_se: empty sample");
  if (n_boot < 2)
    throw std::invalid_argument("bootstrap_se: need at least two replicates");

  std::vector<double> means(n_boot);
  for (unsigned rep = 0; rep < n_boot; ++rep) {
    const GaussianStream s(seed, rep + 1);
    NeumaierSum acc;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t idx =
          static_cast<std::size_t>(s.uniform_at(i) * static_cast<double>(n));
      if (idx >= n) idx = n - 1;
      acc.add(values[idx]);
    }
    means[rep] = acc.value() / static_cast<double>(n);
  }
  const double nb = static_cast<double>(n_boot);
  const double mbar = chunked_sum(means) / nb;
  const double var = chunked_sum(means.size(),
                                 [&](std::size_t i) {
                                   const double d = means[i] - mbar;
                                   return d * d;
                                 }) /
                     (nb - 1.0);
  return std::sqrt(var);
}

std::string batch_to_csv(const SampleBatch& b) {
  if (b.dimension != 1)
    throw std::invalid_argument("batch_to_csv: univariate batches only");
  const bool with_gamma = b.gamma_values.size() == b.size;
  std::string out = with_gamma ? "index,value,gamma\n" : "index,value\n";
  for (std::size_t i = 0; i < b.size; ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(b.values[i]);
    if (with_gamma) {
      out += ',';
      out += format_double(b.gamma_values[i]);
    }
    out += '\n';
  }
  return out;
}

std::string density_to_csv(const DensityEstimate& d) {
  std::string out = "x,fq_hat,phi_q,abs_diff\n";
  for (std::size_t i = 0; i < d.grid_size(); ++i) {
    const double x = d.x_at(i);
    const double phi = normal_pdf_derivative(d.order, x);
    out += format_double(x);
    out += ',';
    out += format_double(d.values[i]);
    out += ',';
    out += format_double(phi);
    out += ',';
    out += format_double(std::fabs(d.values[i] - phi));
    out += '\n';
  }
  return out;
}

}  // namespace chaoslab
