#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "chaoslab/gauss_poly.hpp"
#include "chaoslab/malliavin.hpp"
#include "chaoslab/montecarlo.hpp"
#include "chaoslab/numeric.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/spectral.hpp"
#include "doctest.h"

using namespace chaoslab;

namespace {

// Normalized chi-squared functional (chi2_n - n)/sqrt(2n) written in the
// second chaos: sum of H_2(N_i)/sqrt(2n) over n coordinates.
GaussPoly chi2_functional(unsigned n) {
  GaussPoly f;
  const double lambda = 1.0 / std::sqrt(2.0 * n);
  for (unsigned i = 1; i <= n; ++i)
    f = f + scale(GaussPoly::hermite(i, 2), lambda);
  return f;
}

GaussPoly second_chaos(const std::vector<double>& lambdas) {
  GaussPoly f;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    f = f + scale(GaussPoly::hermite(static_cast<std::uint32_t>(i + 1), 2),
                  lambdas[i]);
  return f;
}

std::vector<double> point_of(std::uint64_t seed, std::size_t i, std::size_t K) {
  const GaussianStream stream(seed, 0);
  std::vector<double> p(K, 0.0);
  for (std::size_t c = 0; c < K; ++c) p[c] = stream.normal_at(i * K + c);
  return p;
}

}  // namespace

TEST_CASE("batches are reproducible and match the symbolic evaluator") {
  const GaussPoly f = GaussPoly::hermite(1, 2) + GaussPoly::coordinate(2);
  const std::size_t n = 5000;

  const SampleBatch a = sample_batch(f, n, 42);
  const SampleBatch b = sample_batch(f, n, 42);
  CHECK(a.values == b.values);
  CHECK(a.nan_count == 0);
  CHECK(a.size == n);
  CHECK(a.dimension == 1);

  SampleWants wants;
  wants.gamma = true;
  const SampleBatch w1 = sample_batch(f, n, 42, wants, 1);
  const SampleBatch w4 = sample_batch(f, n, 42, wants, 4);
  CHECK(w1.values == w4.values);
  CHECK(w1.gamma_values == w4.gamma_values);
  CHECK(w1.values == a.values);

  const SampleBatch other = sample_batch(f, n, 43);
  CHECK(other.values != a.values);

  // Every sample must equal the symbolic evaluation at its layout point.
  const std::size_t K = f.coordinate_bound();
  for (std::size_t i = 0; i < n; i += 97) {
    const std::vector<double> p = point_of(42, i, K);
    CHECK(a.values[i] == evaluate(f, p));
    CHECK(a.value(i) == a.values[i]);
  }

  CHECK_THROWS_AS(sample_batch(f, 0, 1), std::invalid_argument);
}

TEST_CASE("gamma values equal the evaluated square field bit for bit") {
  const GaussPoly f =
      GaussPoly::hermite(1, 3) + scale(GaussPoly::hermite(2, 2), 0.5);
  SampleWants wants;
  wants.gamma = true;
  const SampleBatch b = sample_batch(f, 400, 7, wants);
  REQUIRE(b.gamma_values.size() == 400);

  const GaussPoly g = gamma(f, f);
  const std::size_t K = f.coordinate_bound();
  for (std::size_t i = 0; i < b.size; ++i) {
    const std::vector<double> p = point_of(7, i, K);
    CHECK(b.gamma_values[i] == evaluate(g, p));
  }
}

TEST_CASE("hessian spectra per sample") {
  // Constant Hessian: F = N1^2 + 3 N1 N2 has Hessian [[2,3],[3,0]] with
  // eigenvalues 1 +- sqrt(10).
  GaussPoly f;
  f.set_term(Monomial{{{1, 2}}}, 1.0);
  f.set_term(Monomial{{{1, 1}, {2, 1}}}, 3.0);
  SampleWants wants;
  wants.hessian_spectrum = true;
  const SampleBatch b = sample_batch(f, 50, 3, wants);
  REQUIRE(b.spectra.size() == 50);
  const double lo = 1.0 - std::sqrt(10.0);
  const double hi = 1.0 + std::sqrt(10.0);
  for (const auto& spec : b.spectra) {
    REQUIRE(spec.size() == 2);
    CHECK(spec[0] == doctest::Approx(lo).epsilon(1e-12));
    CHECK(spec[1] == doctest::Approx(hi).epsilon(1e-12));
  }

  // Sample-dependent Hessian: F = N1^3 gives the 1x1 matrix [6 N1].
  GaussPoly cube;
  cube.set_term(Monomial{{{1, 3}}}, 1.0);
  const SampleBatch c = sample_batch(cube, 20, 11, wants);
  for (std::size_t i = 0; i < c.size; ++i) {
    const std::vector<double> p = point_of(11, i, cube.coordinate_bound());
    REQUIRE(c.spectra[i].size() == 1);
    CHECK(c.spectra[i][0] == doctest::Approx(6.0 * p[1]).epsilon(1e-12));
  }
}

TEST_CASE("overflowing evaluations become counted NaN samples") {
  GaussPoly f;
  f.set_term(Monomial{{{1, 600}}}, 1.0);
  const SampleBatch b = sample_batch(f, 10000, 5);
  CHECK(b.nan_count > 0);
  std::size_t nans = 0;
  for (double v : b.values)
    if (std::isnan(v)) ++nans;
  CHECK(nans == b.nan_count);

  // Moment estimates skip the NaN entries instead of absorbing them.
  SampleBatch manual;
  manual.size = 4;
  manual.values = {1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 3.0};
  const MomentReport m = estimate_moments(manual);
  CHECK(m.mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m.variance == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("moment estimates on a plain Gaussian") {
  const SampleBatch b = sample_batch(GaussPoly::coordinate(1), 1000000, 1);
  const MomentReport m = estimate_moments(b);
  CHECK(std::fabs(m.mean) < 4.0 / 1000.0);
  CHECK(m.variance == doctest::Approx(1.0).epsilon(0.01));
  CHECK(m.fourth_moment == doctest::Approx(3.0).epsilon(0.05));
  CHECK(std::fabs(m.delta) < 0.1);
}

TEST_CASE("fourth moment gap matches the symbolic value for a chi2 family") {
  const unsigned n = 25;
  const GaussPoly f = chi2_functional(n);

  // Symbolic delta from moments of the polynomial itself.
  const GaussPoly f2 = f * f;
  const double var = expectation(f2);
  const double m4 = expectation(f2 * f2);
  const double sym_delta = m4 - 3.0 * var * var;
  CHECK(sym_delta == doctest::Approx(12.0 / n).epsilon(1e-10));

  const SampleBatch b = sample_batch(f, 400000, 9);
  const MomentReport m = estimate_moments(b);
  CHECK(m.delta == doctest::Approx(sym_delta).epsilon(0.15));
}

TEST_CASE("vector batches and their fourth moment gap") {
  const ChaosVector v({GaussPoly::coordinate(1), GaussPoly::coordinate(2)},
                      {1, 1});
  const SampleBatch b = sample_batch(v, 200000, 17);
  CHECK(b.dimension == 2);
  CHECK(b.values.size() == 2 * b.size);

  const MomentReport m = estimate_moments(b);
  CHECK(m.mean == doctest::Approx(2.0).epsilon(0.02));
  CHECK(m.fourth_moment == doctest::Approx(8.0).epsilon(0.05));
  CHECK(std::fabs(m.delta) < 0.2);

  SampleWants wants;
  wants.gamma = true;
  CHECK_THROWS_AS(sample_batch(v, 10, 1, wants), std::invalid_argument);
}

TEST_CASE("negative moment of a unit square field is exact") {
  SampleWants wants;
  wants.gamma = true;
  const SampleBatch b = sample_batch(GaussPoly::coordinate(1), 1000, 2, wants);
  const NegativeMomentReport r = estimate_negative_moment(b, 1.0);
  CHECK(r.estimate == 1.0);
  CHECK(r.top_decile_share == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.excluded == 0);

  const SampleBatch no_gamma = sample_batch(GaussPoly::coordinate(1), 1000, 2);
  CHECK_THROWS_AS(estimate_negative_moment(no_gamma, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_negative_moment(b, 0.0), std::invalid_argument);
}

TEST_CASE("negative moments agree with quadrature across random spectra") {
  std::mt19937 gen(4021);
  std::uniform_real_distribution<double> u(0.3, 1.2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> lambdas(10);
    for (double& l : lambdas) l = u(gen);
    const GaussPoly f = second_chaos(lambdas);

    SampleWants wants;
    wants.gamma = true;
    const SampleBatch b =
        sample_batch(f, 100000, 1000 + static_cast<std::uint64_t>(trial), wants);

    for (double q : {1.0, 2.0}) {
      const QuadratureResult exact =
          negative_moment_quadrature(SymmetricSpectrum::from_values(lambdas),
                                     static_cast<unsigned>(q));
      REQUIRE_FALSE(exact.divergent);

      const NegativeMomentReport mc = estimate_negative_moment(b, q);
      CHECK(mc.excluded == 0);
      CHECK(mc.top_decile_share < 0.6);

      std::vector<double> terms;
      terms.reserve(b.size);
      for (double g : b.gamma_values) terms.push_back(std::pow(g, -q));
      const double se = bootstrap_se(terms, 60, 555 + trial);
      CHECK(std::fabs(mc.estimate - exact.value) <= 5.0 * se + 1e-9);
    }
  }
}

TEST_CASE("divergent negative moments concentrate in the top decile") {
  // F = (N1^2 - 1)/2 + N1 has square field (N1 + 1)^2, which vanishes on a
  // set the Gaussian law charges, so E[Gamma^{-1}] is infinite.
  GaussPoly f = scale(GaussPoly::hermite(1, 2), 0.5) + GaussPoly::coordinate(1);
  SampleWants wants;
  wants.gamma = true;
  const SampleBatch b = sample_batch(f, 200000, 33, wants);
  const NegativeMomentReport r = estimate_negative_moment(b, 1.0);
  CHECK(r.top_decile_share > 0.9);

  // The convergent counterpart stays far from that signature.
  const SampleBatch good =
      sample_batch(chi2_functional(12), 200000, 34, wants);
  const NegativeMomentReport g = estimate_negative_moment(good, 1.0);
  CHECK(g.top_decile_share < 0.6);
}

TEST_CASE("kernel density estimates track the normal density") {
  const SampleBatch b = sample_batch(GaussPoly::coordinate(1), 1000000, 8);

  const DensityEstimate d0 = kde_density(b, 0);
  CHECK(d0.grid_size() == 1001);
  CHECK(d0.bandwidth > 0.0);
  CHECK(density_distance(d0) < 0.01);

  // Trapezoid mass on the grid.
  NeumaierSum mass;
  for (std::size_t i = 0; i < d0.grid_size(); ++i) {
    const double w = (i == 0 || i + 1 == d0.grid_size()) ? 0.5 : 1.0;
    mass.add(w * d0.values[i]);
  }
  CHECK(mass.value() * d0.step == doctest::Approx(1.0).epsilon(0.01));

  const DensityEstimate d1 = kde_density(b, 1);
  CHECK(density_distance(d1) < 0.02);

  // Worker count must not change a single bit.
  const DensityEstimate d0w = kde_density(b, 0, 0.0, 4);
  CHECK(d0.values == d0w.values);

  // Mirrored samples give the mirrored estimate (up to summation order).
  SampleBatch neg = b;
  for (double& v : neg.values) v = -v;
  const DensityEstimate dn = kde_density(neg, 0, d0.bandwidth);
  for (std::size_t i = 0; i < d0.grid_size(); ++i)
    CHECK(std::fabs(d0.values[i] - dn.values[d0.grid_size() - 1 - i]) <=
          1e-12);

  const SampleBatch tiny = sample_batch(GaussPoly::coordinate(1), 50, 1);
  CHECK_THROWS_AS(kde_density(tiny, 0), std::invalid_argument);
}

TEST_CASE("kernel derivatives come from the analytic formula") {
  const SampleBatch b = sample_batch(GaussPoly::coordinate(1), 150, 6);
  const DensityEstimate d2 = kde_density(b, 2, 0.4);

  std::vector<double> xs;
  for (double v : b.values) xs.push_back(v);
  std::sort(xs.begin(), xs.end());

  const double h = 0.4;
  for (std::size_t g = 0; g < d2.grid_size(); g += 37) {
    const double x = d2.x_at(g);
    // phi''(u) = (u^2 - 1) phi(u), summed directly.
    NeumaierSum s;
    for (double xj : xs) {
      const double u = (x - xj) / h;
      if (std::fabs(u) > 10.0) continue;
      s.add((u * u - 1.0) * normal_pdf(u));
    }
    const double direct = s.value() / (xs.size() * std::pow(h, 3.0));
    CHECK(d2.values[g] == doctest::Approx(direct).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("distribution distances") {
  const SampleBatch b = sample_batch(GaussPoly::coordinate(1), 1000000, 12);
  const DistributionDistances d = distribution_distances(b);
  CHECK(d.kolmogorov <= 0.002);
  CHECK(d.wasserstein1 <= 0.002);

  // Point mass at zero: the empirical law jumps from 0 to 1 where the
  // normal law sits at one half.
  const SampleBatch degenerate = sample_batch(GaussPoly::constant(0.0), 1000, 1);
  const DistributionDistances dd = distribution_distances(degenerate);
  CHECK(dd.kolmogorov == doctest::Approx(0.5).epsilon(1e-12));

  // A location shift moves the coupling distance by exactly the shift.
  const GaussPoly shifted =
      GaussPoly::coordinate(1) + GaussPoly::constant(0.7);
  const SampleBatch bs = sample_batch(shifted, 1000000, 12);
  const DistributionDistances ds = distribution_distances(bs);
  CHECK(ds.wasserstein1 == doctest::Approx(0.7).epsilon(0.015));
}

TEST_CASE("stein discrepancy exact values") {
  const ChaosVector pair({GaussPoly::coordinate(1), GaussPoly::coordinate(2)},
                         {1, 1});
  const SteinDiscrepancy zero = stein_discrepancy(pair);
  CHECK(zero.value <= 1e-12);
  CHECK_FALSE(zero.monte_carlo_fallback);

  const ChaosVector h2({GaussPoly::hermite(1, 2)}, {2});
  const SteinDiscrepancy s2 = stein_discrepancy(h2);
  CHECK(s2.value == doctest::Approx(std::sqrt(32.0)).epsilon(1e-12));

  const unsigned n = 16;
  const ChaosVector fam({chi2_functional(n)}, {2});
  const SteinDiscrepancy sf = stein_discrepancy(fam);
  CHECK(sf.value == doctest::Approx(std::sqrt(8.0 / n)).epsilon(1e-12));
}

TEST_CASE("stein discrepancy falls back to sampling when the budget stops it") {
  // (N1 + ... + N10)^2 - 10 is a rank-one second chaos with eigenvalue 10;
  // its coordinate derivatives have ten terms each, so squaring them under
  // a 50-term budget must bail out to sampling.
  GaussPoly s10;
  for (std::uint32_t i = 1; i <= 10; ++i)
    s10 = s10 + GaussPoly::coordinate(i);
  const GaussPoly f = s10 * s10 - GaussPoly::constant(10.0);
  const ChaosVector fam({f}, {2});

  const SteinDiscrepancy exact = stein_discrepancy(fam);
  CHECK_FALSE(exact.monte_carlo_fallback);
  CHECK(exact.value == doctest::Approx(std::sqrt(32.0e4)).epsilon(1e-12));

  const SteinDiscrepancy s = stein_discrepancy(fam, 50, 200000, 719);
  CHECK(s.monte_carlo_fallback);
  CHECK(s.samples_used == 200000);
  CHECK(s.value == doctest::Approx(exact.value).epsilon(0.02));

  const SteinDiscrepancy again = stein_discrepancy(fam, 50, 200000, 719);
  CHECK(s.value == again.value);
}

TEST_CASE("entropy and fisher information near the Gaussian") {
  const SampleBatch b = sample_batch(GaussPoly::coordinate(1), 1000000, 21);
  const EntropyFisherReport r = entropy_fisher(b);
  CHECK(std::fabs(r.entropy) < 0.003);
  CHECK(r.fisher < 0.01);
  CHECK(r.entropy_se < 0.001);

  // Inflated variance: KL(N(0,1.2) || N(0,1)) = (0.2 - log 1.2)/2.
  const GaussPoly inflated = scale(GaussPoly::coordinate(1), std::sqrt(1.2));
  const SampleBatch bi = sample_batch(inflated, 1000000, 22);
  const EntropyFisherReport ri = entropy_fisher(bi);
  CHECK(ri.entropy == doctest::Approx(0.00879).epsilon(0.15));

  // Mean shift: the relative Fisher information of N(mu,1) is mu^2.
  const GaussPoly shifted =
      GaussPoly::coordinate(1) + GaussPoly::constant(0.5);
  const SampleBatch bs = sample_batch(shifted, 1000000, 23);
  const EntropyFisherReport rs = entropy_fisher(bs);
  CHECK(std::fabs(rs.fisher - 0.25) < 0.02);
}

TEST_CASE("score pairs route the fisher information through regression") {
  // For F = N1 the score kernel is Z = N1 and E[Z|F] = F, so the residual
  // fisher estimate must be near zero.
  const SampleBatch b = sample_batch(GaussPoly::coordinate(1), 200000, 31);
  ScorePairs pairs;
  pairs.f = b.values;
  pairs.z = b.values;
  const EntropyFisherReport r = entropy_fisher(b, pairs);
  CHECK(r.fisher < 0.01);

  ScorePairs broken;
  broken.f = {1.0, 2.0};
  broken.z = {1.0};
  CHECK_THROWS_AS(entropy_fisher(b, broken), std::invalid_argument);
}

TEST_CASE("entropy and fisher decay along the chi2 family") {
  // Sharper distributional closeness for larger n should show up in every
  // functional: entropy and fisher both shrink roughly like 1/n, staying
  // comparable to the fourth moment gap 12/n.
  std::vector<double> ns = {20.0, 80.0, 320.0};
  std::vector<double> ents;
  std::vector<double> fishers;
  std::vector<double> ks;
  for (double dn : ns) {
    const unsigned n = static_cast<unsigned>(dn);
    const SampleBatch b = sample_batch(chi2_functional(n), 200000, 41 + n);
    const EntropyFisherReport r = entropy_fisher(b);
    ents.push_back(r.entropy);
    fishers.push_back(r.fisher);
    ks.push_back(distribution_distances(b).kolmogorov);
  }
  for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
    CHECK(ents[i] > ents[i + 1]);
    CHECK(fishers[i] > fishers[i + 1]);
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CHECK(ents[i] > 0.0);
    const double gap = 12.0 / ns[i];
    CHECK(ents[i] / gap > 0.005);
    CHECK(ents[i] / gap < 5.0);
    CHECK(fishers[i] / gap > 0.005);
    CHECK(fishers[i] / gap < 5.0);
  }

  // Pinsker chain sanity at n = 80: d_TV^2 <= Ent/2 <= Fisher/4 with slack
  // for estimation error (Kolmogorov lower-bounds total variation).
  CHECK(ks[1] * ks[1] <= 0.5 * ents[1] + 0.005);
  CHECK(0.5 * ents[1] <= 0.25 * fishers[1] + 0.005);
}

TEST_CASE("bootstrap standard errors") {
  const GaussianStream s(99, 0);
  std::vector<double> vals(10000);
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = s.normal_at(i);

  const double se = bootstrap_se(vals, 120, 7);
  CHECK(se > 0.007);
  CHECK(se < 0.013);
  CHECK(se == bootstrap_se(vals, 120, 7));

  CHECK_THROWS_AS(bootstrap_se({}, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_se(vals, 1, 1), std::invalid_argument);
}

TEST_CASE("csv exports") {
  SampleWants wants;
  wants.gamma = true;
  const SampleBatch b = sample_batch(GaussPoly::hermite(1, 2), 3, 77, wants);
  const std::string csv = batch_to_csv(b);

  std::string expected = "index,value,gamma\n";
  for (std::size_t i = 0; i < 3; ++i) {
    expected += std::to_string(i);
    expected += ',';
    expected += format_double(b.values[i]);
    expected += ',';
    expected += format_double(b.gamma_values[i]);
    expected += '\n';
  }
  CHECK(csv == expected);

  // Formatted values parse back to the exact stored doubles.
  std::size_t pos = csv.find('\n') + 1;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t c1 = csv.find(',', pos);
    const std::size_t c2 = csv.find(',', c1 + 1);
    const std::size_t end = csv.find('\n', c2 + 1);
    CHECK(std::strtod(csv.substr(c1 + 1, c2 - c1 - 1).c_str(), nullptr) ==
          b.values[i]);
    CHECK(std::strtod(csv.substr(c2 + 1, end - c2 - 1).c_str(), nullptr) ==
          b.gamma_values[i]);
    pos = end + 1;
  }

  const SampleBatch big = sample_batch(GaussPoly::coordinate(1), 500, 78);
  const DensityEstimate d = kde_density(big, 0);
  const std::string dcsv = density_to_csv(d);
  CHECK(dcsv.rfind("x,fq_hat,phi_q,abs_diff\n", 0) == 0);
  CHECK(std::count(dcsv.begin(), dcsv.end(), '\n') == 1002);

  const ChaosVector v({GaussPoly::coordinate(1), GaussPoly::coordinate(2)},
                      {1, 1});
  const SampleBatch vb = sample_batch(v, 10, 1);
  CHECK_THROWS_AS(batch_to_csv(vb), std::invalid_argument);
}
