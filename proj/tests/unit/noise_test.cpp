#include "levynls/errors.hpp"
#include "levynls/noise.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace levynls {
namespace {

using boost::math::quadrature::gauss_kronrod;

IntensityMeasure atomic(std::vector<std::pair<double, double>> atoms, double eps = 0.0) {
  AtomicMeasure a;
  for (const auto& [w, x] : atoms) a.atoms.push_back({w, Eigen::VectorXd::Constant(1, x)});
  return {a, eps};
}

IntensityMeasure stable(double c, double beta, int n, double eps) {
  return {RadialStableMeasure{c, beta, n}, eps};
}

struct SampleStats {
  double mean = 0.0;
  double sd = 0.0;
};

SampleStats stats(const std::vector<double>& xs) {
  SampleStats s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double v = 0.0;
  for (const double x : xs) v += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(v / (xs.size() - 1));
  return s;
}

TEST(Noise, AtomicCountIsPoisson) {
  std::mt19937_64 rng(1);
  const auto nu = atomic({{2.0, 0.5}});
  std::vector<double> counts;
  for (int i = 0; i < 10000; ++i) counts.push_back(static_cast<double>(sample_prm(nu, 1.0, rng).size()));
  const auto s = stats(counts);
  EXPECT_NEAR(s.mean, 2.0, 5.0 * s.sd / std::sqrt(10000.0));
  EXPECT_NEAR(s.sd * s.sd, 2.0, 0.15);
}

TEST(Noise, StableRateMatchesQuadrature) {
  for (const double beta : {0.5, 1.0, 1.5}) {
    for (const double eps : {0.3, 0.05}) {
      const double c = 0.7;
      const NoiseMoments m = compute_moments(stable(c, beta, 1, eps));
      // Density c |l|^{-1-beta} on both half lines.
      const double rate = 2.0 * gauss_kronrod<double, 61>::integrate(
                                    [&](double r) { return c * std::pow(r, -1.0 - beta); }, eps, 1.0, 15, 1e-14);
      EXPECT_NEAR(m.jump_rate, rate, 1e-10 * rate);
      EXPECT_NEAR(m.jump_rate, 2.0 * c * (std::pow(eps, -beta) - 1.0) / beta, 1e-12 * rate);
    }
  }
}

TEST(Noise, StableMomentsInHigherDimensions) {
  for (const int n : {2, 3}) {
    const double beta = 0.8;
    const double eps = 0.1;
    const NoiseMoments m = compute_moments(stable(1.3, beta, n, eps));
    // Radial integrals with the sphere area 2 pi^(n/2) / Gamma(n/2).
    const double area = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
    const double small = gauss_kronrod<double, 61>::integrate(
        [&](double r) { return 1.3 * area * std::pow(r, n - 1) * r * r * std::pow(r, -n - beta); }, 0.0, eps, 15, 1e-14);
    EXPECT_NEAR(m.variance_budget, small, 1e-9 * small);
    EXPECT_NEAR(m.second_moment_matrix.trace(), m.variance_budget, 1e-14);
    EXPECT_NEAR(m.mean_vector.norm(), 0.0, 1e-15);
  }
}

TEST(Noise, ZeroHorizonAndZeroEpsilon) {
  std::mt19937_64 rng(2);
  EXPECT_TRUE(sample_prm(atomic({{3.0, 0.2}}), 0.0, rng).empty());
  EXPECT_THROW(sample_prm(stable(1.0, 0.5, 1, 0.0), 1.0, rng), ConfigError);
  EXPECT_THROW(stable(1.0, 0.5, 1, 0.0).validate(), ConfigError);
  EXPECT_THROW(atomic({{1.0, 1.5}}).validate(), ConfigError);
  EXPECT_THROW(atomic({{-1.0, 0.5}}).validate(), ConfigError);
  EXPECT_THROW(stable(1.0, 2.0, 1, 0.1).validate(), ConfigError);
}

TEST(Noise, SymmetricAtomsHaveNoMeanOrBudget) {
  const NoiseMoments m = compute_moments(atomic({{1.0, 0.3}, {1.0, -0.3}}));
  EXPECT_EQ(m.mean_vector[0], 0.0);
  EXPECT_EQ(m.variance_budget, 0.0);
  EXPECT_DOUBLE_EQ(m.jump_rate, 2.0);
  EXPECT_DOUBLE_EQ(m.total_second_moment, 0.18);
}

TEST(Noise, AtomsSplitAtEpsilon) {
  const NoiseMoments m = compute_moments(atomic({{1.0, 0.3}, {2.0, 0.05}, {0.5, -0.02}}, 0.1));
  EXPECT_DOUBLE_EQ(m.jump_rate, 1.0);
  EXPECT_DOUBLE_EQ(m.mean_vector[0], 0.3);
  EXPECT_DOUBLE_EQ(m.variance_budget, 2.0 * 0.0025 + 0.5 * 0.0004);
  EXPECT_DOUBLE_EQ(m.second_moment_matrix.trace(), m.variance_budget);
}

TEST(Noise, StableBudgetClosedForm) {
  const NoiseMoments m = compute_moments(stable(1.0, 1.0, 1, 0.1));
  EXPECT_NEAR(m.variance_budget, 0.2, 1e-15);
  const double oracle = 2.0 * gauss_kronrod<double, 31>::integrate(
                                  [](double r) { return r * r * std::pow(r, -2.0); }, 0.0, 0.1, 5, 1e-15);
  EXPECT_NEAR(m.variance_budget, oracle, 1e-14);
}

TEST(Noise, BudgetDecaysAtAnalyticRate) {
  const double beta = 0.5;
  std::vector<double> le;
  std::vector<double> ls;
  for (const double eps : {0.2, 0.1, 0.05, 0.025}) {
    le.push_back(std::log(eps));
    ls.push_back(std::log(compute_moments(stable(1.0, beta, 1, eps)).variance_budget));
  }
  const double slope = (ls.back() - ls.front()) / (le.back() - le.front());
  EXPECT_NEAR(slope, 2.0 - beta, 0.1 * (2.0 - beta));
}

TEST(Noise, EventsSortedInsideWindowAndBall) {
  std::mt19937_64 rng(3);
  const auto nu = stable(1.0, 0.5, 2, 0.1);
  for (int i = 0; i < 50; ++i) {
    const auto ev = sample_prm(nu, 2.0, rng);
    for (std::size_t k = 0; k < ev.size(); ++k) {
      EXPECT_GT(ev[k].time, 0.0);
      EXPECT_LE(ev[k].time, 2.0);
      EXPECT_GE(ev[k].mark.norm(), 0.1 - 1e-15);
      EXPECT_LE(ev[k].mark.norm(), 1.0 + 1e-15);
      if (k > 0) EXPECT_LE(ev[k - 1].time, ev[k].time);
    }
  }
}

TEST(Noise, StableMarkRadiusFollowsTruncatedLaw) {
  std::mt19937_64 rng(4);
  const double beta = 0.5;
  const double eps = 0.05;
  const auto nu = stable(1.0, beta, 1, eps);
  std::vector<double> radii;
  while (radii.size() < 20000) {
    for (const auto& e : sample_prm(nu, 1.0, rng)) radii.push_back(e.mark.norm());
  }
  const auto density = [&](double r) { return std::pow(r, -1.0 - beta); };
  const double z = gauss_kronrod<double, 61>::integrate(density, eps, 1.0, 15, 1e-14);
  const double mean = gauss_kronrod<double, 61>::integrate([&](double r) { return r * density(r); }, eps, 1.0, 15, 1e-14) / z;
  const auto s = stats(radii);
  EXPECT_NEAR(s.mean, mean, 5.0 * s.sd / std::sqrt(static_cast<double>(radii.size())));
}

TEST(Noise, LevyPathReconstruction) {
  const NoiseMoments sym = compute_moments(atomic({{1.0, 0.3}, {1.0, -0.3}}));
  const NoiseMoments skew = compute_moments(atomic({{1.0, 0.3}}));
  const std::vector<double> grid{0.0, 0.5, 1.0};
  for (const auto& l : reconstruct_levy_path({}, sym, grid)) EXPECT_EQ(l[0], 0.0);
  const auto path = reconstruct_levy_path({}, skew, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_DOUBLE_EQ(path[i][0], -grid[i] * 0.3);
  const std::vector<JumpEvent> ev{{0.25, Eigen::VectorXd::Constant(1, 0.3), 0}};
  EXPECT_DOUBLE_EQ(reconstruct_levy_path(ev, skew, grid)[1][0], 0.3 - 0.15);
}

TEST(Noise, CompensatedSumIsCenteredWithIsometricVariance) {
  std::mt19937_64 rng(5);
  const auto nu = stable(1.0, 0.5, 1, 0.05);
  const NoiseMoments m = compute_moments(nu);
  const double T = 1.5;
  std::vector<double> values;
  for (int i = 0; i < 8000; ++i) {
    const auto ev = sample_prm(nu, T, rng);
    values.push_back(reconstruct_levy_path(ev, m, {T}).back()[0]);
  }
  const auto s = stats(values);
  EXPECT_NEAR(s.mean, 0.0, 5.0 * s.sd / std::sqrt(8000.0));
  // Var = T int_{eps <= |l| <= 1} |l|^2 nu(dl); standard error from the fourth moment.
  const double expected = T * (m.total_second_moment - m.variance_budget);
  double m4 = 0.0;
  for (const double v : values) m4 += std::pow(v - s.mean, 4);
  m4 /= values.size();
  const double se = std::sqrt((m4 - std::pow(s.sd, 4)) / values.size());
  EXPECT_NEAR(s.sd * s.sd, expected, 5.0 * se);
}

TEST(Noise, DisjointWindowCountsUncorrelated) {
  std::mt19937_64 rng(6);
  const auto nu = atomic({{3.0, 0.4}, {1.0, -0.2}});
  const int n = 8000;
  std::vector<double> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& e : sample_prm(nu, 1.0, rng)) (e.time <= 0.4 ? a[i] : b[i]) += 1.0;
  }
  const auto sa = stats(a);
  const auto sb = stats(b);
  double cov = 0.0;
  for (int i = 0; i < n; ++i) cov += (a[i] - sa.mean) * (b[i] - sb.mean);
  const double corr = cov / (n - 1) / (sa.sd * sb.sd);
  EXPECT_LT(std::abs(corr), 5.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(sa.mean, 1.6, 5.0 * sa.sd / std::sqrt(static_cast<double>(n)));
}

TEST(Noise, StreamsAreDeterministicAndDistinct) {
  EXPECT_EQ(stream_seed(42, 7), stream_seed(42, 7));
  EXPECT_NE(stream_seed(42, 7), stream_seed(42, 8));
  EXPECT_NE(stream_seed(42, 7), stream_seed(43, 7));
  auto a = make_stream(9, 3);
  auto b = make_stream(9, 3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

TEST(Noise, SphereArea) {
  EXPECT_DOUBLE_EQ(unit_sphere_area(1), 2.0);
  EXPECT_NEAR(unit_sphere_area(2), 2.0 * M_PI, 1e-14);
  EXPECT_NEAR(unit_sphere_area(3), 4.0 * M_PI, 1e-14);
}

}  // namespace
}  // namespace levynls
