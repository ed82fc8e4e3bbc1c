#include "levynls/diagnostics.hpp"
#include "levynls/errors.hpp"
#include "levynls/solver.hpp"

#include "helpers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace levynls {
namespace {

using testing::random_coeffs;

const Nonlinearity kCubic{3.0, NonlinearitySign::Defocusing};
const NoiseSymbol kCos{NoiseSymbol::Kind::Cos, 1.0, 1, 0};

IntensityMeasure atoms(std::vector<double> marks, double eps = 0.0, double weight = 1.0) {
  AtomicMeasure a;
  for (const double x : marks) a.atoms.push_back({weight, Eigen::VectorXd::Constant(1, x)});
  return {a, eps};
}

IntensityMeasure no_noise() { return {AtomicMeasure{}, 0.0}; }

std::shared_ptr<const SpectralModel> torus(int max_level = 6) {
  return std::make_shared<const SpectralModel>(Torus1D{}, 1.0, max_level, 2);
}

Coeffs smooth_initial(const SpectralModel& m, std::mt19937_64& rng) {
  return random_coeffs(m.size(), rng, 1.5, &m) * 0.5;
}

// exp(-i t A) on the first dim modes. States of size ~1e-9 make the cubic term
// invisible at double precision, which stands in for F = 0.
Coeffs linear_flow(const SpectralModel& m, Eigen::Index dim, const Coeffs& u, double t) {
  Coeffs out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) out[i] = std::polar(1.0, -t * m.eigenvalues_A()[i]) * u[i];
  return out;
}

TEST(Initial, RenormalizationBranches) {
  const auto m = torus();
  const GalerkinLevel lv = m->level(4);
  std::mt19937_64 rng(1);
  Coeffs low = Coeffs::Zero(m->size());
  low.head(5) = random_coeffs(5, rng);  // lambda^S <= 5 < 16
  EXPECT_LE((renormalize_initial(*m, lv, low) - low.head(lv.dim)).norm(), 1e-15);

  Coeffs high = Coeffs::Zero(m->size());
  high[m->size() - 1] = 1.0;
  EXPECT_EQ(renormalize_initial(*m, lv, high).norm(), 0.0);

  const Coeffs generic = random_coeffs(m->size(), rng);
  EXPECT_NEAR(renormalize_initial(*m, lv, generic).norm(), generic.norm(), 1e-14 * generic.norm());
}

TEST(Drift, LinearPartOnSingleMode) {
  const auto m = torus();
  const Coeffs u0 = Coeffs::Unit(m->size(), 3);
  const GalerkinProblem p = make_problem(m, 5, kCubic, {}, no_noise(), u0, 1.0);
  const GalerkinDrift d(p, ClosureMode::Auto);
  const Coeffs h = Coeffs::Unit(p.level.dim, 3);
  const Coeffs full = d(h);
  const Coeffs linear = full - d.perturbation(h);
  EXPECT_LE((linear + std::complex<double>(0, 1) * m->eigenvalues_A()[3] * h).norm(), 1e-15);
  EXPECT_EQ(d.noise_matrix().norm(), 0.0);
}

TEST(Drift, FullyResolvedAtomsConserveMassInstantaneously) {
  const auto m = torus();
  std::mt19937_64 rng(2);
  for (const auto& symbol : {kCos, NoiseSymbol{NoiseSymbol::Kind::Constant, 0.8}}) {
    const GalerkinProblem p = make_problem(m, 5, kCubic, {symbol}, atoms({0.3, -0.3, 0.5}), smooth_initial(*m, rng), 1.0);
    const GalerkinDrift d(p, ClosureMode::AtomicExact);
    for (int t = 0; t < 20; ++t) {
      const Coeffs u = random_coeffs(p.level.dim, rng);
      EXPECT_LE(std::abs(u.dot(d(u)).real()), 1e-12 * u.squaredNorm() * std::max(1.0, d(u).norm()));
    }
  }
}

TEST(Drift, ExactClosureForConstantSymbolIsDiagonal) {
  const auto m = torus();
  const double c = 0.8;
  const IntensityMeasure nu = atoms({0.3, 0.05, -0.02}, 0.1);
  std::mt19937_64 rng(3);
  const GalerkinProblem p = make_problem(m, 5, kCubic, {NoiseSymbol{NoiseSymbol::Kind::Constant, c}}, nu,
                                         smooth_initial(*m, rng), 1.0);
  const GalerkinDrift d(p, ClosureMode::AtomicExact);
  // i B(m_eps) + sum_{|a| < eps} (exp(-i a B) - 1 + i a B), B = c s^2 diagonal.
  for (Eigen::Index j = 0; j < p.level.dim; ++j) {
    const double b = c * std::pow(p.level.sn_values[j], 2);
    std::complex<double> expected = std::complex<double>(0, 1) * 0.3 * b;
    for (const double a : {0.05, -0.02}) {
      expected += std::polar(1.0, -a * b) - 1.0 + std::complex<double>(0, a * b);
    }
    EXPECT_NEAR(std::abs(d.noise_matrix()(j, j) - expected), 0.0, 1e-14);
  }
}

TEST(Drift, TaylorClosureApproachesExactClosureAtThirdOrder) {
  const auto m = torus();
  std::mt19937_64 rng(4);
  const Coeffs u0 = smooth_initial(*m, rng);
  std::vector<double> gaps;
  for (const double a : {0.02, 0.01}) {
    const GalerkinProblem p = make_problem(m, 5, kCubic, {kCos}, atoms({a}, 0.5), u0, 1.0);
    const Eigen::MatrixXcd exact = GalerkinDrift(p, ClosureMode::AtomicExact).noise_matrix();
    const Eigen::MatrixXcd taylor = GalerkinDrift(p, ClosureMode::Taylor2).noise_matrix();
    gaps.push_back((exact - taylor).norm());
  }
  EXPECT_GT(gaps[0] / gaps[1], 7.0);
}

TEST(Drift, IncompatibleClosureIsConfigError) {
  const auto m = torus();
  const IntensityMeasure stable{RadialStableMeasure{1.0, 0.5, 1}, 0.1};
  std::mt19937_64 rng(5);
  const GalerkinProblem p = make_problem(m, 4, kCubic, {kCos}, stable, smooth_initial(*m, rng), 1.0);
  EXPECT_THROW(GalerkinDrift(p, ClosureMode::AtomicExact), ConfigError);
  EXPECT_EQ(GalerkinDrift(p, ClosureMode::Auto).closure(), ClosureMode::Taylor2);
}

TEST(Problem, RejectsMismatchedInputs) {
  const auto m = torus();
  std::mt19937_64 rng(6);
  const Coeffs u0 = smooth_initial(*m, rng);
  EXPECT_THROW(make_problem(m, 4, kCubic, {kCos, kCos}, atoms({0.3}), u0, 1.0), ConfigError);
  EXPECT_THROW(make_problem(m, 4, kCubic, {kCos}, atoms({0.3}), u0.head(3), 1.0), ShapeError);
  EXPECT_THROW(make_problem(m, 7, kCubic, {kCos}, atoms({0.3}), u0, 1.0), ConfigError);
  EXPECT_THROW(make_problem(m, 4, {5.0, NonlinearitySign::Focusing}, {kCos}, atoms({0.3}), u0, 1.0), ConfigError);
}

TEST(Step, LinearFlowIsExactInBothModes) {
  const auto m = torus();
  std::mt19937_64 rng(7);
  // Zero datum amplitude in the nonlinearity: use a state so small that |u|^2 u is below roundoff.
  const GalerkinProblem p = make_problem(m, 6, kCubic, {}, no_noise(), Coeffs::Zero(m->size()), 1.0);
  const GalerkinDrift d(p, ClosureMode::Auto);
  for (const auto mode : {SolverMode::FaithfulMidpoint, SolverMode::SplitStep}) {
    SolverConfig sc;
    sc.mode = mode;
    const Coeffs u = random_coeffs(p.level.dim, rng) * 1e-9;
    const Coeffs stepped = step_between_jumps(d, sc, u, 0.37);
    EXPECT_LE((stepped - linear_flow(*m, p.level.dim, u, 0.37)).norm(), 1e-12 * u.norm());
  }
}

TEST(Step, MidpointConservesMassAndIsReversible) {
  const auto m = torus();
  std::mt19937_64 rng(8);
  const GalerkinProblem p = make_problem(m, 6, kCubic, {kCos}, atoms({0.3, -0.3}), smooth_initial(*m, rng), 1.0);
  const GalerkinDrift d(p, ClosureMode::AtomicExact);
  SolverConfig sc;
  for (int t = 0; t < 10; ++t) {
    const Coeffs u = random_coeffs(p.level.dim, rng, 1.0, m.get());
    const Coeffs v = step_between_jumps(d, sc, u, 1e-2);
    EXPECT_LE(std::abs(v.squaredNorm() - u.squaredNorm()) / u.squaredNorm(), 10 * sc.tolerance);
    EXPECT_LE((step_between_jumps(d, sc, v, -1e-2) - u).norm(), 1e-10);
  }
}

TEST(Step, SplittingAgreesWithMidpointToSecondOrderLocally) {
  const auto m = torus();
  std::mt19937_64 rng(9);
  const GalerkinProblem p = make_problem(m, 5, kCubic, {kCos}, atoms({0.3}, 0.0), smooth_initial(*m, rng), 1.0);
  const GalerkinDrift d(p, ClosureMode::AtomicExact);
  const Coeffs u = random_coeffs(p.level.dim, rng, 1.0, m.get());
  SolverConfig mid;
  SolverConfig split;
  split.mode = SolverMode::SplitStep;
  std::vector<double> gaps;
  for (const double tau : {1e-2, 5e-3, 2.5e-3}) {
    gaps.push_back((step_between_jumps(d, mid, u, tau) - step_between_jumps(d, split, u, tau)).norm());
  }
  // Local discrepancy O(tau^2) at least: halving tau divides it by about 4 or more.
  EXPECT_GT(gaps[0] / gaps[1], 3.5);
  EXPECT_GT(gaps[1] / gaps[2], 3.5);
}

TEST(Step, FixedPointFailureBelowMinimumStepIsNumericError) {
  const auto m = torus();
  std::mt19937_64 rng(10);
  const GalerkinProblem p = make_problem(m, 6, kCubic, {kCos}, atoms({0.3}), smooth_initial(*m, rng), 1.0);
  const GalerkinDrift d(p, ClosureMode::AtomicExact);
  SolverConfig sc;
  sc.max_iterations = 1;
  sc.tolerance = 1e-300;
  sc.min_step = 0.05;
  long long halvings = 0;
  EXPECT_THROW(step_between_jumps(d, sc, random_coeffs(p.level.dim, rng), 0.1, &halvings), NumericError);
  // One halving reaches min_step, the retry fails again.
  EXPECT_EQ(halvings, 1);
}

TEST(Grid, JumpAdaptedGridContainsEventsAndHorizon) {
  std::vector<JumpEvent> ev{{0.25, Eigen::VectorXd::Zero(1), 0}, {0.3333, Eigen::VectorXd::Zero(1), 0}};
  const auto g = jump_adapted_grid(1.0, 0.1, ev);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  EXPECT_NE(std::find(g.begin(), g.end(), 0.25), g.end());
  EXPECT_NE(std::find(g.begin(), g.end(), 0.3333), g.end());
  EXPECT_EQ(g.size(), 13u);
  EXPECT_EQ(jump_adapted_grid(0.0, 0.1, {}).size(), 1u);
}

TEST(Simulate, FreeLinearRunIsTheUnitaryGroup) {
  const auto m = torus();
  std::mt19937_64 rng(11);
  Coeffs u0 = smooth_initial(*m, rng) * 1e-9;
  const GalerkinProblem p = make_problem(m, 6, kCubic, {}, no_noise(), u0, 1.0);
  SolverConfig sc;
  sc.dt = 1e-2;
  const TrajectoryRecord rec = simulate(p, sc, rng);
  const Coeffs start = renormalize_initial(*m, p.level, u0);
  EXPECT_LE((rec.states.back() - linear_flow(*m, p.level.dim, start, 1.0)).norm(), 1e-12 * start.norm());
  EXPECT_LE(rec.max_relative_mass_error(), 1e-12);
  EXPECT_TRUE(rec.jumps.empty());
}

TEST(Simulate, ExactClosureConservesMassPathwise) {
  const auto m = torus();
  std::mt19937_64 rng(12);
  const GalerkinProblem p = make_problem(m, 6, kCubic, {kCos}, atoms({0.3, -0.3}, 0.0, 3.0), smooth_initial(*m, rng), 1.0);
  SolverConfig sc;
  for (int seed = 0; seed < 3; ++seed) {
    auto stream = make_stream(99, static_cast<std::uint64_t>(seed));
    const TrajectoryRecord rec = simulate(p, sc, stream);
    EXPECT_LE(rec.max_relative_mass_error(), 1e-10);
    EXPECT_GT(rec.jumps.size(), 0u);
    // Each jump time is a recorded grid point holding the post-jump state.
    for (const auto& j : rec.jumps) EXPECT_EQ(rec.times[rec.index_at(j.time)], j.time);
  }
}

TEST(Simulate, SameSeedIsBitIdentical) {
  const auto m = torus();
  std::mt19937_64 init(13);
  const GalerkinProblem p = make_problem(m, 5, kCubic, {kCos}, atoms({0.3, -0.2}), smooth_initial(*m, init), 0.3);
  SolverConfig sc;
  auto a = make_stream(5, 1);
  auto b = make_stream(5, 1);
  const auto ra = simulate(p, sc, a);
  const auto rb = simulate(p, sc, b);
  ASSERT_EQ(ra.times, rb.times);
  for (std::size_t k = 0; k < ra.states.size(); ++k) {
    EXPECT_EQ(std::memcmp(ra.states[k].data(), rb.states[k].data(), sizeof(std::complex<double>) * ra.states[k].size()), 0);
  }
}

TEST(Coupled, SameLevelHasZeroDistance) {
  const auto m = torus();
  std::mt19937_64 rng(14);
  const GalerkinProblem p = make_problem(m, 5, kCubic, {kCos}, atoms({0.3, -0.3}), smooth_initial(*m, rng), 0.3);
  SolverConfig sc;
  sc.dt = 1e-2;
  EXPECT_EQ(simulate_coupled(p, p, sc, rng).sup_distance, 0.0);
}

TEST(Coupled, LowModeLinearDynamicsAreLevelIndependent) {
  const auto m = torus();
  Coeffs u0 = Coeffs::Zero(m->size());
  u0.head(5) << 1e-7, 2e-7, -1e-7, 0.5e-7, 1e-7;  // lambda^S <= 5 and negligible cubic term
  const NoiseSymbol constant{NoiseSymbol::Kind::Constant, 0.7};
  const GalerkinProblem coarse = make_problem(m, 3, kCubic, {constant}, atoms({0.3, -0.3}), u0, 0.5);
  const GalerkinProblem fine = make_problem(m, 6, kCubic, {constant}, atoms({0.3, -0.3}), u0, 0.5);
  SolverConfig sc;
  sc.dt = 1e-2;
  std::mt19937_64 rng(15);
  EXPECT_LE(simulate_coupled(coarse, fine, sc, rng).sup_distance, 1e-10);
}

TEST(Coupled, DistanceShrinksTowardsReference) {
  const auto m = torus(8);
  Coeffs u0(m->size());
  for (Eigen::Index i = 0; i < u0.size(); ++i) u0[i] = std::pow(m->eigenvalues_S()[i], -0.75);
  SolverConfig sc;
  sc.dt = 2e-3;
  const GalerkinProblem ref = make_problem(m, 8, kCubic, {kCos}, atoms({0.3, -0.3}), u0, 0.2);
  double previous = std::numeric_limits<double>::infinity();
  for (int n = 4; n <= 7; ++n) {
    const GalerkinProblem coarse = make_problem(m, n, kCubic, {kCos}, atoms({0.3, -0.3}), u0, 0.2);
    std::mt19937_64 rng(16);
    const double d = simulate_coupled(coarse, ref, sc, rng).sup_distance;
    EXPECT_LT(d, previous) << "level " << n;
    previous = d;
  }
}

}  // namespace
}  // namespace levynls
