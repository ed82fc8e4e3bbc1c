#pragma once

#include "levynls/marcus.hpp"
#include "levynls/noise.hpp"
#include "levynls/nonlinear.hpp"
#include "levynls/record.hpp"
#include "levynls/spectral.hpp"

#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace levynls {

enum class SolverMode { FaithfulMidpoint, SplitStep };

/// How the drift of the truncated jumps {|l| < epsilon} is closed.
/// Auto picks AtomicExact for atomic measures and Taylor2 otherwise.
enum class ClosureMode { Auto, Taylor2, AtomicExact };

struct SolverConfig {
  SolverMode mode = SolverMode::FaithfulMidpoint;
  double dt = 1e-3;
  double tolerance = 1e-12;
  int max_iterations = 100;
  ClosureMode closure = ClosureMode::Auto;
  /// Step halving on fixed-point failure stops below this step.
  double min_step = 1e-10;
  bool store_states = true;

  void validate() const;
};

/// Everything that defines the Galerkin system at one level.
struct GalerkinProblem {
  std::shared_ptr<const SpectralModel> model;
  GalerkinLevel level;
  Nonlinearity nonlinearity;
  NoiseOperators noise;
  IntensityMeasure measure;
  NoiseMoments moments;
  /// Initial datum in the full model basis (not yet renormalized).
  Coeffs initial;
  double horizon = 1.0;
};

/// Validates the pieces against each other and assembles the noise matrices.
GalerkinProblem make_problem(std::shared_ptr<const SpectralModel> model, int level,
                             const Nonlinearity& nonlinearity,
                             const std::vector<NoiseSymbol>& symbols,
                             const IntensityMeasure& measure, const Coeffs& initial,
                             double horizon);

/// S_n u0 rescaled to the H-norm of u0; zero when S_n u0 = 0.
Coeffs renormalize_initial(const SpectralModel& model, const GalerkinLevel& level,
                           const Coeffs& u0);

ClosureMode resolve_closure(const IntensityMeasure& measure, ClosureMode requested);

/// Pathwise between-jump vector field
///   -i A u - i P_n F(u) + i B_n(m_eps) u + D_eps(u)
/// where D_eps closes the truncated small jumps. Holds the per-atom jump
/// exponentials, read-only after construction.
class GalerkinDrift {
 public:
  GalerkinDrift(const GalerkinProblem& problem, ClosureMode closure);

  Coeffs operator()(const Coeffs& u) const;
  /// The drift without -i A u.
  Coeffs perturbation(const Coeffs& u) const;
  /// Linear noise part i B_n(m_eps) + D_eps as a matrix.
  const Eigen::MatrixXcd& noise_matrix() const { return noise_matrix_; }
  ClosureMode closure() const { return closure_; }

  /// exp(-i B_n(l)) u for an event, using the atom cache when possible.
  Coeffs apply_jump(const JumpEvent& event, const Coeffs& u) const;

  const GalerkinProblem& problem() const { return *problem_; }

 private:
  const GalerkinProblem* problem_;
  ClosureMode closure_;
  Eigen::VectorXd lambda_a_;
  Eigen::MatrixXcd noise_matrix_;
  bool has_noise_matrix_ = false;
  std::vector<std::optional<HermitianExponential>> atom_exponentials_;
};

/// drift(problem, state) with the given closure.
Coeffs drift(const GalerkinProblem& problem, ClosureMode closure, const Coeffs& state);

/// One step of length tau (tau may be negative for the midpoint rule).
/// FaithfulMidpoint: the implicit midpoint rule applied in the interaction
/// picture of the diagonal flow exp(-i t A); it conserves ||u||^2 whenever
/// Re<u, drift(u)> = 0 and is exact for the linear part. Fixed-point failures
/// are retried as two half steps down to config.min_step.
/// SplitStep: Strang splitting, half linear step, exact pointwise phase
/// rotation for the nonlinearity, explicit Euler for the noise drift, half
/// linear step.
Coeffs step_between_jumps(const GalerkinDrift& drift, const SolverConfig& config,
                          const Coeffs& state, double tau, long long* halvings = nullptr);

/// Samples the Poisson random measure and integrates one trajectory.
TrajectoryRecord simulate(const GalerkinProblem& problem, const SolverConfig& config,
                          std::mt19937_64& rng);

/// Integrates one trajectory driven by a given event sequence.
TrajectoryRecord simulate_with_events(const GalerkinProblem& problem, const SolverConfig& config,
                                      const std::vector<JumpEvent>& events);

/// Uniform grid k dt ending exactly at T, merged with the event times.
std::vector<double> jump_adapted_grid(double horizon, double dt,
                                      const std::vector<JumpEvent>& events);

struct CoupledResult {
  TrajectoryRecord coarse;
  TrajectoryRecord fine;
  /// sup_t ||u_coarse(t) - u_fine(t)||_{E_A^*} on the common grid.
  double sup_distance = 0.0;
};

/// Two levels of the same model driven by one realization of the noise.
CoupledResult simulate_coupled(const GalerkinProblem& coarse, const GalerkinProblem& fine,
                               const SolverConfig& config, std::mt19937_64& rng);

}  // namespace levynls
