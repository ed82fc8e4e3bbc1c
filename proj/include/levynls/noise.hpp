#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

namespace levynls {

struct Atom {
  double weight = 1.0;
  Eigen::VectorXd mark;
};

/// nu = sum_j w_j delta_{a_j}.
struct AtomicMeasure {
  std::vector<Atom> atoms;
};

/// nu(dl) = c |l|^(-N-beta) dl on {0 < |l| <= 1} in R^N.
struct RadialStableMeasure {
  double activity = 1.0;
  double index = 0.5;
  int dimension = 1;
};

/// Intensity measure on the closed unit ball with its small-jump truncation
/// radius. Jumps with |l| >= epsilon are simulated, the rest is closed by a
/// deterministic drift in the solver.
struct IntensityMeasure {
  std::variant<AtomicMeasure, RadialStableMeasure> kind;
  double epsilon = 0.0;

  int dimension() const;
  bool is_atomic() const { return std::holds_alternative<AtomicMeasure>(kind); }
  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

struct JumpEvent {
  double time = 0.0;
  Eigen::VectorXd mark;
  /// Index of the generating atom for atomic measures, -1 otherwise.
  int atom = -1;
};

struct NoiseMoments {
  /// int_{eps <= |l| <= 1} l nu(dl)
  Eigen::VectorXd mean_vector;
  /// int_{|l| < eps} l l^T nu(dl)
  Eigen::MatrixXd second_moment_matrix;
  /// int_{|l| < eps} |l|^2 nu(dl)
  double variance_budget = 0.0;
  /// nu({eps <= |l| <= 1}), the rate of simulated jumps.
  double jump_rate = 0.0;
  /// int_B |l|^2 nu(dl)
  double total_second_moment = 0.0;
};

/// Surface area of the unit sphere in R^N.
double unit_sphere_area(int dimension);

NoiseMoments compute_moments(const IntensityMeasure& measure);

/// Events of the Poisson random measure on (0, T] x {|l| >= epsilon}, sorted
/// by time with ties kept in generation order.
std::vector<JumpEvent> sample_prm(const IntensityMeasure& measure, double horizon,
                                  std::mt19937_64& rng);

/// Compensated path L(t) = sum_{t_j <= t} l_j - t m_eps at each grid time.
std::vector<Eigen::VectorXd> reconstruct_levy_path(const std::vector<JumpEvent>& events,
                                                   const NoiseMoments& moments,
                                                   const std::vector<double>& time_grid);

/// Seed of the index-th independent stream derived from a master seed
/// (splitmix64 finalizer over master ^ golden-ratio multiple of the index).
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index);
std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t index);

}  // namespace levynls
