#pragma once

#include "levynls/noise.hpp"
#include "levynls/spectral.hpp"

#include <vector>

namespace levynls {

/// Mass and energy of one state: kinetic 1/2 ||A^1/2 u||^2, potential F^(u).
struct EnergyReport {
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  double mass = 0.0;
};

/// A simulated cadlag path of the Galerkin system on a jump-adapted grid.
/// states[i] is the value at times[i]; at a jump time it is the post-jump value.
struct TrajectoryRecord {
  int level = 0;
  std::vector<double> times;
  std::vector<Coeffs> states;
  std::vector<JumpEvent> jumps;
  std::vector<EnergyReport> diagnostics;
  std::vector<double> norm_EA;
  /// Variance of the neglected small-jump martingale per unit time.
  double closure_variance = 0.0;
  /// Mass of the renormalized initial datum.
  double initial_mass = 0.0;
  /// Between-jump steps that had to be halved after a failed fixed-point solve.
  long long step_halvings = 0;

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  /// Index of the last recorded time <= t.
  std::size_t index_at(double t) const;
  double max_relative_mass_error() const;
};

}  // namespace levynls
