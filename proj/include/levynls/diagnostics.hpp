#pragma once

#include "levynls/errors.hpp"
#include "levynls/nonlinear.hpp"
#include "levynls/record.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace levynls {

EnergyReport energy(const SpectralModel& model, const Nonlinearity& f, const Coeffs& c);

/// E'[x] h = Re <A x + F(x), h> for h in the span of the first x.size() modes.
double energy_derivative(const SpectralModel& model, const Nonlinearity& f, const Coeffs& x,
                         const Coeffs& h);

/// Modulus w(u, delta) of a path that is constant on each [t_k, t_{k+1}).
///
/// The infimum runs over partitions of [0, T] whose points are recorded times
/// (plus T) with all cells at least delta long; it is evaluated exactly by
/// dynamic programming in O(m^3) distance evaluations.
template <class Value, class Distance>
double cadlag_modulus(std::span<const double> times, std::span<const Value> values,
                      double horizon, double delta, Distance&& dist) {
  if (times.size() != values.size() || times.empty()) {
    throw ShapeError("modulus needs one value per recorded time");
  }
  if (times.front() != 0.0) throw DomainError("path must start at t = 0");
  if (horizon < times.back()) throw DomainError("horizon precedes the last recorded time");
  if (!(delta > 0.0) || delta > horizon) throw DomainError("delta must lie in (0, T]");

  // Candidate partition points: recorded times, closed by T.
  std::vector<double> points(times.begin(), times.end());
  if (points.back() < horizon) points.push_back(horizon);
  const std::size_t m = points.size();
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> best(m, inf);
  best[0] = 0.0;
  for (std::size_t b = 1; b < m; ++b) {
    // Cell [points[a], points[b]) contains the values a..b-1.
    double osc = 0.0;
    for (std::size_t a = b; a-- > 0;) {
      for (std::size_t k = a + 1; k < b; ++k) osc = std::max(osc, dist(values[a], values[k]));
      if (points[b] - points[a] >= delta && best[a] < inf) {
        best[b] = std::min(best[b], std::max(best[a], osc));
      }
    }
  }
  return best[m - 1];
}

/// Scalar paths with d(a, b) = |a - b|.
double cadlag_modulus(std::span<const double> times, std::span<const double> values,
                      double horizon, double delta);

struct MomentEstimate {
  double r = 1.0;
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  /// mean^(1/r), nondecreasing in r.
  double normalized = 0.0;
};

struct EnsembleSummary {
  std::size_t count = 0;
  std::vector<double> sup_norm_EA;
  std::vector<double> sup_energy;
  /// sup_t (1/2 ||u||^2 + E(u)) per trajectory.
  std::vector<double> sup_mass_energy;
  std::vector<MomentEstimate> norm_moments;
  std::vector<MomentEstimate> energy_moments;
  double median_sup_mass_energy = 0.0;
  double median_sup_norm_EA = 0.0;
  double variance_budget = 0.0;
};

double median(std::vector<double> xs);

/// Empirical means of (sup_t ||u||_EA)^r and |sup_t E|^r with seeded
/// percentile-bootstrap 95% bands.
EnsembleSummary ensemble_moments(std::span<const TrajectoryRecord> records,
                                 const std::vector<double>& r_list, int resamples = 1000,
                                 std::uint64_t seed = 0x5eedULL);

struct StoppingRule {
  enum class Kind { Deterministic, FirstJumpAfter };
  Kind kind = Kind::Deterministic;
  /// Deterministic: tau = t0. FirstJumpAfter: the first jump time >= t0, or T
  /// when there is none.
  double t0 = 0.0;
};

struct AldousRow {
  double theta = 0.0;
  double probability = 0.0;
};

/// Empirical P{ ||u((tau + theta) ^ T) - u(tau)||_{E_A^*} >= eta } over records.
std::vector<AldousRow> aldous_statistic(const SpectralModel& model,
                                        std::span<const TrajectoryRecord> records,
                                        const std::vector<double>& theta_list,
                                        const StoppingRule& rule, double eta);

/// E_A^* distance after zero-padding both states to the longer basis prefix.
double dual_distance(const SpectralModel& model, const Coeffs& a, const Coeffs& b);

}  // namespace levynls
