#include "levynls/noise.hpp"

#include "levynls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace levynls {

int IntensityMeasure::dimension() const {
  if (const auto* a = std::get_if<AtomicMeasure>(&kind)) {
    return a->atoms.empty() ? 1 : static_cast<int>(a->atoms.front().mark.size());
  }
  return std::get<RadialStableMeasure>(kind).dimension;
}

void IntensityMeasure::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (const auto* a = std::get_if<AtomicMeasure>(&kind)) {
    const int n = dimension();
    if (n < 1) throw ConfigError("atom marks must have at least one component");
    for (const auto& atom : a->atoms) {
      if (atom.mark.size() != n) throw ConfigError("atom marks have inconsistent dimensions");
      if (!(atom.weight > 0.0) || !std::isfinite(atom.weight)) {
        throw ConfigError("atom weights must be positive and finite");
      }
      if (!atom.mark.allFinite()) throw ConfigError("atom marks must be finite");
      if (atom.mark.norm() > 1.0 + 1e-12) {
        throw ConfigError("atom marks must lie in the closed unit ball");
      }
    }
    return;
  }
  const auto& r = std::get<RadialStableMeasure>(kind);
  if (!(r.activity > 0.0) || !std::isfinite(r.activity)) {
    throw ConfigError("stable activity must be positive");
  }
  if (!(r.index > 0.0 && r.index < 2.0)) throw ConfigError("stable index must lie in (0, 2)");
  if (r.dimension < 1) throw ConfigError("noise dimension must be at least 1");
  if (!(epsilon > 0.0)) {
    throw ConfigError("infinite-activity measure requires a truncation epsilon > 0");
  }
}

double unit_sphere_area(int dimension) {
  const double n = dimension;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

NoiseMoments compute_moments(const IntensityMeasure& measure) {
  measure.validate();
  const int n = measure.dimension();
  NoiseMoments mom;
  mom.mean_vector = Eigen::VectorXd::Zero(n);
  mom.second_moment_matrix = Eigen::MatrixXd::Zero(n, n);

  if (const auto* a = std::get_if<AtomicMeasure>(&measure.kind)) {
    for (const auto& atom : a->atoms) {
      const double r = atom.mark.norm();
      mom.total_second_moment += atom.weight * r * r;
      if (r >= measure.epsilon) {
        mom.mean_vector += atom.weight * atom.mark;
        mom.jump_rate += atom.weight;
      } else {
        mom.second_moment_matrix += atom.weight * atom.mark * atom.mark.transpose();
      }
    }
  } else {
    const auto& s = std::get<RadialStableMeasure>(measure.kind);
    const double area = s.activity * unit_sphere_area(n);
    const double eps = measure.epsilon;
    // Radial density c |S^{N-1}| r^{-1-beta} on (0, 1]; symmetric, so m_eps = 0.
    mom.jump_rate = area * (std::pow(eps, -s.index) - 1.0) / s.index;
    mom.total_second_moment = area / (2.0 - s.index);
    const double budget = area * std::pow(eps, 2.0 - s.index) / (2.0 - s.index);
    mom.second_moment_matrix = Eigen::MatrixXd::Identity(n, n) * (budget / n);
  }
  mom.variance_budget = mom.second_moment_matrix.trace();
  return mom;
}

std::vector<JumpEvent> sample_prm(const IntensityMeasure& measure, double horizon,
                                  std::mt19937_64& rng) {
  measure.validate();
  if (!(horizon >= 0.0)) throw DomainError("horizon must be nonnegative");
  const NoiseMoments mom = compute_moments(measure);
  std::vector<JumpEvent> events;
  const double mean_count = mom.jump_rate * horizon;
  if (!(mean_count > 0.0)) return events;

  std::poisson_distribution<long long> count_dist(mean_count);
  const long long count = count_dist(rng);
  events.resize(static_cast<std::size_t>(count));

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Times in (0, T]: a jump at t = 0 would alter the initial datum.
  for (auto& e : events) e.time = horizon * (1.0 - unif(rng));

  const int n = measure.dimension();
  if (const auto* a = std::get_if<AtomicMeasure>(&measure.kind)) {
    std::vector<double> w;
    w.reserve(a->atoms.size());
    for (const auto& atom : a->atoms) {
      w.push_back(atom.mark.norm() >= measure.epsilon ? atom.weight : 0.0);
    }
    std::discrete_distribution<int> pick(w.begin(), w.end());
    for (auto& e : events) {
      e.atom = pick(rng);
      e.mark = a->atoms[static_cast<std::size_t>(e.atom)].mark;
    }
  } else {
    const auto& s = std::get<RadialStableMeasure>(measure.kind);
    const double top = std::pow(measure.epsilon, -s.index);
    std::normal_distribution<double> normal;
    for (auto& e : events) {
      // Inverse CDF of r^{-1-beta} on [eps, 1].
      const double u = unif(rng);
      const double r = std::min(1.0, std::pow(top - u * (top - 1.0), -1.0 / s.index));
      Eigen::VectorXd dir(n);
      if (n == 1) {
        dir[0] = unif(rng) < 0.5 ? -1.0 : 1.0;
      } else {
        do {
          for (int i = 0; i < n; ++i) dir[i] = normal(rng);
        } while (dir.norm() == 0.0);
        dir.normalize();
      }
      e.mark = r * dir;
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const JumpEvent& x, const JumpEvent& y) { return x.time < y.time; });
  return events;
}

std::vector<Eigen::VectorXd> reconstruct_levy_path(const std::vector<JumpEvent>& events,
                                                   const NoiseMoments& moments,
                                                   const std::vector<double>& time_grid) {
  std::vector<Eigen::VectorXd> path;
  path.reserve(time_grid.size());
  Eigen::VectorXd jumps = Eigen::VectorXd::Zero(moments.mean_vector.size());
  std::size_t next = 0;
  for (const double t : time_grid) {
    while (next < events.size() && events[next].time <= t) {
      if (events[next].mark.size() != jumps.size()) throw ShapeError("event mark dimension");
      jumps += events[next].mark;
      ++next;
    }
    path.push_back(jumps - t * moments.mean_vector);
  }
  return path;
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t z = master_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t index) {
  return std::mt19937_64(stream_seed(master_seed, index));
}

}  // namespace levynls
