#include "levynls/diagnostics.hpp"

#include <random>

namespace levynls {

std::size_t TrajectoryRecord::index_at(double t) const {
  if (times.empty()) throw UsageError("empty trajectory");
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
}

double TrajectoryRecord::max_relative_mass_error() const {
  double worst = 0.0;
  const double ref = initial_mass > 0.0 ? initial_mass : 1.0;
  for (const auto& d : diagnostics) worst = std::max(worst, std::abs(d.mass - initial_mass) / ref);
  return worst;
}

EnergyReport energy(const SpectralModel& model, const Nonlinearity& f, const Coeffs& c) {
  EnergyReport r;
  const Eigen::VectorXd mod2 = c.cwiseAbs2();
  r.mass = mod2.sum();
  r.kinetic = 0.5 * model.eigenvalues_A().head(c.size()).dot(mod2);
  r.potential = eval_Fhat(model, f, c);
  r.total = r.kinetic + r.potential;
  return r;
}

double energy_derivative(const SpectralModel& model, const Nonlinearity& f, const Coeffs& x,
                         const Coeffs& h) {
  if (h.size() != x.size()) throw ShapeError("direction must live on the state's level");
  const Coeffs grad =
      model.eigenvalues_A().head(x.size()).cast<std::complex<double>>().cwiseProduct(x) +
      eval_F(model, f, x);
  return grad.dot(h).real();
}

double cadlag_modulus(std::span<const double> times, std::span<const double> values,
                      double horizon, double delta) {
  return cadlag_modulus(times, values, horizon, delta,
                        [](double a, double b) { return std::abs(a - b); });
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw UsageError("median of an empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

namespace {

MomentEstimate moment_with_band(const std::vector<double>& samples, double r, int resamples,
                                std::mt19937_64& rng) {
  std::vector<double> powered;
  powered.reserve(samples.size());
  for (const double s : samples) powered.push_back(std::pow(s, r));
  const auto mean_of = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (const double x : v) acc += x;
    return acc / static_cast<double>(v.size());
  };
  MomentEstimate est;
  est.r = r;
  est.mean = mean_of(powered);
  est.normalized = std::pow(est.mean, 1.0 / r);

  std::uniform_int_distribution<std::size_t> pick(0, powered.size() - 1);
  std::vector<double> boot(static_cast<std::size_t>(resamples));
  std::vector<double> draw(powered.size());
  for (auto& b : boot) {
    for (auto& d : draw) d = powered[pick(rng)];
    b = mean_of(draw);
  }
  std::sort(boot.begin(), boot.end());
  const auto at = [&](double q) {
    const auto i = static_cast<std::size_t>(std::floor(q * (boot.size() - 1)));
    return boot[i];
  };
  est.lower = std::min(at(0.025), est.mean);
  est.upper = std::max(at(0.975), est.mean);
  return est;
}

}  // namespace

EnsembleSummary ensemble_moments(std::span<const TrajectoryRecord> records,
                                 const std::vector<double>& r_list, int resamples,
                                 std::uint64_t seed) {
  if (records.size() < 2) throw UsageError("ensemble moments need at least two trajectories");
  if (resamples < 1) throw UsageError("bootstrap needs at least one resample");
  EnsembleSummary s;
  s.count = records.size();
  for (const auto& rec : records) {
    if (rec.norm_EA.empty() || rec.diagnostics.empty()) throw UsageError("record without diagnostics");
    s.sup_norm_EA.push_back(*std::max_element(rec.norm_EA.begin(), rec.norm_EA.end()));
    double sup_e = -std::numeric_limits<double>::infinity();
    double sup_me = -std::numeric_limits<double>::infinity();
    for (const auto& d : rec.diagnostics) {
      sup_e = std::max(sup_e, d.total);
      sup_me = std::max(sup_me, 0.5 * d.mass + d.total);
    }
    s.sup_energy.push_back(sup_e);
    s.sup_mass_energy.push_back(sup_me);
    s.variance_budget = std::max(s.variance_budget, rec.closure_variance);
  }
  std::vector<double> abs_energy;
  for (const double e : s.sup_energy) abs_energy.push_back(std::abs(e));

  std::mt19937_64 rng(seed);
  for (const double r : r_list) {
    if (!(r > 0.0)) throw UsageError("moment orders must be positive");
    s.norm_moments.push_back(moment_with_band(s.sup_norm_EA, r, resamples, rng));
    s.energy_moments.push_back(moment_with_band(abs_energy, r, resamples, rng));
  }
  s.median_sup_mass_energy = median(s.sup_mass_energy);
  s.median_sup_norm_EA = median(s.sup_norm_EA);
  return s;
}

double dual_distance(const SpectralModel& model, const Coeffs& a, const Coeffs& b) {
  const Eigen::Index n = std::max(a.size(), b.size());
  Coeffs d = Coeffs::Zero(n);
  d.head(a.size()) += a;
  d.head(b.size()) -= b;
  return sobolev_norm(model, d, Space::EADual());
}

std::vector<AldousRow> aldous_statistic(const SpectralModel& model,
                                        std::span<const TrajectoryRecord> records,
                                        const std::vector<double>& theta_list,
                                        const StoppingRule& rule, double eta) {
  if (records.empty()) throw UsageError("Aldous statistic needs at least one trajectory");
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  std::vector<AldousRow> rows;
  for (const double theta : theta_list) {
    if (!(theta >= 0.0)) throw DomainError("theta must be nonnegative");
    std::size_t hits = 0;
    for (const auto& rec : records) {
      const double horizon = rec.horizon();
      double tau = std::min(rule.t0, horizon);
      if (rule.kind == StoppingRule::Kind::FirstJumpAfter) {
        tau = horizon;
        for (const auto& j : rec.jumps) {
          if (j.time >= rule.t0) {
            tau = j.time;
            break;
          }
        }
      }
      const double later = std::min(tau + theta, horizon);
      const auto& u0 = rec.states[rec.index_at(tau)];
      const auto& u1 = rec.states[rec.index_at(later)];
      if (dual_distance(model, u1, u0) >= eta) ++hits;
    }
    rows.push_back({theta, static_cast<double>(hits) / static_cast<double>(records.size())});
  }
  return rows;
}

}  // namespace levynls
