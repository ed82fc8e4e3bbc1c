#include "levynls/solver.hpp"

#include "levynls/diagnostics.hpp"
#include "levynls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace levynls {

namespace {

constexpr std::complex<double> kI(0.0, 1.0);

bool is_empty_atomic(const IntensityMeasure& measure) {
  const auto* a = std::get_if<AtomicMeasure>(&measure.kind);
  return a != nullptr && a->atoms.empty();
}

/// exp(-i t lambda) elementwise.
Coeffs rotate(const Eigen::VectorXd& lambda, double t, const Coeffs& u) {
  Coeffs out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = std::polar(1.0, -t * lambda[i]) * u[i];
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("solver dt must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("solver max_iterations must be at least 1");
  if (!(min_step > 0.0)) throw ConfigError("solver min_step must be positive");
}

GalerkinProblem make_problem(std::shared_ptr<const SpectralModel> model, int level,
                             const Nonlinearity& nonlinearity,
                             const std::vector<NoiseSymbol>& symbols,
                             const IntensityMeasure& measure, const Coeffs& initial,
                             double horizon) {
  if (!model) throw ConfigError("problem needs a spectral model");
  measure.validate();
  validate_nonlinearity(nonlinearity, model->dimension(), model->beta());
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be >= 0");
  if (initial.size() != model->size()) {
    throw ShapeError("initial datum must be given in the full model basis");
  }
  if (!initial.allFinite()) throw ConfigError("initial datum must be finite");
  if (!is_empty_atomic(measure) && static_cast<int>(symbols.size()) != measure.dimension()) {
    throw ConfigError("number of noise symbols (" + std::to_string(symbols.size()) +
                      ") differs from the noise dimension (" +
                      std::to_string(measure.dimension()) + ")");
  }

  GalerkinProblem p;
  p.level = model->level(level);
  p.nonlinearity = nonlinearity;
  std::vector<Eigen::VectorXd> sampled;
  sampled.reserve(symbols.size());
  for (const auto& s : symbols) sampled.push_back(sample_symbol(*model, s));
  p.noise = assemble_noise_matrices(*model, p.level, sampled);
  p.measure = measure;
  p.moments = compute_moments(measure);
  p.initial = initial;
  p.horizon = horizon;
  p.model = std::move(model);
  return p;
}

Coeffs renormalize_initial(const SpectralModel& model, const GalerkinLevel& level,
                           const Coeffs& u0) {
  if (u0.size() > model.size()) throw ShapeError("initial datum longer than the model basis");
  const Coeffs s = apply_Sn(level, u0);
  const double sn = s.norm();
  if (sn == 0.0) return Coeffs::Zero(level.dim);
  return s * (u0.norm() / sn);
}

ClosureMode resolve_closure(const IntensityMeasure& measure, ClosureMode requested) {
  if (requested == ClosureMode::Auto) {
    return measure.is_atomic() ? ClosureMode::AtomicExact : ClosureMode::Taylor2;
  }
  if (requested == ClosureMode::AtomicExact && !measure.is_atomic()) {
    throw ConfigError("AtomicExact closure requires an atomic intensity measure");
  }
  return requested;
}

GalerkinDrift::GalerkinDrift(const GalerkinProblem& problem, ClosureMode closure)
    : problem_(&problem), closure_(resolve_closure(problem.measure, closure)) {
  const auto dim = problem.level.dim;
  const auto& model = *problem.model;
  lambda_a_ = model.eigenvalues_A().head(dim);
  noise_matrix_ = Eigen::MatrixXcd::Zero(dim, dim);
  if (is_empty_atomic(problem.measure)) return;

  const auto& ops = problem.noise;
  const auto& mom = problem.moments;
  if (mom.mean_vector.squaredNorm() > 0.0) {
    noise_matrix_ += kI * B_of_l(ops, mom.mean_vector);
    has_noise_matrix_ = true;
  }

  if (const auto* atomic = std::get_if<AtomicMeasure>(&problem.measure.kind)) {
    atom_exponentials_.resize(atomic->atoms.size());
    for (std::size_t j = 0; j < atomic->atoms.size(); ++j) {
      const auto& atom = atomic->atoms[j];
      const Eigen::MatrixXcd b = B_of_l(ops, atom.mark);
      atom_exponentials_[j].emplace(b);
      if (atom.mark.norm() < problem.measure.epsilon && closure_ == ClosureMode::AtomicExact) {
        // w_j (exp(-i B(a_j)) - I + i B(a_j)) for atoms inside the truncated region.
        noise_matrix_ += atom.weight * (atom_exponentials_[j]->matrix() -
                                        Eigen::MatrixXcd::Identity(dim, dim) + kI * b);
        has_noise_matrix_ = true;
      }
    }
  }

  if (closure_ == ClosureMode::Taylor2 && mom.variance_budget > 0.0) {
    const auto& c = mom.second_moment_matrix;
    for (int m = 0; m < ops.noise_dimension(); ++m) {
      for (int k = 0; k < ops.noise_dimension(); ++k) {
        if (c(m, k) == 0.0) continue;
        noise_matrix_ -= 0.5 * c(m, k) *
                         (ops.matrices[static_cast<std::size_t>(m)] *
                          ops.matrices[static_cast<std::size_t>(k)]);
      }
    }
    has_noise_matrix_ = true;
  }
}

Coeffs GalerkinDrift::perturbation(const Coeffs& u) const {
  const auto& p = *problem_;
  Coeffs out = -kI * eval_F(*p.model, p.nonlinearity, u);
  if (has_noise_matrix_) out.noalias() += noise_matrix_ * u;
  return out;
}

Coeffs GalerkinDrift::operator()(const Coeffs& u) const {
  if (u.size() != problem_->level.dim) throw ShapeError("state does not live on the level");
  Coeffs out = perturbation(u);
  out -= kI * lambda_a_.cast<std::complex<double>>().cwiseProduct(u);
  return out;
}

Coeffs GalerkinDrift::apply_jump(const JumpEvent& event, const Coeffs& u) const {
  if (event.atom >= 0 && static_cast<std::size_t>(event.atom) < atom_exponentials_.size() &&
      atom_exponentials_[static_cast<std::size_t>(event.atom)]) {
    return atom_exponentials_[static_cast<std::size_t>(event.atom)]->apply(u);
  }
  return jump_map(problem_->noise, event.mark, u);
}

Coeffs drift(const GalerkinProblem& problem, ClosureMode closure, const Coeffs& state) {
  return GalerkinDrift(problem, closure)(state);
}

namespace {

std::optional<Coeffs> midpoint_step(const GalerkinDrift& f, const SolverConfig& config,
                                    const Eigen::VectorXd& lambda, const Coeffs& u, double tau) {
  // u+ = E(tau) u + tau E(tau/2) g(w),  w = (E(tau/2) u + E(-tau/2) u+) / 2,
  // with E(t) = exp(-i t A) and g the non-diagonal part of the drift.
  const Coeffs half_u = rotate(lambda, 0.5 * tau, u);
  const Coeffs full_u = rotate(lambda, tau, u);
  const double scale = std::max(1.0, u.norm());

  Coeffs next = full_u + tau * rotate(lambda, 0.5 * tau, f.perturbation(half_u));
  for (int it = 0; it < config.max_iterations; ++it) {
    const Coeffs w = 0.5 * (half_u + rotate(lambda, -0.5 * tau, next));
    Coeffs updated = full_u + tau * rotate(lambda, 0.5 * tau, f.perturbation(w));
    const double change = (updated - next).norm();
    next = std::move(updated);
    if (!next.allFinite()) return std::nullopt;
    if (change <= config.tolerance * scale) return next;
  }
  return std::nullopt;
}

Coeffs split_step(const GalerkinDrift& f, const Eigen::VectorXd& lambda, const Coeffs& u,
                  double tau) {
  const auto& p = f.problem();
  const auto& model = *p.model;
  Coeffs v = rotate(lambda, 0.5 * tau, u);
  GridField g = model.to_grid(v);
  const double s = p.nonlinearity.sign_factor();
  const double e = p.nonlinearity.alpha - 1.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double r = std::abs(g[j]);
    const double amp = r < 1e-300 ? 0.0 : std::pow(r, e);
    g[j] *= std::polar(1.0, -tau * s * amp);
  }
  v = model.from_grid(g, v.size());
  v += tau * (f.noise_matrix() * v);
  return rotate(lambda, 0.5 * tau, v);
}

}  // namespace

Coeffs step_between_jumps(const GalerkinDrift& f, const SolverConfig& config, const Coeffs& state,
                          double tau, long long* halvings) {
  if (tau == 0.0) return state;
  if (!std::isfinite(tau)) throw DomainError("step must be finite");
  const auto& p = f.problem();
  if (state.size() != p.level.dim) throw ShapeError("state does not live on the level");
  const Eigen::VectorXd lambda = p.model->eigenvalues_A().head(p.level.dim);

  if (config.mode == SolverMode::SplitStep) {
    Coeffs out = split_step(f, lambda, state, tau);
    if (!out.allFinite()) throw NumericError("split step produced non-finite values");
    return out;
  }

  if (auto out = midpoint_step(f, config, lambda, state, tau)) return *out;
  if (std::abs(tau) * 0.5 < config.min_step) {
    throw NumericError("midpoint fixed-point iteration failed below the minimum step");
  }
  if (halvings) ++*halvings;
  const Coeffs mid = step_between_jumps(f, config, state, 0.5 * tau, halvings);
  return step_between_jumps(f, config, mid, 0.5 * tau, halvings);
}

std::vector<double> jump_adapted_grid(double horizon, double dt,
                                      const std::vector<JumpEvent>& events) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  std::vector<double> grid;
  const auto steps = static_cast<long long>(std::ceil(horizon / dt - 1e-9));
  grid.reserve(static_cast<std::size_t>(steps) + events.size() + 1);
  for (long long k = 0; k < steps; ++k) grid.push_back(static_cast<double>(k) * dt);
  grid.push_back(horizon);
  for (const auto& e : events) grid.push_back(e.time);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

TrajectoryRecord simulate_with_events(const GalerkinProblem& problem, const SolverConfig& config,
                                      const std::vector<JumpEvent>& events) {
  config.validate();
  const auto& model = *problem.model;
  const GalerkinDrift f(problem, config.closure);

  TrajectoryRecord rec;
  rec.level = problem.level.n;
  rec.closure_variance = problem.moments.variance_budget;
  rec.times = jump_adapted_grid(problem.horizon, config.dt, events);

  Coeffs u = renormalize_initial(model, problem.level, problem.initial);
  rec.initial_mass = u.squaredNorm();

  const auto record = [&](const Coeffs& state) {
    rec.diagnostics.push_back(energy(model, problem.nonlinearity, state));
    rec.norm_EA.push_back(sobolev_norm(model, state, Space::EA()));
    if (config.store_states) rec.states.push_back(state);
  };
  record(u);

  std::size_t next_event = 0;
  for (std::size_t i = 1; i < rec.times.size(); ++i) {
    u = step_between_jumps(f, config, u, rec.times[i] - rec.times[i - 1], &rec.step_halvings);
    // Marks act on the left limit u(t-); simultaneous events in generation order.
    while (next_event < events.size() && events[next_event].time <= rec.times[i]) {
      u = f.apply_jump(events[next_event], u);
      rec.jumps.push_back(events[next_event]);
      ++next_event;
    }
    record(u);
  }
  if (!config.store_states) rec.states.push_back(u);
  return rec;
}

TrajectoryRecord simulate(const GalerkinProblem& problem, const SolverConfig& config,
                          std::mt19937_64& rng) {
  const auto events = sample_prm(problem.measure, problem.horizon, rng);
  return simulate_with_events(problem, config, events);
}

CoupledResult simulate_coupled(const GalerkinProblem& coarse, const GalerkinProblem& fine,
                               const SolverConfig& config, std::mt19937_64& rng) {
  if (coarse.model != fine.model) throw ConfigError("coupled levels must share one model");
  if (coarse.level.n > fine.level.n) throw ConfigError("coarse level exceeds fine level");
  if (coarse.horizon != fine.horizon) throw ConfigError("coupled levels must share the horizon");
  if (!config.store_states) throw ConfigError("coupled runs need stored states");
  const auto events = sample_prm(fine.measure, fine.horizon, rng);
  CoupledResult out;
  out.coarse = simulate_with_events(coarse, config, events);
  out.fine = simulate_with_events(fine, config, events);
  for (std::size_t i = 0; i < out.coarse.states.size(); ++i) {
    out.sup_distance = std::max(
        out.sup_distance, dual_distance(*coarse.model, out.coarse.states[i], out.fine.states[i]));
  }
  return out;
}

}  // namespace levynls
