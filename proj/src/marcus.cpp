#include "levynls/marcus.hpp"

#include "levynls/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <complex>
#include <numbers>

namespace levynls {

namespace {

constexpr std::complex<double> kI(0.0, 1.0);

void require_noise_dim(const NoiseOperators& ops, const Eigen::VectorXd& l) {
  if (l.size() != ops.noise_dimension()) {
    throw ShapeError("mark has " + std::to_string(l.size()) + " components, noise has " +
                     std::to_string(ops.noise_dimension()));
  }
  if (!l.allFinite()) throw DomainError("mark components must be finite");
}

void require_state(const NoiseOperators& ops, const Coeffs& x) {
  if (x.size() != ops.dim) throw ShapeError("state does not live on the operators' level");
}

}  // namespace

Eigen::VectorXd sample_symbol(const SpectralModel& model, const NoiseSymbol& symbol) {
  const auto& nodes = model.nodes();
  Eigen::VectorXd out(static_cast<Eigen::Index>(nodes.size()));
  const Domain& dom = model.domain();
  const bool torus = std::holds_alternative<Torus1D>(dom) || std::holds_alternative<Torus2D>(dom);
  double lx = 1.0;
  double ly = 1.0;
  if (const auto* t1 = std::get_if<Torus1D>(&dom)) lx = t1->length;
  if (const auto* t2 = std::get_if<Torus2D>(&dom)) {
    lx = t2->length_x;
    ly = t2->length_y;
  }
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double x = nodes[j][0];
    const double y = nodes[j][1];
    double phase = 0.0;
    if (torus) {
      phase = 2.0 * std::numbers::pi * (symbol.kx * x / lx + symbol.ky * y / ly);
    } else {
      phase = symbol.kx * x;
    }
    double v = 0.0;
    switch (symbol.kind) {
      case NoiseSymbol::Kind::Constant:
        v = symbol.amplitude;
        break;
      case NoiseSymbol::Kind::Cos:
        v = symbol.amplitude * std::cos(phase);
        break;
      case NoiseSymbol::Kind::Sin:
        v = symbol.amplitude * std::sin(phase);
        break;
      case NoiseSymbol::Kind::Bump: {
        const double dx = x - symbol.x0;
        const double dy = model.dimension() == 2 ? y - symbol.y0 : 0.0;
        v = symbol.amplitude *
            std::exp(-(dx * dx + dy * dy) / (2.0 * symbol.width * symbol.width));
        break;
      }
    }
    out[static_cast<Eigen::Index>(j)] = v;
  }
  return out;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()[0];
}

double weighted_operator_norm(const Eigen::MatrixXcd& m, const Eigen::VectorXd& weights) {
  const Eigen::VectorXd s = weights.cwiseSqrt();
  const Eigen::MatrixXcd similar = s.asDiagonal() * m * s.cwiseInverse().asDiagonal();
  return spectral_norm(similar);
}

void update_noise_constants(NoiseOperators& ops) {
  ops.b_H = 0.0;
  ops.b_EA = 0.0;
  for (const auto& m : ops.matrices) {
    const double h = spectral_norm(m);
    const double e = weighted_operator_norm(m, ops.ea_weights);
    ops.b_H += h * h;
    ops.b_EA += e * e;
  }
}

NoiseOperators assemble_noise_matrices(const SpectralModel& model, const GalerkinLevel& level,
                                       const std::vector<Eigen::VectorXd>& symbols_on_grid) {
  if (level.full_size != model.size()) throw ShapeError("level does not belong to this model");
  NoiseOperators ops;
  ops.level = level.n;
  ops.dim = level.dim;
  ops.ea_weights = 1.0 + model.eigenvalues_A().head(level.dim).array();

  // Columns are S_n h_k sampled on the grid.
  const Eigen::MatrixXcd basis =
      [&] {
        Eigen::MatrixXcd b(model.grid_size(), level.dim);
        for (Eigen::Index k = 0; k < level.dim; ++k) {
          b.col(k) = model.to_grid(Coeffs::Unit(level.dim, k)) * level.sn_values[k];
        }
        return b;
      }();
  const Eigen::VectorXd& w = model.weights();

  for (const auto& e : symbols_on_grid) {
    if (e.size() != model.grid_size()) throw ShapeError("symbol is not sampled on the model grid");
    Eigen::MatrixXcd m = basis.adjoint() * (w.cwiseProduct(e)).asDiagonal() * basis;
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    ops.hermitian_deviation = std::max(ops.hermitian_deviation, level.dim > 0 ? dev : 0.0);
    if (level.dim > 0 && dev > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
      throw NumericError("assembled noise matrix is not Hermitian (deviation " + std::to_string(dev) + ")");
    }
    m = 0.5 * (m + m.adjoint()).eval();
    ops.matrices.push_back(std::move(m));
  }
  update_noise_constants(ops);
  return ops;
}

double estimate_b_Lp(const SpectralModel& model, const NoiseOperators& ops, double p,
                     int num_probes, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  double total = 0.0;
  for (const auto& m : ops.matrices) {
    double best = 0.0;
    for (int probe = 0; probe < num_probes + ops.dim; ++probe) {
      Coeffs x;
      if (probe < ops.dim) {
        x = Coeffs::Unit(ops.dim, probe);
      } else {
        x.resize(ops.dim);
        for (Eigen::Index i = 0; i < ops.dim; ++i) x[i] = {normal(rng), normal(rng)};
      }
      const double den = sobolev_norm(model, x, Space::Lp(p));
      if (den > 0.0) best = std::max(best, sobolev_norm(model, m * x, Space::Lp(p)) / den);
    }
    total += best * best;
  }
  return total;
}

Eigen::MatrixXcd B_of_l(const NoiseOperators& ops, const Eigen::VectorXd& l) {
  require_noise_dim(ops, l);
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(ops.dim, ops.dim);
  for (int m = 0; m < ops.noise_dimension(); ++m) {
    if (l[m] != 0.0) b += l[m] * ops.matrices[static_cast<std::size_t>(m)];
  }
  return b;
}

HermitianExponential::HermitianExponential(const Eigen::MatrixXcd& b) {
  if (b.rows() != b.cols()) throw ShapeError("exponent must be square");
  if (b.size() > 0) {
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    const double dev = (b - b.adjoint()).cwiseAbs().maxCoeff();
    if (!(dev <= 1e-12 * scale)) {
      throw NumericError("jump generator is not Hermitian (deviation " + std::to_string(dev) + ")");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b);
  if (es.info() != Eigen::Success) throw NumericError("Hermitian eigendecomposition failed");
  u_ = es.eigenvectors();
  theta_ = es.eigenvalues();
}

Coeffs HermitianExponential::apply(const Coeffs& x, double t) const {
  if (x.size() != u_.rows()) throw ShapeError("state does not match the exponent");
  Coeffs y = u_.adjoint() * x;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] *= std::polar(1.0, -t * theta_[i]);
  return u_ * y;
}

Eigen::MatrixXcd HermitianExponential::matrix(double t) const {
  Eigen::VectorXcd phases(theta_.size());
  for (Eigen::Index i = 0; i < theta_.size(); ++i) phases[i] = std::polar(1.0, -t * theta_[i]);
  return u_ * phases.asDiagonal() * u_.adjoint();
}

Coeffs jump_map(const NoiseOperators& ops, const Eigen::VectorXd& l, const Coeffs& x) {
  require_state(ops, x);
  return HermitianExponential(B_of_l(ops, l)).apply(x);
}

Coeffs marcus_flow(const NoiseOperators& ops, double t, const Eigen::VectorXd& l, const Coeffs& x,
                   double ode_tol) {
  require_state(ops, x);
  if (!(ode_tol > 0.0)) throw DomainError("ode_tol must be positive");
  if (!(t >= 0.0)) throw DomainError("Marcus flow is integrated forward in time");
  if (t == 0.0) return x;
  const Eigen::MatrixXcd b = B_of_l(ops, l);
  const Eigen::Index n = x.size();

  // Real state [Re u; Im u] for odeint.
  using State = std::vector<double>;
  State y(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = x[i].real();
    y[static_cast<std::size_t>(n + i)] = x[i].imag();
  }
  const auto rhs = [&](const State& s, State& ds, double) {
    Coeffs z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      z[i] = {s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(n + i)]};
    }
    const Coeffs dz = -kI * (b * z);
    for (Eigen::Index i = 0; i < n; ++i) {
      ds[static_cast<std::size_t>(i)] = dz[i].real();
      ds[static_cast<std::size_t>(n + i)] = dz[i].imag();
    }
  };

  namespace ode = boost::numeric::odeint;
  try {
    auto stepper = ode::make_controlled(ode_tol, ode_tol, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, y, 0.0, t, std::min(t, 1e-2));
  } catch (const ode::odeint_error& e) {
    throw NumericError(std::string("Marcus flow integration failed: ") + e.what());
  }

  Coeffs out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = {y[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(n + i)]};
  }
  if (!out.allFinite()) throw NumericError("Marcus flow produced non-finite values");
  return out;
}

Coeffs jump_difference_1(const NoiseOperators& ops, const Eigen::VectorXd& l, const Coeffs& x) {
  return jump_map(ops, l, x) - x;
}

Coeffs jump_difference_2(const NoiseOperators& ops, const Eigen::VectorXd& l, const Coeffs& x) {
  require_state(ops, x);
  const Eigen::MatrixXcd b = B_of_l(ops, l);
  return HermitianExponential(b).apply(x) - x + kI * (b * x);
}

}  // namespace levynls
