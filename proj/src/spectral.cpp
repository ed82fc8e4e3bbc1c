#include "levynls/spectral.hpp"

#include "levynls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <tuple>

namespace levynls {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct Mode {
  double lambda_s;
  double lambda_a;
  Wavenumber w;
};

void check_length(double length, const char* what) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError(std::string(what) + " must be a positive finite length");
  }
}

}  // namespace

int spatial_dimension(const Domain& domain) {
  return std::holds_alternative<Torus2D>(domain) ? 2 : 1;
}

std::string domain_name(const Domain& domain) {
  return std::visit(Overloaded{[](const Torus1D&) { return std::string("torus1d"); },
                               [](const Torus2D&) { return std::string("torus2d"); },
                               [](const IntervalDirichlet&) { return std::string("dirichlet"); },
                               [](const IntervalNeumann&) { return std::string("neumann"); }},
                    domain);
}

// rho(t) = -6s^5 + 15s^4 - 10s^3 + 1 with s = t - 1 on [1, 2].
double cutoff_profile(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return ((-6.0 * s + 15.0) * s - 10.0) * s * s * s + 1.0;
}

double cutoff_profile_derivative(double t, int k) {
  if (k == 0) return cutoff_profile(t);
  if (k < 0 || k > 2) throw DomainError("cutoff profile is only C^2");
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double s = t - 1.0;
  if (k == 1) return -30.0 * s * s * (s - 1.0) * (s - 1.0);
  return -60.0 * s * (2.0 * s - 1.0) * (s - 1.0);
}

double cutoff_s(int n, double lambda) {
  if (n < 0) throw DomainError("level must be nonnegative");
  if (!(lambda > 0.0)) throw DomainError("s_n is defined for lambda > 0");
  const double lo = std::ldexp(1.0, n);
  if (lambda < lo) return 1.0;
  if (lambda >= 2.0 * lo) return 0.0;
  return cutoff_profile(std::ldexp(lambda, -n));
}

double cutoff_s_derivative(int n, double lambda, int k) {
  if (k == 0) return cutoff_s(n, lambda);
  if (n < 0) throw DomainError("level must be nonnegative");
  if (!(lambda > 0.0)) throw DomainError("s_n is defined for lambda > 0");
  // d^k/dlambda^k rho(2^-n lambda) = 2^-nk rho^(k)(2^-n lambda)
  return std::ldexp(cutoff_profile_derivative(std::ldexp(lambda, -n), k), -n * k);
}

SpectralModel::SpectralModel(Domain domain, double beta, int max_level, int dealias_factor)
    : domain_(domain), beta_(beta), max_level_(max_level), dealias_factor_(dealias_factor) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be positive");
  if (max_level < 0) throw ConfigError("max_level must be nonnegative");
  if (max_level > 30) throw ConfigError("max_level too large");
  if (dealias_factor < 2) throw ConfigError("dealias_factor must be at least 2");

  const double cap = std::ldexp(1.0, max_level + 1);
  std::vector<Mode> modes;

  // Eigenvalue of (-Laplacian)^beta from the Laplacian eigenvalue.
  const auto frac = [beta](double lap) { return lap == 0.0 ? 0.0 : std::pow(lap, beta); };

  std::visit(
      Overloaded{
          [&](const Torus1D& d) {
            check_length(d.length, "torus length");
            const double q = 2.0 * kPi / d.length;
            for (int k = 0;; ++k) {
              const double la = frac(q * q * k * k);
              if (1.0 + la >= cap) break;
              modes.push_back({1.0 + la, la, {k, 0}});
              if (k > 0) modes.push_back({1.0 + la, la, {-k, 0}});
            }
          },
          [&](const Torus2D& d) {
            check_length(d.length_x, "torus x-length");
            check_length(d.length_y, "torus y-length");
            const double qx = 2.0 * kPi / d.length_x;
            const double qy = 2.0 * kPi / d.length_y;
            // |k1| is bounded by the k2 = 0 column and vice versa.
            int kx = 0;
            while (1.0 + frac(qx * qx * (kx + 1) * (kx + 1)) < cap) ++kx;
            int ky = 0;
            while (1.0 + frac(qy * qy * (ky + 1) * (ky + 1)) < cap) ++ky;
            for (int k1 = -kx; k1 <= kx; ++k1) {
              for (int k2 = -ky; k2 <= ky; ++k2) {
                const double la = frac(qx * qx * k1 * k1 + qy * qy * k2 * k2);
                if (1.0 + la < cap) modes.push_back({1.0 + la, la, {k1, k2}});
              }
            }
          },
          [&](const IntervalDirichlet& d) {
            check_length(d.length, "interval length");
            const double q = kPi / d.length;
            for (int k = 1;; ++k) {
              const double la = frac(q * q * k * k);
              if (la >= cap) break;
              modes.push_back({la, la, {k, 0}});
            }
          },
          [&](const IntervalNeumann& d) {
            check_length(d.length, "interval length");
            const double q = kPi / d.length;
            for (int k = 0;; ++k) {
              const double la = frac(q * q * k * k);
              if (1.0 + la >= cap) break;
              modes.push_back({1.0 + la, la, {k, 0}});
            }
          }},
      domain_);

  // Ties (torus multiplicities) broken lexicographically in the wavenumber.
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    return std::tie(a.lambda_s, a.w.k1, a.w.k2) < std::tie(b.lambda_s, b.w.k1, b.w.k2);
  });

  const auto m = static_cast<Eigen::Index>(modes.size());
  eigenvalues_s_.resize(m);
  eigenvalues_a_.resize(m);
  modes_.reserve(modes.size());
  int kmax1 = 0;
  int kmax2 = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    eigenvalues_s_[i] = modes[i].lambda_s;
    eigenvalues_a_[i] = modes[i].lambda_a;
    modes_.push_back(modes[i].w);
    kmax1 = std::max(kmax1, std::abs(modes[i].w.k1));
    kmax2 = std::max(kmax2, std::abs(modes[i].w.k2));
  }

  // Grid sizes: tori need more than 4K nodes per direction for exact cubic
  // products, cosine/sine series more than 2K.
  std::visit(
      Overloaded{
          [&](const Torus1D& d) {
            const int nx = dealias_factor_ * (2 * kmax1 + 1);
            grid_shape_ = {nx, 1};
            for (int j = 0; j < nx; ++j) nodes_.push_back({d.length * j / nx, 0.0});
            weights_ = Eigen::VectorXd::Constant(nx, d.length / nx);
          },
          [&](const Torus2D& d) {
            const int nx = dealias_factor_ * (2 * kmax1 + 1);
            const int ny = dealias_factor_ * (2 * kmax2 + 1);
            grid_shape_ = {nx, ny};
            for (int i = 0; i < nx; ++i)
              for (int j = 0; j < ny; ++j)
                nodes_.push_back({d.length_x * i / nx, d.length_y * j / ny});
            weights_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(nx) * ny,
                                                 d.length_x * d.length_y / (nx * ny));
          },
          [&](const IntervalDirichlet& d) {
            // Interior nodes only; every sine vanishes at the endpoints.
            const int nx = dealias_factor_ * (kmax1 + 1);
            grid_shape_ = {nx - 1, 1};
            for (int j = 1; j < nx; ++j) nodes_.push_back({d.length * j / nx, 0.0});
            weights_ = Eigen::VectorXd::Constant(nx - 1, d.length / nx);
          },
          [&](const IntervalNeumann& d) {
            const int nx = dealias_factor_ * (kmax1 + 1);
            grid_shape_ = {nx + 1, 1};
            for (int j = 0; j <= nx; ++j) nodes_.push_back({d.length * j / nx, 0.0});
            weights_ = Eigen::VectorXd::Constant(nx + 1, d.length / nx);
            weights_[0] *= 0.5;
            weights_[nx] *= 0.5;
          }},
      domain_);

  const auto g = static_cast<Eigen::Index>(nodes_.size());
  synthesis_.resize(g, m);
  std::visit(
      Overloaded{
          [&](const Torus1D& d) {
            const double norm = 1.0 / std::sqrt(d.length);
            for (Eigen::Index j = 0; j < g; ++j)
              for (Eigen::Index i = 0; i < m; ++i)
                synthesis_(j, i) =
                    norm * std::polar(1.0, 2.0 * kPi * modes_[i].k1 * nodes_[j][0] / d.length);
          },
          [&](const Torus2D& d) {
            const double norm = 1.0 / std::sqrt(d.length_x * d.length_y);
            for (Eigen::Index j = 0; j < g; ++j)
              for (Eigen::Index i = 0; i < m; ++i)
                synthesis_(j, i) =
                    norm * std::polar(1.0, 2.0 * kPi *
                                               (modes_[i].k1 * nodes_[j][0] / d.length_x +
                                                modes_[i].k2 * nodes_[j][1] / d.length_y));
          },
          [&](const IntervalDirichlet& d) {
            const double norm = std::sqrt(2.0 / d.length);
            for (Eigen::Index j = 0; j < g; ++j)
              for (Eigen::Index i = 0; i < m; ++i)
                synthesis_(j, i) = norm * std::sin(kPi * modes_[i].k1 * nodes_[j][0] / d.length);
          },
          [&](const IntervalNeumann& d) {
            for (Eigen::Index j = 0; j < g; ++j)
              for (Eigen::Index i = 0; i < m; ++i) {
                const double norm =
                    modes_[i].k1 == 0 ? std::sqrt(1.0 / d.length) : std::sqrt(2.0 / d.length);
                synthesis_(j, i) = norm * std::cos(kPi * modes_[i].k1 * nodes_[j][0] / d.length);
              }
          }},
      domain_);

  analysis_ = synthesis_.adjoint() * weights_.asDiagonal();
}

Eigen::Index SpectralModel::find_mode(Wavenumber w) const {
  const auto it = std::find(modes_.begin(), modes_.end(), w);
  return it == modes_.end() ? -1 : static_cast<Eigen::Index>(it - modes_.begin());
}

GridField SpectralModel::to_grid(const Coeffs& c) const {
  if (c.size() > size()) throw ShapeError("coefficient vector longer than the model basis");
  return synthesis_.leftCols(c.size()) * c;
}

Coeffs SpectralModel::from_grid(const GridField& f, Eigen::Index dim) const {
  if (f.size() != grid_size()) throw ShapeError("grid field does not match the model grid");
  if (dim < 0 || dim > size()) throw ShapeError("requested dimension exceeds the model basis");
  return analysis_.topRows(dim) * f;
}

GalerkinLevel SpectralModel::level(int n) const {
  if (n < 0 || n > max_level_) {
    throw ConfigError("level " + std::to_string(n) + " outside [0, " +
                      std::to_string(max_level_) + "]");
  }
  GalerkinLevel lv;
  lv.n = n;
  lv.full_size = size();
  const double cap = std::ldexp(1.0, n + 1);
  while (lv.dim < size() && eigenvalues_s_[lv.dim] < cap) ++lv.dim;
  lv.index_set.resize(static_cast<std::size_t>(lv.dim));
  lv.sn_values.resize(lv.dim);
  for (Eigen::Index i = 0; i < lv.dim; ++i) {
    lv.index_set[static_cast<std::size_t>(i)] = i;
    lv.sn_values[i] = cutoff_s(n, eigenvalues_s_[i]);
  }
  return lv;
}

SpectralModel build_spectral_model(const Domain& domain, double beta, int max_level,
                                   int dealias_factor) {
  return SpectralModel(domain, beta, max_level, dealias_factor);
}

namespace {

Coeffs restrict_to(const GalerkinLevel& level, const Coeffs& c) {
  if (c.size() > level.full_size) {
    throw ShapeError("coefficient vector of length " + std::to_string(c.size()) +
                     " exceeds basis size " + std::to_string(level.full_size));
  }
  Coeffs out = Coeffs::Zero(level.dim);
  const Eigen::Index k = std::min(level.dim, c.size());
  out.head(k) = c.head(k);
  return out;
}

}  // namespace

Coeffs apply_Pn(const GalerkinLevel& level, const Coeffs& c) { return restrict_to(level, c); }

Coeffs apply_Sn(const GalerkinLevel& level, const Coeffs& c) {
  Coeffs out = restrict_to(level, c);
  out.array() *= level.sn_values.array();
  return out;
}

std::vector<double> mihlin_check(int n, int k_max, int samples) {
  if (k_max < 0 || k_max > 2) throw DomainError("mihlin_check supports k_max in [0, 2]");
  if (samples < 2) throw DomainError("need at least two samples");
  std::vector<double> sup(static_cast<std::size_t>(k_max) + 1, 0.0);
  // lambda = 2^n t with t over (0, 4]; scaling by 2^n is exact in binary.
  for (int i = 1; i <= samples; ++i) {
    const double t = 4.0 * static_cast<double>(i) / samples;
    const double lambda = std::ldexp(t, n);
    for (int k = 0; k <= k_max; ++k) {
      const double v =
          std::abs(std::pow(lambda, k) * cutoff_s_derivative(n, lambda, k));
      sup[static_cast<std::size_t>(k)] = std::max(sup[static_cast<std::size_t>(k)], v);
    }
  }
  return sup;
}

double grid_lp_norm(const SpectralModel& model, const GridField& f, double p) {
  if (!(p >= 1.0)) throw DomainError("L^p norm requires p >= 1");
  if (f.size() != model.grid_size()) throw ShapeError("grid field does not match the model grid");
  const Eigen::VectorXd mod = f.cwiseAbs();
  const Eigen::VectorXd powered = p == 2.0 ? Eigen::VectorXd(mod.cwiseAbs2())
                                           : Eigen::VectorXd(mod.array().pow(p));
  return std::pow(model.integrate(powered), 1.0 / p);
}

double sobolev_norm(const SpectralModel& model, const Coeffs& c, Space space) {
  if (c.size() > model.size()) throw ShapeError("coefficient vector longer than the model basis");
  const auto k = c.size();
  const Eigen::VectorXd mod2 = c.cwiseAbs2();
  switch (space.kind) {
    case Space::Kind::H:
      return std::sqrt(mod2.sum());
    case Space::Kind::EA:
      return std::sqrt(
          (mod2.array() * (1.0 + model.eigenvalues_A().head(k).array())).sum());
    case Space::Kind::EADual:
      return std::sqrt(
          (mod2.array() / (1.0 + model.eigenvalues_A().head(k).array())).sum());
    case Space::Kind::Lp:
      return grid_lp_norm(model, model.to_grid(c), space.p);
  }
  return 0.0;
}

double estimate_Sn_Lp_norm(const SpectralModel& model, const GalerkinLevel& level, double p,
                           int num_probes, std::mt19937_64& rng) {
  if (!(p >= 1.0)) throw DomainError("L^p norm requires p >= 1");
  const Eigen::Index m = model.size();
  double best = 0.0;
  const auto consider = [&](const Coeffs& u) {
    const double den = sobolev_norm(model, u, Space::Lp(p));
    if (den <= 0.0) return;
    best = std::max(best, sobolev_norm(model, apply_Sn(level, u), Space::Lp(p)) / den);
  };

  for (Eigen::Index i = 0; i < m; ++i) consider(Coeffs::Unit(m, i));

  // Dirichlet-kernel-like packets: flat spectrum up to a cutoff, concentrated in space.
  for (Eigen::Index k = 1; k <= m; k = std::max(k + 1, k * 5 / 4)) {
    Coeffs u = Coeffs::Zero(m);
    u.head(k).setOnes();
    consider(u);
  }
  if (level.dim > 0) {
    Coeffs u = Coeffs::Zero(m);
    u.head(level.dim).setOnes();
    consider(u);
  }

  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> decay(0.0, 2.0);
  for (int probe = 0; probe < num_probes; ++probe) {
    const double s = decay(rng);
    Coeffs u(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double scale = std::pow(model.eigenvalues_S()[i], -0.5 * s);
      u[i] = std::complex<double>(normal(rng), normal(rng)) * scale;
    }
    consider(u);
  }
  return best;
}

}  // namespace levynls
