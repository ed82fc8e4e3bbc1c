#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace levynls {

/// Coefficients of a state in the eigenbasis, ordered as in SpectralModel.
using Coeffs = Eigen::VectorXcd;
/// Values of a function at the quadrature nodes.
using GridField = Eigen::VectorXcd;

struct Torus1D {
  double length = 6.283185307179586;
};
struct Torus2D {
  double length_x = 6.283185307179586;
  double length_y = 6.283185307179586;
};
struct IntervalDirichlet {
  double length = 3.141592653589793;
};
struct IntervalNeumann {
  double length = 3.141592653589793;
};

using Domain = std::variant<Torus1D, Torus2D, IntervalDirichlet, IntervalNeumann>;

int spatial_dimension(const Domain& domain);
std::string domain_name(const Domain& domain);

/// Integer label of an eigenfunction. For the torus this is the Fourier
/// wavenumber; for intervals it is the sine/cosine index (k2 unused).
struct Wavenumber {
  int k1 = 0;
  int k2 = 0;
  friend bool operator==(const Wavenumber&, const Wavenumber&) = default;
};

/// The smooth cutoff profile on its transition interval: equal to 1 for
/// t <= 1, 0 for t >= 2 and the C^2 quintic smoothstep in between.
double cutoff_profile(double t);
/// k-th derivative (k <= 2) of cutoff_profile.
double cutoff_profile_derivative(double t, int k);

/// Dyadic Littlewood-Paley multiplier s_n(lambda).
double cutoff_s(int n, double lambda);
/// d^k/dlambda^k s_n(lambda), k <= 2.
double cutoff_s_derivative(int n, double lambda, int k);

/// Indices of H_n and the multiplier values on them. Because modes are sorted
/// by eigenvalue of S, H_n is always a prefix of the model's basis.
struct GalerkinLevel {
  int n = 0;
  Eigen::Index dim = 0;
  Eigen::Index full_size = 0;
  std::vector<Eigen::Index> index_set;
  Eigen::VectorXd sn_values;
};

/// Eigenpairs of A and S for one of the concrete domains, together with an
/// oversampled quadrature grid used for all pointwise (nonlinear) operations.
///
/// A = (-Laplacian)^beta with the domain's boundary conditions. S = A on the
/// Dirichlet interval and S = Id + A on tori and the Neumann interval, so S is
/// strictly positive and commutes with A.
class SpectralModel {
 public:
  SpectralModel(Domain domain, double beta, int max_level, int dealias_factor);

  const Domain& domain() const { return domain_; }
  double beta() const { return beta_; }
  int max_level() const { return max_level_; }
  int dealias_factor() const { return dealias_factor_; }
  int dimension() const { return spatial_dimension(domain_); }

  Eigen::Index size() const { return eigenvalues_s_.size(); }
  const Eigen::VectorXd& eigenvalues_S() const { return eigenvalues_s_; }
  const Eigen::VectorXd& eigenvalues_A() const { return eigenvalues_a_; }
  const std::vector<Wavenumber>& mode_index() const { return modes_; }
  /// Position of a wavenumber in the basis, or -1.
  Eigen::Index find_mode(Wavenumber w) const;

  Eigen::Index grid_size() const { return weights_.size(); }
  const std::array<int, 2>& grid_shape() const { return grid_shape_; }
  const std::vector<std::array<double, 2>>& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Evaluate sum_m c_m h_m at the nodes. c may be a prefix of the basis.
  GridField to_grid(const Coeffs& c) const;
  /// Quadrature inner products <f, h_m> for the first dim basis functions.
  Coeffs from_grid(const GridField& f, Eigen::Index dim) const;
  /// Quadrature of a real grid function.
  double integrate(const Eigen::VectorXd& f) const { return weights_.dot(f); }

  GalerkinLevel level(int n) const;

 private:
  Domain domain_;
  double beta_;
  int max_level_;
  int dealias_factor_;
  Eigen::VectorXd eigenvalues_s_;
  Eigen::VectorXd eigenvalues_a_;
  std::vector<Wavenumber> modes_;
  std::array<int, 2> grid_shape_{1, 1};
  std::vector<std::array<double, 2>> nodes_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXcd synthesis_;  // nodes x modes
  Eigen::MatrixXcd analysis_;   // modes x nodes, conj(h_m(x_j)) w_j
};

SpectralModel build_spectral_model(const Domain& domain, double beta, int max_level,
                                   int dealias_factor);

/// Orthogonal projection onto H_n. Input may be any prefix-supported vector no
/// longer than the model basis; the result has length level.dim.
Coeffs apply_Pn(const GalerkinLevel& level, const Coeffs& c);
/// Smoothed truncation S_n = s_n(S), same shape rules as apply_Pn.
Coeffs apply_Sn(const GalerkinLevel& level, const Coeffs& c);

/// Sampled sup_lambda |lambda^k s_n^(k)(lambda)| for k = 0..k_max (k_max <= 2).
std::vector<double> mihlin_check(int n, int k_max, int samples = 20001);

struct Space {
  enum class Kind { H, EA, EADual, Lp };
  Kind kind = Kind::H;
  double p = 2.0;

  static Space H() { return {Kind::H, 2.0}; }
  static Space EA() { return {Kind::EA, 2.0}; }
  static Space EADual() { return {Kind::EADual, 2.0}; }
  static Space Lp(double p) { return {Kind::Lp, p}; }
};

/// Norm of a coefficient vector (prefix of the model basis) in H, E_A, E_A^*
/// or L^p. The first three are weighted Euclidean norms with weights 1,
/// 1 + lambda^A and (1 + lambda^A)^-1; L^p uses the grid quadrature.
double sobolev_norm(const SpectralModel& model, const Coeffs& c, Space space);

/// L^p norm of a grid field.
double grid_lp_norm(const SpectralModel& model, const GridField& f, double p);

/// Empirical lower estimate of ||S_n||_{L^p -> L^p} from random probes and a
/// few structured candidates (single modes, Dirichlet-kernel packets).
double estimate_Sn_Lp_norm(const SpectralModel& model, const GalerkinLevel& level, double p,
                           int num_probes, std::mt19937_64& rng);

}  // namespace levynls
