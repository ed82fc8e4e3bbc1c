#pragma once

#include "levynls/spectral.hpp"

#include <limits>
#include <random>
#include <vector>

namespace levynls {

/// Real multiplier e_m defining B_m x = e_m x.
struct NoiseSymbol {
  enum class Kind { Constant, Cos, Sin, Bump };
  Kind kind = Kind::Constant;
  double amplitude = 1.0;
  /// Wave vector for Cos/Sin; in 1D only kx is used. On intervals the phase is
  /// kx * x, on tori 2 pi (kx x / Lx + ky y / Ly).
  int kx = 1;
  int ky = 0;
  /// Gaussian bump amplitude * exp(-|x - x0|^2 / (2 width^2)).
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 1.0;
};

/// Symbol values at the model's quadrature nodes.
Eigen::VectorXd sample_symbol(const SpectralModel& model, const NoiseSymbol& symbol);

/// Matrices of S_n B_m S_n on H_n together with the level-n noise constants
/// b_H, b_EA (sums of squared operator norms) and, when estimated, b_Lp.
struct NoiseOperators {
  int level = 0;
  Eigen::Index dim = 0;
  std::vector<Eigen::MatrixXcd> matrices;
  /// 1 + lambda^A on H_n, used for E_A operator norms.
  Eigen::VectorXd ea_weights;
  double b_H = 0.0;
  double b_EA = 0.0;
  double b_Lp = std::numeric_limits<double>::quiet_NaN();
  /// Largest |M - M^*| entry before symmetrization.
  double hermitian_deviation = 0.0;

  int noise_dimension() const { return static_cast<int>(matrices.size()); }
};

/// M_m[j, k] = <h_j, S_n(e_m S_n h_k)> by grid quadrature, symmetrized.
NoiseOperators assemble_noise_matrices(const SpectralModel& model, const GalerkinLevel& level,
                                       const std::vector<Eigen::VectorXd>& symbols_on_grid);

/// Recompute b_H and b_EA from the current matrices.
void update_noise_constants(NoiseOperators& ops);

/// Empirical b_Lp = sum_m ||M_m||_{L^p}^2 from random probes.
double estimate_b_Lp(const SpectralModel& model, const NoiseOperators& ops, double p,
                     int num_probes, std::mt19937_64& rng);

/// B_n(l) = sum_m l_m M_m.
Eigen::MatrixXcd B_of_l(const NoiseOperators& ops, const Eigen::VectorXd& l);

double spectral_norm(const Eigen::MatrixXcd& m);
/// Operator norm on E_A (diagonal weights w) via the similarity W^1/2 M W^-1/2.
double weighted_operator_norm(const Eigen::MatrixXcd& m, const Eigen::VectorXd& weights);

/// Eigendecomposition B = U diag(theta) U^* of a Hermitian matrix, giving the
/// unitary group exp(-i t B). Throws NumericError if B is not Hermitian.
class HermitianExponential {
 public:
  explicit HermitianExponential(const Eigen::MatrixXcd& b);

  Coeffs apply(const Coeffs& x, double t = 1.0) const;
  Eigen::MatrixXcd matrix(double t = 1.0) const;
  const Eigen::VectorXd& eigenvalues() const { return theta_; }

 private:
  Eigen::MatrixXcd u_;
  Eigen::VectorXd theta_;
};

/// exp(-i B_n(l)) x.
Coeffs jump_map(const NoiseOperators& ops, const Eigen::VectorXd& l, const Coeffs& x);

/// Phi(t, l, x): solution at time t of du/dt = -i B_n(l) u, u(0) = x, by an
/// adaptive Dormand-Prince integrator with absolute and relative tolerance ode_tol.
Coeffs marcus_flow(const NoiseOperators& ops, double t, const Eigen::VectorXd& l, const Coeffs& x,
                   double ode_tol);

/// exp(-i B_n(l)) x - x
Coeffs jump_difference_1(const NoiseOperators& ops, const Eigen::VectorXd& l, const Coeffs& x);
/// exp(-i B_n(l)) x - x + i B_n(l) x
Coeffs jump_difference_2(const NoiseOperators& ops, const Eigen::VectorXd& l, const Coeffs& x);

}  // namespace levynls
