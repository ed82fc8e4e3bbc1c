#pragma once

#include "levynls/spectral.hpp"

namespace levynls {

enum class NonlinearitySign { Defocusing, Focusing };

/// Power nonlinearity F(u) = sign |u|^(alpha-1) u.
struct Nonlinearity {
  double alpha = 3.0;
  NonlinearitySign sign = NonlinearitySign::Defocusing;

  double sign_factor() const { return sign == NonlinearitySign::Defocusing ? 1.0 : -1.0; }
};

/// Upper end of the admissible exponent window for the fractional NLS with
/// A = (-Laplacian)^beta in dimension d. Infinity when unbounded.
double admissible_alpha_cap(NonlinearitySign sign, int dimension, double beta);

/// Throws ConfigError unless 1 < alpha < admissible_alpha_cap(...).
void validate_nonlinearity(const Nonlinearity& f, int dimension, double beta);

/// Pointwise F on grid values. Moduli below 1e-300 are treated as zero.
GridField apply_F_pointwise(const Nonlinearity& f, const GridField& u);

/// P_n F(u): F evaluated on the dealiased grid and projected back onto the
/// first c.size() basis functions.
Coeffs eval_F(const SpectralModel& model, const Nonlinearity& f, const Coeffs& c);

/// Antiderivative sign (alpha+1)^-1 ||u||_{L^(alpha+1)}^(alpha+1).
double eval_Fhat(const SpectralModel& model, const Nonlinearity& f, const Coeffs& c);

}  // namespace levynls
