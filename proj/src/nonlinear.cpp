#include "levynls/nonlinear.hpp"

#include "levynls/errors.hpp"

#include <cmath>
#include <limits>

namespace levynls {

double admissible_alpha_cap(NonlinearitySign sign, int dimension, double beta) {
  const double d = dimension;
  if (sign == NonlinearitySign::Focusing) return 1.0 + 4.0 * beta / d;
  const double denom = d - 2.0 * beta;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 + 4.0 * beta / denom;
}

void validate_nonlinearity(const Nonlinearity& f, int dimension, double beta) {
  const double cap = admissible_alpha_cap(f.sign, dimension, beta);
  if (!(f.alpha > 1.0) || !(f.alpha < cap)) {
    throw ConfigError("alpha = " + std::to_string(f.alpha) + " outside the admissible window (1, " +
                      std::to_string(cap) + ") for this nonlinearity and dimension");
  }
}

GridField apply_F_pointwise(const Nonlinearity& f, const GridField& u) {
  GridField out(u.size());
  const double s = f.sign_factor();
  const double e = f.alpha - 1.0;
  const bool cubic = f.alpha == 3.0;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const std::complex<double> z = u[j];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw NumericError("non-finite value in nonlinearity input");
    }
    if (cubic) {
      out[j] = s * std::norm(z) * z;
      continue;
    }
    const double r = std::abs(z);
    out[j] = r < 1e-300 ? std::complex<double>(0.0) : s * std::pow(r, e) * z;
  }
  return out;
}

Coeffs eval_F(const SpectralModel& model, const Nonlinearity& f, const Coeffs& c) {
  return model.from_grid(apply_F_pointwise(f, model.to_grid(c)), c.size());
}

double eval_Fhat(const SpectralModel& model, const Nonlinearity& f, const Coeffs& c) {
  const GridField u = model.to_grid(c);
  const double p = f.alpha + 1.0;
  Eigen::VectorXd powered(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double r2 = std::norm(u[j]);
    powered[j] = f.alpha == 3.0 ? r2 * r2 : std::pow(r2, 0.5 * p);
  }
  const double value = f.sign_factor() * model.integrate(powered) / p;
  if (!std::isfinite(value)) throw NumericError("non-finite potential energy");
  return value;
}

}  // namespace levynls
