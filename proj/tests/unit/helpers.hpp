#pragma once

#include "levynls/spectral.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

namespace levynls::testing {

inline Coeffs random_coeffs(Eigen::Index n, std::mt19937_64& rng, double decay = 1.0,
                            const SpectralModel* model = nullptr) {
  std::normal_distribution<double> g;
  Coeffs c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = model ? std::pow(model->eigenvalues_S()[i], -decay) : 1.0;
    c[i] = w * std::complex<double>(g(rng), g(rng));
  }
  return c;
}

inline Eigen::VectorXd random_ball(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd l(dim);
  for (int i = 0; i < dim; ++i) l[i] = g(rng);
  return l.normalized() * std::pow(u(rng), 1.0 / dim);
}

/// Independent transcription of the quintic transition profile.
inline double quintic_profile(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

// Minimum over every admissible partition, listed explicitly.
inline double brute_force_modulus(const std::vector<double>& times,
                                  const std::vector<double>& values, double T, double delta) {
  std::vector<double> pts = times;
  if (pts.back() < T) pts.push_back(T);
  const std::size_t inner = pts.size() - 2;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1U << inner); ++mask) {
    std::vector<std::size_t> cuts{0};
    for (std::size_t i = 0; i < inner; ++i)
      if (mask & (1U << i)) cuts.push_back(i + 1);
    cuts.push_back(pts.size() - 1);
    double w = 0.0;
    bool ok = true;
    for (std::size_t c = 0; c + 1 < cuts.size() && ok; ++c) {
      ok = pts[cuts[c + 1]] - pts[cuts[c]] >= delta;
      double lo = values[cuts[c]];
      double hi = lo;
      for (std::size_t i = cuts[c]; i < cuts[c + 1]; ++i) {
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
      }
      w = std::max(w, hi - lo);
    }
    if (ok) best = std::min(best, w);
  }
  return best;
}

}  // namespace levynls::testing
