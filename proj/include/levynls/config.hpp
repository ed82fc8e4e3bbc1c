#pragma once

#include "levynls/diagnostics.hpp"
#include "levynls/marcus.hpp"
#include "levynls/noise.hpp"
#include "levynls/nonlinear.hpp"
#include "levynls/solver.hpp"
#include "levynls/spectral.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace levynls {

struct InitialModeSpec {
  Wavenumber wavenumber;
  std::complex<double> value;
};

struct InitialSpec {
  enum class Kind { Gaussian, Modes, Decay };
  Kind kind = Kind::Gaussian;
  double amplitude = 1.0;
  /// Gaussian centre and width.
  double x0 = 3.141592653589793;
  double y0 = 3.141592653589793;
  double width = 0.5;
  /// Decay: c_m = amplitude (lambda^S_m)^(-power) exp(i phase k1).
  double power = 1.0;
  double phase = 0.0;
  std::vector<InitialModeSpec> modes;
};

struct VerifyOptions {
  double unitarity_tol = 1e-12;
  double group_tol = 1e-10;
  double flow_tol = 1e-8;
  double ode_tol = 1e-10;
  double mass_tol = 1e-10;
  double parseval_tol = 1e-10;
  int trials = 200;
  /// "none" or "hermitian" (corrupts the assembled noise matrices).
  std::string inject_fault = "none";
};

/// Everything a CLI run needs. Parsed from a sectioned key = value file.
struct RunConfig {
  Domain domain = Torus1D{};
  double beta = 1.0;
  int max_level = 6;
  int dealias = 2;
  std::vector<int> levels{6};

  Nonlinearity nonlinearity;
  std::vector<NoiseSymbol> symbols{NoiseSymbol{NoiseSymbol::Kind::Cos, 1.0, 1, 0}};
  IntensityMeasure measure;
  InitialSpec initial;
  SolverConfig solver;
  double horizon = 1.0;

  int trajectories = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";
  bool snapshots = false;
  bool events = false;

  std::vector<double> moment_orders{1.0, 2.0, 4.0};
  std::vector<double> aldous_thetas{0.0, 0.01, 0.05, 0.1, 0.2};
  double aldous_eta = 0.05;
  StoppingRule stopping;

  VerifyOptions verify;

  RunConfig();
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);
/// FNV-1a 64 of the canonical text, ignoring the output directory and thread count.
std::uint64_t config_hash(const RunConfig& config);
std::string hex64(std::uint64_t v);

/// Cross-field checks: exponent window, epsilon rules, level range, symbol count.
void validate_config(const RunConfig& config);

std::shared_ptr<const SpectralModel> build_model(const RunConfig& config);
Coeffs build_initial(const RunConfig& config, const SpectralModel& model);
GalerkinProblem build_problem(const RunConfig& config, std::shared_ptr<const SpectralModel> model,
                              int level);

std::string format_double(double v);

}  // namespace levynls
