#pragma once

#include <functional>
#include <variant>

#include "qsieve/states.hpp"

namespace qsieve {

/// High-temperature Caldeira-Leggett bath. The diffusion coefficient
/// D = 2 m gamma kT / hbar^2 is always recomputed from the stored fields.
struct CaldeiraLeggettParams {
  double gamma = 0.0;       // dissipation rate
  double kT = 1.0;          // temperature as an energy, k_B absorbed
  OscillatorParams osc;
  bool weak_dissipation = true;  // drop the friction terms

  void validate() const;
  double diffusion() const { return 2.0 * osc.m * gamma * kT / (osc.hbar * osc.hbar); }
};

/// Gaussian spatially correlated white noise: saturation rate lambda,
/// correlation length sigma.
struct CorrelatedNoiseParams {
  double lambda = 1.0;
  double sigma = 1.0;

  void validate() const;
};

/// Quantum Optical Master Equation parameters. Gamma and N are stored, not
/// recomputed; use the factory functions to derive them.
struct QOMEParams {
  double Gamma = 0.0;
  double N = 0.0;
  OscillatorParams osc;

  void validate() const;
  static QOMEParams from_beta(double Gamma, double beta_hbar_omega, OscillatorParams osc = {});
};

using EnvironmentModel = std::variant<CaldeiraLeggettParams, CorrelatedNoiseParams, QOMEParams>;

std::string model_descriptor(const EnvironmentModel& model);

/// Noise correlation kernel c(x;y), units rate * hbar^2. Must satisfy
/// c(x,y) = conj(c(y,x)) and c(x,x) >= 0; callables must be pure.
struct CorrelationKernel {
  std::function<Complex(double, double)> c;
  bool homogeneous = false;
  bool isotropic = false;
  double hbar = 1.0;
};

/// Decoherence rate g(x,y) = (c(x,x) + c(y,y) - 2 Re c(x,y)) / hbar^2.
double decoherence_kernel(const CorrelationKernel& kernel, double x, double y);

/// The Gaussian correlation kernel c(x;y) = hbar^2 (lambda/2) exp(-((x-y)/sigma)^2).
CorrelationKernel gaussian_kernel(const CorrelatedNoiseParams& p, double hbar = 1.0);

/// g(r) = lambda (1 - exp(-(r/sigma)^2)).
double g_correlated(const CorrelatedNoiseParams& p, double r);

/// Second-order expansion lambda r^2 / sigma^2 of g_correlated.
double g_quadratic_approx(const CorrelatedNoiseParams& p, double r);

/// Bose-Einstein occupation N = 1/(exp(beta hbar omega) - 1). Domain error for
/// non-positive argument.
double thermal_occupation(double beta_hbar_omega);

/// Gamma(omega) = pi/(2 omega^2 M) * J(omega); J is the opaque bath factor
/// (n_osc C^2 / m_osc)(omega). Domain error if J(omega) < 0.
double gamma_from_spectral_density(const std::function<double(double)>& J, double M, double omega);

}  // namespace qsieve
