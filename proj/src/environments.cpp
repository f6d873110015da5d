#include "qsieve/environments.hpp"

#include <cmath>
#include <sstream>

namespace qsieve {

void CaldeiraLeggettParams::validate() const {
  osc.validate();
  if (gamma < 0.0) throw ValidationError("CaldeiraLeggettParams: gamma must be non-negative");
  if (!(kT > 0.0)) throw ValidationError("CaldeiraLeggettParams: kT must be strictly positive");
}

void CorrelatedNoiseParams::validate() const {
  if (!(lambda > 0.0)) throw ValidationError("CorrelatedNoiseParams: lambda must be positive");
  if (!(sigma > 0.0)) throw ValidationError("CorrelatedNoiseParams: sigma must be positive");
}

void QOMEParams::validate() const {
  osc.validate();
  if (Gamma < 0.0) throw ValidationError("QOMEParams: Gamma must be non-negative");
  if (N < 0.0) throw ValidationError("QOMEParams: N must be non-negative");
}

QOMEParams QOMEParams::from_beta(double Gamma, double beta_hbar_omega, OscillatorParams osc) {
  return QOMEParams{Gamma, thermal_occupation(beta_hbar_omega), osc};
}

std::string model_descriptor(const EnvironmentModel& model) {
  std::ostringstream out;
  if (const auto* cl = std::get_if<CaldeiraLeggettParams>(&model)) {
    out << "cl(gamma=" << cl->gamma << ",kT=" << cl->kT
        << (cl->weak_dissipation ? ",weak" : ",full") << ")";
  } else if (const auto* cn = std::get_if<CorrelatedNoiseParams>(&model)) {
    out << "correlated(lambda=" << cn->lambda << ",sigma=" << cn->sigma << ")";
  } else {
    const auto& q = std::get<QOMEParams>(model);
    out << "qome(Gamma=" << q.Gamma << ",N=" << q.N << ")";
  }
  return out.str();
}

double decoherence_kernel(const CorrelationKernel& kernel, double x, double y) {
  if (x == y) return 0.0;
  Complex cxy = kernel.c(x, y);
  double diag = kernel.c(x, x).real() + kernel.c(y, y).real();
  return (diag - 2.0 * cxy.real()) / (kernel.hbar * kernel.hbar);
}

CorrelationKernel gaussian_kernel(const CorrelatedNoiseParams& p, double hbar) {
  p.validate();
  double lambda = p.lambda, sigma = p.sigma, h2 = hbar * hbar;
  return CorrelationKernel{
      [lambda, sigma, h2](double x, double y) {
        double u = (x - y) / sigma;
        return Complex(h2 * 0.5 * lambda * std::exp(-u * u), 0.0);
      },
      /*homogeneous=*/true, /*isotropic=*/true, hbar};
}

double g_correlated(const CorrelatedNoiseParams& p, double r) {
  double u = r / p.sigma;
  return p.lambda * (-std::expm1(-u * u));
}

double g_quadratic_approx(const CorrelatedNoiseParams& p, double r) {
  return p.lambda * r * r / (p.sigma * p.sigma);
}

double thermal_occupation(double beta_hbar_omega) {
  if (!(beta_hbar_omega > 0.0)) {
    throw ValidationError("thermal_occupation: beta*hbar*omega must be positive");
  }
  return 1.0 / std::expm1(beta_hbar_omega);
}

double gamma_from_spectral_density(const std::function<double(double)>& J, double M,
                                   double omega) {
  double j = J(omega);
  if (j < 0.0) throw ValidationError("gamma_from_spectral_density: J(omega) must be >= 0");
  return M_PI / (2.0 * omega * omega * M) * j;
}

}  // namespace qsieve
