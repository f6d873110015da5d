#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qsieve/environments.hpp"
#include "qsieve/states.hpp"

namespace qsieve {

/// Matrix representation of a linear map on operators over a d-dimensional
/// Hilbert space, acting on column-stacked vectorizations (d^2 x d^2).
class Superoperator {
 public:
  Superoperator(int dim, ComplexMatrix matrix);

  int dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return m_; }

  ComplexMatrix apply(const ComplexMatrix& op) const;

  /// max |vec(I)^dag M| -- zero for generators (trace-annihilating maps).
  double trace_annihilation_defect() const;
  /// max_A ||L(A) - L(A)^dag|| over a deterministic set of Hermitian probes.
  double hermiticity_preservation_defect() const;

  Superoperator operator+(const Superoperator& other) const;
  Superoperator operator-(const Superoperator& other) const;
  Superoperator operator*(double scale) const;

 private:
  int dim_;
  ComplexMatrix m_;
};

/// Builds the matrix form of a linear operator-to-operator map by applying it
/// to every matrix unit. The action is spot-checked for linearity on random
/// pairs (fixed seed); throws ValidationError if the check fails.
Superoperator build_superoperator(const std::function<ComplexMatrix(const ComplexMatrix&)>& action,
                                  int dim);

/// Truncated ladder and quadrature operators on levels 0..n_max.
struct FockOperators {
  ComplexMatrix a, adag, x, p, h;  // h = hbar omega (n + 1/2), exactly diagonal
  static FockOperators make(int n_max, const OscillatorParams& osc);
};

/// Right-hand side of the Quantum Optical Master Equation dissipator,
/// Gamma(N+1) D[a] + Gamma N D[a dag] (Hamiltonian part excluded).
ComplexMatrix qome_rhs(const ComplexMatrix& rho, const QOMEParams& p);

/// The same dissipator assembled from the x,p commutator form
/// -(Gamma/4 hbar omega){(2N+1) m omega^2 ([x,[x,rho]] + [p,[p,rho]]/(m omega)^2)
///  + 2 i omega [x,{p,rho}] - i omega [{p,x},rho]}.
/// Agrees with qome_rhs away from the truncation edge.
ComplexMatrix qome_rhs_commutator(const ComplexMatrix& rho, const QOMEParams& p);

/// QOME generator as a superoperator. include_friction = false keeps only the
/// double-commutator (decoherence) part, the purity-dominant regime generator.
Superoperator qome_generator(const QOMEParams& p, int n_max, bool include_hamiltonian = true,
                             bool include_friction = true);

/// Fock-basis generator of the Caldeira-Leggett master equation, built in
/// first-standard (Kossakowski) form over F = (x, p) so that trace and
/// Hermiticity preservation are exact under truncation.
Superoperator caldeira_leggett_generator(const CaldeiraLeggettParams& p, int n_max,
                                         bool include_hamiltonian = true);

/// -(i/hbar) [H, .] as a superoperator.
Superoperator hamiltonian_generator(const ComplexMatrix& h, double hbar, int dim);

/// Single-period uniform average (1/M) sum_k U^dag(tau_k) o deltaL o U(tau_k)
/// with U(tau)(rho) = exp(-iH tau/hbar) rho exp(+iH tau/hbar). Requires an
/// equally spaced spectrum (throws ValidationError otherwise); exact for
/// trigonometric-polynomial integrands once m_samples >= 5.
Superoperator average_generator(const Superoperator& deltaL, const ComplexMatrix& h, double omega,
                                int m_samples = 64, double hbar = 1.0);

struct CpCheckResult {
  double min_eigenvalue = 0.0;
  bool is_gksl = false;
  double choi_norm = 0.0;
  Eigen::VectorXd spectrum;  // ascending eigenvalues of P C P
};

/// Conditional complete positivity: eigenvalues of P C_L P with
/// C_L = sum_kl E_kl (x) L(E_kl) and P = I - |Omega><Omega|/d.
/// is_gksl <=> min eigenvalue >= -tol_scale * ||C_L||_F.
CpCheckResult cp_check(const Superoperator& gen, double tol_scale = 1e-8);

struct QomeFit {
  double Gamma = 0.0;
  double N = 0.0;
  double residual = 0.0;  // relative Frobenius residual
};

/// Least-squares fit of a generator onto span{D[a], D[a dag]}; reports the
/// equivalent (Gamma, N) and the relative residual.
QomeFit fit_qome_form(const Superoperator& gen, const OscillatorParams& osc);

/// Observable series recorded during propagation.
struct PropagationResult {
  std::vector<double> times;
  std::vector<double> linear_entropy;
  std::vector<double> purity;
  std::vector<double> mean_x, mean_p, var_x, var_p;
  std::vector<double> trace_drift;
  bool degraded = false;
  std::vector<std::string> warnings;
};

/// Strang-split grid propagator for the Caldeira-Leggett and correlated-noise
/// models: half kinetic step in momentum representation, exact potential +
/// decoherence factor in position representation, half kinetic step.
/// Requires dt * omega <= 0.01.
PropagationResult propagate_grid(const GridDensityMatrix& rho0, const EnvironmentModel& model,
                                 const std::function<double(double)>& potential, double dt,
                                 int n_steps, const OscillatorParams& osc,
                                 GridDensityMatrix* final_state = nullptr);

/// Classic RK4 on drho/dt = -(i/hbar)[H,rho] + qome_rhs(rho).
/// Requires dt * max(omega, Gamma(2N+1) n_max) <= 0.05.
PropagationResult propagate_fock(const FockDensityMatrix& rho0, const QOMEParams& p, double dt,
                                 int n_steps, FockDensityMatrix* final_state = nullptr);

}  // namespace qsieve
