#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qsieve/dynamics.hpp"
#include "qsieve/environments.hpp"
#include "qsieve/states.hpp"

namespace qsieve {

enum class EntropyMeasure { InstantaneousRate, PeriodAveraged };
enum class SievePath { Analytic, Numeric };

/// Entropy-production landscape over the squeeze family plus its argmin.
struct SieveResult {
  std::vector<double> s_grid;
  std::vector<double> measure;
  int argmin_index = 0;
  bool flat = false;  // max/min <= 1.05: no meaningful argmin (short-correlation regime)
  bool tie = false;   // argmin broken toward s = 1
  EntropyMeasure kind = EntropyMeasure::PeriodAveraged;
  std::string model;
  std::vector<std::string> warnings;
};

/// Linear entropy 1 - Tr[rho^2].
double linear_entropy(const GridDensityMatrix& rho);
double linear_entropy(const FockDensityMatrix& rho);

/// -2 Tr[rho L(rho)] with the representation-appropriate trace; the generator
/// is supplied as an rhs evaluation on the kernel/matrix elements.
double entropy_rate_numeric(const GridDensityMatrix& rho,
                            const std::function<ComplexMatrix(const ComplexMatrix&)>& rhs);
double entropy_rate_numeric(const FockDensityMatrix& rho, const Superoperator& gen);
double entropy_rate_numeric(const FockDensityMatrix& rho,
                            const std::function<ComplexMatrix(const ComplexMatrix&)>& rhs);

/// Kernel of the weak-dissipation CL grid generator -(i/hbar)[H,.] - g(x,x'),
/// for feeding entropy_rate_numeric.
std::function<ComplexMatrix(const ComplexMatrix&)> grid_generator_rhs(
    const EnvironmentModel& model, const PositionGrid& grid, const OscillatorParams& osc);

/// Instantaneous rate 4 D Delta_x^2 (weak dissipation).
double entropy_rate_cl(double var_x, const CaldeiraLeggettParams& p);

/// 2 lambda (1 - int int P(x)P(y) exp(-((x-y)/sigma)^2)) by direct quadrature
/// on the grid. Throws ValidationError if P is not normalized.
double entropy_rate_correlated(const std::vector<double>& prob, const PositionGrid& grid,
                               const CorrelatedNoiseParams& p);

/// Closed form for a Gaussian probability density with variance var_x:
/// 2 lambda (1 - sigma / sqrt(sigma^2 + 4 var_x)).
double entropy_rate_correlated_gaussian(double var_x, const CorrelatedNoiseParams& p);

/// Gamma (2N+1) (m omega / hbar) (var_x + var_p/(m omega)^2); the constant is
/// pinned so the rate matches -2 Tr[rho L rho] under the decoherence part of
/// the QOME on pure Gaussian states.
double entropy_rate_qome(double var_x, double var_p, const QOMEParams& p);

/// Entropy produced per period, tau-normalized (the period average of the
/// instantaneous pure-state rate along the closed-system orbit). For the
/// coherent state under CL this equals 2D in natural units. Appends a regime
/// warning when rate * period > 0.1.
double period_averaged_entropy(const GaussianPureState& state, const EnvironmentModel& model,
                               const OscillatorParams& osc,
                               std::vector<std::string>* warnings = nullptr);

/// Log-spaced grid on [s_min, s_max].
std::vector<double> log_spaced(double s_min, double s_max, int n);

/// Evaluates the chosen entropy measure for every squeeze value. The grid must
/// span at least [1/4, 4] with >= 33 points. Ties in the argmin break toward
/// s closest to 1 with the tie flag set.
SieveResult run_sieve(const std::vector<double>& s_grid, const EnvironmentModel& model,
                      EntropyMeasure measure, const OscillatorParams& osc,
                      SievePath path = SievePath::Analytic);

}  // namespace qsieve
