#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qsieve/errors.hpp"

namespace qsieve {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Harmonic oscillator parameters. Natural units (hbar = m = omega = 1)
/// are the project default; explicit values allow dimensional runs.
struct OscillatorParams {
  double m = 1.0;
  double omega = 1.0;
  double hbar = 1.0;

  void validate() const;
  double period() const { return 2.0 * M_PI / omega; }
  /// Ground-state position variance hbar/(2 m omega).
  double ground_var_x() const { return hbar / (2.0 * m * omega); }
};

/// Uncorrelated squeezed-Gaussian pure state: Delta_x = s * sqrt(hbar/2m omega),
/// Delta_x * Delta_p = hbar/2 exactly. s = 1 is the coherent state.
struct GaussianPureState {
  double x0 = 0.0;
  double p0 = 0.0;
  double s = 1.0;

  void validate() const;
  double var_x(const OscillatorParams& osc) const { return s * s * osc.ground_var_x(); }
  double var_p(const OscillatorParams& osc) const {
    return osc.hbar * osc.hbar / (4.0 * var_x(osc));
  }
};

/// Uniform position grid, symmetric about 0 by default. n must be a power of two.
struct PositionGrid {
  double x_min = -10.0;
  double x_max = 10.0;
  int n = 256;

  void validate() const;
  double dx() const { return (x_max - x_min) / n; }
  double x(int i) const { return x_min + i * dx(); }
  /// Momentum spacing of the conjugate FFT grid.
  double dp(double hbar) const { return 2.0 * M_PI * hbar / (n * dx()); }
  /// FFT-ordered momentum value for index k (negative frequencies in the upper half).
  double p(int k, double hbar) const {
    int kk = (k < n / 2) ? k : k - n;
    return kk * dp(hbar);
  }
  static PositionGrid symmetric(double half_span, int n) {
    return PositionGrid{-half_span, half_span, n};
  }
};

/// First and second moments of x and p.
struct Moments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
};

/// Density matrix on a position grid. Elements are kernel values rho(x_i, x_j);
/// the trace is sum_i rho_ii * dx.
class GridDensityMatrix {
 public:
  GridDensityMatrix(PositionGrid grid, ComplexMatrix elements);
  static GridDensityMatrix from_wavefunction(const ComplexVector& psi, const PositionGrid& grid);

  const PositionGrid& grid() const { return grid_; }
  const ComplexMatrix& elements() const { return rho_; }
  ComplexMatrix& elements() { return rho_; }

  double trace() const;
  double purity() const;
  double hermiticity_defect() const;
  /// Smallest eigenvalue of the operator matrix rho * dx.
  double min_eigenvalue() const;
  /// Throws ValidationError if the Hermiticity/trace/positivity invariants fail.
  void validate() const;

 private:
  PositionGrid grid_;
  ComplexMatrix rho_;
};

/// Density matrix in the truncated number basis, levels 0..n_max.
class FockDensityMatrix {
 public:
  explicit FockDensityMatrix(ComplexMatrix elements);

  int n_max() const { return static_cast<int>(rho_.rows()) - 1; }
  const ComplexMatrix& elements() const { return rho_; }
  ComplexMatrix& elements() { return rho_; }

  double trace() const;
  double purity() const;
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  /// Population of the top level; compared against the leakage bound.
  double top_population() const;
  void validate(double leakage_bound = 1e-6) const;

 private:
  ComplexMatrix rho_;
};

/// Discretized Gaussian wave packet, normalized to sum |psi_i|^2 dx = 1.
/// Throws ValidationError if the amplitude at the grid boundary exceeds
/// 1e-8 of the peak (boundary leak).
ComplexVector make_gaussian_wavefunction(const GaussianPureState& state, const PositionGrid& grid,
                                         const OscillatorParams& osc);

/// Truncated coherent state |alpha>, renormalized. Throws ValidationError when
/// the leakage heuristic |alpha|^2 + 5|alpha| + 10 <= n_max fails.
FockDensityMatrix make_coherent_fock(Complex alpha, int n_max);

/// Truncated thermal state with occupation N (geometric populations, renormalized).
FockDensityMatrix make_thermal_fock(double occupation, int n_max);

/// Squeezed vacuum with Delta_x = s * sqrt(hbar/2m omega) in the number basis.
FockDensityMatrix make_squeezed_fock(double s, int n_max);

Moments moments(const GridDensityMatrix& rho, const OscillatorParams& osc);
Moments moments(const FockDensityMatrix& rho, const OscillatorParams& osc);

}  // namespace qsieve
