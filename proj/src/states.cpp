#include "qsieve/states.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "qsieve/fourier.hpp"

namespace qsieve {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void OscillatorParams::validate() const {
  if (!(m > 0.0) || !(omega > 0.0) || !(hbar > 0.0)) {
    throw ValidationError("OscillatorParams: m, omega and hbar must be strictly positive");
  }
}

void GaussianPureState::validate() const {
  if (!(s > 0.0)) {
    throw ValidationError("GaussianPureState: squeeze s must be strictly positive");
  }
}

void PositionGrid::validate() const {
  if (!is_power_of_two(n)) {
    throw ValidationError("PositionGrid: point count n must be a power of two");
  }
  if (!(x_max > x_min)) {
    throw ValidationError("PositionGrid: x_max must exceed x_min");
  }
}

GridDensityMatrix::GridDensityMatrix(PositionGrid grid, ComplexMatrix elements)
    : grid_(grid), rho_(std::move(elements)) {
  grid_.validate();
  if (rho_.rows() != grid_.n || rho_.cols() != grid_.n) {
    throw ValidationError("GridDensityMatrix: element block does not match the grid");
  }
}

GridDensityMatrix GridDensityMatrix::from_wavefunction(const ComplexVector& psi,
                                                       const PositionGrid& grid) {
  return GridDensityMatrix(grid, psi * psi.adjoint());
}

double GridDensityMatrix::trace() const { return rho_.diagonal().real().sum() * grid_.dx(); }

double GridDensityMatrix::purity() const {
  double dx = grid_.dx();
  return rho_.squaredNorm() * dx * dx;
}

double GridDensityMatrix::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double GridDensityMatrix::min_eigenvalue() const {
  ComplexMatrix herm = 0.5 * (rho_ + rho_.adjoint()) * grid_.dx();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void GridDensityMatrix::validate() const {
  if (hermiticity_defect() > 1e-10) {
    throw ValidationError("GridDensityMatrix: Hermiticity defect exceeds 1e-10");
  }
  if (std::abs(trace() - 1.0) > 1e-6) {
    throw ValidationError("GridDensityMatrix: trace deviates from 1 by more than 1e-6");
  }
  if (min_eigenvalue() < -1e-8) {
    throw ValidationError("GridDensityMatrix: smallest eigenvalue below -1e-8");
  }
}

FockDensityMatrix::FockDensityMatrix(ComplexMatrix elements) : rho_(std::move(elements)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 1) {
    throw ValidationError("FockDensityMatrix: elements must be square and non-empty");
  }
}

double FockDensityMatrix::trace() const { return rho_.diagonal().real().sum(); }

double FockDensityMatrix::purity() const { return rho_.squaredNorm(); }

double FockDensityMatrix::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double FockDensityMatrix::min_eigenvalue() const {
  ComplexMatrix herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double FockDensityMatrix::top_population() const {
  return rho_(rho_.rows() - 1, rho_.cols() - 1).real();
}

void FockDensityMatrix::validate(double leakage_bound) const {
  if (hermiticity_defect() > 1e-10) {
    throw ValidationError("FockDensityMatrix: Hermiticity defect exceeds 1e-10");
  }
  if (std::abs(trace() - 1.0) > 1e-6) {
    throw ValidationError("FockDensityMatrix: trace deviates from 1 by more than 1e-6");
  }
  if (top_population() > leakage_bound) {
    throw ValidationError("FockDensityMatrix: top-level population exceeds the leakage bound");
  }
}

ComplexVector make_gaussian_wavefunction(const GaussianPureState& state, const PositionGrid& grid,
                                         const OscillatorParams& osc) {
  state.validate();
  grid.validate();
  osc.validate();

  const double var = state.var_x(osc);
  const double norm = std::pow(2.0 * M_PI * var, -0.25);
  ComplexVector psi(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    double xi = grid.x(i);
    double arg = -(xi - state.x0) * (xi - state.x0) / (4.0 * var);
    psi[i] = norm * std::exp(Complex(arg, state.p0 * xi / osc.hbar));
  }

  double peak = psi.cwiseAbs().maxCoeff();
  double edge = std::max(std::abs(psi[0]), std::abs(psi[grid.n - 1]));
  if (edge > 1e-8 * peak) {
    throw ValidationError("make_gaussian_wavefunction: boundary leak, widen the grid");
  }

  psi /= std::sqrt(psi.squaredNorm() * grid.dx());
  return psi;
}

FockDensityMatrix make_coherent_fock(Complex alpha, int n_max) {
  double mag = std::abs(alpha);
  if (mag * mag + 5.0 * mag + 10.0 > static_cast<double>(n_max)) {
    throw ValidationError("make_coherent_fock: truncation level too low for |alpha|");
  }
  ComplexVector amps(n_max + 1);
  amps[0] = std::exp(-0.5 * mag * mag);
  for (int n = 1; n <= n_max; ++n) {
    amps[n] = amps[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  }
  amps /= std::sqrt(amps.squaredNorm());
  return FockDensityMatrix(amps * amps.adjoint());
}

FockDensityMatrix make_thermal_fock(double occupation, int n_max) {
  if (occupation < 0.0) {
    throw ValidationError("make_thermal_fock: occupation must be non-negative");
  }
  Eigen::VectorXd pops(n_max + 1);
  double q = occupation / (occupation + 1.0);
  pops[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) pops[n] = pops[n - 1] * q;
  pops /= pops.sum();
  ComplexMatrix rho = ComplexMatrix::Zero(n_max + 1, n_max + 1);
  rho.diagonal() = pops.cast<Complex>();
  return FockDensityMatrix(std::move(rho));
}

FockDensityMatrix make_squeezed_fock(double s, int n_max) {
  if (!(s > 0.0)) {
    throw ValidationError("make_squeezed_fock: squeeze s must be strictly positive");
  }
  // Squeezed vacuum amplitudes: c_{2k} = c_{2k-2} * (-t) * sqrt(2k-1)/sqrt(2k),
  // t = tanh(r) with Delta_x = e^{-r} * ground width, i.e. r = -ln s
  // (only even levels populated).
  double t = std::tanh(-std::log(s));
  ComplexVector amps = ComplexVector::Zero(n_max + 1);
  amps[0] = 1.0;
  for (int k = 1; 2 * k <= n_max; ++k) {
    amps[2 * k] = amps[2 * k - 2] * (-t) * std::sqrt((2.0 * k - 1.0) / (2.0 * k));
  }
  double tail = std::abs(amps[n_max - n_max % 2]);
  if (tail * tail > 1e-8) {
    throw ValidationError("make_squeezed_fock: truncation level too low for this squeeze");
  }
  amps /= std::sqrt(amps.squaredNorm());
  return FockDensityMatrix(amps * amps.adjoint());
}

Moments moments(const GridDensityMatrix& rho, const OscillatorParams& osc) {
  const PositionGrid& grid = rho.grid();
  const double dx = grid.dx();

  double mean_x = 0.0, mean_x2 = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    double p_i = rho.elements()(i, i).real() * dx;
    mean_x += grid.x(i) * p_i;
    mean_x2 += grid.x(i) * grid.x(i) * p_i;
  }

  // Momentum moments from the diagonal of the momentum-representation matrix.
  ComplexMatrix mom = rho.elements();
  fourier::to_momentum(mom);
  const double dp = grid.dp(osc.hbar);
  const double scale = dx * dx / (2.0 * M_PI * osc.hbar);
  double mean_p = 0.0, mean_p2 = 0.0;
  for (int k = 0; k < grid.n; ++k) {
    double pk = grid.p(k, osc.hbar);
    double prob = mom(k, k).real() * scale * dp;
    mean_p += pk * prob;
    mean_p2 += pk * pk * prob;
  }

  return Moments{mean_x, mean_p, mean_x2 - mean_x * mean_x, mean_p2 - mean_p * mean_p};
}

Moments moments(const FockDensityMatrix& rho, const OscillatorParams& osc) {
  const ComplexMatrix& r = rho.elements();
  int d = rho.n_max() + 1;

  Complex mean_a = 0.0, mean_a2 = 0.0;
  double mean_n = 0.0;
  for (int n = 0; n + 1 < d; ++n) {
    mean_a += std::sqrt(n + 1.0) * r(n + 1, n);  // Tr(a rho)
  }
  for (int n = 0; n + 2 < d; ++n) {
    mean_a2 += std::sqrt((n + 1.0) * (n + 2.0)) * r(n + 2, n);
  }
  for (int n = 0; n < d; ++n) mean_n += n * r(n, n).real();

  const double lx = std::sqrt(osc.hbar / (2.0 * osc.m * osc.omega));
  const double lp = std::sqrt(osc.m * osc.omega * osc.hbar / 2.0);
  double mean_x = lx * 2.0 * mean_a.real();
  double mean_p = lp * 2.0 * mean_a.imag();
  double mean_x2 = lx * lx * (2.0 * mean_a2.real() + 2.0 * mean_n + 1.0);
  double mean_p2 = lp * lp * (-2.0 * mean_a2.real() + 2.0 * mean_n + 1.0);

  return Moments{mean_x, mean_p, mean_x2 - mean_x * mean_x, mean_p2 - mean_p * mean_p};
}

}  // namespace qsieve
