#include "qsieve/dynamics.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qsieve/fourier.hpp"

namespace qsieve {

namespace {

using Eigen::ArrayXXcd;

ComplexVector vec(const ComplexMatrix& op) {
  return Eigen::Map<const ComplexVector>(op.data(), op.size());
}

ComplexMatrix unvec(const ComplexVector& v, int d) {
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Matrix form of a known-linear map; no linearity check.
ComplexMatrix superop_matrix(const std::function<ComplexMatrix(const ComplexMatrix&)>& action,
                             int d) {
  ComplexMatrix m(d * d, d * d);
  ComplexMatrix unit = ComplexMatrix::Zero(d, d);
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k < d; ++k) {
      unit(k, l) = 1.0;
      m.col(k + l * d) = vec(action(unit));
      unit(k, l) = 0.0;
    }
  }
  return m;
}

// First-standard-form dissipator sum_jk K(j,k) (F_j rho F_k - 1/2 {F_k F_j, rho}).
// Exactly trace-annihilating and Hermiticity-preserving for Hermitian K, F,
// truncation included.
ComplexMatrix kossakowski_apply(const Eigen::Matrix2cd& K, const ComplexMatrix& f0,
                                const ComplexMatrix& f1, const ComplexMatrix& rho) {
  const ComplexMatrix* F[2] = {&f0, &f1};
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      if (K(j, k) == Complex(0.0, 0.0)) continue;
      ComplexMatrix fkfj = (*F[k]) * (*F[j]);
      out += K(j, k) * ((*F[j]) * rho * (*F[k]) - 0.5 * (fkfj * rho + rho * fkfj));
    }
  }
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b + b * a;
}

// QOME dissipator on the truncated number basis, structure-exploiting:
// Gamma(N+1) D[a] + Gamma N D[a^dag] with the truncated ladder operators.
struct QomeRhs {
  int d;
  double rate_down, rate_up;
  Eigen::ArrayXXcd decay;   // elementwise part: Hamiltonian phases + losses
  Eigen::ArrayXXd shift_c;  // sqrt((m+1)(n+1)), shared by both shifts

  QomeRhs(const QOMEParams& p, int n_max, bool include_hamiltonian)
      : d(n_max + 1), rate_down(p.Gamma * (p.N + 1.0)), rate_up(p.Gamma * p.N) {
    Eigen::ArrayXd w_down(d), w_up(d);
    for (int n = 0; n < d; ++n) {
      w_down[n] = n;                        // diag of a^dag a
      w_up[n] = (n < n_max) ? n + 1.0 : 0;  // diag of a a^dag, truncated
    }
    decay.resize(d, d);
    for (int m = 0; m < d; ++m) {
      for (int n = 0; n < d; ++n) {
        Complex ham = include_hamiltonian
                          ? Complex(0.0, -(m - n) * p.osc.omega)
                          : Complex(0.0, 0.0);
        decay(m, n) = ham - 0.5 * rate_down * (w_down[m] + w_down[n]) -
                      0.5 * rate_up * (w_up[m] + w_up[n]);
      }
    }
    shift_c.resize(d - 1, d - 1);
    for (int m = 0; m + 1 < d; ++m)
      for (int n = 0; n + 1 < d; ++n) shift_c(m, n) = std::sqrt((m + 1.0) * (n + 1.0));
  }

  void apply(const ComplexMatrix& rho, ComplexMatrix& out) const {
    out = (decay * rho.array()).matrix();
    if (d > 1) {
      out.topLeftCorner(d - 1, d - 1).array() +=
          rate_down * shift_c * rho.bottomRightCorner(d - 1, d - 1).array();
      out.bottomRightCorner(d - 1, d - 1).array() +=
          rate_up * shift_c * rho.topLeftCorner(d - 1, d - 1).array();
    }
  }
};

Moments fock_moments(const ComplexMatrix& r, const OscillatorParams& osc) {
  int d = static_cast<int>(r.rows());
  Complex mean_a = 0.0, mean_a2 = 0.0;
  double mean_n = 0.0;
  for (int n = 0; n + 1 < d; ++n) mean_a += std::sqrt(n + 1.0) * r(n + 1, n);
  for (int n = 0; n + 2 < d; ++n) mean_a2 += std::sqrt((n + 1.0) * (n + 2.0)) * r(n + 2, n);
  for (int n = 0; n < d; ++n) mean_n += n * r(n, n).real();
  const double lx = std::sqrt(osc.hbar / (2.0 * osc.m * osc.omega));
  const double lp = std::sqrt(osc.m * osc.omega * osc.hbar / 2.0);
  double mx = lx * 2.0 * mean_a.real();
  double mp = lp * 2.0 * mean_a.imag();
  double mx2 = lx * lx * (2.0 * mean_a2.real() + 2.0 * mean_n + 1.0);
  double mp2 = lp * lp * (-2.0 * mean_a2.real() + 2.0 * mean_n + 1.0);
  return Moments{mx, mp, mx2 - mx * mx, mp2 - mp * mp};
}

void add_warning(std::vector<std::string>& warnings, const std::string& msg) {
  for (const auto& w : warnings)
    if (w == msg) return;
  warnings.push_back(msg);
}

}  // namespace

Superoperator::Superoperator(int dim, ComplexMatrix matrix) : dim_(dim), m_(std::move(matrix)) {
  if (m_.rows() != dim_ * dim_ || m_.cols() != dim_ * dim_) {
    throw ValidationError("Superoperator: matrix must be d^2 x d^2");
  }
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& op) const {
  if (op.rows() != dim_ || op.cols() != dim_) {
    throw ValidationError("Superoperator::apply: operand dimension mismatch");
  }
  return unvec(m_ * vec(op), dim_);
}

double Superoperator::trace_annihilation_defect() const {
  ComplexVector id = vec(ComplexMatrix::Identity(dim_, dim_));
  return (id.adjoint() * m_).cwiseAbs().maxCoeff();
}

double Superoperator::hermiticity_preservation_defect() const {
  std::mt19937 rng(12345);
  std::normal_distribution<double> dist;
  double defect = 0.0;
  for (int probe = 0; probe < 4; ++probe) {
    ComplexMatrix a(dim_, dim_);
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i < dim_; ++i) a(i, j) = Complex(dist(rng), dist(rng));
    a = ComplexMatrix(0.5 * (a + a.adjoint()));
    a /= a.norm();
    ComplexMatrix la = apply(a);
    defect = std::max(defect, (la - la.adjoint()).cwiseAbs().maxCoeff());
  }
  return defect;
}

Superoperator Superoperator::operator+(const Superoperator& other) const {
  if (dim_ != other.dim_) throw ValidationError("Superoperator: dimension mismatch");
  return Superoperator(dim_, m_ + other.m_);
}

Superoperator Superoperator::operator-(const Superoperator& other) const {
  if (dim_ != other.dim_) throw ValidationError("Superoperator: dimension mismatch");
  return Superoperator(dim_, m_ - other.m_);
}

Superoperator Superoperator::operator*(double scale) const {
  return Superoperator(dim_, scale * m_);
}

Superoperator build_superoperator(
    const std::function<ComplexMatrix(const ComplexMatrix&)>& action, int dim) {
  // Linearity spot check on random pairs before trusting the column scan.
  std::mt19937 rng(98765);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 2; ++trial) {
    ComplexMatrix a(dim, dim), b(dim, dim);
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) {
        a(i, j) = Complex(dist(rng), dist(rng));
        b(i, j) = Complex(dist(rng), dist(rng));
      }
    Complex ca(dist(rng), dist(rng)), cb(dist(rng), dist(rng));
    ComplexMatrix lhs = action(ca * a + cb * b);
    ComplexMatrix rhs = ca * action(a) + cb * action(b);
    double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
    if ((lhs - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw ValidationError("build_superoperator: action is not linear");
    }
  }
  return Superoperator(dim, superop_matrix(action, dim));
}

FockOperators FockOperators::make(int n_max, const OscillatorParams& osc) {
  osc.validate();
  int d = n_max + 1;
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  ComplexMatrix adag = a.adjoint();
  double lx = std::sqrt(osc.hbar / (2.0 * osc.m * osc.omega));
  double lp = std::sqrt(osc.m * osc.omega * osc.hbar / 2.0);
  ComplexMatrix x = lx * (a + adag);
  ComplexMatrix p = Complex(0.0, 1.0) * lp * (adag - a);
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) h(n, n) = osc.hbar * osc.omega * (n + 0.5);
  return FockOperators{std::move(a), std::move(adag), std::move(x), std::move(p), std::move(h)};
}

ComplexMatrix qome_rhs(const ComplexMatrix& rho, const QOMEParams& p) {
  p.validate();
  QomeRhs rhs(p, static_cast<int>(rho.rows()) - 1, /*include_hamiltonian=*/false);
  ComplexMatrix out;
  rhs.apply(rho, out);
  return out;
}

ComplexMatrix qome_rhs_commutator(const ComplexMatrix& rho, const QOMEParams& p) {
  p.validate();
  const auto& osc = p.osc;
  FockOperators ops = FockOperators::make(static_cast<int>(rho.rows()) - 1, osc);
  double pref = -p.Gamma / (4.0 * osc.hbar * osc.omega);
  double mw2 = osc.m * osc.omega * osc.omega;
  ComplexMatrix dbl = mw2 * (2.0 * p.N + 1.0) *
                      (commutator(ops.x, commutator(ops.x, rho)) +
                       commutator(ops.p, commutator(ops.p, rho)) / (osc.m * osc.m * osc.omega * osc.omega));
  ComplexMatrix fric = Complex(0.0, 2.0 * osc.omega) * commutator(ops.x, anticommutator(ops.p, rho)) -
                       Complex(0.0, osc.omega) * commutator(anticommutator(ops.p, ops.x), rho);
  return pref * (dbl + fric);
}

Superoperator qome_generator(const QOMEParams& p, int n_max, bool include_hamiltonian,
                             bool include_friction) {
  p.validate();
  int d = n_max + 1;
  if (include_friction) {
    QomeRhs rhs(p, n_max, include_hamiltonian);
    return Superoperator(d, superop_matrix(
                                [&rhs](const ComplexMatrix& r) {
                                  ComplexMatrix out;
                                  rhs.apply(r, out);
                                  return out;
                                },
                                d));
  }
  // Decoherence (double-commutator) part only, in standard form.
  FockOperators ops = FockOperators::make(n_max, p.osc);
  double kappa2 = p.Gamma * (2.0 * p.N + 1.0) * p.osc.m * p.osc.omega / (2.0 * p.osc.hbar);
  double m2w2 = p.osc.m * p.osc.omega * p.osc.m * p.osc.omega;
  Eigen::Matrix2cd K;
  K << kappa2, 0.0, 0.0, kappa2 / m2w2;
  ComplexMatrix m = superop_matrix(
      [&](const ComplexMatrix& r) { return kossakowski_apply(K, ops.x, ops.p, r); }, d);
  if (include_hamiltonian) {
    m += superop_matrix(
        [&](const ComplexMatrix& r) {
          return ComplexMatrix(Complex(0.0, -1.0 / p.osc.hbar) * commutator(ops.h, r));
        },
        d);
  }
  return Superoperator(d, std::move(m));
}

Superoperator caldeira_leggett_generator(const CaldeiraLeggettParams& p, int n_max,
                                         bool include_hamiltonian) {
  p.validate();
  int d = n_max + 1;
  FockOperators ops = FockOperators::make(n_max, p.osc);
  const double diffusion = p.diffusion();
  const double hbar = p.osc.hbar;

  Eigen::Matrix2cd K = Eigen::Matrix2cd::Zero();
  K(0, 0) = 2.0 * diffusion;
  if (!p.weak_dissipation) {
    K(0, 1) = Complex(0.0, -p.gamma / hbar);
    K(1, 0) = Complex(0.0, p.gamma / hbar);
  }

  auto action = [&](const ComplexMatrix& r) {
    ComplexMatrix out = kossakowski_apply(K, ops.x, ops.p, r);
    if (!p.weak_dissipation) {
      out += Complex(0.0, -p.gamma / (2.0 * hbar)) *
             commutator(anticommutator(ops.p, ops.x), r);
    }
    if (include_hamiltonian) {
      out += Complex(0.0, -1.0 / hbar) * commutator(ops.h, r);
    }
    return out;
  };
  return Superoperator(d, superop_matrix(action, d));
}

Superoperator hamiltonian_generator(const ComplexMatrix& h, double hbar, int dim) {
  if (h.rows() != dim || h.cols() != dim) {
    throw ValidationError("hamiltonian_generator: dimension mismatch");
  }
  return Superoperator(
      dim, superop_matrix(
               [&](const ComplexMatrix& r) {
                 return ComplexMatrix(Complex(0.0, -1.0 / hbar) * commutator(h, r));
               },
               dim));
}

Superoperator average_generator(const Superoperator& deltaL, const ComplexMatrix& h, double omega,
                                int m_samples, double hbar) {
  if (m_samples < 1) throw ValidationError("average_generator: m_samples must be >= 1");
  const int d = deltaL.dim();
  if (h.rows() != d || h.cols() != d) {
    throw ValidationError("average_generator: Hamiltonian dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  Eigen::VectorXd evals = solver.eigenvalues();
  const ComplexMatrix& v = solver.eigenvectors();
  // Periodicity of exp(L_o tau) requires level gaps at integer multiples of
  // hbar*omega.
  for (int i = 1; i < d; ++i) {
    double gap = (evals[i] - evals[i - 1]) / (hbar * omega);
    if (std::abs(gap - std::round(gap)) > 1e-9) {
      throw ValidationError("average_generator: spectrum is not equally spaced");
    }
  }

  const double period = 2.0 * M_PI / omega;
  ComplexMatrix avg = ComplexMatrix::Zero(d * d, d * d);
  for (int k = 0; k < m_samples; ++k) {
    double tau = k * period / m_samples;
    ComplexVector phases(d);
    for (int i = 0; i < d; ++i) phases[i] = std::exp(Complex(0.0, -evals[i] * tau / hbar));
    ComplexMatrix w = v * phases.asDiagonal() * v.adjoint();  // exp(-iH tau/hbar)
    ComplexMatrix inner = kron(w.conjugate(), w);             // rho -> W rho W^dag
    ComplexMatrix outer = kron(w.transpose(), w.adjoint());   // rho -> W^dag rho W
    avg += outer * deltaL.matrix() * inner;
  }
  avg /= static_cast<double>(m_samples);
  return Superoperator(d, std::move(avg));
}

CpCheckResult cp_check(const Superoperator& gen, double tol_scale) {
  const int d = gen.dim();
  const ComplexMatrix& m = gen.matrix();
  double scale = std::max(1.0, m.norm());
  if (gen.trace_annihilation_defect() > 1e-8 * scale) {
    throw ValidationError("cp_check: generator is not trace-annihilating");
  }
  if (gen.hermiticity_preservation_defect() > 1e-8 * scale) {
    throw ValidationError("cp_check: generator is not Hermiticity-preserving");
  }

  // Choi-type matrix: block (k,l) holds L(E_kl) = column (k + l d) of the
  // superoperator, reshaped.
  ComplexMatrix choi(d * d, d * d);
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k)
      choi.block(k * d, l * d, d, d) = unvec(m.col(k + l * d), d);
  choi = ComplexMatrix(0.5 * (choi + choi.adjoint()));

  // Project out the maximally entangled direction |Omega> = sum_k |kk>.
  ComplexVector omega_vec = ComplexVector::Zero(d * d);
  for (int k = 0; k < d; ++k) omega_vec[k + k * d] = 1.0;
  ComplexMatrix proj = ComplexMatrix::Identity(d * d, d * d) -
                       (omega_vec * omega_vec.adjoint()) / static_cast<double>(d);

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(proj * choi * proj);
  CpCheckResult result;
  result.spectrum = solver.eigenvalues();
  result.min_eigenvalue = result.spectrum.minCoeff();
  result.choi_norm = choi.norm();
  result.is_gksl = result.min_eigenvalue >= -tol_scale * result.choi_norm;
  return result;
}

QomeFit fit_qome_form(const Superoperator& gen, const OscillatorParams& osc) {
  const int d = gen.dim();
  FockOperators ops = FockOperators::make(d - 1, osc);
  auto dissipator = [](const ComplexMatrix& c) {
    return [c](const ComplexMatrix& r) {
      ComplexMatrix cc = c.adjoint() * c;
      return ComplexMatrix(c * r * c.adjoint() - 0.5 * (cc * r + r * cc));
    };
  };
  ComplexMatrix s_down = superop_matrix(dissipator(ops.a), d);
  ComplexMatrix s_up = superop_matrix(dissipator(ops.adag), d);

  // 2x2 complex normal equations for gen ~ r_down S_down + r_up S_up.
  auto inner = [](const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.conjugate().cwiseProduct(b)).sum();
  };
  Eigen::Matrix2cd gram;
  gram << inner(s_down, s_down), inner(s_down, s_up), inner(s_up, s_down), inner(s_up, s_up);
  Eigen::Vector2cd rhs(inner(s_down, gen.matrix()), inner(s_up, gen.matrix()));
  Eigen::Vector2cd coef = gram.colPivHouseholderQr().solve(rhs);

  double r_down = coef[0].real();
  double r_up = coef[1].real();
  QomeFit fit;
  fit.Gamma = r_down - r_up;
  fit.N = (fit.Gamma != 0.0) ? r_up / fit.Gamma : 0.0;
  double denom = gen.matrix().norm();
  fit.residual = (denom > 0.0)
                     ? (gen.matrix() - r_down * s_down - r_up * s_up).norm() / denom
                     : 0.0;
  return fit;
}

PropagationResult propagate_grid(const GridDensityMatrix& rho0, const EnvironmentModel& model,
                                 const std::function<double(double)>& potential, double dt,
                                 int n_steps, const OscillatorParams& osc,
                                 GridDensityMatrix* final_state) {
  osc.validate();
  if (!(dt > 0.0) || dt * osc.omega > 0.01 + 1e-15) {
    throw ValidationError("propagate_grid: step size must satisfy dt*omega <= 0.01");
  }
  if (std::holds_alternative<QOMEParams>(model)) {
    throw ValidationError("propagate_grid: QOME runs in the number basis, use propagate_fock");
  }

  const PositionGrid& grid = rho0.grid();
  const int n = grid.n;
  const double dx = grid.dx();
  const double hbar = osc.hbar;

  bool friction = false;
  double gamma = 0.0;
  auto g_of = [&](double xi, double xj) -> double {
    if (const auto* cl = std::get_if<CaldeiraLeggettParams>(&model)) {
      double r = xi - xj;
      return cl->diffusion() * r * r;
    }
    return g_correlated(std::get<CorrelatedNoiseParams>(model), xi - xj);
  };
  if (const auto* cl = std::get_if<CaldeiraLeggettParams>(&model)) {
    cl->validate();
    friction = !cl->weak_dissipation && cl->gamma > 0.0;
    gamma = cl->gamma;
  } else {
    std::get<CorrelatedNoiseParams>(model).validate();
  }

  // Half kinetic step in the momentum representation.
  ArrayXXcd kin_half(n, n);
  for (int l = 0; l < n; ++l) {
    double pl = grid.p(l, hbar);
    for (int k = 0; k < n; ++k) {
      double pk = grid.p(k, hbar);
      kin_half(k, l) = std::exp(Complex(0.0, -(pk * pk - pl * pl) * dt / (4.0 * osc.m * hbar)));
    }
  }
  // Full potential + exact decoherence factor in the position representation.
  ArrayXXcd pos_step(n, n);
  for (int j = 0; j < n; ++j) {
    double xj = grid.x(j);
    for (int i = 0; i < n; ++i) {
      double xi = grid.x(i);
      pos_step(i, j) = std::exp(Complex(-g_of(xi, xj) * dt,
                                        -(potential(xi) - potential(xj)) * dt / hbar));
    }
  }

  ComplexMatrix x_op, p_op;
  if (friction) {
    // Spectral momentum operator P = F^-1 diag(p) F for the Euler friction step.
    ComplexMatrix f(n, n);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        f(k, j) = std::exp(Complex(0.0, -2.0 * M_PI * k * j / n));
    ComplexVector pdiag(n);
    for (int k = 0; k < n; ++k) pdiag[k] = grid.p(k, hbar);
    p_op = f.adjoint() * pdiag.asDiagonal() * f / static_cast<double>(n);
    x_op = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) x_op(i, i) = grid.x(i);
  }

  PropagationResult result;
  auto reserve = [&](std::vector<double>& v) { v.reserve(n_steps + 1); };
  reserve(result.times);
  reserve(result.linear_entropy);
  reserve(result.purity);
  reserve(result.mean_x);
  reserve(result.mean_p);
  reserve(result.var_x);
  reserve(result.var_p);
  reserve(result.trace_drift);

  ComplexMatrix rho = rho0.elements();
  const double trace0 = rho.diagonal().real().sum() * dx;
  const double mom_scale = dx * dx / (2.0 * M_PI * hbar) * grid.dp(hbar);

  auto record_momentum = [&](const ComplexMatrix& mom_rep, double& mean_p, double& var_p) {
    double mp = 0.0, mp2 = 0.0;
    for (int k = 0; k < n; ++k) {
      double pk = grid.p(k, hbar);
      double prob = mom_rep(k, k).real() * mom_scale;
      mp += pk * prob;
      mp2 += pk * pk * prob;
    }
    mean_p = mp;
    var_p = mp2 - mp * mp;
  };

  auto record_position = [&](double t, double mean_p, double var_p) {
    double tr = rho.diagonal().real().sum() * dx;
    double pur = rho.squaredNorm() * dx * dx;
    double mx = 0.0, mx2 = 0.0;
    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) {
      double pi = rho(i, i).real();
      max_diag = std::max(max_diag, std::abs(pi));
      mx += grid.x(i) * pi * dx;
      mx2 += grid.x(i) * grid.x(i) * pi * dx;
    }
    result.times.push_back(t);
    result.purity.push_back(pur);
    result.linear_entropy.push_back(1.0 - pur);
    result.mean_x.push_back(mx);
    result.mean_p.push_back(mean_p);
    result.var_x.push_back(mx2 - mx * mx);
    result.var_p.push_back(var_p);
    double drift = std::abs(tr - trace0);
    result.trace_drift.push_back(drift);
    if (drift > 1e-6) {
      result.degraded = true;
      add_warning(result.warnings, "trace drift exceeded 1e-6");
    }
    double edge = std::max(std::abs(rho(0, 0).real()), std::abs(rho(n - 1, n - 1).real()));
    if (edge > 1e-8 * max_diag) {
      add_warning(result.warnings, "boundary population exceeded 1e-8 of peak");
    }
  };

  // Initial sample: momentum moments need one transform round trip.
  {
    ComplexMatrix mom = rho;
    fourier::to_momentum(mom);
    double mp, vp;
    record_momentum(mom, mp, vp);
    record_position(0.0, mp, vp);
  }

  for (int step = 1; step <= n_steps; ++step) {
    fourier::to_momentum(rho);
    rho.array() *= kin_half;
    fourier::to_position(rho);
    rho.array() *= pos_step;
    if (friction) {
      // Eq. (4) friction terms, first-order Euler in the position step.
      ComplexMatrix fr =
          Complex(0.0, -gamma / (2.0 * hbar)) *
              commutator(anticommutator(p_op, x_op), rho) +
          Complex(0.0, -gamma / hbar) *
              (x_op * rho * p_op - rho * p_op * x_op - p_op * rho * x_op + rho * x_op * p_op);
      rho += dt * fr;
    }
    fourier::to_momentum(rho);
    rho.array() *= kin_half;
    // The remaining half kinetic phase is diagonal-neutral, so end-of-step
    // momentum moments can be read off here.
    double mp, vp;
    record_momentum(rho, mp, vp);
    fourier::to_position(rho);
    record_position(step * dt, mp, vp);
  }

  if (final_state != nullptr) {
    *final_state = GridDensityMatrix(grid, rho);
  }
  return result;
}

PropagationResult propagate_fock(const FockDensityMatrix& rho0, const QOMEParams& p, double dt,
                                 int n_steps, FockDensityMatrix* final_state) {
  p.validate();
  const int n_max = rho0.n_max();
  double stiffness = std::max(p.osc.omega, p.Gamma * (2.0 * p.N + 1.0) * n_max);
  if (!(dt > 0.0) || dt * stiffness > 0.05 + 1e-12) {
    throw ValidationError(
        "propagate_fock: step size must satisfy dt*max(omega, Gamma(2N+1)n_max) <= 0.05");
  }

  QomeRhs rhs(p, n_max, /*include_hamiltonian=*/true);
  ComplexMatrix rho = rho0.elements();
  const double trace0 = rho.diagonal().real().sum();

  PropagationResult result;
  auto record = [&](double t) {
    double tr = rho.diagonal().real().sum();
    double pur = rho.squaredNorm();
    Moments m = fock_moments(rho, p.osc);
    result.times.push_back(t);
    result.purity.push_back(pur);
    result.linear_entropy.push_back(1.0 - pur);
    result.mean_x.push_back(m.mean_x);
    result.mean_p.push_back(m.mean_p);
    result.var_x.push_back(m.var_x);
    result.var_p.push_back(m.var_p);
    double drift = std::abs(tr - trace0);
    result.trace_drift.push_back(drift);
    if (drift > 1e-6) {
      result.degraded = true;
      add_warning(result.warnings, "trace drift exceeded 1e-6");
    }
    if (rho(n_max, n_max).real() > 1e-6) {
      add_warning(result.warnings, "top Fock level population exceeded the leakage bound");
    }
  };
  record(0.0);

  ComplexMatrix k1, k2, k3, k4, tmp;
  for (int step = 1; step <= n_steps; ++step) {
    rhs.apply(rho, k1);
    tmp = rho + (0.5 * dt) * k1;
    rhs.apply(tmp, k2);
    tmp = rho + (0.5 * dt) * k2;
    rhs.apply(tmp, k3);
    tmp = rho + dt * k3;
    rhs.apply(tmp, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(step * dt);
    if (step % 100 == 0) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
          ComplexMatrix(0.5 * (rho + rho.adjoint())), Eigen::EigenvaluesOnly);
      if (solver.eigenvalues().minCoeff() < -1e-7) {
        result.degraded = true;
        add_warning(result.warnings, "density matrix lost positivity beyond 1e-7");
      }
    }
  }

  if (final_state != nullptr) {
    *final_state = FockDensityMatrix(rho);
  }
  return result;
}

}  // namespace qsieve
