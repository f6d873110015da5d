#include "qsieve/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "qsieve/fourier.hpp"

namespace qsieve {

namespace {

void add_warning(std::vector<std::string>& warnings, const std::string& msg) {
  for (const auto& w : warnings)
    if (w == msg) return;
  warnings.push_back(msg);
}

// Position variance along the closed-system orbit at phase angle theta.
double orbit_var_x(const GaussianPureState& state, const OscillatorParams& osc, double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  double m2w2 = osc.m * osc.omega * osc.m * osc.omega;
  return state.var_x(osc) * c * c + state.var_p(osc) / m2w2 * s * s;
}

// Dense QOME decoherence rhs (double-commutator part only) for numeric rates.
std::function<ComplexMatrix(const ComplexMatrix&)> qome_diffusion_rhs(const QOMEParams& p,
                                                                      int n_max) {
  auto ops = std::make_shared<FockOperators>(FockOperators::make(n_max, p.osc));
  double kappa = p.Gamma * (2.0 * p.N + 1.0) * p.osc.m * p.osc.omega / (4.0 * p.osc.hbar);
  double m2w2 = p.osc.m * p.osc.omega * p.osc.m * p.osc.omega;
  return [ops, kappa, m2w2](const ComplexMatrix& rho) {
    auto dcomm = [&](const ComplexMatrix& f) {
      ComplexMatrix c = f * rho - rho * f;
      return ComplexMatrix(f * c - c * f);
    };
    return ComplexMatrix(-kappa * (dcomm(ops->x) + dcomm(ops->p) / m2w2));
  };
}

// Smallest power-of-two-ish truncation that holds the squeezed state.
FockDensityMatrix squeezed_fock_adaptive(double s, int& n_max_out) {
  for (int n = 32; n <= 4096; n *= 2) {
    try {
      FockDensityMatrix rho = make_squeezed_fock(s, n);
      n_max_out = n;
      return rho;
    } catch (const ValidationError&) {
      if (n * 2 > 4096) throw;
    }
  }
  throw ValidationError("squeezed_fock_adaptive: unreachable");
}

}  // namespace

double linear_entropy(const GridDensityMatrix& rho) { return 1.0 - rho.purity(); }

double linear_entropy(const FockDensityMatrix& rho) { return 1.0 - rho.purity(); }

double entropy_rate_numeric(const GridDensityMatrix& rho,
                            const std::function<ComplexMatrix(const ComplexMatrix&)>& rhs) {
  double dx = rho.grid().dx();
  ComplexMatrix l = rhs(rho.elements());
  Complex tr = (rho.elements().transpose().cwiseProduct(l)).sum();
  return -2.0 * tr.real() * dx * dx;
}

double entropy_rate_numeric(const FockDensityMatrix& rho, const Superoperator& gen) {
  ComplexMatrix l = gen.apply(rho.elements());
  return -2.0 * (rho.elements().transpose().cwiseProduct(l)).sum().real();
}

double entropy_rate_numeric(const FockDensityMatrix& rho,
                            const std::function<ComplexMatrix(const ComplexMatrix&)>& rhs) {
  ComplexMatrix l = rhs(rho.elements());
  return -2.0 * (rho.elements().transpose().cwiseProduct(l)).sum().real();
}

std::function<ComplexMatrix(const ComplexMatrix&)> grid_generator_rhs(
    const EnvironmentModel& model, const PositionGrid& grid, const OscillatorParams& osc) {
  grid.validate();
  osc.validate();
  const int n = grid.n;

  struct Data {
    ComplexMatrix h;
    Eigen::ArrayXXd g;
    double hbar;
  };
  auto data = std::make_shared<Data>();
  data->hbar = osc.hbar;

  // Spectral kinetic operator T = F^-1 diag(p^2/2m) F plus the harmonic
  // potential on the diagonal.
  ComplexMatrix f(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) f(k, j) = std::exp(Complex(0.0, -2.0 * M_PI * k * j / n));
  ComplexVector kinetic(n);
  for (int k = 0; k < n; ++k) {
    double pk = grid.p(k, osc.hbar);
    kinetic[k] = pk * pk / (2.0 * osc.m);
  }
  data->h = f.adjoint() * kinetic.asDiagonal() * f / static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    double xi = grid.x(i);
    data->h(i, i) += 0.5 * osc.m * osc.omega * osc.omega * xi * xi;
  }

  data->g.resize(n, n);
  if (const auto* cl = std::get_if<CaldeiraLeggettParams>(&model)) {
    cl->validate();
    if (!cl->weak_dissipation) {
      throw ValidationError("grid_generator_rhs: only the weak-dissipation form is supported");
    }
    double d = cl->diffusion();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double r = grid.x(i) - grid.x(j);
        data->g(i, j) = d * r * r;
      }
  } else if (const auto* cn = std::get_if<CorrelatedNoiseParams>(&model)) {
    cn->validate();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) data->g(i, j) = g_correlated(*cn, grid.x(i) - grid.x(j));
  } else {
    throw ValidationError("grid_generator_rhs: QOME has no position-kernel form here");
  }

  return [data](const ComplexMatrix& rho) {
    ComplexMatrix out = Complex(0.0, -1.0 / data->hbar) * (data->h * rho - rho * data->h);
    out.array() -= data->g * rho.array();
    return out;
  };
}

double entropy_rate_cl(double var_x, const CaldeiraLeggettParams& p) {
  p.validate();
  return 4.0 * p.diffusion() * var_x;
}

double entropy_rate_correlated(const std::vector<double>& prob, const PositionGrid& grid,
                               const CorrelatedNoiseParams& p) {
  p.validate();
  grid.validate();
  const int n = grid.n;
  if (static_cast<int>(prob.size()) != n) {
    throw ValidationError("entropy_rate_correlated: probability size does not match the grid");
  }
  const double dx = grid.dx();
  double norm = 0.0;
  for (double v : prob) norm += v * dx;
  if (std::abs(norm - 1.0) > 1e-8) {
    throw ValidationError("entropy_rate_correlated: probability density is not normalized");
  }
  // The kernel depends on x - y only, so the double sum collapses to a
  // correlation over lags.
  double overlap = 0.0;
  for (int r = 0; r < n; ++r) {
    double s_r = 0.0;
    for (int i = 0; i + r < n; ++i) s_r += prob[i] * prob[i + r];
    double u = r * dx / p.sigma;
    double k_r = std::exp(-u * u);
    overlap += (r == 0 ? 1.0 : 2.0) * k_r * s_r;
  }
  overlap *= dx * dx;
  return 2.0 * p.lambda * (1.0 - overlap);
}

double entropy_rate_correlated_gaussian(double var_x, const CorrelatedNoiseParams& p) {
  p.validate();
  return 2.0 * p.lambda * (1.0 - p.sigma / std::sqrt(p.sigma * p.sigma + 4.0 * var_x));
}

double entropy_rate_qome(double var_x, double var_p, const QOMEParams& p) {
  p.validate();
  double m2w2 = p.osc.m * p.osc.omega * p.osc.m * p.osc.omega;
  return p.Gamma * (2.0 * p.N + 1.0) * (p.osc.m * p.osc.omega / p.osc.hbar) *
         (var_x + var_p / m2w2);
}

double period_averaged_entropy(const GaussianPureState& state, const EnvironmentModel& model,
                               const OscillatorParams& osc,
                               std::vector<std::string>* warnings) {
  state.validate();
  osc.validate();
  double m2w2 = osc.m * osc.omega * osc.m * osc.omega;
  double vx = state.var_x(osc), vp = state.var_p(osc);
  double value = 0.0;
  if (const auto* cl = std::get_if<CaldeiraLeggettParams>(&model)) {
    cl->validate();
    // <4 D var_x(t)> over the orbit; cos^2 and sin^2 average to 1/2.
    value = 2.0 * cl->diffusion() * (vx + vp / m2w2);
  } else if (const auto* cn = std::get_if<CorrelatedNoiseParams>(&model)) {
    const int m_samples = 64;
    double acc = 0.0;
    for (int k = 0; k < m_samples; ++k) {
      double theta = 2.0 * M_PI * k / m_samples;
      acc += entropy_rate_correlated_gaussian(orbit_var_x(state, osc, theta), *cn);
    }
    value = acc / m_samples;
  } else {
    value = entropy_rate_qome(vx, vp, std::get<QOMEParams>(model));
  }
  if (warnings != nullptr && value * osc.period() > 0.1) {
    add_warning(*warnings, "entropy produced per period exceeds 0.1: outside the weak regime");
  }
  return value;
}

std::vector<double> log_spaced(double s_min, double s_max, int n) {
  if (!(s_min > 0.0) || !(s_max > s_min) || n < 2) {
    throw ValidationError("log_spaced: need 0 < s_min < s_max and n >= 2");
  }
  std::vector<double> out(n);
  double l0 = std::log(s_min), l1 = std::log(s_max);
  for (int i = 0; i < n; ++i) out[i] = std::exp(l0 + (l1 - l0) * i / (n - 1));
  return out;
}

namespace {

double numeric_instantaneous(double s, const EnvironmentModel& model,
                             const OscillatorParams& osc) {
  if (std::holds_alternative<QOMEParams>(model)) {
    const auto& q = std::get<QOMEParams>(model);
    int n_max = 0;
    FockDensityMatrix rho = squeezed_fock_adaptive(s, n_max);
    return entropy_rate_numeric(rho, qome_diffusion_rhs(q, n_max));
  }
  GaussianPureState state{0.0, 0.0, s};
  double half_span = 12.0 * std::sqrt(state.var_x(osc));
  PositionGrid grid = PositionGrid::symmetric(half_span, 512);
  ComplexVector psi = make_gaussian_wavefunction(state, grid, osc);
  GridDensityMatrix rho = GridDensityMatrix::from_wavefunction(psi, grid);
  return entropy_rate_numeric(rho, grid_generator_rhs(model, grid, osc));
}

double numeric_period_averaged(double s, const EnvironmentModel& model,
                               const OscillatorParams& osc,
                               std::vector<std::string>& warnings) {
  const double period = osc.period();
  if (std::holds_alternative<QOMEParams>(model)) {
    const auto& q = std::get<QOMEParams>(model);
    int n_max = 0;
    FockDensityMatrix rho = squeezed_fock_adaptive(s, n_max);
    double stiffness = std::max(osc.omega, q.Gamma * (2.0 * q.N + 1.0) * n_max);
    int steps = static_cast<int>(std::ceil(period * stiffness / 0.04));
    PropagationResult run = propagate_fock(rho, q, period / steps, steps);
    for (const auto& w : run.warnings) add_warning(warnings, w);
    return (run.linear_entropy.back() - run.linear_entropy.front()) / period;
  }
  GaussianPureState state{0.0, 0.0, s};
  double m2w2 = osc.m * osc.omega * osc.m * osc.omega;
  double spread = std::sqrt(std::max(state.var_x(osc), state.var_p(osc) / m2w2));
  PositionGrid grid = PositionGrid::symmetric(12.0 * spread, 256);
  ComplexVector psi = make_gaussian_wavefunction(state, grid, osc);
  GridDensityMatrix rho = GridDensityMatrix::from_wavefunction(psi, grid);
  const int steps = 1000;
  auto potential = [&](double x) { return 0.5 * osc.m * osc.omega * osc.omega * x * x; };
  PropagationResult run = propagate_grid(rho, model, potential, period / steps, steps, osc);
  for (const auto& w : run.warnings) add_warning(warnings, w);
  return (run.linear_entropy.back() - run.linear_entropy.front()) / period;
}

}  // namespace

SieveResult run_sieve(const std::vector<double>& s_grid, const EnvironmentModel& model,
                      EntropyMeasure measure, const OscillatorParams& osc, SievePath path) {
  osc.validate();
  if (s_grid.size() < 33) {
    throw ValidationError("run_sieve: the squeeze grid needs at least 33 points");
  }
  for (size_t i = 1; i < s_grid.size(); ++i) {
    if (!(s_grid[i] > s_grid[i - 1])) {
      throw ValidationError("run_sieve: the squeeze grid must be strictly increasing");
    }
  }
  if (s_grid.front() > 0.25 * (1.0 + 1e-9) || s_grid.back() < 4.0 * (1.0 - 1e-9)) {
    throw ValidationError("run_sieve: the squeeze grid must span at least [1/4, 4]");
  }

  SieveResult result;
  result.s_grid = s_grid;
  result.kind = measure;
  result.model = model_descriptor(model);
  result.measure.reserve(s_grid.size());

  for (double s : s_grid) {
    GaussianPureState state{0.0, 0.0, s};
    double value = 0.0;
    if (measure == EntropyMeasure::PeriodAveraged) {
      value = (path == SievePath::Analytic)
                  ? period_averaged_entropy(state, model, osc, &result.warnings)
                  : numeric_period_averaged(s, model, osc, result.warnings);
    } else if (path == SievePath::Analytic) {
      double vx = state.var_x(osc), vp = state.var_p(osc);
      if (const auto* cl = std::get_if<CaldeiraLeggettParams>(&model)) {
        value = entropy_rate_cl(vx, *cl);
      } else if (const auto* cn = std::get_if<CorrelatedNoiseParams>(&model)) {
        value = entropy_rate_correlated_gaussian(vx, *cn);
      } else {
        value = entropy_rate_qome(vx, vp, std::get<QOMEParams>(model));
      }
    } else {
      value = numeric_instantaneous(s, model, osc);
    }
    result.measure.push_back(value);
  }

  double vmin = *std::min_element(result.measure.begin(), result.measure.end());
  double vmax = *std::max_element(result.measure.begin(), result.measure.end());
  if (vmax <= 1e-15) {
    result.flat = true;  // measure vanishes identically (unitary-only limit)
  } else if (vmin > 0.0) {
    result.flat = vmax / vmin <= 1.05;
  }

  // Argmin with ties (relative 1e-12) broken toward s = 1.
  int best = 0;
  int n_candidates = 0;
  double tol = 1e-12 * std::max(std::abs(vmin), 1e-300);
  for (size_t i = 0; i < result.measure.size(); ++i) {
    if (result.measure[i] <= vmin + tol) {
      ++n_candidates;
      if (n_candidates == 1 ||
          std::abs(std::log(s_grid[i])) < std::abs(std::log(s_grid[best]))) {
        best = static_cast<int>(i);
      }
    }
  }
  result.argmin_index = best;
  result.tie = n_candidates > 1;
  return result;
}

}  // namespace qsieve
