#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qsieve/sieve.hpp"

using namespace qsieve;

namespace {
const OscillatorParams kOsc;
}

TEST_CASE("log_spaced hits both endpoints and stays increasing") {
  std::vector<double> grid = log_spaced(0.25, 4.0, 33);
  CHECK(grid.front() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(grid.back() == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(grid[16] == doctest::Approx(1.0).epsilon(1e-15));
  for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  CHECK_THROWS_AS(log_spaced(-1.0, 4.0, 33), ValidationError);
}

TEST_CASE("numeric entropy rate reproduces the analytic weak-coupling rate") {
  CaldeiraLeggettParams weak{0.01, 5.0, kOsc, true};
  for (double s : {0.5, 1.0, 2.0}) {
    GaussianPureState state{0.0, 0.0, s};
    PositionGrid grid = PositionGrid::symmetric(12.0 * std::sqrt(state.var_x(kOsc)), 256);
    ComplexVector psi = make_gaussian_wavefunction(state, grid, kOsc);
    GridDensityMatrix rho = GridDensityMatrix::from_wavefunction(psi, grid);
    double numeric =
        entropy_rate_numeric(rho, grid_generator_rhs(EnvironmentModel(weak), grid, kOsc));
    CHECK(numeric == doctest::Approx(entropy_rate_cl(state.var_x(kOsc), weak)).epsilon(1e-6));
  }
}

TEST_CASE("entropy rate matches a finite difference of propagated purity") {
  CaldeiraLeggettParams weak{0.005, 2.0, kOsc, true};
  GaussianPureState state{0.0, 0.0, 1.0};
  PositionGrid grid = PositionGrid::symmetric(10.0, 256);
  ComplexVector psi = make_gaussian_wavefunction(state, grid, kOsc);
  GridDensityMatrix rho = GridDensityMatrix::from_wavefunction(psi, grid);
  auto potential = [](double x) { return 0.5 * x * x; };
  double dt = 0.005;
  PropagationResult run =
      propagate_grid(rho, EnvironmentModel(weak), potential, dt, 2, kOsc);
  double fd = oracle::entropy_rate_fd(run.purity[0], run.purity[2], dt);
  CHECK(fd == doctest::Approx(entropy_rate_cl(state.var_x(kOsc), weak)).epsilon(1e-3));
}

TEST_CASE("closed-form correlated rate agrees with direct double quadrature") {
  CorrelatedNoiseParams p{0.8, 1.4};
  double var = 0.9;
  PositionGrid grid = PositionGrid::symmetric(12.0 * std::sqrt(var), 1024);
  std::vector<double> prob(grid.n), x(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    x[i] = grid.x(i);
    prob[i] = std::exp(-x[i] * x[i] / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
  }
  double norm = 0.0;
  for (double v : prob) norm += v * grid.dx();
  for (double& v : prob) v /= norm;

  double direct = oracle::correlated_rate_quadrature(prob, x, grid.dx(), p.lambda, p.sigma);
  double via_lags = entropy_rate_correlated(prob, grid, p);
  double closed = entropy_rate_correlated_gaussian(var, p);
  CHECK(via_lags == doctest::Approx(direct).epsilon(1e-12));
  CHECK(closed == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("correlated rate validates its probability input") {
  CorrelatedNoiseParams p{1.0, 1.0};
  PositionGrid grid = PositionGrid::symmetric(5.0, 64);
  std::vector<double> not_normalized(grid.n, 1.0);
  CHECK_THROWS_AS(entropy_rate_correlated(not_normalized, grid, p), ValidationError);
  CHECK_THROWS_AS(entropy_rate_correlated(std::vector<double>(3, 0.1), grid, p),
                  ValidationError);
}

TEST_CASE("qome rate formula matches the numeric rate on squeezed states") {
  QOMEParams p{0.05, 1.0, kOsc};
  for (double s : {0.5, 1.0, 2.0}) {
    FockDensityMatrix rho = make_squeezed_fock(s, 64);
    Superoperator diffusion = qome_generator(p, 64, /*include_hamiltonian=*/false,
                                             /*include_friction=*/false);
    double numeric = entropy_rate_numeric(rho, diffusion);
    GaussianPureState state{0.0, 0.0, s};
    double analytic = entropy_rate_qome(state.var_x(kOsc), state.var_p(kOsc), p);
    CHECK(numeric == doctest::Approx(analytic).epsilon(1e-8));
  }
}

TEST_CASE("period-averaged measure equals the orbit average of the rate") {
  CaldeiraLeggettParams weak{0.004, 2.0, kOsc, true};
  GaussianPureState state{0.0, 0.0, 1.6};
  double expected = 2.0 * weak.diffusion() *
                    (state.var_x(kOsc) + state.var_p(kOsc));  // m = omega = 1
  CHECK(period_averaged_entropy(state, EnvironmentModel(weak), kOsc) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("numeric period average agrees with the analytic one") {
  // Coupling weak enough that entropy production stays linear over a period
  // even for the most squeezed members.
  CaldeiraLeggettParams weak{1e-5, 1.0, kOsc, true};
  std::vector<double> s_grid = log_spaced(0.25, 4.0, 33);
  SieveResult analytic =
      run_sieve(s_grid, EnvironmentModel(weak), EntropyMeasure::PeriodAveraged, kOsc,
                SievePath::Analytic);
  // Spot-check three members along the numeric path (full propagation).
  for (int idx : {0, 16, 32}) {
    GaussianPureState state{0.0, 0.0, s_grid[idx]};
    std::vector<double> warnings;
    double spread = std::sqrt(std::max(state.var_x(kOsc), state.var_p(kOsc)));
    PositionGrid grid = PositionGrid::symmetric(12.0 * spread, 256);
    ComplexVector psi = make_gaussian_wavefunction(state, grid, kOsc);
    GridDensityMatrix rho = GridDensityMatrix::from_wavefunction(psi, grid);
    auto potential = [](double x) { return 0.5 * x * x; };
    int steps = 1000;
    PropagationResult run = propagate_grid(rho, EnvironmentModel(weak), potential,
                                           kOsc.period() / steps, steps, kOsc);
    double numeric =
        (run.linear_entropy.back() - run.linear_entropy.front()) / kOsc.period();
    CHECK(numeric == doctest::Approx(analytic.measure[idx]).epsilon(1e-2));
  }
}

TEST_CASE("sieve grid preconditions are enforced") {
  CaldeiraLeggettParams weak{0.01, 5.0, kOsc, true};
  EnvironmentModel model(weak);
  CHECK_THROWS_AS(run_sieve(log_spaced(0.5, 4.0, 33), model,
                            EntropyMeasure::PeriodAveraged, kOsc),
                  ValidationError);
  CHECK_THROWS_AS(run_sieve(log_spaced(0.25, 2.0, 33), model,
                            EntropyMeasure::PeriodAveraged, kOsc),
                  ValidationError);
  CHECK_THROWS_AS(run_sieve(log_spaced(0.25, 4.0, 20), model,
                            EntropyMeasure::PeriodAveraged, kOsc),
                  ValidationError);
}

TEST_CASE("ties in the landscape break toward s = 1") {
  // Instantaneous CL rate is monotone in s: unique minimum at the left edge.
  CaldeiraLeggettParams weak{0.01, 5.0, kOsc, true};
  SieveResult r = run_sieve(log_spaced(0.25, 4.0, 33), EnvironmentModel(weak),
                            EntropyMeasure::InstantaneousRate, kOsc);
  CHECK(r.argmin_index == 0);
  CHECK_FALSE(r.tie);
  CHECK_FALSE(r.flat);
}
