#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qsieve/dynamics.hpp"

using namespace qsieve;

namespace {

const OscillatorParams kOsc;

ComplexMatrix embed(const ComplexMatrix& small, int d) {
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  out.topLeftCorner(small.rows(), small.cols()) = small;
  return out;
}

}  // namespace

TEST_CASE("build_superoperator reproduces the action and rejects nonlinear maps") {
  int d = 5;
  FockOperators ops = FockOperators::make(d - 1, kOsc);
  auto action = [&](const ComplexMatrix& r) { return ComplexMatrix(ops.x * r * ops.p); };
  Superoperator s = build_superoperator(action, d);
  ComplexMatrix probe(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) probe(i, j) = Complex(std::sin(1.0 + i + 2 * j), std::cos(i - j));
  CHECK((s.apply(probe) - action(probe)).cwiseAbs().maxCoeff() < 1e-13);

  auto nonlinear = [](const ComplexMatrix& r) { return ComplexMatrix(r * r); };
  CHECK_THROWS_AS(build_superoperator(nonlinear, d), ValidationError);
}

TEST_CASE("fock operators satisfy the canonical algebra away from the truncation edge") {
  int n_max = 12;
  FockOperators ops = FockOperators::make(n_max, kOsc);
  CHECK((ops.a - oracle::lowering(n_max)).cwiseAbs().maxCoeff() < 1e-14);
  ComplexMatrix comm = ops.x * ops.p - ops.p * ops.x;
  for (int n = 0; n < n_max; ++n) {
    CHECK(std::abs(comm(n, n) - Complex(0.0, 1.0)) < 1e-13);  // hbar = 1
  }
  CHECK((ops.h.diagonal().real().array() -
         (Eigen::ArrayXd::LinSpaced(n_max + 1, 0, n_max) + 0.5))
            .abs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("qome rhs equals the Lindblad dissipator built from scratch") {
  int n_max = 10;
  QOMEParams p{0.05, 1.3, kOsc};
  ComplexMatrix a = oracle::lowering(n_max);
  ComplexMatrix rho = make_thermal_fock(0.8, n_max).elements();
  ComplexMatrix expected = p.Gamma * (p.N + 1.0) * oracle::dissipator(a, rho) +
                           p.Gamma * p.N * oracle::dissipator(a.adjoint().eval(), rho);
  CHECK((qome_rhs(rho, p) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("commutator and Lindblad forms of the qome agree on interior states") {
  int n_max = 24;
  QOMEParams p{0.04, 0.9, kOsc};
  ComplexMatrix rho = embed(make_coherent_fock(Complex(1.0, 0.3), 17).elements(), n_max + 1);
  ComplexMatrix lhs = qome_rhs_commutator(rho, p);
  ComplexMatrix rhs = qome_rhs(rho, p);
  // Both outputs live on levels <= 14; truncation artifacts cannot reach them.
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("generators annihilate the trace and preserve Hermiticity exactly") {
  QOMEParams q{0.05, 1.0, kOsc};
  CaldeiraLeggettParams weak{0.01, 5.0, kOsc, true};
  CaldeiraLeggettParams full{0.01, 5.0, kOsc, false};
  auto check = [](const std::string& name, const Superoperator& gen) {
    CAPTURE(name);
    CHECK(gen.trace_annihilation_defect() < 1e-12);
    CHECK(gen.hermiticity_preservation_defect() < 1e-11);
  };
  check("qome", qome_generator(q, 10));
  check("cl weak", caldeira_leggett_generator(weak, 10));
  check("cl full", caldeira_leggett_generator(full, 10));
  check("qome diffusion", qome_generator(q, 10, true, false));
}

TEST_CASE("thermal state is stationary under the qome generator") {
  double occupation = 1.4;
  QOMEParams p{0.07, occupation, kOsc};
  int n_max = 60;  // large enough that the truncated thermal tail is negligible
  ComplexMatrix rho = make_thermal_fock(occupation, n_max).elements();
  CHECK(qome_rhs(rho, p).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-period averaging is exact once five samples are used") {
  int n_max = 7;
  CaldeiraLeggettParams full{0.02, 3.0, kOsc, false};
  Superoperator delta = caldeira_leggett_generator(full, n_max, false);
  ComplexMatrix h = FockOperators::make(n_max, kOsc).h;
  Superoperator avg5 = average_generator(delta, h, kOsc.omega, 5);
  Superoperator avg64 = average_generator(delta, h, kOsc.omega, 64);
  CHECK((avg5.matrix() - avg64.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("averaging requires an equally spaced spectrum") {
  int d = 4;
  Superoperator delta(d, ComplexMatrix::Zero(d * d, d * d));
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  h(0, 0) = 0.0;
  h(1, 1) = 1.0;
  h(2, 2) = 2.5;  // breaks the ladder
  h(3, 3) = 3.0;
  CHECK_THROWS_AS(average_generator(delta, h, 1.0, 8), ValidationError);
}

TEST_CASE("cp_check certifies a Lindblad generator and enforces preconditions") {
  QOMEParams q{0.05, 1.0, kOsc};
  CpCheckResult good = cp_check(qome_generator(q, 9));
  CHECK(good.is_gksl);
  CHECK(good.min_eigenvalue > -1e-8 * good.choi_norm);

  // rho -> rho is not trace-annihilating, so it is not a generator.
  int d = 4;
  Superoperator identity(d, ComplexMatrix::Identity(d * d, d * d));
  CHECK_THROWS_AS(cp_check(identity), ValidationError);
}

TEST_CASE("fitting the quantum optical form recovers planted rates") {
  int n_max = 9;
  double planted_gamma = 0.12, planted_n = 2.3;
  QOMEParams p{planted_gamma, planted_n, kOsc};
  Superoperator gen = qome_generator(p, n_max, /*include_hamiltonian=*/false);
  QomeFit fit = fit_qome_form(gen, kOsc);
  CHECK(fit.Gamma == doctest::Approx(planted_gamma).epsilon(1e-10));
  CHECK(fit.N == doctest::Approx(planted_n).epsilon(1e-10));
  CHECK(fit.residual < 1e-12);
}

TEST_CASE("grid propagation is unitary when the couplings vanish") {
  OscillatorParams osc;
  CaldeiraLeggettParams off{0.0, 1.0, osc, true};  // D = 0: closed system
  PositionGrid grid = PositionGrid::symmetric(10.0, 128);
  double x0 = 0.8;
  ComplexVector psi = make_gaussian_wavefunction({x0, 0.0, 1.0}, grid, osc);
  GridDensityMatrix rho = GridDensityMatrix::from_wavefunction(psi, grid);
  auto potential = [&](double x) { return 0.5 * x * x; };
  int steps = 700;  // dt * omega = 2 pi / 700 < 0.01
  double dt = osc.period() / steps;
  PropagationResult run =
      propagate_grid(rho, EnvironmentModel(off), potential, dt, steps, osc);
  CHECK(run.purity.back() == doctest::Approx(1.0).epsilon(1e-8));
  for (size_t i = 0; i < run.times.size(); i += 50) {
    CHECK(std::abs(run.mean_x[i] - x0 * std::cos(run.times[i])) < 3e-4);
    CHECK(std::abs(run.mean_p[i] + x0 * std::sin(run.times[i])) < 3e-4);
  }
  CHECK(run.trace_drift.back() < 1e-10);
}

TEST_CASE("grid propagation rejects oversized steps and the wrong model") {
  OscillatorParams osc;
  PositionGrid grid = PositionGrid::symmetric(10.0, 64);
  ComplexVector psi = make_gaussian_wavefunction({0.0, 0.0, 1.0}, grid, osc);
  GridDensityMatrix rho = GridDensityMatrix::from_wavefunction(psi, grid);
  auto potential = [](double x) { return 0.5 * x * x; };
  CaldeiraLeggettParams weak{0.01, 5.0, osc, true};
  CHECK_THROWS_AS(propagate_grid(rho, EnvironmentModel(weak), potential, 0.1, 10, osc),
                  ValidationError);
  QOMEParams q{0.05, 1.0, osc};
  CHECK_THROWS_AS(propagate_grid(rho, EnvironmentModel(q), potential, 0.005, 10, osc),
                  ValidationError);
}

TEST_CASE("fock propagation matches the exact coherent amplitude decay") {
  OscillatorParams osc;
  QOMEParams p{0.08, 0.0, osc};
  FockDensityMatrix rho0 = make_coherent_fock(Complex(1.5, 0.0), 25);
  int steps = 2000;
  double dt = osc.period() / steps;
  PropagationResult run = propagate_fock(rho0, p, dt, steps);
  double x0 = std::sqrt(2.0) * 1.5;
  for (size_t i = 0; i < run.times.size(); i += 200) {
    double t = run.times[i];
    double expected = x0 * std::exp(-0.5 * p.Gamma * t) * std::cos(t);
    CHECK(std::abs(run.mean_x[i] - expected) < 1e-6);
  }
  CHECK(run.trace_drift.back() < 1e-12);
  CHECK_FALSE(run.degraded);
}

TEST_CASE("fock propagation rejects oversized steps") {
  QOMEParams p{0.5, 3.0, kOsc};
  FockDensityMatrix rho0 = make_thermal_fock(1.0, 30);
  CHECK_THROWS_AS(propagate_fock(rho0, p, 0.01, 10), ValidationError);  // stiffness bound
}
