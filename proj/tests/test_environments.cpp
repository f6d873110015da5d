#include <cmath>

#include "doctest.h"
#include "qsieve/environments.hpp"

using namespace qsieve;

TEST_CASE("correlated decoherence rate limits") {
  CorrelatedNoiseParams p{2.0, 0.7};
  // Quadratic regime for r << sigma.
  for (double r : {1e-4, 1e-3}) {
    double exact = g_correlated(p, r);
    double approx = g_quadratic_approx(p, r);
    CHECK(exact == doctest::Approx(approx).epsilon(1e-5));
  }
  // Saturation at lambda for r >> sigma.
  CHECK(g_correlated(p, 50.0) == doctest::Approx(p.lambda).epsilon(1e-12));
  CHECK(g_correlated(p, 0.0) == 0.0);
}

TEST_CASE("gaussian kernel reproduces g via the generic decoherence formula") {
  CorrelatedNoiseParams p{1.3, 0.9};
  CorrelationKernel kernel = gaussian_kernel(p, /*hbar=*/2.0);
  CHECK(kernel.homogeneous);
  CHECK(kernel.isotropic);
  for (double r : {0.0, 0.1, 0.5, 1.0, 3.0}) {
    double via_kernel = decoherence_kernel(kernel, 0.7 + r, 0.7);
    CHECK(via_kernel == doctest::Approx(g_correlated(p, r)).epsilon(1e-12));
  }
}

TEST_CASE("thermal occupation") {
  CHECK(thermal_occupation(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(thermal_occupation(10.0) == doctest::Approx(1.0 / (std::exp(10.0) - 1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(thermal_occupation(0.0), ValidationError);
  CHECK_THROWS_AS(thermal_occupation(-1.0), ValidationError);
}

TEST_CASE("dissipation rate from the spectral density") {
  auto j = [](double w) { return 0.3 * w * w; };
  double omega = 2.0, mass = 5.0;
  CHECK(gamma_from_spectral_density(j, mass, omega) ==
        doctest::Approx(M_PI * 0.3 / (2.0 * mass)).epsilon(1e-12));
  CHECK_THROWS_AS(gamma_from_spectral_density([](double) { return -1.0; }, 1.0, 1.0),
                  ValidationError);
}

TEST_CASE("caldeira-leggett diffusion coefficient") {
  OscillatorParams osc{2.0, 1.0, 0.5};
  CaldeiraLeggettParams p{0.1, 3.0, osc, true};
  CHECK(p.diffusion() == doctest::Approx(2.0 * 2.0 * 0.1 * 3.0 / 0.25).epsilon(1e-14));
}

TEST_CASE("model parameter validation") {
  CHECK_THROWS_AS((CaldeiraLeggettParams{-0.1, 1.0, {}, true}.validate()), ValidationError);
  CHECK_THROWS_AS((CaldeiraLeggettParams{0.1, 0.0, {}, true}.validate()), ValidationError);
  CHECK_THROWS_AS((CorrelatedNoiseParams{0.0, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((CorrelatedNoiseParams{1.0, -1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((QOMEParams{-0.1, 1.0, {}}.validate()), ValidationError);
  CHECK_THROWS_AS((QOMEParams{0.1, -1.0, {}}.validate()), ValidationError);
}

TEST_CASE("model descriptors name the model family") {
  CHECK(model_descriptor(CaldeiraLeggettParams{0.01, 5.0, {}, true}).substr(0, 3) == "cl(");
  CHECK(model_descriptor(CorrelatedNoiseParams{1.0, 2.0}).substr(0, 11) == "correlated(");
  CHECK(model_descriptor(QOMEParams{0.05, 1.0, {}}).substr(0, 5) == "qome(");
}
