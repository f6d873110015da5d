// Independent reference implementations used to check the library against.
// Everything here is written from the defining formulas, not by calling the
// code under test.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Composite trapezoid rule on [a, b].
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) acc += f(a + i * h);
  return acc * h;
}

// Ladder operator on levels 0..n_max, written out directly.
inline Matrix lowering(int n_max) {
  Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// Lindblad dissipator D[c](rho) = c rho c^dag - 1/2 {c^dag c, rho}.
inline Matrix dissipator(const Matrix& c, const Matrix& rho) {
  Matrix cc = c.adjoint() * c;
  return c * rho * c.adjoint() - 0.5 * (cc * rho + rho * cc);
}

// Direct O(n^2) double quadrature of
// 2 lambda (1 - int int P(x) P(y) exp(-((x-y)/sigma)^2) dx dy).
inline double correlated_rate_quadrature(const std::vector<double>& prob,
                                         const std::vector<double>& x, double dx, double lambda,
                                         double sigma) {
  double overlap = 0.0;
  for (size_t i = 0; i < prob.size(); ++i) {
    for (size_t j = 0; j < prob.size(); ++j) {
      double u = (x[i] - x[j]) / sigma;
      overlap += prob[i] * prob[j] * std::exp(-u * u);
    }
  }
  return 2.0 * lambda * (1.0 - overlap * dx * dx);
}

// d(1 - Tr rho^2)/dt by a centered finite difference of purity samples.
inline double entropy_rate_fd(double purity_minus, double purity_plus, double dt) {
  return -(purity_plus - purity_minus) / (2.0 * dt);
}

}  // namespace oracle
