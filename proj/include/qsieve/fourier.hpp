#pragma once

#include <Eigen/Dense>

namespace qsieve::fourier {

/// In-place transform of a density-matrix block to the momentum representation:
/// forward DFT over the first index, backward DFT over the second (the two
/// indices transform with conjugate conventions). Unscaled; to_position undoes
/// it exactly (including the 1/n^2 factor).
void to_momentum(Eigen::MatrixXcd& rho);
void to_position(Eigen::MatrixXcd& rho);

}  // namespace qsieve::fourier
