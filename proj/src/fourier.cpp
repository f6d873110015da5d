#include "qsieve/fourier.hpp"

#include <map>
#include <mutex>

#include <fftw3.h>

namespace qsieve::fourier {

namespace {

// Cached FFTW plans per matrix size. Plans are created with FFTW_ESTIMATE so
// the algorithm choice (and hence the output bits) is deterministic.
struct Plans {
  fftw_plan col_fwd, col_bwd, row_fwd, row_bwd;
  fftw_complex* buf;
  int n;

  explicit Plans(int n_) : n(n_) {
    buf = fftw_alloc_complex(static_cast<size_t>(n) * n);
    int dims[1] = {n};
    // First index varies within a column (column-major storage): stride 1.
    col_fwd = fftw_plan_many_dft(1, dims, n, buf, nullptr, 1, n, buf, nullptr, 1, n,
                                 FFTW_FORWARD, FFTW_ESTIMATE);
    col_bwd = fftw_plan_many_dft(1, dims, n, buf, nullptr, 1, n, buf, nullptr, 1, n,
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
    // Second index: stride n, consecutive transforms offset by 1.
    row_fwd = fftw_plan_many_dft(1, dims, n, buf, nullptr, n, 1, buf, nullptr, n, 1,
                                 FFTW_FORWARD, FFTW_ESTIMATE);
    row_bwd = fftw_plan_many_dft(1, dims, n, buf, nullptr, n, 1, buf, nullptr, n, 1,
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plans() {
    fftw_destroy_plan(col_fwd);
    fftw_destroy_plan(col_bwd);
    fftw_destroy_plan(row_fwd);
    fftw_destroy_plan(row_bwd);
    fftw_free(buf);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(std::piecewise_construct,
                                            std::forward_as_tuple(n),
                                            std::forward_as_tuple(n)).first;
  return it->second;
}

}  // namespace

void to_momentum(Eigen::MatrixXcd& rho) {
  const int n = static_cast<int>(rho.rows());
  Plans& p = plans_for(n);
  auto* data = reinterpret_cast<fftw_complex*>(rho.data());
  fftw_execute_dft(p.col_fwd, data, data);
  fftw_execute_dft(p.row_bwd, data, data);
}

void to_position(Eigen::MatrixXcd& rho) {
  const int n = static_cast<int>(rho.rows());
  Plans& p = plans_for(n);
  auto* data = reinterpret_cast<fftw_complex*>(rho.data());
  fftw_execute_dft(p.col_bwd, data, data);
  fftw_execute_dft(p.row_fwd, data, data);
  rho /= static_cast<double>(n) * n;
}

}  // namespace qsieve::fourier
