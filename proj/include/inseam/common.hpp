#pragma once

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace inseam {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

using Json = nlohmann::ordered_json;

/// Bad command-line usage or invalid parameter combinations. CLI exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, datasets, configs). Exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure (singular system, non-convergence). Exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rank-deficient linear system; message names the unconstrained variable block.
struct SingularSystemError : NumericError {
  using NumericError::NumericError;
};

/// Worker count for parallel batch work: INSEAM_THREADS when set, otherwise
/// the hardware concurrency.
inline int worker_threads() {
  if (const char* env = std::getenv("INSEAM_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

// splitmix64, used to derive independent per-trial RNG seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Runs f(0..n-1) across worker threads, striped by index. Results must be
/// written to pre-sized slots so the output is independent of scheduling.
template <class F>
void parallel_for(int n, F&& f) {
  int workers = std::min(worker_threads(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += workers) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace inseam
