// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#ifndef CLHGIBBS_CORE_HPP
#define CLHGIBBS_CORE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace clhgibbs {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

// Input violates a documented precondition (CLI exit code 2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input is well-formed but outside the supported structure (CLI exit code 3).
struct OutOfScopeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A post-condition that must hold by construction did not.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Seedable random stream. Output depends only on the mt19937_64 sequence.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    // Box-Muller; u1 in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed for (seed, index).
inline uint64_t stream_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// log(sum(exp(v))) without overflow.
double log_sum_exp(const std::vector<double>& v);

// Logistic function 1 / (1 + exp(-x)), stable for large |x|.
double sigmoid(double x);

Mat kron(const Mat& a, const Mat& b);

// Embeds `local` acting on the sites at `positions` (in that tensor order)
// into the full space with per-site dimensions `dims`. Site 0 is the most
// significant digit.
Mat embed_operator(const Mat& local, const std::vector<int>& positions, const std::vector<int>& dims);

double hermitian_residual(const Mat& m);

// Eigen-decomposition of a Hermitian matrix (ascending eigenvalues).
struct HermitianEig {
  RealVec values;
  Mat vectors;
};
HermitianEig hermitian_eig(const Mat& m);

// Groups sorted eigenvalues into clusters whose consecutive gaps are below
// `gap`. Returns the start index of each cluster plus a final sentinel.
std::vector<int> cluster_sorted(const RealVec& values, double gap);

// Rotates the phase of `v` so its first entry with modulus above `tol` is
// real and positive.
void fix_phase(Eigen::Ref<Vec> v, double tol = 1e-10);

double trace_distance(const Mat& rho, const Mat& sigma);

Mat random_unitary(int dim, Rng& rng);
Mat random_hermitian(int dim, Rng& rng);

Mat pauli_matrix(char letter);

// Runs fn(begin, end) over contiguous slices of [0, n); slices are fixed by
// n and threads only, so results do not depend on scheduling.
template <typename Fn>
void parallel_for(long n, int threads, Fn fn) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<long>(n, 1))));
  if (threads == 1) {
    fn(0L, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    const long b = n * t / threads, e = n * (t + 1) / threads;
    pool.emplace_back([&, t, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

// Threads requested through CLHGIBBS_THREADS (default 1).
int env_threads();

// Formats with 17 significant digits.
std::string fmt17(double x);

}  // namespace clhgibbs

#endif  // CLHGIBBS_CORE_HPP
