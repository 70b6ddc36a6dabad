// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The clhgibbs Authors

#include "clhgibbs/core.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace clhgibbs {

double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat embed_operator(const Mat& local, const std::vector<int>& positions, const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  std::vector<long> stride(n);
  long total = 1;
  for (int s = n - 1; s >= 0; --s) {
    stride[s] = total;
    total *= dims[s];
  }
  const int k = static_cast<int>(positions.size());
  std::vector<long> local_stride(k);
  long local_dim = 1;
  for (int i = k - 1; i >= 0; --i) {
    local_stride[i] = local_dim;
    local_dim *= dims[positions[i]];
  }
  if (local.rows() != local_dim || local.cols() != local_dim)
    throw ValidationError("embed_operator: local operator dimension mismatch");

  // offset[l] = full-index contribution of local index l.
  std::vector<long> offset(local_dim, 0);
  for (long l = 0; l < local_dim; ++l) {
    long rem = l;
    for (int i = 0; i < k; ++i) {
      const long digit = rem / local_stride[i];
      rem %= local_stride[i];
      offset[l] += digit * stride[positions[i]];
    }
  }
  Mat out = Mat::Zero(total, total);
  for (long r = 0; r < total; ++r) {
    long lr = 0;
    long base = r;
    for (int i = 0; i < k; ++i) {
      const long digit = (r / stride[positions[i]]) % dims[positions[i]];
      lr += digit * local_stride[i];
      base -= digit * stride[positions[i]];
    }
    for (long lc = 0; lc < local_dim; ++lc) {
      const cplx v = local(lr, lc);
      if (v != cplx(0.0)) out(r, base + offset[lc]) = v;
    }
  }
  return out;
}

double hermitian_residual(const Mat& m) {
  const double norm = m.norm();
  if (norm == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / norm;
}

HermitianEig hermitian_eig(const Mat& m) {
  Mat sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  if (solver.info() != Eigen::Success) throw InternalError("Hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

std::vector<int> cluster_sorted(const RealVec& values, double gap) {
  std::vector<int> starts;
  const int n = static_cast<int>(values.size());
  for (int i = 0; i < n; ++i)
    if (i == 0 || values(i) - values(i - 1) >= gap) starts.push_back(i);
  starts.push_back(n);
  return starts;
}

void fix_phase(Eigen::Ref<Vec> v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > tol) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = cplx(v(i).real(), 0.0);
      return;
    }
  }
}

double trace_distance(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw ValidationError("trace_distance: dimension mismatch");
  const HermitianEig e = hermitian_eig(rho - sigma);
  return 0.5 * e.values.cwiseAbs().sum();
}

Mat random_unitary(int dim, Rng& rng) {
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

Mat random_hermitian(int dim, Rng& rng) {
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
  return 0.5 * (g + g.adjoint());
}

Mat pauli_matrix(char letter) {
  Mat m = Mat::Zero(2, 2);
  switch (letter) {
    case 'I': m(0, 0) = 1; m(1, 1) = 1; break;
    case 'X': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'Y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw ValidationError(std::string("unknown Pauli letter '") + letter + "'");
  }
  return m;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int env_threads() {
  const char* v = std::getenv("CLHGIBBS_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw ValidationError("CLHGIBBS_THREADS must be a positive integer");
  return static_cast<int>(std::min<long>(n, 256));
}

}  // namespace clhgibbs
