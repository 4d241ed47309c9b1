// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace clockforge {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<cplx>;

// Global numeric knobs. Equality checks default to 1e-10, eigen residuals to
// 1e-8; the CLI can override both.
struct Tolerances {
  double eq = 1e-10;
  double eig = 1e-8;
};

inline Tolerances& tolerances() {
  static Tolerances t;
  return t;
}

// Largest Hilbert dimension for which dense matrices are materialized.
inline std::int64_t& dense_cap() {
  static std::int64_t cap = 1 << 14;
  return cap;
}

}  // namespace clockforge
