// SPDX-License-Identifier: Apache-2.0
#include "clockforge/linalg.hpp"

namespace clockforge {

namespace {

EigResult dense_solve(const HermitianTermSum& h, int how_many) {
  Mat m = materialize(h);
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  int k = std::min<int>(how_many, static_cast<int>(m.rows()));
  EigResult r;
  r.values = es.eigenvalues().head(k);
  r.vectors = es.eigenvectors().leftCols(k);
  r.dense_path = true;
  for (int i = 0; i < k; ++i) {
    Vec v = r.vectors.col(i);
    double res = (apply_term_sum_serial(h, v) - r.values(i) * v).norm();
    r.max_residual = std::max(r.max_residual, res);
  }
  return r;
}

// Lanczos with full reorthogonalization; targets the low end of the spectrum.
EigResult lanczos_solve(const HermitianTermSum& h, int how_many) {
  const std::int64_t dim = h.shape.total();
  const int max_steps = static_cast<int>(std::min<std::int64_t>(dim, 350));
  std::mt19937_64 rng(0x1c0ffee);
  Vec v = random_state(h.shape, rng).amplitudes;

  std::vector<Vec> basis;
  std::vector<double> alpha, beta;
  basis.push_back(v);
  EigResult best;
  best.dense_path = false;
  for (int j = 0; j < max_steps; ++j) {
    Vec w = apply_term_sum(h, basis[j]);
    double a = basis[j].dot(w).real();
    alpha.push_back(a);
    w -= a * basis[j];
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    for (const Vec& b : basis) w -= b.dot(w) * b;  // reorthogonalize
    double nb = w.norm();
    bool breakdown = nb < 1e-13;
    bool check_now = breakdown || j + 1 == max_steps || (j >= how_many + 4 && j % 10 == 0);
    if (check_now) {
      int m = static_cast<int>(alpha.size());
      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
      int k = std::min<int>(how_many, m);
      best.values = es.eigenvalues().head(k);
      best.vectors = Mat::Zero(dim, k);
      for (int c = 0; c < k; ++c)
        for (int i = 0; i < m; ++i) best.vectors.col(c) += es.eigenvectors()(i, c) * basis[i];
      best.max_residual = 0.0;
      for (int c = 0; c < k; ++c) {
        Vec rv = best.vectors.col(c);
        rv /= rv.norm();
        best.vectors.col(c) = rv;
        double res = (apply_term_sum(h, rv) - best.values(c) * rv).norm();
        best.max_residual = std::max(best.max_residual, res);
      }
      if (best.max_residual <= tolerances().eig || breakdown) return best;
    }
    if (breakdown) return best;
    beta.push_back(nb);
    basis.push_back(w / nb);
  }
  if (best.max_residual > tolerances().eig)
    throw std::runtime_error("iterative eigensolver did not converge; residual " +
                             std::to_string(best.max_residual));
  return best;
}

}  // namespace

EigResult eigensolve_hermitian(const HermitianTermSum& h, int how_many) {
  if (how_many < 1) throw std::invalid_argument("how_many must be positive");
  if (h.shape.total() <= dense_cap()) return dense_solve(h, how_many);
  return lanczos_solve(h, how_many);
}

}  // namespace clockforge
