// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include "clockforge/register_shape.hpp"

namespace clockforge {

struct StateVector {
  RegisterShape shape;
  Vec amplitudes;

  StateVector() = default;
  StateVector(RegisterShape s, Vec a) : shape(std::move(s)), amplitudes(std::move(a)) {
    if (amplitudes.size() != shape.total())
      throw std::invalid_argument("amplitude length does not match register");
  }

  static StateVector basis(const RegisterShape& s, std::int64_t index);
  static StateVector basis(const RegisterShape& s, const std::vector<int>& digits);

  double norm() const { return amplitudes.norm(); }
  StateVector normalized() const;
  cplx inner(const StateVector& o) const { return amplitudes.dot(o.amplitudes); }
};

struct DensityOperator {
  RegisterShape shape;
  Mat matrix;

  DensityOperator() = default;
  DensityOperator(RegisterShape s, Mat m) : shape(std::move(s)), matrix(std::move(m)) {
    if (matrix.rows() != shape.total() || matrix.cols() != shape.total())
      throw std::invalid_argument("density matrix does not match register");
  }

  static DensityOperator pure(const StateVector& v) {
    return DensityOperator(v.shape, v.amplitudes * v.amplitudes.adjoint());
  }
  double trace() const { return matrix.trace().real(); }
  // Checks Hermiticity, unit trace, and eigenvalue positivity within tol.
  void validate(double tol = 1e-10) const;
};

enum class TermTag { in, out, prop, stab, other };
std::string tag_name(TermTag t);

// One low-locality Hermitian term: a sparse matrix over the listed support
// sites (ascending order, dims taken from the owning sum's register).
struct HermitianTerm {
  std::vector<int> support;
  SpMat op;
  TermTag tag = TermTag::other;
};

struct HermitianTermSum {
  RegisterShape shape;
  std::vector<HermitianTerm> terms;

  explicit HermitianTermSum(RegisterShape s = RegisterShape{}) : shape(std::move(s)) {}

  // Validates support range/order and Hermiticity; spectral norms are audited
  // separately (see audit_term_norms) because they need a dense eigensolve.
  void add_term(std::vector<int> support, const Mat& local, TermTag tag);
  void add_term_sparse(std::vector<int> support, SpMat local, TermTag tag);

  int max_support() const {
    int m = 0;
    for (auto& t : terms) m = std::max<int>(m, static_cast<int>(t.support.size()));
    return m;
  }
};

// Largest spectral norm over all terms (each must be <= 1 + tol per contract).
double audit_term_norms(const HermitianTermSum& h);

// --- basic operations -------------------------------------------------------

StateVector tensor_product(const StateVector& a, const StateVector& b);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);

DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> traced_sites);

double trace_distance(const DensityOperator& a, const DensityOperator& b);

// --- application kernels ----------------------------------------------------
// y += op|x> with `op` living on `support` inside `shape`. The parallel
// variant splits the non-support index range across OpenMP threads; the serial
// variant is the reference implementation used to validate it.

void apply_embedded(const RegisterShape& shape, const std::vector<int>& support,
                    const SpMat& op, const Vec& x, Vec& y);
void apply_embedded_serial(const RegisterShape& shape, const std::vector<int>& support,
                           const SpMat& op, const Vec& x, Vec& y);

Vec apply_term_sum(const HermitianTermSum& h, const Vec& x);
Vec apply_term_sum_serial(const HermitianTermSum& h, const Vec& x);

// (op tensor I) rho, with op given densely on support.
Mat left_multiply(const RegisterShape& shape, const std::vector<int>& support,
                  const Mat& local, const Mat& rho);
Mat conjugate_by(const RegisterShape& shape, const std::vector<int>& support,
                 const Mat& local, const Mat& rho);

Mat kron(const Mat& a, const Mat& b);

Mat materialize(const HermitianTermSum& h);
// Dense embedding of a local operator into the full register.
Mat embed_dense(const RegisterShape& shape, const std::vector<int>& support, const Mat& local);

// Re-expresses `local` (given on the ordered site list `src`) on the ordered
// superset `dst`; sites of dst not in src get identity factors.
Mat reindex_local(const RegisterShape& shape, const std::vector<int>& src,
                  const Mat& local, const std::vector<int>& dst);

double expectation(const HermitianTermSum& h, const StateVector& v);
double expectation(const HermitianTermSum& h, const DensityOperator& rho);
double expectation_term(const RegisterShape& shape, const HermitianTerm& t, const Vec& x);

// --- channels ----------------------------------------------------------------

struct ErrorChannel {
  std::vector<int> support;
  std::vector<Mat> kraus;
  std::string label;

  // Checks sum_m K^dag K = I within tol.
  void validate(const RegisterShape& shape, double tol = 1e-10) const;
};

DensityOperator apply_channel(const DensityOperator& rho, const ErrorChannel& ch);

ErrorChannel identity_channel(int site, int dim);
ErrorChannel erase_channel(int site, int dim);          // replace with I/dim
ErrorChannel dephase_channel(int site, int dim);        // basis projectors
ErrorChannel unitary_channel(int site, int dim, std::mt19937_64& rng);
ErrorChannel random_kraus_channel(int site, int dim, std::mt19937_64& rng);

// --- eigensolvers -------------------------------------------------------------

struct EigResult {
  RVec values;   // ascending
  Mat vectors;   // columns match values
  double max_residual = 0.0;
  bool dense_path = true;
};

EigResult eigensolve_hermitian(const HermitianTermSum& h, int how_many);

// --- randomness helpers --------------------------------------------------------

Mat haar_unitary(int d, std::mt19937_64& rng);
StateVector random_state(const RegisterShape& shape, std::mt19937_64& rng);

}  // namespace clockforge
