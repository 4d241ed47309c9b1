// SPDX-License-Identifier: Apache-2.0
#include "clockforge/linalg.hpp"

#include <algorithm>

namespace clockforge {

std::string tag_name(TermTag t) {
  switch (t) {
    case TermTag::in: return "in";
    case TermTag::out: return "out";
    case TermTag::prop: return "prop";
    case TermTag::stab: return "stab";
    case TermTag::other: return "other";
  }
  return "other";
}

StateVector StateVector::basis(const RegisterShape& s, std::int64_t index) {
  Vec a = Vec::Zero(s.total());
  if (index < 0 || index >= s.total()) throw std::out_of_range("basis index");
  a(index) = 1.0;
  return StateVector(s, std::move(a));
}

StateVector StateVector::basis(const RegisterShape& s, const std::vector<int>& digits) {
  if (static_cast<int>(digits.size()) != s.sites())
    throw std::invalid_argument("digit count mismatch");
  auto strides = s.strides();
  std::int64_t idx = 0;
  for (int i = 0; i < s.sites(); ++i) {
    if (digits[i] < 0 || digits[i] >= s.dims[i]) throw std::out_of_range("digit");
    idx += digits[i] * strides[i];
  }
  return basis(s, idx);
}

StateVector StateVector::normalized() const {
  double n = norm();
  if (n == 0.0) throw std::runtime_error("cannot normalize zero vector");
  return StateVector(shape, amplitudes / n);
}

void DensityOperator::validate(double tol) const {
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::runtime_error("density operator is not Hermitian");
  if (std::abs(trace() - 1.0) > tol)
    throw std::runtime_error("density operator trace is not 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(matrix, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw std::runtime_error("density operator has a negative eigenvalue");
}

void HermitianTermSum::add_term(std::vector<int> support, const Mat& local, TermTag tag) {
  add_term_sparse(std::move(support), local.sparseView(1.0, 1e-14), tag);
}

void HermitianTermSum::add_term_sparse(std::vector<int> support, SpMat local, TermTag tag) {
  if (!std::is_sorted(support.begin(), support.end()) ||
      std::adjacent_find(support.begin(), support.end()) != support.end())
    throw std::invalid_argument("term support must be strictly ascending");
  std::int64_t d = 1;
  for (int s : support) {
    shape.check_site(s);
    d *= shape.dims[s];
  }
  if (local.rows() != d || local.cols() != d)
    throw std::invalid_argument("term matrix does not match its support");
  SpMat adj = SpMat(local.adjoint());
  SpMat diff = local - adj;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it)
      if (std::abs(it.value()) > tolerances().eq)
        throw std::invalid_argument("term matrix is not Hermitian");
  local.makeCompressed();
  terms.push_back(HermitianTerm{std::move(support), std::move(local), tag});
}

double audit_term_norms(const HermitianTermSum& h) {
  double worst = 0.0;
  for (const auto& t : h.terms) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(t.op), Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return worst;
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  std::vector<int> dims = a.shape.dims;
  dims.insert(dims.end(), b.shape.dims.begin(), b.shape.dims.end());
  Vec out(a.amplitudes.size() * b.amplitudes.size());
  for (std::int64_t i = 0; i < a.amplitudes.size(); ++i)
    out.segment(i * b.amplitudes.size(), b.amplitudes.size()) = a.amplitudes(i) * b.amplitudes;
  return StateVector(RegisterShape(std::move(dims)), std::move(out));
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
  std::vector<int> dims = a.shape.dims;
  dims.insert(dims.end(), b.shape.dims.begin(), b.shape.dims.end());
  std::int64_t da = a.matrix.rows(), db = b.matrix.rows();
  Mat out(da * db, da * db);
  for (std::int64_t i = 0; i < da; ++i)
    for (std::int64_t j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.matrix(i, j) * b.matrix;
  return DensityOperator(RegisterShape(std::move(dims)), std::move(out));
}

namespace {

// Enumerates absolute offsets of every configuration of the listed sites.
std::vector<std::int64_t> site_offsets(const RegisterShape& shape,
                                       const std::vector<int>& sites) {
  auto strides = shape.strides();
  std::vector<std::int64_t> off{0};
  for (int s : sites) {
    std::vector<std::int64_t> next;
    next.reserve(off.size() * shape.dims[s]);
    for (std::int64_t base : off)
      for (int v = 0; v < shape.dims[s]; ++v) next.push_back(base + v * strides[s]);
    off = std::move(next);
  }
  return off;
}

std::vector<int> complement_sites(const RegisterShape& shape, const std::vector<int>& sites) {
  std::vector<bool> in(shape.sites(), false);
  for (int s : sites) in[s] = true;
  std::vector<int> rest;
  for (int s = 0; s < shape.sites(); ++s)
    if (!in[s]) rest.push_back(s);
  return rest;
}

}  // namespace

DensityOperator partial_trace(const DensityOperator& rho, std::vector<int> traced_sites) {
  std::sort(traced_sites.begin(), traced_sites.end());
  traced_sites.erase(std::unique(traced_sites.begin(), traced_sites.end()), traced_sites.end());
  for (int s : traced_sites) rho.shape.check_site(s);
  std::vector<int> kept = complement_sites(rho.shape, traced_sites);
  auto kept_off = site_offsets(rho.shape, kept);
  auto traced_off = site_offsets(rho.shape, traced_sites);
  std::int64_t dk = static_cast<std::int64_t>(kept_off.size());
  Mat out = Mat::Zero(dk, dk);
  for (std::int64_t i = 0; i < dk; ++i)
    for (std::int64_t j = 0; j < dk; ++j) {
      cplx acc = 0.0;
      for (std::int64_t r : traced_off) acc += rho.matrix(kept_off[i] + r, kept_off[j] + r);
      out(i, j) = acc;
    }
  return DensityOperator(rho.shape.subset(kept), std::move(out));
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  if (!(a.shape == b.shape)) throw std::invalid_argument("trace_distance shape mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(a.matrix - b.matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::int64_t i = 0; i < a.rows(); ++i)
    for (std::int64_t j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat reindex_local(const RegisterShape& shape, const std::vector<int>& src, const Mat& local,
                  const std::vector<int>& dst) {
  std::vector<int> pos(src.size());
  for (size_t i = 0; i < src.size(); ++i) {
    auto it = std::find(dst.begin(), dst.end(), src[i]);
    if (it == dst.end()) throw std::invalid_argument("src site missing from dst");
    pos[i] = static_cast<int>(it - dst.begin());
  }
  std::vector<int> dd;
  for (int s : dst) dd.push_back(shape.dims[s]);
  RegisterShape dshape(dd);
  auto dstrides = dshape.strides();
  std::int64_t dtot = dshape.total();
  // src-local strides inside the dst index space
  std::vector<std::int64_t> map_stride(src.size());
  for (size_t i = 0; i < src.size(); ++i) map_stride[i] = dstrides[pos[i]];
  // enumerate src configurations -> offset in dst space
  std::int64_t stot = local.rows();
  std::vector<std::int64_t> src_off(stot, 0);
  {
    std::int64_t rep = stot;
    for (size_t i = 0; i < src.size(); ++i) {
      int dim = shape.dims[src[i]];
      rep /= dim;
      for (std::int64_t a = 0; a < stot; ++a) {
        int digit = static_cast<int>((a / rep) % dim);
        src_off[a] += digit * map_stride[i];
      }
    }
  }
  // offsets of the dst sites not in src (identity factors)
  std::vector<std::int64_t> rest_off{0};
  for (size_t j = 0; j < dst.size(); ++j) {
    if (std::find(src.begin(), src.end(), dst[j]) != src.end()) continue;
    std::vector<std::int64_t> next;
    for (std::int64_t base : rest_off)
      for (int v = 0; v < shape.dims[dst[j]]; ++v) next.push_back(base + v * dstrides[j]);
    rest_off = std::move(next);
  }
  Mat out = Mat::Zero(dtot, dtot);
  for (std::int64_t a = 0; a < stot; ++a)
    for (std::int64_t b = 0; b < stot; ++b) {
      if (local(a, b) == cplx(0.0)) continue;
      for (std::int64_t r : rest_off) out(src_off[a] + r, src_off[b] + r) = local(a, b);
    }
  return out;
}

Mat embed_dense(const RegisterShape& shape, const std::vector<int>& support, const Mat& local) {
  std::vector<int> all(shape.sites());
  for (int i = 0; i < shape.sites(); ++i) all[i] = i;
  return reindex_local(shape, support, local, all);
}

Mat materialize(const HermitianTermSum& h) {
  std::int64_t d = h.shape.total();
  if (d > dense_cap()) throw std::runtime_error("dimension exceeds dense cap");
  Mat out = Mat::Zero(d, d);
  for (const auto& t : h.terms) {
    auto sup_off = site_offsets(h.shape, t.support);
    auto rest_off = site_offsets(h.shape, complement_sites(h.shape, t.support));
    for (int k = 0; k < t.op.outerSize(); ++k)
      for (SpMat::InnerIterator it(t.op, k); it; ++it)
        for (std::int64_t r : rest_off)
          out(sup_off[it.row()] + r, sup_off[it.col()] + r) += it.value();
  }
  return out;
}

double expectation_term(const RegisterShape& shape, const HermitianTerm& t, const Vec& x) {
  Vec y = Vec::Zero(x.size());
  apply_embedded(shape, t.support, t.op, x, y);
  return x.dot(y).real();
}

double expectation(const HermitianTermSum& h, const StateVector& v) {
  if (!(h.shape == v.shape)) throw std::invalid_argument("expectation shape mismatch");
  double acc = 0.0;
  for (const auto& t : h.terms) acc += expectation_term(h.shape, t, v.amplitudes);
  return acc;
}

double expectation(const HermitianTermSum& h, const DensityOperator& rho) {
  if (!(h.shape == rho.shape)) throw std::invalid_argument("expectation shape mismatch");
  cplx acc = 0.0;
  for (const auto& t : h.terms) {
    auto sup_off = site_offsets(rho.shape, t.support);
    auto rest_off = site_offsets(rho.shape, complement_sites(rho.shape, t.support));
    for (int k = 0; k < t.op.outerSize(); ++k)
      for (SpMat::InnerIterator it(t.op, k); it; ++it)
        for (std::int64_t r : rest_off)
          acc += it.value() * rho.matrix(sup_off[it.col()] + r, sup_off[it.row()] + r);
  }
  return acc.real();
}

Mat left_multiply(const RegisterShape& shape, const std::vector<int>& support,
                  const Mat& local, const Mat& rho) {
  Mat out = Mat::Zero(rho.rows(), rho.cols());
  SpMat op = local.sparseView(1.0, 1e-16);
  for (std::int64_t c = 0; c < rho.cols(); ++c) {
    Vec x = rho.col(c);
    Vec y = Vec::Zero(rho.rows());
    apply_embedded_serial(shape, support, op, x, y);
    out.col(c) = y;
  }
  return out;
}

Mat conjugate_by(const RegisterShape& shape, const std::vector<int>& support,
                 const Mat& local, const Mat& rho) {
  Mat kr = left_multiply(shape, support, local, rho);
  // K rho K^dag = (K (K rho)^dag)^dag
  return left_multiply(shape, support, local, kr.adjoint()).adjoint();
}

void ErrorChannel::validate(const RegisterShape& shape, double tol) const {
  std::int64_t d = 1;
  for (int s : support) {
    shape.check_site(s);
    d *= shape.dims[s];
  }
  Mat acc = Mat::Zero(d, d);
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d) throw std::invalid_argument("Kraus size mismatch");
    acc += k.adjoint() * k;
  }
  if ((acc - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("Kraus operators are not trace preserving");
}

DensityOperator apply_channel(const DensityOperator& rho, const ErrorChannel& ch) {
  ch.validate(rho.shape);
  Mat out = Mat::Zero(rho.matrix.rows(), rho.matrix.cols());
  for (const auto& k : ch.kraus) out += conjugate_by(rho.shape, ch.support, k, rho.matrix);
  return DensityOperator(rho.shape, std::move(out));
}

ErrorChannel identity_channel(int site, int dim) {
  return ErrorChannel{{site}, {Mat::Identity(dim, dim)}, "identity"};
}

ErrorChannel erase_channel(int site, int dim) {
  ErrorChannel ch{{site}, {}, "erase"};
  double s = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      Mat k = Mat::Zero(dim, dim);
      k(a, b) = s;
      ch.kraus.push_back(std::move(k));
    }
  return ch;
}

ErrorChannel dephase_channel(int site, int dim) {
  ErrorChannel ch{{site}, {}, "dephase"};
  for (int a = 0; a < dim; ++a) {
    Mat k = Mat::Zero(dim, dim);
    k(a, a) = 1.0;
    ch.kraus.push_back(std::move(k));
  }
  return ch;
}

ErrorChannel unitary_channel(int site, int dim, std::mt19937_64& rng) {
  return ErrorChannel{{site}, {haar_unitary(dim, rng)}, "unitary"};
}

ErrorChannel random_kraus_channel(int site, int dim, std::mt19937_64& rng) {
  // Random CPTP map: slice a Haar unitary on dim^2 into dim Kraus blocks.
  Mat u = haar_unitary(dim * dim, rng);
  ErrorChannel ch{{site}, {}, "random_kraus"};
  for (int m = 0; m < dim; ++m) ch.kraus.push_back(u.block(m * dim, 0, dim, dim));
  return ch;
}

Mat haar_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    cplx ph = r(j, j) / std::abs(r(j, j));
    q.col(j) *= ph;
  }
  return q;
}

StateVector random_state(const RegisterShape& shape, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(shape.total());
  for (std::int64_t i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  v /= v.norm();
  return StateVector(shape, std::move(v));
}

}  // namespace clockforge
