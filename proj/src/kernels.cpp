// SPDX-License-Identifier: Apache-2.0
#include "clockforge/linalg.hpp"

namespace clockforge {

namespace {

struct Offsets {
  std::vector<std::int64_t> sup;   // offset of each support configuration
  std::vector<std::int64_t> rest;  // offset of each non-support configuration
};

Offsets make_offsets(const RegisterShape& shape, const std::vector<int>& support) {
  auto strides = shape.strides();
  Offsets o;
  o.sup = {0};
  std::vector<bool> in(shape.sites(), false);
  for (int s : support) {
    in[s] = true;
    std::vector<std::int64_t> next;
    next.reserve(o.sup.size() * shape.dims[s]);
    for (std::int64_t base : o.sup)
      for (int v = 0; v < shape.dims[s]; ++v) next.push_back(base + v * strides[s]);
    o.sup = std::move(next);
  }
  o.rest = {0};
  for (int s = 0; s < shape.sites(); ++s) {
    if (in[s]) continue;
    std::vector<std::int64_t> next;
    next.reserve(o.rest.size() * shape.dims[s]);
    for (std::int64_t base : o.rest)
      for (int v = 0; v < shape.dims[s]; ++v) next.push_back(base + v * strides[s]);
    o.rest = std::move(next);
  }
  return o;
}

struct Entry {
  std::int64_t row_off, col_off;
  cplx v;
};

std::vector<Entry> flatten(const SpMat& op, const std::vector<std::int64_t>& sup_off) {
  std::vector<Entry> e;
  e.reserve(op.nonZeros());
  for (int k = 0; k < op.outerSize(); ++k)
    for (SpMat::InnerIterator it(op, k); it; ++it)
      e.push_back(Entry{sup_off[it.row()], sup_off[it.col()], it.value()});
  return e;
}

}  // namespace

void apply_embedded(const RegisterShape& shape, const std::vector<int>& support,
                    const SpMat& op, const Vec& x, Vec& y) {
  Offsets o = make_offsets(shape, support);
  std::vector<Entry> entries = flatten(op, o.sup);
  const std::int64_t nrest = static_cast<std::int64_t>(o.rest.size());
  const cplx* xd = x.data();
  cplx* yd = y.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < nrest; ++r) {
    std::int64_t base = o.rest[r];
    for (const Entry& e : entries) yd[base + e.row_off] += e.v * xd[base + e.col_off];
  }
}

void apply_embedded_serial(const RegisterShape& shape, const std::vector<int>& support,
                           const SpMat& op, const Vec& x, Vec& y) {
  Offsets o = make_offsets(shape, support);
  std::vector<Entry> entries = flatten(op, o.sup);
  const cplx* xd = x.data();
  cplx* yd = y.data();
  for (std::int64_t base : o.rest)
    for (const Entry& e : entries) yd[base + e.row_off] += e.v * xd[base + e.col_off];
}

Vec apply_term_sum(const HermitianTermSum& h, const Vec& x) {
  if (x.size() != h.shape.total()) throw std::invalid_argument("vector length mismatch");
  Vec y = Vec::Zero(x.size());
  for (const auto& t : h.terms) apply_embedded(h.shape, t.support, t.op, x, y);
  return y;
}

Vec apply_term_sum_serial(const HermitianTermSum& h, const Vec& x) {
  if (x.size() != h.shape.total()) throw std::invalid_argument("vector length mismatch");
  Vec y = Vec::Zero(x.size());
  for (const auto& t : h.terms) apply_embedded_serial(h.shape, t.support, t.op, x, y);
  return y;
}

}  // namespace clockforge
