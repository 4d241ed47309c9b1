// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <numeric>

#include "clockforge/common.hpp"

namespace clockforge {

// Multi-qudit register. Site 0 is the slowest (leftmost) tensor factor, so a
// basis index decomposes as idx = sum_s digit_s * stride_s with stride of the
// last site equal to 1. This matches the usual Kronecker-product ordering.
struct RegisterShape {
  std::vector<int> dims;

  RegisterShape() = default;
  explicit RegisterShape(std::vector<int> d) : dims(std::move(d)) {
    for (int q : dims)
      if (q < 2) throw std::invalid_argument("qudit dimension must be >= 2");
  }
  static RegisterShape qubits(int n) {
    return RegisterShape(std::vector<int>(n, 2));
  }
  static RegisterShape qutrits(int n) {
    return RegisterShape(std::vector<int>(n, 3));
  }

  int sites() const { return static_cast<int>(dims.size()); }

  std::int64_t total() const {
    std::int64_t p = 1;
    for (int q : dims) {
      if (p > (std::int64_t(1) << 56) / q)
        throw std::runtime_error("register dimension overflow");
      p *= q;
    }
    return p;
  }

  std::vector<std::int64_t> strides() const {
    std::vector<std::int64_t> s(dims.size());
    std::int64_t acc = 1;
    for (int i = sites() - 1; i >= 0; --i) {
      s[i] = acc;
      acc *= dims[i];
    }
    return s;
  }

  void check_site(int s) const {
    if (s < 0 || s >= sites()) throw std::out_of_range("site index out of range");
  }

  RegisterShape subset(const std::vector<int>& sites_keep) const {
    std::vector<int> d;
    d.reserve(sites_keep.size());
    for (int s : sites_keep) {
      check_site(s);
      d.push_back(dims[s]);
    }
    return RegisterShape(std::move(d));
  }

  bool operator==(const RegisterShape& o) const { return dims == o.dims; }
};

}  // namespace clockforge
