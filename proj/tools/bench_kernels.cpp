// SPDX-License-Identifier: Apache-2.0
//
// Compares the OpenMP term-application kernel against the serial reference on
// clock Hamiltonians of growing size and reports timings plus the largest
// elementwise deviation between the two code paths.

#include <chrono>
#include <iostream>

#include "clockforge/clock.hpp"

using namespace clockforge;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void bench(int n, int reps) {
  Circuit c = cat_circuit(n);
  FkOptions opts;
  for (int s = 0; s < n; ++s) opts.in_checked.push_back(s);
  FkHamiltonian fk = build_fk_hamiltonian(c, opts);

  std::mt19937_64 rng(17);
  Vec x = random_state(fk.terms.shape, rng).amplitudes;

  Vec ys, yp;
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) ys = apply_term_sum_serial(fk.terms, x);
  double serial_ms = ms_since(t0) / reps;

  t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) yp = apply_term_sum(fk.terms, x);
  double parallel_ms = ms_since(t0) / reps;

  double diff = (ys - yp).cwiseAbs().maxCoeff();
  std::cout << "n=" << n << " dim=" << fk.terms.shape.total() << " terms=" << fk.terms.terms.size()
            << "  serial " << serial_ms << " ms  parallel " << parallel_ms << " ms  speedup "
            << serial_ms / parallel_ms << "x  max|diff| " << diff << "\n";
}

}  // namespace

int main() {
  for (int n : {6, 8, 10}) bench(n, n >= 10 ? 3 : 10);
  return 0;
}
