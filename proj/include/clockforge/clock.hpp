// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "clockforge/circuit.hpp"

namespace clockforge {

// ---- clock states ------------------------------------------------------------
//
// A k-dimensional clock holds k unary digit registers of d-1 qubits each,
// where d-1 is the smallest integer L with L^k >= T. The digit tuple for a
// time value is a reflected (Gray) mixed-radix code rather than the plain
// positional decomposition: consecutive times then differ in exactly one
// digit, by exactly one, so every propagation term flips exactly one clock
// qubit. Plain positional digits would need multi-register rollovers that a
// 3-qubit transition operator cannot express. For k = 1 the code is the
// identity and everything reduces to the standard unary construction.

struct ClockLabel {
  int k = 1;
  int d = 2;
  std::int64_t t = 0;
  std::int64_t T = 0;
  std::vector<int> digits;  // digits[i] = a_{i+1}, least significant first
};

int clock_register_len(std::int64_t T, int k);  // L = d - 1
std::vector<int> positional_digits(std::int64_t t, int d, int k);
std::vector<int> gray_digits(std::int64_t t, int d, int k);
ClockLabel clock_label(int k, std::int64_t t, std::int64_t T);

StateVector unary_state(std::int64_t t, std::int64_t T);
StateVector clock_state(int k, std::int64_t t, std::int64_t T);

// ---- Hamiltonian construction --------------------------------------------------

struct FkOptions {
  bool include_in = true;
  bool include_out = false;
  std::vector<int> in_checked;  // state sites (0-based) forced to |0> at t = 0
  int clock_dimension = 1;
};

struct FkHamiltonian {
  HermitianTermSum terms;  // register: k(d-1) clock qubits then the state sites
  Circuit circuit;
  FkOptions opts;
  int k = 1;
  int d = 2;
  std::int64_t T = 0;
  int time_qubits = 0;

  std::vector<int> time_sites() const {
    std::vector<int> v(time_qubits);
    for (int i = 0; i < time_qubits; ++i) v[i] = i;
    return v;
  }
  int state_site(int s) const { return time_qubits + s; }
};

FkHamiltonian build_fk_hamiltonian(const Circuit& c, const FkOptions& opts);

// ---- history states ------------------------------------------------------------

struct HistoryState {
  Circuit circuit;
  StateVector witness;  // on the first witness sites; 0-site register if none
  int k = 1;
  std::int64_t T = 0;
  std::vector<StateVector> snapshots;  // psi_0 .. psi_T on the state register
};

HistoryState history_state(const Circuit& c, const StateVector& witness, int k);
StateVector materialize_full(const HistoryState& h);

// Block representation of sum_t alpha_t |clock(t)> (x) |psi_t>: column t holds
// beta_t = alpha_t psi_t. H_stab vanishes here and the remaining terms act
// blockwise, independent of the clock dimension.
struct LegalBlocks {
  RegisterShape state_shape;
  Mat blocks;  // state_dim x (T+1)

  double norm() const { return blocks.norm(); }
};

LegalBlocks legal_from_history(const HistoryState& h);
Mat legal_apply(const Circuit& c, const FkOptions& opts, const Mat& blocks);
double legal_expectation(const Circuit& c, const FkOptions& opts, const LegalBlocks& b);

// ---- verification helpers -------------------------------------------------------

struct TraceOrderResult {
  DensityOperator lhs;
  DensityOperator rhs;
  double distance = 0.0;
};

// Lemma check: Tr_{S u time}(Psi Psi^dag) vs the snapshot average. S uses
// full-register site indices (clock qubits first).
TraceOrderResult verify_traceorder(const HistoryState& h, const std::vector<int>& S);

struct ClosenessResult {
  StateVector projected;
  double energy = 0.0;    // <eta|H'|eta>
  double distance = 0.0;  // trace distance between the two pure states
  double bound = 0.0;     // 2 sqrt(energy / gap)
  bool bound_ok = false;
  double gap = 0.0;
};

ClosenessResult closeness_to_history(const StateVector& eta, const HermitianTermSum& hprime,
                                     double gap);

struct KitaevYesResult {
  double p_accept = 0.0;
  double energy = 0.0;  // history-state expectation of the full Hamiltonian
  double bound = 0.0;   // gamma / (T+1)
  bool expectation_ok = false;
  bool eigen_checked = false;
  double lambda_min = 0.0;
  bool ok = false;
};

KitaevYesResult kitaev_yes_bound(const Circuit& c, const StateVector& witness,
                                 double gamma_target);

}  // namespace clockforge
