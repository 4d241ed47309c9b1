// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "clockforge/clock.hpp"

namespace clockforge {

// ---- inner CSS code ------------------------------------------------------------

struct CssCode {
  int n = 0;  // physical qubits
  int k = 0;  // message qubits (the first k sites of the encoder input)
  int d = 1;  // certified minimum distance
  int q = 2;
  Circuit encoder;  // V: message (x) |0^(n-k)> -> codeword
  std::vector<std::string> x_stabs;  // strings over {I,X}, site 0 leftmost
  std::vector<std::string> z_stabs;  // strings over {I,Z}

  int t_v() const { return static_cast<int>(encoder.gates.size()); }
  std::vector<std::string> stabilizers() const {
    std::vector<std::string> s = x_stabs;
    s.insert(s.end(), z_stabs.begin(), z_stabs.end());
    return s;
  }
};

// Fixed [[7,1,3]] CSS instance with a two-local encoder (12 gates).
CssCode steane_like_inner();
// Degenerate stub: k = n, no checks, encoder = one explicit identity gate.
CssCode identity_inner(int n);

Mat pauli_string_matrix(const std::string& s);

// Dense stabilizer generators with signs fixed so the encoded all-zero state
// is a +1 eigenstate of each.
std::vector<Mat> stabilizer_matrices(const CssCode& code);

struct DistanceReport {
  bool certified = false;
  int weight_checked = 0;     // all Paulis up to this weight examined
  int offending_weight = 0;   // 0 if none found
};
// Brute-force check that no Pauli of weight < d commutes with every
// stabilizer without acting trivially on the codespace.
DistanceReport certify_distance(const CssCode& code);

// Syndrome s (bit i = anticommutes with stabilizer i, x_stabs first) to the
// correcting Pauli string; identity for syndromes no weight-1 error produces.
std::vector<std::string> syndrome_corrections(const CssCode& code);

// ---- wait circuit and parameters ------------------------------------------------

// K = smallest integer >= 1 with K/(T_V+K) >= 1 - delta^2/4; returns V's gates
// followed by K labeled identity gates.
std::pair<Circuit, int> build_wait_circuit(const Circuit& v, double delta);

int choose_r(std::int64_t t_c, int n);

struct QlwcParameters {
  int q = 2;
  double delta = 0.0;
  int r = 0;
  int w = 0;           // locality 3 + 2r
  int m = 0;           // blocklength: clock qubits + n
  int d = 0;
  std::int64_t K = 0;
  std::int64_t T_V = 0;
  std::int64_t T_C = 0;
};

struct QlwcCode {
  CssCode inner;
  QlwcParameters params;
  Circuit wait_circuit;
  FkOptions opts;  // in on ancilla sites, no out, clock_dimension = r
};

QlwcCode build_qlwc(const CssCode& inner, double delta);
FkHamiltonian qlwc_hamiltonian(const QlwcCode& code);

// ---- encoding, errors, decoding ---------------------------------------------------
//
// Code states are kept in the legal clock subspace as weighted pure branches;
// each branch is a block matrix whose column t is the (scaled) snapshot at
// time t. Reference qubits for entangled messages sit after the n code sites.

struct LegalEnsemble {
  RegisterShape state_shape;  // n code qubits then reference sites
  std::int64_t T = 0;
  int reference_sites = 0;
  std::vector<std::pair<double, Mat>> branches;  // weight, state_dim x (T+1)
};

// message lives on (k message qubits + reference_sites) qubits, in that order
LegalEnsemble encode(const QlwcCode& code, const StateVector& message, int reference_sites = 0);

// |<pure-wait component|Enc(message)>|^2; >= 1 - delta^2/4 by the K inequality.
double waiting_mass(const QlwcCode& code, const StateVector& message, int reference_sites = 0);

// the wait circuit's gates re-registered on state register + reference sites
Circuit extended_circuit(const Circuit& c, int reference_sites);

// Channel on code-register sites; enforces |support| <= (d-1)/2.
LegalEnsemble apply_error(const QlwcCode& code, const LegalEnsemble& e, const ErrorChannel& ch);

// Erasing a clock qubit commutes with the trace over the time register, so
// the decoder never sees it; recorded here as an explicit no-op.
LegalEnsemble apply_clock_erasure(const LegalEnsemble& e, int time_site);

// Tr_anc(V^dag [syndrome-correct](Tr_time(sigma)) V), on k message qubits + reference.
DensityOperator decode(const QlwcCode& code, const LegalEnsemble& e);
// Full-space variant for tiny instances: sigma over clock qubits + state register.
DensityOperator decode_density(const QlwcCode& code, const DensityOperator& sigma_full,
                               int reference_sites = 0);

double junk_weight(const DensityOperator& decoded, const StateVector& message);

// ---- circuit transformation and verifier pipeline ----------------------------------

// C' = [V, identity x K, V^dag, C] with K = 2 T_V + T_C: waiting fraction 1/2.
Circuit transform_error_corrected(const Circuit& c, const CssCode& inner);

// One wide gate mapping |0...0> to the history state of cprime on the witness.
Circuit history_preparation_circuit(const Circuit& cprime, const StateVector& witness, int k);

struct VerifierReport {
  double p_accept = 0.0;
  double waiting_fraction = 0.0;
  std::int64_t T_prime = 0;
};

// Runs the five-step check on the state D prepares from |0...0>: trace out the
// clock, syndrome-correct, undo V, trace the ancilla, run C, measure site 0.
VerifierReport verifier_pipeline(const Circuit& d, const Circuit& c, const CssCode& inner);

}  // namespace clockforge
