// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "clockforge/linalg.hpp"

namespace clockforge {

struct Gate {
  std::string label;
  std::vector<int> support;
  Mat unitary;

  bool wide() const { return support.size() > 2; }
};

// Built-in named gates: H, X, Y, Z, CNOT, SWAP, identity. `dims` are the
// dimensions of the supported sites.
Mat builtin_gate(const std::string& label, const std::vector<int>& dims);

struct Circuit {
  RegisterShape shape;
  std::vector<Gate> gates;
  int witness_count = 0;  // first witness_count sites form the witness register

  void validate() const;
  int depth_upper_bound() const { return static_cast<int>(gates.size()); }
};

struct Layering {
  std::vector<std::vector<int>> layers;  // gate indices, in order
  int depth() const { return static_cast<int>(layers.size()); }
};

struct LightconeReport {
  std::vector<int> lightcone_gates;
  std::vector<int> lightcone_support;
  std::vector<int> effect_zone_gates;
  std::vector<int> shadow;
};

// Greedy earliest-layer assignment; any valid layering is acceptable for the
// cone analyses, which are defined relative to a given layering.
Layering layerize(const Circuit& c);

Circuit cat_circuit(int n);

LightconeReport lightcone(const Circuit& c, const Layering& l, std::vector<int> target);
LightconeReport effect_zone_and_shadow(const Circuit& c, const Layering& l,
                                       std::vector<int> target);
bool disjoint_lightcones(const Circuit& c, const Layering& l, const std::vector<int>& a,
                         const std::vector<int>& b);

struct FactorizationResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double discrepancy = 0.0;
  bool lightcones_disjoint = false;
};

// Compares Tr(A (x) B rho) with Tr(A rho) Tr(B rho) on rho obtained from the
// circuit output after tracing `traced` (which must avoid both supports).
FactorizationResult factorization_check(const Circuit& c, const HermitianTerm& a,
                                        const HermitianTerm& b,
                                        const std::vector<int>& traced);

void apply_gate(const RegisterShape& shape, const Gate& g, Vec& x);
StateVector simulate(const Circuit& c, const StateVector& input);
// input, then the state after each gate (T+1 entries).
std::vector<StateVector> snapshots(const Circuit& c, const StateVector& input);

// JSON interchange.
Circuit circuit_from_json_text(const std::string& text);
Circuit circuit_from_json_file(const std::string& path);
std::string circuit_to_json_text(const Circuit& c);

}  // namespace clockforge
