// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "clockforge/clock.hpp"

namespace clockforge {

// ---- fused qutrit chain -----------------------------------------------------
//
// The cat-circuit clock Hamiltonian pairs time qubit i with state qubit i and
// relabels the three reachable pair states as one qutrit:
//   |time=1, state=x> -> |x>,   |time=0, state=0> -> |2>.
// The fourth pair state |time=0, state=1> never occurs in any snapshot, so
// restricting each term to the 3-dim used subspace preserves the ground space
// and makes every term a contiguous window of at most 3 chain sites. The
// initial-state check becomes the projector onto the deleted pair state and
// drops out entirely: the fusion itself forces the t = 0 snapshot to |2...2>.

struct QutritChainHamiltonian {
  int n = 0;
  HermitianTermSum terms;
  // max |(1 - W W^dag) T W| over fused terms: how far the pair subspace is
  // from invariant. The backward half of each propagation term can recreate
  // the deleted pair state, so this sits at 1/2 rather than 0; the compression
  // W^dag T W of a PSD term is still PSD with the same kernel inside the
  // subspace, which is what the ground-space checks rely on.
  double subspace_leakage = 0.0;
};

QutritChainHamiltonian build_lngs_hamiltonian(int n);

std::vector<StateVector> fused_snapshots(int n);  // phi_0 .. phi_n
StateVector fused_history_state(int n);           // the unique ground state

// ---- observables ------------------------------------------------------------

Mat lngs_observable_a();  // |0><0| + |2><2|
Mat lngs_observable_b();  // |1><1| + |2><2|

// Ground-state expectations in closed form (0-based chain sites i < j):
//   <A_i> = <B_i> = (n + 2 + i) / (2(n+1))
//   <A_i (x) B_j> = (i + j + 2) / (2(n+1))
double lngs_marginal_expectation_exact(int n, int i);
double lngs_cross_expectation_exact(int n, int i, int j);

// ---- noisy ground states ----------------------------------------------------

struct NoisyComponent {
  double p = 1.0;
  std::vector<int> sites;               // the corrupted set S, |S| <= floor(eps n)
  std::vector<ErrorChannel> channels;   // each supported inside S
};

struct NoisyGroundStateSpec {
  double eps = 0.0;
  std::vector<NoisyComponent> components;

  void validate(int n) const;
};

DensityOperator make_noisy_ground_state(int n, const NoisyGroundStateSpec& spec);

// Pure-state decomposition of the same mixture (one branch per Kraus path);
// avoids dense density matrices at larger n.
struct WeightedState {
  double w = 0.0;
  StateVector psi;
};

std::vector<WeightedState> make_noisy_ensemble(int n, const NoisyGroundStateSpec& spec);

std::vector<int> good_indices(int n, const NoisyGroundStateSpec& spec);

NoisyGroundStateSpec sample_noisy_spec(int n, double eps, int components, std::mt19937_64& rng);

// ---- inequality checks ------------------------------------------------------

struct LngsReport {
  int i = 0, j = 0;
  double cross = 0.0;   // Tr(A_i (x) B_j sigma)
  double a_marg = 0.0;  // Tr(A_i sigma)
  double b_marg = 0.0;
  bool cross_ok = false;  // <= 4 eps
  bool a_ok = false;      // >= 1/2 - 8 eps
  bool b_ok = false;
  bool all_ok = false;
};

LngsReport verify_lngs_inequalities(const std::vector<WeightedState>& sigma, int n, int i, int j,
                                    double eps);
LngsReport verify_lngs_inequalities(const DensityOperator& sigma, int i, int j, double eps);

// ---- depth-bound certificate --------------------------------------------------

struct DepthCertificate {
  double bound = 0.0;   // (1/2) log2(n/2)
  double margin = 0.0;  // (1/2 - 8 eps - delta)^2 - delta - 4 eps
};

double depth_margin_raw(double eps, double delta);
// Enforces 0 <= eps < 1/48 and 0 <= delta < 1/8 - 6 eps.
DepthCertificate depth_bound_certificate(int n, double eps, double delta);

// ---- low-depth adversary ------------------------------------------------------

struct AdversaryReport {
  int trials = 0;
  int pairs_checked = 0;
  double max_discrepancy = 0.0;       // |<A(x)B> - <A><B>| over disjoint-cone pairs
  double min_cross_given_margins = 2.0;  // min <A(x)B> among pairs with both marginals >= 0.45
  int margin_cases = 0;
};

// Samples depth-d layered Haar circuits on n qutrits and checks the
// factorization property on pairs (i, j) with j outside the shadow of {i}.
AdversaryReport low_depth_adversary(int n, int depth, int trials, std::mt19937_64& rng);

}  // namespace clockforge
