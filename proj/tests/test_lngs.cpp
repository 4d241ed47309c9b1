// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "clockforge/lngs.hpp"

using namespace clockforge;

namespace {

double site_expect(const StateVector& psi, int i, const Mat& op) {
  HermitianTerm t{{i}, op.sparseView(), TermTag::other};
  return expectation_term(psi.shape, t, psi.amplitudes);
}

double pair_expect(const StateVector& psi, int i, int j, const Mat& a, const Mat& b) {
  Mat ab = kron(a, b);
  std::vector<int> sup = i < j ? std::vector<int>{i, j} : std::vector<int>{j, i};
  Mat local = i < j ? ab : kron(b, a);
  HermitianTerm t{sup, local.sparseView(), TermTag::other};
  return expectation_term(psi.shape, t, psi.amplitudes);
}

}  // namespace

TEST_CASE("fused chain Hamiltonian shape") {
  for (int n : {2, 5, 10}) {
    QutritChainHamiltonian h = build_lngs_hamiltonian(n);
    CHECK(h.n == n);
    // the pair subspace is not invariant (the backward propagation step can
    // recreate the deleted pair state), but the overshoot is bounded
    CHECK(h.subspace_leakage <= 0.5 + 1e-9);
    CHECK(audit_term_norms(h.terms) <= 1.0 + 1e-9);
    for (const auto& t : h.terms.terms) {
      REQUIRE(!t.support.empty());
      CHECK(static_cast<int>(t.support.size()) <= 3);
      // contiguous window on the chain
      CHECK(t.support.back() - t.support.front() ==
            static_cast<int>(t.support.size()) - 1);
    }
  }
}

TEST_CASE("fused snapshots and the n = 2 ground state") {
  auto snaps = fused_snapshots(3);
  REQUIRE(snaps.size() == 4);
  CHECK(std::abs(snaps[0].amplitudes(2 * 9 + 2 * 3 + 2) - 1.0) < 1e-14);  // |222>
  double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(snaps[1].amplitudes(0 * 9 + 2 * 3 + 2) - s) < 1e-14);  // |022>
  CHECK(std::abs(snaps[1].amplitudes(1 * 9 + 2 * 3 + 2) - s) < 1e-14);  // |122>
  CHECK(std::abs(snaps[3].amplitudes(0) - s) < 1e-14);                  // |000>
  CHECK(std::abs(snaps[3].amplitudes(13) - s) < 1e-14);                 // |111>

  StateVector g = fused_history_state(2);
  CHECK(g.norm() == doctest::Approx(1.0));
  double a = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(g.amplitudes(8) - a) < 1e-12);              // |22>
  CHECK(std::abs(g.amplitudes(2) - a * s) < 1e-12);          // |02>
  CHECK(std::abs(g.amplitudes(5) - a * s) < 1e-12);          // |12>
  CHECK(std::abs(g.amplitudes(0) - a * s) < 1e-12);          // |00>
  CHECK(std::abs(g.amplitudes(4) - a * s) < 1e-12);          // |11>
}

TEST_CASE("ground state is unique with a gap") {
  for (int n : {2, 4, 6}) {
    QutritChainHamiltonian h = build_lngs_hamiltonian(n);
    StateVector g = fused_history_state(n);
    CHECK(expectation(h.terms, g) == doctest::Approx(0.0).epsilon(1e-12));
    EigResult eig = eigensolve_hermitian(h.terms, 2);
    CHECK(eig.values(0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(eig.values(1) > 1e-4);
    CHECK(std::abs(eig.vectors.col(0).dot(g.amplitudes)) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("closed-form ground-state expectations") {
  int n = 6;
  StateVector g = fused_history_state(n);
  Mat a = lngs_observable_a(), b = lngs_observable_b();
  for (int i = 0; i < n; ++i) {
    CHECK(site_expect(g, i, a) ==
          doctest::Approx(lngs_marginal_expectation_exact(n, i)).epsilon(1e-10));
    CHECK(site_expect(g, i, b) ==
          doctest::Approx(lngs_marginal_expectation_exact(n, i)).epsilon(1e-10));
    for (int j = i + 1; j < n; ++j)
      CHECK(pair_expect(g, i, j, a, b) ==
            doctest::Approx(lngs_cross_expectation_exact(n, i, j)).epsilon(1e-10));
  }
  // the two-point function never vanishes on the clean ground state; its
  // smallest value is (0 + 1 + 2) / (2(n+1))
  CHECK(lngs_cross_expectation_exact(n, 0, 1) > 0.2 / (n + 1));
}

TEST_CASE("noisy ground states") {
  std::mt19937_64 rng(61);
  int n = 6;
  double eps = 0.34;  // floor(eps n) = 2 corrupted sites allowed
  NoisyGroundStateSpec spec = sample_noisy_spec(n, eps, 3, rng);
  spec.validate(n);
  CHECK(spec.components.size() == 3);
  double ptot = 0;
  for (const auto& comp : spec.components) {
    ptot += comp.p;
    CHECK(static_cast<int>(comp.sites.size()) <= 2);
  }
  CHECK(ptot == doctest::Approx(1.0));

  auto ens = make_noisy_ensemble(n, spec);
  double wtot = 0;
  for (const auto& ws : ens) wtot += ws.w;
  CHECK(wtot == doctest::Approx(1.0));

  DensityOperator sigma = make_noisy_ground_state(n, spec);
  sigma.validate();
  // density and ensemble forms agree
  Mat dens = Mat::Zero(sigma.matrix.rows(), sigma.matrix.cols());
  for (const auto& ws : ens)
    dens += ws.w * (ws.psi.amplitudes * ws.psi.amplitudes.adjoint());
  CHECK((dens - sigma.matrix).cwiseAbs().maxCoeff() < 1e-12);

  // per component: tracing out the corrupted sites recovers the clean marginal
  DensityOperator clean = DensityOperator::pure(fused_history_state(n));
  for (const auto& comp : spec.components) {
    NoisyGroundStateSpec one;
    one.eps = eps;
    one.components = {comp};
    one.components[0].p = 1.0;
    DensityOperator sl = make_noisy_ground_state(n, one);
    CHECK(trace_distance(partial_trace(sl, comp.sites), partial_trace(clean, comp.sites)) <
          1e-12);
  }

  // good = aggregate corruption probability at most 2 eps; Markov guarantees
  // at least half the chain qualifies
  std::vector<int> good = good_indices(n, spec);
  CHECK(static_cast<int>(good.size()) >= (n + 1) / 2);
  for (int gidx : good) {
    double weight = 0.0;
    for (const auto& comp : spec.components)
      for (int s : comp.sites)
        if (s == gidx) weight += comp.p;
    CHECK(weight <= 2 * eps + 1e-12);
  }
}

TEST_CASE("inequality report on good indices") {
  std::mt19937_64 rng(67);
  int n = 6;
  double eps = 0.34;
  NoisyGroundStateSpec spec = sample_noisy_spec(n, eps, 2, rng);
  auto ens = make_noisy_ensemble(n, spec);
  // sites no component touches keep their exact clean marginals
  std::vector<int> clean;
  for (int s = 0; s < n; ++s) {
    bool hit = false;
    for (const auto& comp : spec.components)
      for (int cs : comp.sites) hit = hit || cs == s;
    if (!hit) clean.push_back(s);
  }
  REQUIRE(clean.size() >= 2);
  int i = clean.front(), j = clean.back();
  LngsReport r = verify_lngs_inequalities(ens, n, i, j, eps);
  CHECK(r.a_marg == doctest::Approx(lngs_marginal_expectation_exact(n, i)).epsilon(1e-10));
  CHECK(r.b_marg == doctest::Approx(lngs_marginal_expectation_exact(n, j)).epsilon(1e-10));
  CHECK(r.a_ok);
  CHECK(r.b_ok);
  // density-operator overload gives the same numbers
  LngsReport rd = verify_lngs_inequalities(make_noisy_ground_state(n, spec), i, j, eps);
  CHECK(rd.cross == doctest::Approx(r.cross).epsilon(1e-10));
  CHECK(rd.a_marg == doctest::Approx(r.a_marg).epsilon(1e-10));

  // At small eps the clean two-point value exceeds the 4 eps threshold, so the
  // cross check cannot pass on the exact ground state: floor(eps n) = 0 makes
  // sigma equal to the ground state and <A_i B_j> = (i + j + 2) / (2(n+1)).
  double small = 1.0 / 60.0;
  NoisyGroundStateSpec trivial;
  trivial.eps = small;
  trivial.components.push_back(NoisyComponent{1.0, {}, {}});
  LngsReport rs = verify_lngs_inequalities(make_noisy_ensemble(n, trivial), n, 0, 1, small);
  CHECK(rs.cross == doctest::Approx(lngs_cross_expectation_exact(n, 0, 1)).epsilon(1e-10));
  CHECK(rs.cross > 4 * small);
  CHECK_FALSE(rs.cross_ok);
}

TEST_CASE("A (x) B has no cross-snapshot matrix elements") {
  // A_i (x) B_j is diagonal in the qutrit basis and distinct snapshots occupy
  // disjoint basis states, so every off-diagonal snapshot pair vanishes
  for (int n : {3, 8}) {
    auto snaps = fused_snapshots(n);
    Mat ab = kron(lngs_observable_a(), lngs_observable_b());
    HermitianTerm t{{0, n - 1}, ab.sparseView(), TermTag::other};
    RegisterShape shape = RegisterShape::qutrits(n);
    Mat full = embed_dense(shape, {0, n - 1}, ab);
    for (size_t u = 0; u < snaps.size(); ++u)
      for (size_t v = 0; v < u; ++v)
        CHECK(std::abs(snaps[u].amplitudes.dot(full * snaps[v].amplitudes)) < 1e-14);
  }
}

TEST_CASE("pre-fusion history never populates the deleted pair state") {
  int n = 4;
  HistoryState h = history_state(cat_circuit(n), StateVector{}, 1);
  StateVector psi = materialize_full(h);
  auto strides = psi.shape.strides();
  for (std::int64_t idx = 0; idx < psi.amplitudes.size(); ++idx) {
    if (std::abs(psi.amplitudes(idx)) < 1e-14) continue;
    for (int i = 0; i < n; ++i) {
      int time_bit = static_cast<int>((idx / strides[n - 1 - i]) % 2);  // position i+1
      int state_bit = static_cast<int>((idx / strides[n + i]) % 2);
      CHECK((time_bit == 1 || state_bit == 0));
    }
  }
}

TEST_CASE("depth bound certificate") {
  DepthCertificate c0 = depth_bound_certificate(32, 0.0, 0.0);
  CHECK(c0.bound == doctest::Approx(2.0));
  CHECK(c0.margin == doctest::Approx(0.25));
  DepthCertificate c1 = depth_bound_certificate(32, 1.0 / 48.0 - 1e-12, 0.0);
  CHECK(c1.margin == doctest::Approx(1.0 / 36.0).epsilon(1e-6));
  CHECK_THROWS_AS(depth_bound_certificate(32, 1.0 / 48.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(depth_bound_certificate(32, 0.0, 0.125), std::invalid_argument);
  // raw margin at the flagship parameters is negative: the delta requested
  // there sits outside the certified range (needs delta < 1/8 - 6 eps and a
  // positive quadratic margin, which caps delta near 0.04 at eps = 1/60)
  double raw = depth_margin_raw(1.0 / 60.0, 0.05);
  CHECK(raw == doctest::Approx(-0.0163889).epsilon(1e-4));
  CHECK(depth_margin_raw(1.0 / 60.0, 0.03) > 0.0);
}

TEST_CASE("low-depth circuits cannot fake the two-point function") {
  std::mt19937_64 rng(71);
  AdversaryReport r0 = low_depth_adversary(6, 0, 3, rng);
  CHECK(r0.pairs_checked > 0);
  CHECK(r0.max_discrepancy < 1e-10);
  AdversaryReport r1 = low_depth_adversary(6, 1, 3, rng);
  CHECK(r1.pairs_checked > 0);
  CHECK(r1.max_discrepancy < 1e-10);
  // whenever both marginals clear 0.45, the product (hence the cross term)
  // stays far above the 4 eps = 1/15 threshold
  if (r1.margin_cases > 0) CHECK(r1.min_cross_given_margins > 0.2);
}
