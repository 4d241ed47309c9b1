// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "clockforge/clock.hpp"

using namespace clockforge;

namespace {

// sum_t |clock(t)> (x) blocks.col(t), on the register the Hamiltonian uses
StateVector blocks_to_full(const FkHamiltonian& fk, const Mat& blocks) {
  std::int64_t sdim = fk.circuit.shape.total();
  Vec x = Vec::Zero(fk.terms.shape.total());
  for (std::int64_t t = 0; t <= fk.T; ++t) {
    StateVector ct = clock_state(fk.k, t, fk.T);
    std::int64_t base = 0;
    for (std::int64_t i = 0; i < ct.amplitudes.size(); ++i)
      if (std::abs(ct.amplitudes(i)) > 0.5) base = i;
    x.segment(base * sdim, sdim) += blocks.col(t);
  }
  return StateVector(fk.terms.shape, std::move(x));
}

Mat full_to_blocks(const FkHamiltonian& fk, const Vec& x) {
  std::int64_t sdim = fk.circuit.shape.total();
  Mat b(sdim, fk.T + 1);
  for (std::int64_t t = 0; t <= fk.T; ++t) {
    StateVector ct = clock_state(fk.k, t, fk.T);
    std::int64_t base = 0;
    for (std::int64_t i = 0; i < ct.amplitudes.size(); ++i)
      if (std::abs(ct.amplitudes(i)) > 0.5) base = i;
    b.col(t) = x.segment(base * sdim, sdim);
  }
  return b;
}

}  // namespace

TEST_CASE("register length") {
  CHECK(clock_register_len(5, 1) == 5);
  CHECK(clock_register_len(8, 2) == 3);   // 3^2 = 9 >= 8
  CHECK(clock_register_len(9, 2) == 3);
  CHECK(clock_register_len(10, 2) == 4);  // 3^2 < 10 <= 4^2
  CHECK(clock_register_len(192, 3) == 6); // 5^3 < 192 <= 6^3
  CHECK(clock_register_len(0, 2) == 0);
}

TEST_CASE("digit maps") {
  CHECK(positional_digits(5, 4, 2) == std::vector<int>{1, 1});
  // reflected code: the low digit flips direction when the higher digits sum odd
  CHECK(gray_digits(5, 4, 2) == std::vector<int>{2, 1});
  // k = 1 reduces to the identity map
  for (std::int64_t t = 0; t <= 9; ++t) CHECK(gray_digits(t, 10, 1) == positional_digits(t, 10, 1));
}

TEST_CASE("reflected digits step by one in one register") {
  for (int k : {1, 2, 3}) {
    for (std::int64_t T : {1, 5, 17, 80}) {
      int L = clock_register_len(T, k);
      int d = L + 1;
      // injectivity over the whole range plus the single-step property
      std::vector<std::vector<int>> seen;
      for (std::int64_t t = 0; t <= T; ++t) {
        std::vector<int> a = gray_digits(t, d, k);
        for (auto& s : seen) CHECK(s != a);
        seen.push_back(a);
        if (t == 0) continue;
        std::vector<int> p = gray_digits(t - 1, d, k);
        int changed = 0;
        for (int i = 0; i < k; ++i)
          if (a[i] != p[i]) {
            ++changed;
            CHECK(std::abs(a[i] - p[i]) == 1);
          }
        CHECK(changed == 1);
      }
    }
  }
}

TEST_CASE("clock states are orthonormal basis vectors") {
  for (int k : {1, 2}) {
    std::int64_t T = 8;
    for (std::int64_t t = 0; t <= T; ++t) {
      StateVector a = clock_state(k, t, T);
      CHECK(a.norm() == doctest::Approx(1.0));
      for (std::int64_t u = 0; u < t; ++u)
        CHECK(std::abs(a.inner(clock_state(k, u, T))) < 1e-14);
    }
  }
  // unary layout: |1^t 0^(T-t)> with position 1 rightmost
  for (std::int64_t t = 0; t <= 4; ++t) {
    StateVector u = unary_state(t, 4);
    std::int64_t expect = (std::int64_t(1) << t) - 1;
    CHECK(std::abs(u.amplitudes(expect) - 1.0) < 1e-14);
  }
}

TEST_CASE("term locality stays within 2k + 3") {
  for (int k : {1, 2, 3}) {
    Circuit c = cat_circuit(9);
    FkOptions opts;
    opts.clock_dimension = k;
    opts.in_checked = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    FkHamiltonian fk = build_fk_hamiltonian(c, opts);
    CHECK(fk.terms.max_support() <= 2 * k + 3);
    CHECK(audit_term_norms(fk.terms) <= 1.0 + 1e-9);
  }
}

TEST_CASE("history state has zero energy") {
  for (int k : {1, 2}) {
    Circuit c = cat_circuit(3);
    FkOptions opts;
    opts.clock_dimension = k;
    opts.in_checked = {0, 1, 2};
    FkHamiltonian fk = build_fk_hamiltonian(c, opts);
    HistoryState h = history_state(c, StateVector{}, k);
    StateVector psi = materialize_full(h);
    CHECK(psi.shape == fk.terms.shape);
    CHECK(psi.norm() == doctest::Approx(1.0));
    CHECK(expectation(fk.terms, psi) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(legal_expectation(c, opts, legal_from_history(h)) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("legal subspace is invariant and blockwise application is exact") {
  std::mt19937_64 rng(29);
  for (int k : {1, 2}) {
    Circuit c;
    c.shape = RegisterShape::qubits(2);
    c.gates.push_back(Gate{"A", {0}, haar_unitary(2, rng)});
    c.gates.push_back(Gate{"B", {0, 1}, haar_unitary(4, rng)});
    c.gates.push_back(Gate{"C", {1}, haar_unitary(2, rng)});
    c.gates.push_back(Gate{"D", {0, 1}, haar_unitary(4, rng)});
    FkOptions opts;
    opts.clock_dimension = k;
    opts.include_out = true;
    opts.in_checked = {0, 1};
    FkHamiltonian fk = build_fk_hamiltonian(c, opts);

    Mat blocks(c.shape.total(), fk.T + 1);
    for (std::int64_t t = 0; t <= fk.T; ++t)
      blocks.col(t) = random_state(c.shape, rng).amplitudes;
    blocks /= blocks.norm();

    StateVector x = blocks_to_full(fk, blocks);
    Vec hx = apply_term_sum_serial(fk.terms, x.amplitudes);
    // H maps the legal subspace to itself...
    Mat hb_from_full = full_to_blocks(fk, hx);
    StateVector back = blocks_to_full(fk, hb_from_full);
    CHECK((back.amplitudes - hx).cwiseAbs().maxCoeff() < 1e-11);
    // ...and acts there exactly as the blockwise formula, clock dim included
    Mat hb = legal_apply(c, opts, blocks);
    CHECK((hb - hb_from_full).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("stabilizer terms vanish on legal states") {
  Circuit c = cat_circuit(3);
  FkOptions opts;
  opts.clock_dimension = 2;
  opts.in_checked = {0, 1, 2};
  FkHamiltonian fk = build_fk_hamiltonian(c, opts);
  HistoryState h = history_state(c, StateVector{}, 2);
  StateVector psi = materialize_full(h);
  for (const auto& t : fk.terms.terms)
    if (t.tag == TermTag::stab)
      CHECK(expectation_term(fk.terms.shape, t, psi.amplitudes) ==
            doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("kitaev yes instances") {
  SUBCASE("X gate accepts deterministically") {
    Circuit c;
    c.shape = RegisterShape::qubits(1);
    c.gates.push_back(Gate{"X", {0}, builtin_gate("X", {2})});
    KitaevYesResult r = kitaev_yes_bound(c, StateVector{}, 0.0);
    CHECK(r.p_accept == doctest::Approx(1.0));
    CHECK(r.energy == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.ok);
  }
  SUBCASE("rotation accepting with probability 3/4") {
    Mat ry(2, 2);
    double cth = 0.5, sth = std::sqrt(3.0) / 2.0;
    ry << cth, -sth, sth, cth;
    Circuit c;
    c.shape = RegisterShape::qubits(1);
    c.gates.push_back(Gate{"Ry", {0}, ry});
    KitaevYesResult r = kitaev_yes_bound(c, StateVector{}, 0.25);
    CHECK(r.p_accept == doctest::Approx(0.75));
    CHECK(r.energy == doctest::Approx(0.125));  // (1 - p) / (T + 1)
    CHECK(r.bound == doctest::Approx(0.125));
    CHECK(r.ok);
    CHECK(r.eigen_checked);
    CHECK(r.lambda_min <= r.energy + 1e-8);
  }
  SUBCASE("identity circuit always rejects and the spectrum shows it") {
    Circuit c;
    c.shape = RegisterShape::qubits(1);
    c.gates.push_back(Gate{"identity", {0}, Mat::Identity(2, 2)});
    FkOptions opts;
    opts.include_out = true;
    opts.in_checked = {0};
    FkHamiltonian fk = build_fk_hamiltonian(c, opts);
    EigResult eig = eigensolve_hermitian(fk.terms, 1);
    CHECK(eig.values(0) > 1e-3);
  }
}

TEST_CASE("closeness bound: two-level instance is tight") {
  RegisterShape s = RegisterShape::qubits(1);
  HermitianTermSum h(s);
  Mat pi1 = Mat::Zero(2, 2);
  pi1(1, 1) = 1;  // H' = gap * |1><1|, ground space = span|0>
  double gap = 0.7;
  h.add_term({0}, gap * pi1, TermTag::other);
  for (double theta : {0.1, 0.4, 1.0}) {
    Vec v(2);
    v << std::cos(theta), std::sin(theta);
    ClosenessResult r = closeness_to_history(StateVector(s, v), h, gap);
    CHECK(r.energy == doctest::Approx(gap * std::sin(theta) * std::sin(theta)));
    CHECK(r.distance == doctest::Approx(2.0 * std::abs(std::sin(theta))));
    CHECK(r.bound == doctest::Approx(r.distance).epsilon(1e-9));
    CHECK(r.bound_ok);
  }
}

TEST_CASE("closeness bound holds on random perturbed history states") {
  std::mt19937_64 rng(37);
  Circuit c = cat_circuit(2);
  FkOptions opts;
  opts.in_checked = {0, 1};
  FkHamiltonian fk = build_fk_hamiltonian(c, opts);
  EigResult eig = eigensolve_hermitian(fk.terms, 2);
  REQUIRE(eig.values(0) == doctest::Approx(0.0).epsilon(1e-10));
  double gap = eig.values(1);
  REQUIRE(gap > 1e-6);
  HistoryState h = history_state(c, StateVector{}, 1);
  Vec psi = materialize_full(h).amplitudes;
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    Vec noise(psi.size());
    for (std::int64_t i = 0; i < noise.size(); ++i) noise(i) = cplx(g(rng), g(rng));
    Vec eta = psi + 0.2 * noise / noise.norm();
    eta /= eta.norm();
    ClosenessResult r = closeness_to_history(StateVector(fk.terms.shape, eta), fk.terms, gap);
    CHECK(r.bound_ok);
  }
}

TEST_CASE("partial trace of a history state averages the snapshots") {
  SUBCASE("cat circuit, several marginals") {
    Circuit c = cat_circuit(3);
    for (int k : {1, 2}) {
      HistoryState h = history_state(c, StateVector{}, k);
      int nt = k * clock_register_len(h.T, k);
      TraceOrderResult r0 = verify_traceorder(h, {});
      CHECK(r0.distance < 1e-12);
      TraceOrderResult r1 = verify_traceorder(h, {nt + 1});
      CHECK(r1.distance < 1e-12);
      TraceOrderResult r2 = verify_traceorder(h, {nt + 0, nt + 2});
      CHECK(r2.distance < 1e-12);
    }
  }
  SUBCASE("random circuits and random traced sets") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
      int n = 2 + static_cast<int>(rng() % 2);  // 2..3 state qubits
      Circuit c;
      c.shape = RegisterShape::qubits(n);
      int T = 2 + static_cast<int>(rng() % 3);
      for (int t = 0; t < T; ++t) {
        int a = static_cast<int>(rng() % n);
        int b = static_cast<int>(rng() % n);
        if (a == b) {
          c.gates.push_back(Gate{"u", {a}, haar_unitary(2, rng)});
        } else {
          if (a > b) std::swap(a, b);
          c.gates.push_back(Gate{"u", {a, b}, haar_unitary(4, rng)});
        }
      }
      int k = 1 + static_cast<int>(rng() % 2);
      HistoryState h = history_state(c, StateVector{}, k);
      int nt = k * clock_register_len(h.T, k);
      std::vector<int> S;
      for (int s = 0; s < n; ++s)
        if (rng() % 2) S.push_back(nt + s);
      if (static_cast<int>(S.size()) == n) S.pop_back();  // keep a nontrivial remainder
      TraceOrderResult r = verify_traceorder(h, S);
      CHECK(r.distance < 1e-12);
    }
  }
}

TEST_CASE("ground space of the checked cat Hamiltonian is the history state") {
  Circuit c = cat_circuit(3);
  FkOptions opts;
  opts.in_checked = {0, 1, 2};
  FkHamiltonian fk = build_fk_hamiltonian(c, opts);
  EigResult eig = eigensolve_hermitian(fk.terms, 2);
  CHECK(eig.values(0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(eig.values(1) > 1e-6);  // unique ground state
  Vec psi = materialize_full(history_state(c, StateVector{}, 1)).amplitudes;
  CHECK(std::abs(cplx(eig.vectors.col(0).dot(psi))) == doctest::Approx(1.0).epsilon(1e-8));
}
