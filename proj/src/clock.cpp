// SPDX-License-Identifier: Apache-2.0
#include "clockforge/clock.hpp"

#include <map>

namespace clockforge {

int clock_register_len(std::int64_t T, int k) {
  if (T < 0) throw std::invalid_argument("T must be nonnegative");
  if (k < 1) throw std::invalid_argument("clock dimension must be >= 1");
  if (k == 1) return static_cast<int>(T);
  std::int64_t L = 0;
  auto pow_ge = [&](std::int64_t base) {
    std::int64_t p = 1;
    for (int i = 0; i < k; ++i) {
      if (base != 0 && p > T / base + 1) return true;
      p *= base;
    }
    return p >= T;
  };
  while (!pow_ge(L)) ++L;
  return static_cast<int>(L);
}

std::vector<int> positional_digits(std::int64_t t, int d, int k) {
  std::vector<int> b(k);
  for (int i = 0; i < k; ++i) {
    b[i] = static_cast<int>(t % d);
    t /= d;
  }
  if (t != 0) throw std::invalid_argument("time value exceeds digit capacity");
  return b;
}

std::vector<int> gray_digits(std::int64_t t, int d, int k) {
  std::int64_t cap = 1;
  for (int i = 0; i < k; ++i) {
    if (cap > (std::int64_t(1) << 60) / d) throw std::overflow_error("digit capacity overflow");
    cap *= d;
  }
  if (t < 0 || t >= cap) throw std::invalid_argument("time value exceeds digit capacity");
  // reflected counting: each digit sweeps up, and whenever it lands on an odd
  // value the lower digits run through their range backwards
  std::vector<int> a(k);
  for (int i = k - 1; i >= 0; --i) {
    cap /= d;
    int m = static_cast<int>(t / cap);
    a[i] = m;
    std::int64_t r = t % cap;
    t = (m % 2 == 1) ? cap - 1 - r : r;
  }
  return a;
}

ClockLabel clock_label(int k, std::int64_t t, std::int64_t T) {
  if (t < 0 || t > T) throw std::invalid_argument("time value out of range");
  ClockLabel l;
  l.k = k;
  l.t = t;
  l.T = T;
  l.d = clock_register_len(T, k) + 1;
  l.digits = gray_digits(t, l.d, k);
  return l;
}

namespace {

// Register i (1-based) occupies qubits (i-1)L .. iL-1; its position p
// (1-based, 1..L) sits at qubit (i-1)L + (L-p), so position 1 is the
// rightmost (fastest) qubit of the register.
int time_site(int i, int p, int L) { return (i - 1) * L + (L - p); }

// Digit value j on register i as a qubit pattern: (site, bit) pairs. Sites
// not listed carry identity.
std::vector<std::pair<int, int>> v_pattern(int i, int j, int L) {
  std::vector<std::pair<int, int>> v;
  if (L == 0) return v;
  if (j == 0) {
    v.push_back({time_site(i, 1, L), 0});
  } else if (j == L) {
    v.push_back({time_site(i, L, L), 1});
  } else {
    v.push_back({time_site(i, j, L), 1});
    v.push_back({time_site(i, j + 1, L), 0});
  }
  return v;
}

std::map<int, int> u_pattern(const std::vector<int>& digits, int L) {
  std::map<int, int> m;
  for (int i = 1; i <= static_cast<int>(digits.size()); ++i)
    for (auto [s, b] : v_pattern(i, digits[i - 1], L)) m[s] = b;
  return m;
}

// |ket pattern><bra pattern| with identity on sites of `dst` outside the
// pattern. ket and bra must share the same site set.
Mat pattern_op(const RegisterShape& full, const std::map<int, int>& ket,
               const std::map<int, int>& bra, const std::vector<int>& dst) {
  std::vector<int> sites;
  for (auto& [s, b] : ket) sites.push_back(s);
  std::int64_t dim = std::int64_t(1) << sites.size();
  std::int64_t row = 0, col = 0;
  for (int s : sites) {
    row = 2 * row + ket.at(s);
    col = 2 * col + bra.at(s);
  }
  Mat own = Mat::Zero(dim, dim);
  own(row, col) = 1;
  return reindex_local(full, sites, own, dst);
}

Mat qudit_projector(int dim, int level) {
  Mat p = Mat::Zero(dim, dim);
  p(level, level) = 1;
  return p;
}

std::int64_t clock_index(const std::vector<int>& digits, int L) {
  int n = static_cast<int>(digits.size()) * L;
  std::map<int, int> bits;
  for (int i = 1; i <= static_cast<int>(digits.size()); ++i)
    for (int p = 1; p <= L; ++p) bits[time_site(i, p, L)] = (p <= digits[i - 1]) ? 1 : 0;
  std::int64_t idx = 0;
  for (int s = 0; s < n; ++s) idx = 2 * idx + bits[s];
  return idx;
}

}  // namespace

StateVector clock_state(int k, std::int64_t t, std::int64_t T) {
  ClockLabel l = clock_label(k, t, T);
  int L = l.d - 1;
  RegisterShape shape = RegisterShape::qubits(k * L);
  return StateVector::basis(shape, clock_index(l.digits, L));
}

StateVector unary_state(std::int64_t t, std::int64_t T) { return clock_state(1, t, T); }

FkHamiltonian build_fk_hamiltonian(const Circuit& c, const FkOptions& opts) {
  c.validate();
  const int k = opts.clock_dimension;
  const std::int64_t T = static_cast<std::int64_t>(c.gates.size());
  const int L = clock_register_len(T, k);
  const int d = L + 1;
  const int nt = k * L;

  for (int s : opts.in_checked) c.shape.check_site(s);

  std::vector<int> dims(nt, 2);
  dims.insert(dims.end(), c.shape.dims.begin(), c.shape.dims.end());

  FkHamiltonian fk;
  fk.terms = HermitianTermSum(RegisterShape(dims));
  fk.circuit = c;
  fk.opts = opts;
  fk.k = k;
  fk.d = d;
  fk.T = T;
  fk.time_qubits = nt;
  const RegisterShape& full = fk.terms.shape;

  if (opts.include_in) {
    std::map<int, int> u0 = u_pattern(gray_digits(0, d, k), L);
    for (int s : opts.in_checked) {
      int g = nt + s;
      std::vector<int> supp;
      for (auto& [site, b] : u0) supp.push_back(site);
      supp.push_back(g);
      Mat pi1 = reindex_local(full, {g}, qudit_projector(c.shape.dims[s], 1), supp);
      Mat m = u0.empty() ? pi1 : Mat(pattern_op(full, u0, u0, supp) * pi1);
      fk.terms.add_term(supp, m, TermTag::in);
    }
  }

  for (std::int64_t t = 1; t <= T; ++t) {
    std::vector<int> prev = gray_digits(t - 1, d, k);
    std::vector<int> cur = gray_digits(t, d, k);
    int istar = -1;
    for (int i = 0; i < k; ++i)
      if (prev[i] != cur[i]) {
        if (istar >= 0 || std::abs(prev[i] - cur[i]) != 1)
          throw std::logic_error("digit code lost the single-step property");
        istar = i;
      }
    if (istar < 0) throw std::logic_error("consecutive times share a digit tuple");

    // Transition pattern: on the stepping register, both unary encodings
    // restricted to the union of the two digit patterns; elsewhere the shared
    // digit pattern on both sides.
    std::map<int, int> ket, bra;
    for (int i = 1; i <= k; ++i) {
      if (i - 1 == istar) {
        std::map<int, int> sites;
        for (auto [s, b] : v_pattern(i, prev[i - 1], L)) sites[s] = 0;
        for (auto [s, b] : v_pattern(i, cur[i - 1], L)) sites[s] = 0;
        for (auto& [s, unused] : sites) {
          int p = L - (s - (i - 1) * L);
          ket[s] = (p <= cur[i - 1]) ? 1 : 0;
          bra[s] = (p <= prev[i - 1]) ? 1 : 0;
        }
      } else {
        for (auto [s, b] : v_pattern(i, cur[i - 1], L)) ket[s] = bra[s] = b;
      }
    }
    std::map<int, int> acur = u_pattern(cur, L);
    std::map<int, int> aprev = u_pattern(prev, L);

    const Gate& gate = c.gates[t - 1];
    std::vector<int> gate_glob;
    for (int s : gate.support) gate_glob.push_back(nt + s);

    std::vector<int> supp;
    for (auto& [s, b] : ket) supp.push_back(s);
    {
      std::vector<int> gs = gate_glob;
      std::sort(gs.begin(), gs.end());
      supp.insert(supp.end(), gs.begin(), gs.end());
    }

    // assembled sparsely: supports reach 2k+3 sites and dense products get slow
    SpMat step = pattern_op(full, ket, bra, supp).sparseView(1.0, 1e-16);
    SpMat gmat = reindex_local(full, gate_glob, gate.unitary, supp).sparseView(1.0, 1e-16);
    SpMat trans = step * gmat;
    SpMat m = 0.5 * (pattern_op(full, acur, acur, supp).sparseView(1.0, 1e-16) +
                     pattern_op(full, aprev, aprev, supp).sparseView(1.0, 1e-16) - trans -
                     SpMat(trans.adjoint()));
    fk.terms.add_term_sparse(supp, std::move(m), TermTag::prop);
  }

  if (opts.include_out) {
    std::map<int, int> uT = u_pattern(gray_digits(T, d, k), L);
    int g = nt + 0;
    std::vector<int> supp;
    for (auto& [site, b] : uT) supp.push_back(site);
    supp.push_back(g);
    Mat pi0 = reindex_local(full, {g}, qudit_projector(c.shape.dims[0], 0), supp);
    Mat m = uT.empty() ? pi0 : Mat(pattern_op(full, uT, uT, supp) * pi0);
    fk.terms.add_term(supp, m, TermTag::out);
  }

  // Penalize 0-then-1 within each unary register (position p low, p+1 high).
  for (int i = 1; i <= k; ++i)
    for (int p = 1; p < L; ++p) {
      std::vector<int> supp = {time_site(i, p + 1, L), time_site(i, p, L)};
      Mat m = Mat::Zero(4, 4);
      m(2, 2) = 1;  // first (slow) site = position p+1 at |1>, second = position p at |0>
      fk.terms.add_term(supp, m, TermTag::stab);
    }

  // Digit tuples past T are valid unary patterns that no other term touches;
  // pin them so the kernel is exactly the history-state span. A tuple exceeds
  // T iff at the most significant register where it differs from T's digits
  // its digit lies beyond T's in the current sweep direction, so each penalty
  // is T's exact pattern on the higher registers plus one qubit on the
  // differing register: at most (2k-1)-local and disjoint from the path.
  if (L > 0) {
    std::vector<int> tdig = gray_digits(T, d, k);
    for (int i = k - 1; i >= 0; --i) {
      int par = 0;
      for (int j = i + 1; j < k; ++j) par += tdig[j];
      bool ascending = par % 2 == 0;  // sweep direction of digit i under T's higher digits
      int c = tdig[i];
      int site = -1, bit = 0;
      if (ascending && c < L) {
        site = time_site(i + 1, c + 1, L);  // digit > c: position c+1 occupied
        bit = 1;
      } else if (!ascending && c > 0) {
        site = time_site(i + 1, c, L);  // digit < c: position c empty
        bit = 0;
      }
      if (site < 0) continue;
      std::map<int, int> pat;
      for (int j = i + 1; j < k; ++j)
        for (auto [s, b] : v_pattern(j + 1, tdig[j], L)) pat[s] = b;
      pat[site] = bit;
      std::vector<int> supp;
      for (auto& [s, b] : pat) supp.push_back(s);
      fk.terms.add_term(supp, pattern_op(full, pat, pat, supp), TermTag::stab);
    }
  }

  return fk;
}

HistoryState history_state(const Circuit& c, const StateVector& witness, int k) {
  c.validate();
  const int wc = c.witness_count;
  std::vector<int> wsites(wc);
  for (int i = 0; i < wc; ++i) wsites[i] = i;
  RegisterShape wshape = c.shape.subset(wsites);
  bool empty_ok = wc == 0 && witness.amplitudes.size() == 0;
  if (!empty_ok) {
    if (!(witness.shape == wshape)) throw std::invalid_argument("witness shape mismatch");
    if (std::abs(witness.norm() - 1.0) > 1e-10)
      throw std::invalid_argument("witness must be normalized");
  }

  std::int64_t wdim = wshape.total();
  std::int64_t rest = c.shape.total() / wdim;
  Vec x = Vec::Zero(c.shape.total());
  if (empty_ok)
    x(0) = 1;
  else
    for (std::int64_t i = 0; i < wdim; ++i) x(i * rest) = witness.amplitudes(i);

  HistoryState h;
  h.circuit = c;
  h.witness = empty_ok ? StateVector(wshape, Vec::Ones(1)) : witness;
  h.k = k;
  h.T = static_cast<std::int64_t>(c.gates.size());
  h.snapshots = snapshots(c, StateVector(c.shape, std::move(x)));
  return h;
}

StateVector materialize_full(const HistoryState& h) {
  const int L = clock_register_len(h.T, h.k);
  const int d = L + 1;
  const int nt = h.k * L;
  std::vector<int> dims(nt, 2);
  dims.insert(dims.end(), h.circuit.shape.dims.begin(), h.circuit.shape.dims.end());
  RegisterShape full(dims);
  std::int64_t sdim = h.circuit.shape.total();
  Vec x = Vec::Zero(full.total());
  double amp = 1.0 / std::sqrt(double(h.T + 1));
  for (std::int64_t t = 0; t <= h.T; ++t) {
    std::int64_t base = clock_index(gray_digits(t, d, h.k), L) * sdim;
    x.segment(base, sdim) += amp * h.snapshots[t].amplitudes;
  }
  return StateVector(full, std::move(x));
}

LegalBlocks legal_from_history(const HistoryState& h) {
  LegalBlocks b;
  b.state_shape = h.circuit.shape;
  b.blocks = Mat(b.state_shape.total(), h.T + 1);
  double amp = 1.0 / std::sqrt(double(h.T + 1));
  for (std::int64_t t = 0; t <= h.T; ++t) b.blocks.col(t) = amp * h.snapshots[t].amplitudes;
  return b;
}

Mat legal_apply(const Circuit& c, const FkOptions& opts, const Mat& blocks) {
  const std::int64_t T = static_cast<std::int64_t>(c.gates.size());
  if (blocks.rows() != c.shape.total() || blocks.cols() != T + 1)
    throw std::invalid_argument("block matrix does not match circuit");
  Mat out = Mat::Zero(blocks.rows(), blocks.cols());

  if (opts.include_in)
    for (int s : opts.in_checked) {
      SpMat pi1 = qudit_projector(c.shape.dims[s], 1).sparseView();
      Vec y = Vec::Zero(blocks.rows());
      Vec b0 = blocks.col(0);
      apply_embedded_serial(c.shape, {s}, pi1, b0, y);
      out.col(0) += y;
    }

  for (std::int64_t t = 1; t <= T; ++t) {
    const Gate& g = c.gates[t - 1];
    Gate gdag = g;
    gdag.unitary = g.unitary.adjoint();
    Vec fwd = blocks.col(t - 1);
    apply_gate(c.shape, g, fwd);  // C_t beta_{t-1}
    Vec bwd = blocks.col(t);
    apply_gate(c.shape, gdag, bwd);  // C_t^dag beta_t
    out.col(t) += 0.5 * (blocks.col(t) - fwd);
    out.col(t - 1) += 0.5 * (blocks.col(t - 1) - bwd);
  }

  if (opts.include_out) {
    SpMat pi0 = qudit_projector(c.shape.dims[0], 0).sparseView();
    Vec y = Vec::Zero(blocks.rows());
    Vec bT = blocks.col(T);
    apply_embedded_serial(c.shape, {0}, pi0, bT, y);
    out.col(T) += y;
  }
  return out;
}

double legal_expectation(const Circuit& c, const FkOptions& opts, const LegalBlocks& b) {
  Mat hb = legal_apply(c, opts, b.blocks);
  return b.blocks.cwiseProduct(hb.conjugate()).sum().real();
}

TraceOrderResult verify_traceorder(const HistoryState& h, const std::vector<int>& S) {
  const int nt = h.k * clock_register_len(h.T, h.k);
  StateVector psi = materialize_full(h);

  std::vector<int> traced(S);
  for (int s = 0; s < nt; ++s) traced.push_back(s);
  std::sort(traced.begin(), traced.end());
  traced.erase(std::unique(traced.begin(), traced.end()), traced.end());
  for (int s : traced) psi.shape.check_site(s);

  TraceOrderResult r;
  r.lhs = partial_trace(DensityOperator::pure(psi), traced);

  std::vector<int> s_local;
  for (int s : S)
    if (s >= nt) s_local.push_back(s - nt);
  std::sort(s_local.begin(), s_local.end());
  s_local.erase(std::unique(s_local.begin(), s_local.end()), s_local.end());

  DensityOperator acc;
  for (std::int64_t t = 0; t <= h.T; ++t) {
    DensityOperator part = partial_trace(DensityOperator::pure(h.snapshots[t]), s_local);
    if (t == 0)
      acc = std::move(part);
    else
      acc.matrix += part.matrix;
  }
  acc.matrix /= double(h.T + 1);
  r.rhs = std::move(acc);
  r.distance = trace_distance(r.lhs, r.rhs);
  return r;
}

ClosenessResult closeness_to_history(const StateVector& eta, const HermitianTermSum& hprime,
                                     double gap) {
  if (gap <= 0) throw std::invalid_argument("spectral gap must be positive");
  if (!(eta.shape == hprime.shape)) throw std::invalid_argument("state shape mismatch");
  if (std::abs(eta.norm() - 1.0) > 1e-10) throw std::invalid_argument("state must be normalized");

  ClosenessResult r;
  r.gap = gap;
  r.energy = expectation(hprime, eta);

  std::int64_t dim = hprime.shape.total();
  int how_many = dim <= dense_cap() ? static_cast<int>(dim) : 32;
  EigResult eig = eigensolve_hermitian(hprime, how_many);

  Vec proj = Vec::Zero(dim);
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) > 1e-8) break;
    Vec v = eig.vectors.col(i);
    proj += v * v.dot(eta.amplitudes);
  }
  double pn = proj.norm();
  if (pn < 1e-12) throw std::invalid_argument("input is orthogonal to the ground space");
  proj /= pn;
  r.projected = StateVector(hprime.shape, proj);

  double overlap = std::abs(proj.dot(eta.amplitudes));
  r.distance = 2.0 * std::sqrt(std::max(0.0, 1.0 - overlap * overlap));
  r.bound = 2.0 * std::sqrt(r.energy / gap);
  r.bound_ok = r.distance <= r.bound + 1e-8;
  return r;
}

KitaevYesResult kitaev_yes_bound(const Circuit& c, const StateVector& witness,
                                 double gamma_target) {
  HistoryState h = history_state(c, witness, 1);

  FkOptions opts;
  opts.include_in = true;
  opts.include_out = true;
  for (int s = c.witness_count; s < c.shape.sites(); ++s) opts.in_checked.push_back(s);
  opts.clock_dimension = 1;

  KitaevYesResult r;
  // accept = measure |1> on state site 0 after the last gate
  const StateVector& out = h.snapshots[h.T];
  SpMat pi1 = qudit_projector(c.shape.dims[0], 1).sparseView();
  Vec y = Vec::Zero(out.amplitudes.size());
  apply_embedded_serial(c.shape, {0}, pi1, out.amplitudes, y);
  r.p_accept = y.squaredNorm();

  r.energy = legal_expectation(c, opts, legal_from_history(h));
  r.bound = gamma_target / double(h.T + 1);
  r.expectation_ok = r.energy <= r.bound + 1e-10;
  r.ok = r.expectation_ok;

  FkHamiltonian fk = build_fk_hamiltonian(c, opts);
  if (fk.terms.shape.total() <= dense_cap()) {
    EigResult eig = eigensolve_hermitian(fk.terms, 1);
    r.eigen_checked = true;
    r.lambda_min = eig.values(0);
    bool eig_ok = r.lambda_min <= r.energy + 1e-8;
    r.ok = r.ok && eig_ok;
  }
  return r;
}

}  // namespace clockforge
