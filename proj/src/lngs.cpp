// SPDX-License-Identifier: Apache-2.0
#include "clockforge/lngs.hpp"

#include <set>

namespace clockforge {

namespace {

// Pair-to-qutrit isometry, time qubit as the slow factor of the pair:
// |0> -> |10> (idx 2), |1> -> |11> (idx 3), |2> -> |00> (idx 0).
Mat pair_isometry() {
  Mat v = Mat::Zero(4, 3);
  v(2, 0) = 1;
  v(3, 1) = 1;
  v(0, 2) = 1;
  return v;
}

}  // namespace

QutritChainHamiltonian build_lngs_hamiltonian(int n) {
  if (n < 2) throw std::invalid_argument("chain length must be >= 2");
  Circuit c = cat_circuit(n);
  FkOptions opts;
  opts.include_in = false;  // the fusion removes the |0>_time|1>_state pair,
  opts.include_out = false; // which is exactly what the input check penalizes
  opts.clock_dimension = 1;
  FkHamiltonian fk = build_fk_hamiltonian(c, opts);

  const Mat v1 = pair_isometry();
  QutritChainHamiltonian out;
  out.n = n;
  out.terms = HermitianTermSum(RegisterShape::qutrits(n));

  for (const auto& term : fk.terms.terms) {
    // time qubit f (< n) belongs to chain site n-1-f; state qubit n+s to site s
    std::set<int> qs;
    for (int f : term.support) qs.insert(f < n ? n - 1 - f : f - n);
    std::vector<int> chain(qs.begin(), qs.end());
    std::vector<int> dst;
    Mat w = Mat::Identity(1, 1);
    for (int q : chain) {
      dst.push_back(n - 1 - q);
      dst.push_back(n + q);
      w = kron(w, v1);
    }
    Mat pairs = reindex_local(fk.terms.shape, term.support, Mat(term.op), dst);
    Mat fused = w.adjoint() * pairs * w;
    double leak = (pairs * w - w * fused).cwiseAbs().maxCoeff();
    out.subspace_leakage = std::max(out.subspace_leakage, leak);
    out.terms.add_term(chain, fused, term.tag);
  }
  return out;
}

std::vector<StateVector> fused_snapshots(int n) {
  RegisterShape shape = RegisterShape::qutrits(n);
  std::vector<StateVector> out;
  out.reserve(n + 1);
  double s = 1.0 / std::sqrt(2.0);
  for (int t = 0; t <= n; ++t) {
    Vec x = Vec::Zero(shape.total());
    std::vector<int> zeros(n, 2), ones(n, 2);
    for (int i = 0; i < t; ++i) {
      zeros[i] = 0;
      ones[i] = 1;
    }
    auto idx = [&](const std::vector<int>& dig) {
      std::int64_t a = 0;
      for (int d : dig) a = 3 * a + d;
      return a;
    };
    if (t == 0) {
      x(idx(zeros)) = 1.0;
    } else {
      x(idx(zeros)) = s;
      x(idx(ones)) = s;
    }
    out.push_back(StateVector(shape, std::move(x)));
  }
  return out;
}

StateVector fused_history_state(int n) {
  std::vector<StateVector> snaps = fused_snapshots(n);
  Vec x = Vec::Zero(snaps[0].amplitudes.size());
  double amp = 1.0 / std::sqrt(double(n + 1));
  for (const auto& s : snaps) x += amp * s.amplitudes;
  return StateVector(snaps[0].shape, std::move(x));
}

Mat lngs_observable_a() {
  Mat a = Mat::Zero(3, 3);
  a(0, 0) = a(2, 2) = 1;
  return a;
}

Mat lngs_observable_b() {
  Mat b = Mat::Zero(3, 3);
  b(1, 1) = b(2, 2) = 1;
  return b;
}

double lngs_marginal_expectation_exact(int n, int i) {
  return double(n + 2 + i) / (2.0 * (n + 1));
}

double lngs_cross_expectation_exact(int n, int i, int j) {
  return double(i + j + 2) / (2.0 * (n + 1));
}

void NoisyGroundStateSpec::validate(int n) const {
  double total = 0.0;
  const int cap = static_cast<int>(std::floor(eps * n));
  for (const auto& comp : components) {
    if (comp.p < 0) throw std::invalid_argument("component probability negative");
    total += comp.p;
    if (static_cast<int>(comp.sites.size()) > cap)
      throw std::invalid_argument("corrupted set exceeds floor(eps n)");
    std::set<int> s(comp.sites.begin(), comp.sites.end());
    for (const auto& ch : comp.channels)
      for (int site : ch.support)
        if (!s.count(site)) throw std::invalid_argument("channel leaves its corrupted set");
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("component probabilities must sum to 1");
}

DensityOperator make_noisy_ground_state(int n, const NoisyGroundStateSpec& spec) {
  spec.validate(n);
  DensityOperator psi = DensityOperator::pure(fused_history_state(n));
  Mat acc = Mat::Zero(psi.matrix.rows(), psi.matrix.cols());
  for (const auto& comp : spec.components) {
    DensityOperator rho = psi;
    for (const auto& ch : comp.channels) rho = apply_channel(rho, ch);
    acc += comp.p * rho.matrix;
  }
  return DensityOperator(psi.shape, std::move(acc));
}

std::vector<WeightedState> make_noisy_ensemble(int n, const NoisyGroundStateSpec& spec) {
  spec.validate(n);
  StateVector ground = fused_history_state(n);
  std::vector<WeightedState> out;
  for (const auto& comp : spec.components) {
    std::vector<WeightedState> branches{{comp.p, ground}};
    for (const auto& ch : comp.channels) {
      ch.validate(ground.shape);
      std::vector<WeightedState> next;
      for (const auto& br : branches)
        for (const auto& k : ch.kraus) {
          Vec y = Vec::Zero(br.psi.amplitudes.size());
          apply_embedded_serial(ground.shape, ch.support, k.sparseView(1.0, 1e-16),
                                br.psi.amplitudes, y);
          double nn = y.squaredNorm();
          if (nn < 1e-14) continue;
          next.push_back({br.w * nn, StateVector(ground.shape, y / std::sqrt(nn))});
        }
      branches = std::move(next);
    }
    out.insert(out.end(), branches.begin(), branches.end());
  }
  return out;
}

std::vector<int> good_indices(int n, const NoisyGroundStateSpec& spec) {
  std::vector<double> weight(n, 0.0);
  for (const auto& comp : spec.components)
    for (int s : comp.sites) weight[s] += comp.p;
  std::vector<int> good;
  for (int i = 0; i < n; ++i)
    if (weight[i] <= 2.0 * spec.eps + 1e-12) good.push_back(i);
  return good;
}

NoisyGroundStateSpec sample_noisy_spec(int n, double eps, int components, std::mt19937_64& rng) {
  NoisyGroundStateSpec spec;
  spec.eps = eps;
  const int m = static_cast<int>(std::floor(eps * n));
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(components);
  double total = 0.0;
  for (double& x : p) {
    x = ex(rng);
    total += x;
  }
  std::vector<int> sites(n);
  for (int i = 0; i < n; ++i) sites[i] = i;
  std::uniform_int_distribution<int> menu(0, 2);
  for (int l = 0; l < components; ++l) {
    NoisyComponent comp;
    comp.p = p[l] / total;
    std::shuffle(sites.begin(), sites.end(), rng);
    comp.sites.assign(sites.begin(), sites.begin() + m);
    std::sort(comp.sites.begin(), comp.sites.end());
    for (int s : comp.sites) {
      switch (menu(rng)) {
        case 0: comp.channels.push_back(erase_channel(s, 3)); break;
        case 1: comp.channels.push_back(unitary_channel(s, 3, rng)); break;
        default: comp.channels.push_back(dephase_channel(s, 3)); break;
      }
    }
    spec.components.push_back(std::move(comp));
  }
  return spec;
}

namespace {

LngsReport finish_report(LngsReport r, double eps) {
  r.cross_ok = r.cross <= 4.0 * eps + 1e-10;
  r.a_ok = r.a_marg >= 0.5 - 8.0 * eps - 1e-10;
  r.b_ok = r.b_marg >= 0.5 - 8.0 * eps - 1e-10;
  r.all_ok = r.cross_ok && r.a_ok && r.b_ok;
  return r;
}

HermitianTerm site_term(int i, const Mat& m) {
  return HermitianTerm{{i}, m.sparseView(1.0, 1e-16), TermTag::other};
}

HermitianTerm pair_term(int i, int j, const Mat& a, const Mat& b) {
  if (i < j) return HermitianTerm{{i, j}, kron(a, b).sparseView(1.0, 1e-16), TermTag::other};
  return HermitianTerm{{j, i}, kron(b, a).sparseView(1.0, 1e-16), TermTag::other};
}

}  // namespace

LngsReport verify_lngs_inequalities(const std::vector<WeightedState>& sigma, int n, int i, int j,
                                    double eps) {
  if (i == j) throw std::invalid_argument("need two distinct sites");
  RegisterShape shape = RegisterShape::qutrits(n);
  HermitianTerm ta = site_term(i, lngs_observable_a());
  HermitianTerm tb = site_term(j, lngs_observable_b());
  HermitianTerm tab = pair_term(i, j, lngs_observable_a(), lngs_observable_b());
  LngsReport r;
  r.i = i;
  r.j = j;
  for (const auto& ws : sigma) {
    r.cross += ws.w * expectation_term(shape, tab, ws.psi.amplitudes);
    r.a_marg += ws.w * expectation_term(shape, ta, ws.psi.amplitudes);
    r.b_marg += ws.w * expectation_term(shape, tb, ws.psi.amplitudes);
  }
  return finish_report(r, eps);
}

LngsReport verify_lngs_inequalities(const DensityOperator& sigma, int i, int j, double eps) {
  if (i == j) throw std::invalid_argument("need two distinct sites");
  HermitianTermSum ha(sigma.shape), hb(sigma.shape), hab(sigma.shape);
  ha.add_term({i}, lngs_observable_a(), TermTag::other);
  hb.add_term({j}, lngs_observable_b(), TermTag::other);
  HermitianTerm tab = pair_term(i, j, lngs_observable_a(), lngs_observable_b());
  hab.add_term_sparse(tab.support, tab.op, TermTag::other);
  LngsReport r;
  r.i = i;
  r.j = j;
  r.cross = expectation(hab, sigma);
  r.a_marg = expectation(ha, sigma);
  r.b_marg = expectation(hb, sigma);
  return finish_report(r, eps);
}

double depth_margin_raw(double eps, double delta) {
  double q = 0.5 - 8.0 * eps - delta;
  return q * q - delta - 4.0 * eps;
}

DepthCertificate depth_bound_certificate(int n, double eps, double delta) {
  if (!(eps >= 0.0 && eps < 1.0 / 48.0))
    throw std::invalid_argument("eps outside theorem range [0, 1/48)");
  if (!(delta >= 0.0 && delta < 0.125 - 6.0 * eps))
    throw std::invalid_argument("delta outside theorem range [0, 1/8 - 6 eps)");
  DepthCertificate c;
  c.bound = 0.5 * std::log2(n / 2.0);
  c.margin = depth_margin_raw(eps, delta);
  return c;
}

AdversaryReport low_depth_adversary(int n, int depth, int trials, std::mt19937_64& rng) {
  AdversaryReport rep;
  RegisterShape shape = RegisterShape::qutrits(n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::uniform_int_distribution<int> pick(0, n - 1);

  for (int trial = 0; trial < trials; ++trial) {
    Circuit c;
    c.shape = shape;
    for (int layer = 0; layer < depth; ++layer) {
      std::shuffle(order.begin(), order.end(), rng);
      int i = 0;
      for (; i + 1 < n; i += 2)
        c.gates.push_back(Gate{"haar2", {order[i], order[i + 1]}, haar_unitary(9, rng)});
      if (i < n) c.gates.push_back(Gate{"haar1", {order[i]}, haar_unitary(3, rng)});
    }
    ++rep.trials;

    Layering l = layerize(c);
    int a = pick(rng);
    LightconeReport lc = effect_zone_and_shadow(c, l, {a});
    std::set<int> shadow(lc.shadow.begin(), lc.shadow.end());
    std::vector<int> candidates;
    for (int s = 0; s < n; ++s)
      if (s != a && !shadow.count(s)) candidates.push_back(s);
    if (candidates.empty()) continue;
    int b = candidates[std::uniform_int_distribution<int>(
        0, static_cast<int>(candidates.size()) - 1)(rng)];
    if (!disjoint_lightcones(c, l, {a}, {b}))
      continue;  // shadow test failed (cannot happen for b picked outside it)

    StateVector psi = simulate(c, StateVector::basis(shape, std::int64_t(0)));
    HermitianTerm ta = site_term(a, lngs_observable_a());
    HermitianTerm tb = site_term(b, lngs_observable_b());
    HermitianTerm tab = pair_term(a, b, lngs_observable_a(), lngs_observable_b());
    double ea = expectation_term(shape, ta, psi.amplitudes);
    double eb = expectation_term(shape, tb, psi.amplitudes);
    double cross = expectation_term(shape, tab, psi.amplitudes);
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(cross - ea * eb));
    ++rep.pairs_checked;
    if (ea >= 0.45 && eb >= 0.45) {
      ++rep.margin_cases;
      rep.min_cross_given_margins = std::min(rep.min_cross_given_margins, cross);
    }
  }
  return rep;
}

}  // namespace clockforge
