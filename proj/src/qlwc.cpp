// SPDX-License-Identifier: Apache-2.0
#include "clockforge/qlwc.hpp"

#include <cmath>
#include <functional>
#include <set>

namespace clockforge {

namespace {

Mat pauli_char_matrix(char c) {
  Mat m = Mat::Zero(2, 2);
  switch (c) {
    case 'I': m(0, 0) = m(1, 1) = 1; break;
    case 'X': m(0, 1) = m(1, 0) = 1; break;
    case 'Y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw std::invalid_argument("bad Pauli character");
  }
  return m;
}

bool chars_anticommute(char a, char b) { return a != 'I' && b != 'I' && a != b; }

bool strings_commute(const std::string& a, const std::string& b) {
  int flips = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (chars_anticommute(a[i], b[i])) ++flips;
  return flips % 2 == 0;
}

StateVector encoded_basis_state(const CssCode& code, std::int64_t message_index) {
  RegisterShape shape = RegisterShape::qubits(code.n);
  std::vector<int> digits(code.n, 0);
  for (int j = code.k - 1; j >= 0; --j) {
    digits[j] = static_cast<int>(message_index % 2);
    message_index /= 2;
  }
  return simulate(code.encoder, StateVector::basis(shape, digits));
}

}  // namespace

Mat pauli_string_matrix(const std::string& s) {
  Mat m = Mat::Identity(1, 1);
  for (char c : s) m = kron(m, pauli_char_matrix(c));
  return m;
}

CssCode steane_like_inner() {
  CssCode code;
  code.n = 7;
  code.k = 1;
  code.d = 3;
  code.q = 2;
  code.encoder.shape = RegisterShape::qubits(7);
  code.encoder.witness_count = 1;
  auto h = [&](int q) {
    code.encoder.gates.push_back(Gate{"H", {q}, builtin_gate("H", {2})});
  };
  auto cx = [&](int c, int t) {
    code.encoder.gates.push_back(Gate{"CNOT", {c, t}, builtin_gate("CNOT", {2, 2})});
  };
  h(1);
  h(4);
  h(6);
  cx(4, 5);
  cx(4, 0);
  cx(6, 2);
  cx(1, 3);
  cx(2, 1);
  cx(0, 6);
  cx(3, 5);
  cx(6, 4);
  cx(5, 2);
  code.x_stabs = {"IXXXIXI", "XIXIIXX", "IXXIXIX"};
  code.z_stabs = {"ZIZIIZZ", "IZZZIZI", "IIIZZZZ"};
  return code;
}

CssCode identity_inner(int n) {
  CssCode code;
  code.n = n;
  code.k = n;
  code.d = 1;
  code.q = 2;
  code.encoder.shape = RegisterShape::qubits(n);
  code.encoder.witness_count = n;
  code.encoder.gates.push_back(Gate{"identity", {0}, builtin_gate("identity", {2})});
  return code;
}

std::vector<Mat> stabilizer_matrices(const CssCode& code) {
  std::vector<Mat> out;
  if (code.stabilizers().empty()) return out;
  StateVector enc0 = encoded_basis_state(code, 0);
  for (const std::string& s : code.stabilizers()) {
    if (static_cast<int>(s.size()) != code.n)
      throw std::invalid_argument("stabilizer length mismatch");
    Mat m = pauli_string_matrix(s);
    cplx ev = enc0.amplitudes.dot(m * enc0.amplitudes);
    if (std::abs(ev - 1.0) < 1e-8) {
      out.push_back(std::move(m));
    } else if (std::abs(ev + 1.0) < 1e-8) {
      out.push_back(-m);
    } else {
      throw std::runtime_error("listed operator does not stabilize the codespace: " + s);
    }
  }
  return out;
}

DistanceReport certify_distance(const CssCode& code) {
  DistanceReport r;
  r.weight_checked = code.d - 1;
  std::vector<std::string> stabs = code.stabilizers();

  std::vector<StateVector> basis;
  std::int64_t kd = std::int64_t(1) << code.k;
  for (std::int64_t i = 0; i < kd; ++i) basis.push_back(encoded_basis_state(code, i));

  const char types[3] = {'X', 'Y', 'Z'};
  // iterate Paulis of weight 1 .. d-1 via site subsets and type assignments
  std::vector<int> sites;
  std::function<bool(int, int)> scan = [&](int start, int remaining) -> bool {
    if (remaining == 0) {
      std::int64_t combos = 1;
      for (size_t i = 0; i < sites.size(); ++i) combos *= 3;
      for (std::int64_t c = 0; c < combos; ++c) {
        std::string p(code.n, 'I');
        std::int64_t cc = c;
        for (int s : sites) {
          p[s] = types[cc % 3];
          cc /= 3;
        }
        bool commutes = true;
        for (const auto& st : stabs)
          if (!strings_commute(p, st)) {
            commutes = false;
            break;
          }
        if (!commutes) continue;
        // undetected: must still act trivially on the codespace
        Mat m = pauli_string_matrix(p);
        cplx scale = basis[0].amplitudes.dot(m * basis[0].amplitudes);
        bool trivial = std::abs(std::abs(scale) - 1.0) < 1e-8;
        for (std::int64_t i = 0; trivial && i < kd; ++i)
          for (std::int64_t j = 0; trivial && j < kd; ++j) {
            cplx e = basis[i].amplitudes.dot(m * basis[j].amplitudes);
            cplx want = (i == j) ? scale : cplx(0.0);
            if (std::abs(e - want) > 1e-8) trivial = false;
          }
        if (!trivial) {
          r.offending_weight = static_cast<int>(sites.size());
          return true;
        }
      }
      return false;
    }
    for (int s = start; s <= code.n - remaining; ++s) {
      sites.push_back(s);
      if (scan(s + 1, remaining - 1)) return true;
      sites.pop_back();
    }
    return false;
  };

  for (int w = 1; w <= code.d - 1; ++w) {
    sites.clear();
    if (scan(0, w)) {
      r.certified = false;
      return r;
    }
  }
  r.certified = true;
  return r;
}

std::vector<std::string> syndrome_corrections(const CssCode& code) {
  std::vector<std::string> stabs = code.stabilizers();
  const int g = static_cast<int>(stabs.size());
  std::vector<std::string> table(std::size_t(1) << g, std::string(code.n, 'I'));
  const char types[3] = {'X', 'Y', 'Z'};
  for (int site = 0; site < code.n; ++site)
    for (char t : types) {
      std::string p(code.n, 'I');
      p[site] = t;
      std::size_t syn = 0;
      for (int i = 0; i < g; ++i)
        if (!strings_commute(p, stabs[i])) syn |= std::size_t(1) << i;
      if (syn != 0) table[syn] = p;
    }
  return table;
}

std::pair<Circuit, int> build_wait_circuit(const Circuit& v, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
  const double q = delta * delta / 4.0;
  const std::int64_t tv = static_cast<std::int64_t>(v.gates.size());
  std::int64_t K = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil((1.0 - q) * double(tv) / q - 1e-9)));
  while (double(K) / double(tv + K) < 1.0 - q - 1e-12) ++K;
  while (K > 1 && double(K - 1) / double(tv + K - 1) >= 1.0 - q - 1e-12) --K;
  Circuit c = v;
  for (std::int64_t i = 0; i < K; ++i)
    c.gates.push_back(Gate{"wait", {0}, builtin_gate("identity", {2})});
  return {std::move(c), static_cast<int>(K)};
}

int choose_r(std::int64_t t_c, int n) {
  if (t_c < 1 || n < 2) throw std::invalid_argument("choose_r needs T_C >= 1 and n >= 2");
  int r = 1;
  std::int64_t p = n;
  while (p < t_c) {
    p *= n;
    ++r;
  }
  return r;
}

QlwcCode build_qlwc(const CssCode& inner, double delta) {
  QlwcCode code;
  code.inner = inner;
  auto [wc, K] = build_wait_circuit(inner.encoder, delta);
  code.wait_circuit = std::move(wc);
  code.wait_circuit.witness_count = inner.k;

  QlwcParameters& p = code.params;
  p.q = inner.q;
  p.delta = delta;
  p.d = inner.d;
  p.T_V = inner.t_v();
  p.K = K;
  p.T_C = p.T_V + p.K;
  p.r = choose_r(p.T_C, inner.n);
  p.w = 3 + 2 * p.r;
  p.m = p.r * clock_register_len(p.T_C, p.r) + inner.n;

  code.opts.include_in = true;
  code.opts.include_out = false;
  for (int s = inner.k; s < inner.n; ++s) code.opts.in_checked.push_back(s);
  code.opts.clock_dimension = p.r;
  return code;
}

FkHamiltonian qlwc_hamiltonian(const QlwcCode& code) {
  return build_fk_hamiltonian(code.wait_circuit, code.opts);
}

Circuit extended_circuit(const Circuit& c, int reference_sites) {
  Circuit out = c;
  for (int i = 0; i < reference_sites; ++i) out.shape.dims.push_back(2);
  return out;
}

LegalEnsemble encode(const QlwcCode& code, const StateVector& message, int reference_sites) {
  const int n = code.inner.n, k = code.inner.k;
  RegisterShape mshape = RegisterShape::qubits(k + reference_sites);
  if (!(message.shape == mshape)) throw std::invalid_argument("message shape mismatch");
  if (std::abs(message.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("message must be normalized");

  LegalEnsemble e;
  e.state_shape = RegisterShape::qubits(n + reference_sites);
  e.T = static_cast<std::int64_t>(code.wait_circuit.gates.size());
  e.reference_sites = reference_sites;

  auto strides = e.state_shape.strides();
  Vec psi0 = Vec::Zero(e.state_shape.total());
  for (std::int64_t mi = 0; mi < mshape.total(); ++mi) {
    if (message.amplitudes(mi) == cplx(0.0)) continue;
    std::int64_t rem = mi, idx = 0;
    for (int j = k + reference_sites - 1; j >= 0; --j) {
      int digit = static_cast<int>(rem % 2);
      rem /= 2;
      int site = (j < k) ? j : n + (j - k);
      idx += digit * strides[site];
    }
    psi0(idx) = message.amplitudes(mi);
  }

  Circuit ext = extended_circuit(code.wait_circuit, reference_sites);
  std::vector<StateVector> snaps = snapshots(ext, StateVector(e.state_shape, std::move(psi0)));
  Mat blocks(e.state_shape.total(), e.T + 1);
  double amp = 1.0 / std::sqrt(double(e.T + 1));
  for (std::int64_t t = 0; t <= e.T; ++t) blocks.col(t) = amp * snaps[t].amplitudes;
  e.branches.push_back({1.0, std::move(blocks)});
  return e;
}

double waiting_mass(const QlwcCode& code, const StateVector& message, int reference_sites) {
  LegalEnsemble e = encode(code, message, reference_sites);
  const Mat& b = e.branches[0].second;
  const std::int64_t tv = code.params.T_V;
  Vec tail = b.col(e.T);  // V psi_0, up to the 1/sqrt(T+1) factor
  tail /= tail.norm();
  cplx overlap = 0.0;
  double scale = 1.0 / std::sqrt(double(code.params.K + 1));
  for (std::int64_t t = tv; t <= e.T; ++t) overlap += scale * tail.dot(b.col(t));
  return std::norm(overlap);
}

LegalEnsemble apply_error(const QlwcCode& code, const LegalEnsemble& e, const ErrorChannel& ch) {
  const int budget = (code.inner.d - 1) / 2;
  if (static_cast<int>(ch.support.size()) > budget)
    throw std::invalid_argument("error support exceeds (d-1)/2 qudits");
  for (int s : ch.support)
    if (s < 0 || s >= code.inner.n)
      throw std::invalid_argument("error channel must act on the code register");
  ch.validate(e.state_shape);

  LegalEnsemble out = e;
  out.branches.clear();
  for (const auto& [w, blocks] : e.branches)
    for (const auto& kr : ch.kraus) {
      Mat nb(blocks.rows(), blocks.cols());
      SpMat op = kr.sparseView(1.0, 1e-16);
      for (std::int64_t t = 0; t < blocks.cols(); ++t) {
        Vec y = Vec::Zero(blocks.rows());
        Vec x = blocks.col(t);
        apply_embedded_serial(e.state_shape, ch.support, op, x, y);
        nb.col(t) = y;
      }
      double mass = nb.squaredNorm();
      if (w * mass < 1e-14) continue;
      out.branches.push_back({w * mass, Mat(nb / std::sqrt(mass))});
    }
  return out;
}

LegalEnsemble apply_clock_erasure(const LegalEnsemble& e, int /*time_site*/) {
  // Erasure Kraus operators |a><b|/sqrt(2) on a clock qubit commute with the
  // partial trace over the clock register, so Tr_time(sigma) is unchanged and
  // the decoder output is identical. The mixedness lives entirely in the
  // erased clock qubit.
  return e;
}

namespace {

DensityOperator decode_components(const QlwcCode& code, const RegisterShape& shape,
                                  const std::vector<std::pair<double, Vec>>& components) {
  const int n = code.inner.n, k = code.inner.k;
  std::vector<int> code_sites(n);
  for (int i = 0; i < n; ++i) code_sites[i] = i;

  std::vector<SpMat> plus, minus;
  for (const Mat& s : stabilizer_matrices(code.inner)) {
    std::int64_t d = s.rows();
    plus.push_back(SpMat(Mat(0.5 * (Mat::Identity(d, d) + s)).sparseView(1.0, 1e-14)));
    minus.push_back(SpMat(Mat(0.5 * (Mat::Identity(d, d) - s)).sparseView(1.0, 1e-14)));
  }
  const int g = static_cast<int>(plus.size());
  std::vector<SpMat> corrections;
  for (const std::string& p : syndrome_corrections(code.inner))
    corrections.push_back(pauli_string_matrix(p).sparseView(1.0, 1e-14));

  Mat rho = Mat::Zero(shape.total(), shape.total());
  for (const auto& [w, v] : components) {
    // measure all stabilizers, branching on each outcome
    std::vector<std::pair<std::size_t, Vec>> branches{{0, v}};
    for (int i = 0; i < g; ++i) {
      std::vector<std::pair<std::size_t, Vec>> next;
      for (auto& [syn, u] : branches) {
        Vec up = Vec::Zero(u.size()), um = Vec::Zero(u.size());
        apply_embedded_serial(shape, code_sites, plus[i], u, up);
        apply_embedded_serial(shape, code_sites, minus[i], u, um);
        if (up.squaredNorm() > 1e-24) next.push_back({syn, std::move(up)});
        if (um.squaredNorm() > 1e-24) next.push_back({syn | (std::size_t(1) << i), std::move(um)});
      }
      branches = std::move(next);
    }
    for (auto& [syn, u] : branches) {
      if (g > 0) {
        Vec y = Vec::Zero(u.size());
        apply_embedded_serial(shape, code_sites, corrections[syn], u, y);
        u = std::move(y);
      }
      for (auto it = code.inner.encoder.gates.rbegin(); it != code.inner.encoder.gates.rend();
           ++it) {
        Gate gdag = *it;
        gdag.unitary = it->unitary.adjoint();
        apply_gate(shape, gdag, u);
      }
      rho += w * (u * u.adjoint());
    }
  }

  std::vector<int> anc;
  for (int s = k; s < n; ++s) anc.push_back(s);
  return partial_trace(DensityOperator(shape, std::move(rho)), anc);
}

}  // namespace

DensityOperator decode(const QlwcCode& code, const LegalEnsemble& e) {
  std::vector<std::pair<double, Vec>> components;
  for (const auto& [w, blocks] : e.branches)
    for (std::int64_t t = 0; t < blocks.cols(); ++t) components.push_back({w, blocks.col(t)});
  return decode_components(code, e.state_shape, components);
}

DensityOperator decode_density(const QlwcCode& code, const DensityOperator& sigma_full,
                               int reference_sites) {
  const int nt = code.params.r * clock_register_len(code.params.T_C, code.params.r);
  RegisterShape state_shape = RegisterShape::qubits(code.inner.n + reference_sites);
  if (sigma_full.shape.sites() != nt + state_shape.sites())
    throw std::invalid_argument("density operator does not match the code register");
  std::vector<int> time_sites(nt);
  for (int i = 0; i < nt; ++i) time_sites[i] = i;
  DensityOperator rho1 = partial_trace(sigma_full, time_sites);

  Eigen::SelfAdjointEigenSolver<Mat> es(rho1.matrix);
  std::vector<std::pair<double, Vec>> components;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-12)
      components.push_back({es.eigenvalues()(i), es.eigenvectors().col(i)});
  return decode_components(code, state_shape, components);
}

double junk_weight(const DensityOperator& decoded, const StateVector& message) {
  if (!(decoded.shape == message.shape)) throw std::invalid_argument("shape mismatch");
  double fid = message.amplitudes.dot(decoded.matrix * message.amplitudes).real();
  return 1.0 - fid;
}

Circuit transform_error_corrected(const Circuit& c, const CssCode& inner) {
  if (c.shape.sites() != inner.k || !(c.shape == RegisterShape::qubits(inner.k)))
    throw std::invalid_argument("circuit does not fit the inner code's message register");
  const std::int64_t tv = inner.t_v();
  const std::int64_t tc = static_cast<std::int64_t>(c.gates.size());
  const std::int64_t K = 2 * tv + tc;

  Circuit out;
  out.shape = RegisterShape::qubits(inner.n);
  out.witness_count = c.witness_count;
  for (const auto& g : inner.encoder.gates) out.gates.push_back(g);
  for (std::int64_t i = 0; i < K; ++i)
    out.gates.push_back(Gate{"wait", {0}, builtin_gate("identity", {2})});
  for (auto it = inner.encoder.gates.rbegin(); it != inner.encoder.gates.rend(); ++it) {
    Gate gdag = *it;
    gdag.label += "_dag";
    gdag.unitary = it->unitary.adjoint();
    out.gates.push_back(std::move(gdag));
  }
  for (const auto& g : c.gates) out.gates.push_back(g);
  return out;
}

Circuit history_preparation_circuit(const Circuit& cprime, const StateVector& witness, int k) {
  HistoryState h = history_state(cprime, witness, k);
  StateVector target = materialize_full(h);
  std::int64_t dim = target.amplitudes.size();

  // unitary with the target as its first column, completed greedily
  Mat u(dim, dim);
  u.col(0) = target.amplitudes;
  int filled = 1;
  for (std::int64_t cand = 0; cand < dim && filled < dim; ++cand) {
    Vec v = Vec::Zero(dim);
    v(cand) = 1.0;
    for (int j = 0; j < filled; ++j) v -= u.col(j) * u.col(j).dot(v);
    double nn = v.norm();
    if (nn < 1e-8) continue;
    u.col(filled++) = v / nn;
  }
  if (filled != dim) throw std::runtime_error("failed to complete preparation unitary");

  Circuit d;
  d.shape = target.shape;
  std::vector<int> all(target.shape.sites());
  for (int i = 0; i < target.shape.sites(); ++i) all[i] = i;
  d.gates.push_back(Gate{"prepare", all, std::move(u)});
  return d;
}

VerifierReport verifier_pipeline(const Circuit& d, const Circuit& c, const CssCode& inner) {
  Circuit cprime = transform_error_corrected(c, inner);
  const std::int64_t tprime = static_cast<std::int64_t>(cprime.gates.size());
  const int nt = clock_register_len(tprime, 1);
  std::vector<int> dims(nt, 2);
  dims.insert(dims.end(), cprime.shape.dims.begin(), cprime.shape.dims.end());
  RegisterShape full(dims);
  if (!(d.shape == full)) throw std::invalid_argument("preparer does not match the full register");

  StateVector sigma = simulate(d, StateVector::basis(full, std::int64_t(0)));

  std::vector<int> time_sites(nt);
  for (int i = 0; i < nt; ++i) time_sites[i] = i;
  DensityOperator rho1 = partial_trace(DensityOperator::pure(sigma), time_sites);

  // syndrome-correct and undo V on the state register
  RegisterShape sshape = cprime.shape;
  std::vector<int> code_sites(inner.n);
  for (int i = 0; i < inner.n; ++i) code_sites[i] = i;
  std::vector<Mat> stabs = stabilizer_matrices(inner);
  if (!stabs.empty()) {
    std::vector<SpMat> corrections;
    for (const std::string& p : syndrome_corrections(inner))
      corrections.push_back(pauli_string_matrix(p).sparseView(1.0, 1e-14));
    std::int64_t sd = stabs[0].rows();
    Mat acc = Mat::Zero(rho1.matrix.rows(), rho1.matrix.cols());
    for (std::size_t syn = 0; syn < corrections.size(); ++syn) {
      Mat proj = Mat::Identity(sd, sd);
      for (std::size_t i = 0; i < stabs.size(); ++i) {
        double sign = (syn >> i) & 1 ? -1.0 : 1.0;
        proj = 0.5 * (proj + sign * stabs[i] * proj);
      }
      Mat kraus = Mat(corrections[syn]) * proj;
      acc += conjugate_by(sshape, code_sites, kraus, rho1.matrix);
    }
    rho1.matrix = std::move(acc);
  }
  for (auto it = inner.encoder.gates.rbegin(); it != inner.encoder.gates.rend(); ++it)
    rho1.matrix = conjugate_by(sshape, it->support, Mat(it->unitary.adjoint()), rho1.matrix);

  std::vector<int> anc;
  for (int s = inner.k; s < inner.n; ++s) anc.push_back(s);
  DensityOperator rho3 = partial_trace(rho1, anc);

  for (const auto& g : c.gates)
    rho3.matrix = conjugate_by(c.shape, g.support, g.unitary, rho3.matrix);

  Mat pi1 = Mat::Zero(2, 2);
  pi1(1, 1) = 1;
  VerifierReport r;
  r.T_prime = tprime;
  r.p_accept = (left_multiply(c.shape, {0}, pi1, rho3.matrix)).trace().real();
  std::int64_t waits = 0;
  for (const auto& g : cprime.gates)
    if (g.label == "wait") ++waits;
  r.waiting_fraction = double(waits) / double(tprime);
  return r;
}

}  // namespace clockforge
