// SPDX-License-Identifier: Apache-2.0
#include "clockforge/circuit.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace clockforge {

using nlohmann::json;

Mat builtin_gate(const std::string& label, const std::vector<int>& dims) {
  std::int64_t d = 1;
  for (int q : dims) d *= q;
  if (label == "identity") return Mat::Identity(d, d);
  if (label == "H") {
    if (dims != std::vector<int>{2}) throw std::invalid_argument("H is a 1-qubit gate");
    Mat m(2, 2);
    double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
  }
  if (label == "X" || label == "Y" || label == "Z") {
    if (dims != std::vector<int>{2}) throw std::invalid_argument(label + " is a 1-qubit gate");
    Mat m = Mat::Zero(2, 2);
    if (label == "X") m << 0, 1, 1, 0;
    if (label == "Y") m << 0, cplx(0, -1), cplx(0, 1), 0;
    if (label == "Z") m << 1, 0, 0, -1;
    return m;
  }
  if (label == "CNOT") {
    if (dims != std::vector<int>{2, 2}) throw std::invalid_argument("CNOT is a 2-qubit gate");
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
  }
  if (label == "SWAP") {
    if (dims.size() != 2 || dims[0] != dims[1])
      throw std::invalid_argument("SWAP needs two equal-dimension sites");
    int q = dims[0];
    Mat m = Mat::Zero(q * q, q * q);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) m(b * q + a, a * q + b) = 1;
    return m;
  }
  throw std::invalid_argument("unknown builtin gate: " + label);
}

void Circuit::validate() const {
  if (witness_count < 0 || witness_count > shape.sites())
    throw std::invalid_argument("witness count out of range");
  for (const auto& g : gates) {
    std::set<int> seen;
    std::int64_t d = 1;
    for (int s : g.support) {
      shape.check_site(s);
      if (!seen.insert(s).second) throw std::invalid_argument("gate support repeats a site");
      d *= shape.dims[s];
    }
    if (g.unitary.rows() != d || g.unitary.cols() != d)
      throw std::invalid_argument("gate matrix does not match its support");
    if ((g.unitary.adjoint() * g.unitary - Mat::Identity(d, d)).cwiseAbs().maxCoeff() >
        tolerances().eq)
      throw std::invalid_argument("gate '" + g.label + "' is not unitary");
  }
}

Layering layerize(const Circuit& c) {
  Layering l;
  std::vector<int> busy_until(c.shape.sites(), -1);  // last layer using each site
  for (int gi = 0; gi < static_cast<int>(c.gates.size()); ++gi) {
    int layer = 0;
    for (int s : c.gates[gi].support) layer = std::max(layer, busy_until[s] + 1);
    if (layer >= l.depth()) l.layers.resize(layer + 1);
    l.layers[layer].push_back(gi);
    for (int s : c.gates[gi].support) busy_until[s] = layer;
  }
  return l;
}

Circuit cat_circuit(int n) {
  if (n < 1) throw std::invalid_argument("cat_circuit needs n >= 1");
  Circuit c;
  c.shape = RegisterShape::qubits(n);
  c.witness_count = 0;
  c.gates.push_back(Gate{"H", {0}, builtin_gate("H", {2})});
  for (int i = 0; i + 1 < n; ++i)
    c.gates.push_back(Gate{"CNOT", {i, i + 1}, builtin_gate("CNOT", {2, 2})});
  return c;
}

namespace {

bool overlaps(const std::vector<int>& sup, const std::set<int>& sites) {
  for (int s : sup)
    if (sites.count(s)) return true;
  return false;
}

}  // namespace

LightconeReport lightcone(const Circuit& c, const Layering& l, std::vector<int> target) {
  for (int s : target) c.shape.check_site(s);
  LightconeReport r;
  std::set<int> reach(target.begin(), target.end());
  std::set<int> cone;
  for (int j = l.depth() - 1; j >= 0; --j)
    for (int gi : l.layers[j])
      if (overlaps(c.gates[gi].support, reach)) {
        cone.insert(gi);
        for (int s : c.gates[gi].support) reach.insert(s);
      }
  r.lightcone_gates.assign(cone.begin(), cone.end());
  r.lightcone_support.assign(reach.begin(), reach.end());
  return r;
}

LightconeReport effect_zone_and_shadow(const Circuit& c, const Layering& l,
                                       std::vector<int> target) {
  LightconeReport r = lightcone(c, l, target);
  std::set<int> cone(r.lightcone_gates.begin(), r.lightcone_gates.end());
  std::set<int> zone;
  std::set<int> front;  // sites touched so far by the effect zone
  if (l.depth() > 0)
    for (int gi : l.layers[0])
      if (cone.count(gi)) {
        zone.insert(gi);
        for (int s : c.gates[gi].support) front.insert(s);
      }
  for (int j = 1; j < l.depth(); ++j)
    for (int gi : l.layers[j])
      if (overlaps(c.gates[gi].support, front)) {
        zone.insert(gi);
        for (int s : c.gates[gi].support) front.insert(s);
      }
  r.effect_zone_gates.assign(zone.begin(), zone.end());
  std::set<int> shadow;
  for (int gi : zone)
    for (int s : c.gates[gi].support) shadow.insert(s);
  r.shadow.assign(shadow.begin(), shadow.end());
  return r;
}

bool disjoint_lightcones(const Circuit& c, const Layering& l, const std::vector<int>& a,
                         const std::vector<int>& b) {
  LightconeReport ra = effect_zone_and_shadow(c, l, a);
  std::set<int> shadow(ra.shadow.begin(), ra.shadow.end());
  bool outside = true;
  for (int s : b)
    if (shadow.count(s)) outside = false;
  LightconeReport rb = lightcone(c, l, b);
  std::set<int> ca(ra.lightcone_gates.begin(), ra.lightcone_gates.end());
  bool disjoint = true;
  for (int gi : rb.lightcone_gates)
    if (ca.count(gi)) disjoint = false;
  if (outside && !disjoint)
    throw std::logic_error("shadow criterion met but lightcones intersect");
  return outside;
}

void apply_gate(const RegisterShape& shape, const Gate& g, Vec& x) {
  Vec y = Vec::Zero(x.size());
  apply_embedded_serial(shape, g.support, g.unitary.sparseView(1.0, 1e-16), x, y);
  x = std::move(y);
}

StateVector simulate(const Circuit& c, const StateVector& input) {
  if (!(input.shape == c.shape)) throw std::invalid_argument("input shape mismatch");
  Vec x = input.amplitudes;
  for (const auto& g : c.gates) apply_gate(c.shape, g, x);
  return StateVector(c.shape, std::move(x));
}

std::vector<StateVector> snapshots(const Circuit& c, const StateVector& input) {
  if (!(input.shape == c.shape)) throw std::invalid_argument("input shape mismatch");
  std::vector<StateVector> out;
  out.reserve(c.gates.size() + 1);
  out.push_back(input);
  Vec x = input.amplitudes;
  for (const auto& g : c.gates) {
    apply_gate(c.shape, g, x);
    out.push_back(StateVector(c.shape, x));
  }
  return out;
}

FactorizationResult factorization_check(const Circuit& c, const HermitianTerm& a,
                                        const HermitianTerm& b,
                                        const std::vector<int>& traced) {
  std::set<int> off(traced.begin(), traced.end());
  for (int s : a.support)
    if (off.count(s)) throw std::invalid_argument("operator support overlaps traced sites");
  for (int s : b.support)
    if (off.count(s)) throw std::invalid_argument("operator support overlaps traced sites");
  for (int s : a.support)
    for (int t : b.support)
      if (s == t) throw std::invalid_argument("operator supports must be disjoint");

  StateVector psi = simulate(c, StateVector::basis(c.shape, std::int64_t(0)));
  double ea = expectation_term(c.shape, a, psi.amplitudes);
  double eb = expectation_term(c.shape, b, psi.amplitudes);
  // A (x) B as one operator on the merged support
  std::vector<int> merged = a.support;
  merged.insert(merged.end(), b.support.begin(), b.support.end());
  std::sort(merged.begin(), merged.end());
  Mat am = reindex_local(c.shape, a.support, Mat(a.op), merged);
  Mat bm = reindex_local(c.shape, b.support, Mat(b.op), merged);
  HermitianTerm ab{merged, SpMat((am * bm).sparseView(1.0, 1e-16)), TermTag::other};
  FactorizationResult r;
  r.lhs = expectation_term(c.shape, ab, psi.amplitudes);
  r.rhs = ea * eb;
  r.discrepancy = std::abs(r.lhs - r.rhs);
  Layering l = layerize(c);
  std::vector<int> asup = a.support, bsup = b.support;
  LightconeReport ra = lightcone(c, l, asup);
  LightconeReport rb = lightcone(c, l, bsup);
  std::set<int> ca(ra.lightcone_gates.begin(), ra.lightcone_gates.end());
  r.lightcones_disjoint = true;
  for (int gi : rb.lightcone_gates)
    if (ca.count(gi)) r.lightcones_disjoint = false;
  return r;
}

namespace {

Mat matrix_from_json(const json& j, std::int64_t d) {
  if (!j.is_array() || static_cast<std::int64_t>(j.size()) != d * d)
    throw std::invalid_argument("matrix must be a flat row-major list of d*d [re,im] pairs");
  Mat m(d, d);
  for (std::int64_t k = 0; k < d * d; ++k) {
    const auto& e = j[k];
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("matrix entry must be [re,im]");
    m(k / d, k % d) = cplx(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

}  // namespace

Circuit circuit_from_json_text(const std::string& text) {
  json j = json::parse(text);
  Circuit c;
  c.shape = RegisterShape(j.at("dims").get<std::vector<int>>());
  c.witness_count = j.value("witness_count", 0);
  for (const auto& gj : j.value("gates", json::array())) {
    Gate g;
    g.label = gj.at("label").get<std::string>();
    g.support = gj.at("support").get<std::vector<int>>();
    std::vector<int> dims;
    std::int64_t d = 1;
    for (int s : g.support) {
      c.shape.check_site(s);
      dims.push_back(c.shape.dims[s]);
      d *= c.shape.dims[s];
    }
    if (gj.contains("unitary"))
      g.unitary = matrix_from_json(gj["unitary"], d);
    else
      g.unitary = builtin_gate(g.label, dims);
    c.gates.push_back(std::move(g));
  }
  c.validate();
  return c;
}

Circuit circuit_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return circuit_from_json_text(text);
}

std::string circuit_to_json_text(const Circuit& c) {
  json j;
  j["dims"] = c.shape.dims;
  j["witness_count"] = c.witness_count;
  j["gates"] = json::array();
  for (const auto& g : c.gates) {
    json gj;
    gj["label"] = g.label;
    gj["support"] = g.support;
    json m = json::array();
    for (std::int64_t r = 0; r < g.unitary.rows(); ++r)
      for (std::int64_t col = 0; col < g.unitary.cols(); ++col)
        m.push_back({g.unitary(r, col).real(), g.unitary(r, col).imag()});
    gj["unitary"] = m;
    j["gates"].push_back(std::move(gj));
  }
  return j.dump(2);
}

}  // namespace clockforge
