#include "qik/io.hpp"

#include <cmath>

namespace qik::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("bad field '") + key + "': " + e.what());
  }
}

json complexJson(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complexFrom(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError("complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

// JSON has no infinity; null stands for it.
json finite(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json toJson(const Mat& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(complexJson(m(r, c)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Mat matFromJson(const json& j) {
  const int rows = get<int>(j, "rows"), cols = get<int>(j, "cols");
  const json& data = field(j, "data");
  if (rows < 0 || cols < 0 || rows > kMaxDim || cols > kMaxDim) throw InputError("matrix size out of range");
  if (!data.is_array() || int(data.size()) != rows * cols) throw InputError("matrix data has the wrong length");
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = complexFrom(data[size_t(r * cols + c)]);
  return m;
}

json toJson(const Quiver& q) {
  json a = json::array(), b = json::array();
  for (auto& m : q.alphas) a.push_back(toJson(m));
  for (auto& m : q.betas) b.push_back(toJson(m));
  return {{"n", q.n}, {"dims", q.dims}, {"alphas", a}, {"betas", b}};
}

Quiver quiverFromJson(const json& j) {
  Quiver q;
  q.n = get<int>(j, "n");
  q.dims = get<std::vector<int>>(j, "dims");
  const json& a = field(j, "alphas");
  const json& b = field(j, "betas");
  if (!a.is_array() || !b.is_array()) throw InputError("alphas and betas must be arrays");
  for (auto& m : a) q.alphas.push_back(matFromJson(m));
  for (auto& m : b) q.betas.push_back(matFromJson(m));
  if (q.dims.empty()) throw InputError("quiver needs at least one level");
  q.validate();
  return q;
}

json toJson(const GroupElement& g) {
  json f = json::array();
  for (auto& m : g.factors) f.push_back(toJson(m));
  return {{"factors", f}};
}

GroupElement groupFromJson(const json& j) {
  GroupElement g;
  for (auto& m : field(j, "factors")) g.factors.push_back(matFromJson(m));
  return g;
}

json toJson(const StratumLabel& l) {
  json S = json::array();
  for (auto& p : l.S) S.push_back(json::array({p.first, p.second}));
  return {{"sim", l.sim.classes}, {"orbit", l.orbit}, {"S", S}, {"delta", l.delta}, {"m", l.mDims}, {"ell", l.ell}};
}

StratumLabel labelFromJson(const json& j) {
  EquivRelation sim;
  sim.classes = get<std::vector<std::vector<int>>>(j, "sim");
  for (auto& c : sim.classes) sim.n += int(c.size());
  auto orbit = get<std::vector<std::vector<int>>>(j, "orbit");
  StratumLabel l = labelFromOrbit(sim, orbit);
  // the chain data must agree with what the orbit determines
  StratumLabel given = l;
  given.S.clear();
  for (auto& p : get<std::vector<std::vector<int>>>(j, "S")) {
    if (p.size() != 2) throw InputError("S entries are pairs");
    given.S.push_back({p[0], p[1]});
  }
  given.delta = get<std::vector<int>>(j, "delta");
  given.mDims = get<std::vector<int>>(j, "m");
  given.ell = get<int>(j, "ell");
  if (!(given == l)) throw InputError("label fields are inconsistent with (sim, orbit)");
  return l;
}

json toJson(const ClassifyDiagnostics& d) {
  return {{"rotation", {complexJson(d.rotation.a), complexJson(d.rotation.b)}},
          {"rotationAttempts", d.rotationAttempts},
          {"offBlock", d.offBlock},
          {"splitResidual", d.splitResidual},
          {"margin", finite(d.margin)},
          {"starDims", d.starDims}};
}

json toJson(const DiagonalQuiver& d) {
  auto rows = [](const std::vector<std::vector<cplx>>& v) {
    json out = json::array();
    for (auto& r : v) {
      json row = json::array();
      for (auto z : r) row.push_back(complexJson(z));
      out.push_back(row);
    }
    return out;
  };
  return {{"n", d.n}, {"nu", rows(d.nu)}, {"mu", rows(d.mu)}};
}

DiagonalQuiver diagonalFromJson(const json& j) {
  DiagonalQuiver d;
  d.n = get<int>(j, "n");
  auto rows = [](const json& v) {
    std::vector<std::vector<cplx>> out;
    if (!v.is_array()) throw InputError("scalar rows must be arrays");
    for (auto& r : v) {
      std::vector<cplx> row;
      for (auto& z : r) row.push_back(complexFrom(z));
      out.push_back(row);
    }
    return out;
  };
  d.nu = rows(field(j, "nu"));
  d.mu = rows(field(j, "mu"));
  d.validate();
  return d;
}

json toJson(const FlowReport& r) {
  json trace = json::array();
  for (auto& [it, res] : r.stepTrace) trace.push_back(json::array({it, res}));
  return {{"iterations", r.iterations},           {"finalResidual", r.finalResidual},
          {"verdict", verdictName(r.verdict)},    {"groupNorm", r.groupNorm},
          {"maxComplexResidual", r.maxComplexResidual}, {"stepTrace", trace}};
}

json toJson(const StandardizedQuiver& s) {
  json blocks = json::array();
  for (auto& b : s.blocks) blocks.push_back({{"eigenvalue", complexJson(b.eigenvalue)}, {"size", b.size}});
  return {{"form", formName(s.form)},
          {"shape", s.shape == JcfShape::betaShift ? "betaShift" : "alphaSelect"},
          {"quiver", toJson(s.quiver)},
          {"witness", toJson(s.witness)},
          {"blocks", blocks},
          {"snapSize", s.snapSize}};
}

json toJson(const NahmQuad& q) {
  json out = json::array();
  for (auto& m : q) out.push_back(toJson(m));
  return out;
}

NahmQuad quadFromJson(const json& j) {
  if (!j.is_array() || j.size() != 4) throw InputError("Nahm data is a list of four matrices");
  NahmQuad q;
  for (int i = 0; i < 4; ++i) q[size_t(i)] = matFromJson(j[size_t(i)]);
  return q;
}

json toJson(const NahmSolution& s) {
  json values = json::array();
  for (auto& v : s.values) values.push_back(toJson(v));
  return {{"n", s.n},
          {"grid", s.grid},
          {"values", values},
          {"truncated", s.truncated},
          {"diagnostic", s.diagnostic},
          {"maxProjection", s.maxProjection}};
}

NahmSolution nahmFromJson(const json& j) {
  NahmSolution s;
  s.n = get<int>(j, "n");
  s.grid = get<std::vector<double>>(j, "grid");
  for (auto& v : field(j, "values")) s.values.push_back(quadFromJson(v));
  if (s.values.size() != s.grid.size()) throw InputError("grid and values differ in length");
  if (j.contains("truncated")) s.truncated = get<bool>(j, "truncated");
  if (j.contains("diagnostic")) s.diagnostic = get<std::string>(j, "diagnostic");
  if (j.contains("maxProjection")) s.maxProjection = get<double>(j, "maxProjection");
  return s;
}

json toJson(const AsymptoticData& a) {
  json tau = json::array(), sigma = json::array();
  for (auto& m : a.tau) tau.push_back(toJson(m));
  for (auto& m : a.sigma) sigma.push_back(toJson(m));
  return {{"tau", tau},
          {"sigma", sigma},
          {"fitResidual", a.fitResidual},
          {"tauCommutator", a.tauCommutator},
          {"sigmaBracket", a.sigmaBracket},
          {"tauSigma", a.tauSigma}};
}

json toJson(const BielawskiResult& b, bool withIntegrand) {
  json out = {{"value", b.value}, {"convergent", b.convergent}, {"tailSlope", finite(b.tailSlope)}};
  if (withIntegrand) out["integrand"] = b.integrand;
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qik::io
