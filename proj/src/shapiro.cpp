#include "plectic/shapiro.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <set>

#include <omp.h>

#include "plectic/elliptic.hpp"

namespace plectic {

// ------------------------------------------------------------ elements

Mat2p embed_matrix(const Mat2F& g, PrimeSide s) {
  return {embed_F(g(0, 0), s, -1), embed_F(g(0, 1), s, -1), embed_F(g(1, 0), s, -1), embed_F(g(1, 1), s, -1)};
}

GroupElement GroupElement::from_exact(const Mat2F& g, u64 p) {
  return {g, {embed_matrix(g, {p, 1}), embed_matrix(g, {p, 2})}};
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  GroupElement r;
  if (exact && o.exact) r.exact = *exact * *o.exact;
  r.s = s * o.s;
  return r;
}

GroupElement GroupElement::inverse() const {
  GroupElement r;
  if (exact) r.exact = exact->inverse();
  r.s = s.inverse();
  return r;
}

FiniteCochain evaluate(const Cocycle& c, const GroupElement& g, int m, u64 modulus, int threads) {
  Tree T(c.p());
  auto ev = T.even_edges(m);
  FiniteCochain r(c.p(), m, modulus);
  size_t n = ev.size();
  std::exception_ptr err;
  int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (size_t i = 0; i < n; ++i) {
    try {
      for (size_t j = 0; j < n; ++j) r.set_at(i, j, c.value(g, ev[i], ev[j]));
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return r;
}

Vertex base_of_parity(const Tree& T, const Vertex& v) { return v.dist % 2 == 0 ? T.base() : T.base_hat(); }

namespace {

// Edge whose normal form carries the base vertex of v's parity to v.
TreeEdge vertex_edge(const Tree& T, const Vertex& v) {
  if (v.dist % 2 == 1) return {v, true};
  return {T.children(v)[0], true};
}

}  // namespace

SMatrix local_transporter(const Tree& T, int component, const Vertex& v, const TreeEdge& e) {
  Mat2p nv = T.normal_form(vertex_edge(T, v)), ne = T.normal_form(e);
  if (component == 1) return {nv.adjugate(), ne.adjugate()};
  return {ne.adjugate(), nv.adjugate()};
}

// ------------------------------------------------------ synthetic cocycle

SyntheticCocycle::SyntheticCocycle(u64 p, std::vector<Dirac> M, FiniteCochain D0)
    : p_(p), T_(p), M_(std::move(M)), D0_(std::move(D0)) {}

i64 SyntheticCocycle::harmonic_part(const TreeEdge& e1, const TreeEdge& e2) const {
  Ball b1 = T_.edge_ball(e1), b2 = T_.edge_ball(e2);
  i64 s = 0;
  for (const Dirac& d : M_) {
    int u = static_cast<int>(b1.contains(d.x1)) - static_cast<int>(b1.contains(d.y1));
    if (u == 0) continue;
    int v = static_cast<int>(b2.contains(d.x2)) - static_cast<int>(b2.contains(d.y2));
    s += d.coeff * u * v;
  }
  return s;
}

i64 SyntheticCocycle::d0(const TreeEdge& e1, const TreeEdge& e2) const {
  if (e1.depth() > D0_.depth() || e2.depth() > D0_.depth()) return 0;
  return D0_.value(e1, e2);
}

i64 SyntheticCocycle::value(const GroupElement& g, const TreeEdge& e1, const TreeEdge& e2) const {
  SMatrix gi = g.s.inverse();
  TreeEdge f1 = T_.act(gi.g1, e1), f2 = T_.act(gi.g2, e2);
  return harmonic_part(f1, f2) - harmonic_part(e1, e2) + d0(f1, f2) - d0(e1, e2);
}

GroupElement SyntheticCocycle::transporter(int component, const Vertex& v, const TreeEdge& e) const {
  return GroupElement::local(local_transporter(T_, component, v, e));
}

FiniteCochain SyntheticCocycle::clean(const GroupElement& g, int m, u64 modulus) const {
  auto ev = T_.even_edges(m);
  FiniteCochain r(p_, m, modulus);
  SMatrix gi = g.s.inverse();
  std::vector<TreeEdge> f1(ev.size()), f2(ev.size());
  for (size_t i = 0; i < ev.size(); ++i) {
    f1[i] = T_.act(gi.g1, ev[i]);
    f2[i] = T_.act(gi.g2, ev[i]);
  }
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < ev.size(); ++i)
    for (size_t j = 0; j < ev.size(); ++j)
      r.set_at(i, j, harmonic_part(f1[i], f2[j]) - harmonic_part(ev[i], ev[j]));
  return r;
}

// ------------------------------------------------------------------ kappa

namespace {

FieldElement fe(long D, long a, long b = 0) { return FieldElement(D, a, b); }

bool is_power_of(mpz_class n, u64 p) {
  if (n < 0) n = -n;
  if (n == 0) return false;
  while (n % p == 0) n /= p;
  return n == 1;
}

bool is_s_unit(const FieldElement& x, u64 p) {
  if (x.is_zero()) return false;
  mpq_class nrm = x.norm();
  if (!is_power_of(nrm.get_num(), p) || !is_power_of(nrm.get_den(), p)) return false;
  return is_power_of(x.a().get_den(), p) && is_power_of(x.b().get_den(), p);
}

}  // namespace

i64 unit_exponent(const FieldElement& x, u64 p) {
  long D = x.D();
  if (!is_s_unit(x, p)) throw Error(ErrorKind::InvalidArgument, "not an S-unit: " + x.str());
  FieldElement pi1 = uniformizer(D, {p, 1}), pi2 = uniformizer(D, {p, 2});
  int a = valuation_at(x, {p, 1}), b = valuation_at(x, {p, 2});
  FieldElement y = x * pi1.pow(-a) * pi2.pow(-b);
  FieldElement eps = fundamental_unit(D);
  double r = std::log(std::fabs(y.to_double())) / std::log(std::fabs(eps.to_double()));
  i64 n = std::llround(r);
  FieldElement en = eps.pow(n);
  if (y == en || y == -en) return n;
  throw Error(ErrorKind::InvalidArgument, "unit outside +-eps^Z: " + y.str());
}

std::string kappa_key(const Mat2F& h, u64 p) {
  long D = h.D();
  int i = PadicNumber::kInf, j = PadicNumber::kInf;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      if (!h(r, c).is_zero()) {
        i = std::min(i, valuation_at(h(r, c), {p, 1}));
        j = std::min(j, valuation_at(h(r, c), {p, 2}));
      }
  if (i >= PadicNumber::kInf) throw Error(ErrorKind::InvalidArgument, "zero matrix");
  FieldElement s = uniformizer(D, {p, 1}).pow(-i) * uniformizer(D, {p, 2}).pow(-j);
  Mat2F n(h(0, 0) * s, h(0, 1) * s, h(1, 0) * s, h(1, 1) * s);
  for (int k = 0; k < 4; ++k) {
    const FieldElement& x = n(k / 2, k % 2);
    if (x.is_zero()) continue;
    if (x.a() < 0 || (x.a() == 0 && x.b() < 0)) n = Mat2F(-n(0, 0), -n(0, 1), -n(1, 0), -n(1, 1));
    break;
  }
  std::string out;
  for (int k = 0; k < 4; ++k) {
    const FieldElement& x = n(k / 2, k % 2);
    if (k) out += ";";
    out += x.a().get_str() + "," + x.b().get_str();
  }
  return out;
}

KappaOracle KappaOracle::table(std::map<std::string, i64> t) {
  KappaOracle k(Kind::Table);
  k.table_ = std::move(t);
  return k;
}

std::string KappaOracle::kind_name() const {
  switch (kind_) {
    case Kind::Zero:
      return "zero";
    case Kind::UnitExponent:
      return "unit_exponent";
    case Kind::Table:
      return "table";
  }
  return "";
}

i64 KappaOracle::operator()(const Mat2F& h, u64 p) const {
  switch (kind_) {
    case Kind::Zero:
      return 0;
    case Kind::UnitExponent: {
      i64 v = plectic::unit_exponent(h.det(), p);
      if (rec_) {
        std::string key = kappa_key(h, p);
        std::lock_guard<std::mutex> lock(rec_->mu);
        auto [it, fresh] = rec_->seen.emplace(key, v);
        if (!fresh && it->second != v)
          throw Error(ErrorKind::InvalidArgument, "kappa not constant on the key class " + key);
      }
      return v;
    }
    case Kind::Table: {
      auto it = table_.find(kappa_key(h, p));
      if (it == table_.end()) throw Error(ErrorKind::OracleIncomplete, "kappa table has no entry for " + h.str());
      return it->second;
    }
  }
  return 0;
}

void KappaOracle::start_recording() {
  if (kind_ != Kind::UnitExponent) throw Error(ErrorKind::InvalidArgument, "only computed oracles can record");
  rec_ = std::make_shared<Recorder>();
}

std::map<std::string, i64> KappaOracle::recorded() const {
  if (!rec_) return {};
  std::lock_guard<std::mutex> lock(rec_->mu);
  return rec_->seen;
}

// --------------------------------------------------------------- fixtures

namespace {

nlohmann::json fe_json(const FieldElement& x) { return nlohmann::json::array({x.a().get_str(), x.b().get_str()}); }

nlohmann::json mat_json(const Mat2F& g) {
  return nlohmann::json::array(
      {nlohmann::json::array({fe_json(g(0, 0)), fe_json(g(0, 1))}), nlohmann::json::array({fe_json(g(1, 0)), fe_json(g(1, 1))})});
}

Mat2F parse_mat(const nlohmann::json& j, long D, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 || !j[1].is_array() || j[1].size() != 2)
    throw Error(ErrorKind::SchemaError, where + ": matrix must be [[a, b], [c, d]]");
  try {
    return Mat2F(parse_field_element(j[0][0], D), parse_field_element(j[0][1], D), parse_field_element(j[1][0], D),
                 parse_field_element(j[1][1], D));
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaError, where + ": " + e.what());
  }
}

std::string tree_key(int k) { return "tree" + std::to_string(k); }

}  // namespace

RadialEntry make_radial_entry(const Mat2F& g, u64 p) {
  RadialEntry r;
  r.g = g;
  r.ginv = g.inverse();
  for (int k = 0; k < 2; ++k) {
    r.local[k] = embed_matrix(g, {p, k + 1});
    r.local_inv[k] = embed_matrix(r.ginv, {p, k + 1});
  }
  return r;
}

Fixture parse_fixture(const nlohmann::json& j) {
  Fixture f;
  try {
    if (!j.is_object()) throw Error(ErrorKind::SchemaError, "fixture must be a JSON object");
    f.schema = j.at("schema").get<int>();
    if (f.schema != 1) throw Error(ErrorKind::SchemaError, "unsupported schema " + std::to_string(f.schema));
    f.label = j.value("label", "");
    f.D = j.at("D").get<long>();
    f.p = j.at("p").get<u64>();
    if (f.D % 4 != 1) throw Error(ErrorKind::EmbeddingUnavailable, "D must be 1 mod 4");
    if (!is_residue(f.D, f.p) || f.D % static_cast<long>(f.p) == 0)
      throw Error(ErrorKind::EmbeddingUnavailable, "p does not split in F");
    f.beta = parse_field_element(j.at("beta"), f.D);
    const auto& c = j.at("curve");
    if (!c.is_array() || c.size() != 5) throw Error(ErrorKind::SchemaError, "curve needs five coefficients");
    for (int i = 0; i < 5; ++i) f.curve[i] = parse_field_element(c[i], f.D);
    f.depth = j.at("depth").get<int>();
    if (f.depth < 1) throw Error(ErrorKind::SchemaError, "depth must be >= 1");
    const auto& gens = j.at("generators");
    for (size_t i = 0; i < gens.size(); ++i)
      f.generators.push_back(parse_mat(gens[i], f.D, "generators[" + std::to_string(i) + "]"));
    f.psi = parse_mat(j.at("psi"), f.D, "psi");
    const auto& rad = j.at("radial");
    Tree T(f.p);
    for (int k = 1; k <= 2; ++k) {
      const auto& t = rad.at(tree_key(k));
      for (const auto& [id, m] : t.at("edges").items()) {
        T.parse_edge(id);
        f.radial[k - 1].edges[id] = make_radial_entry(parse_mat(m, f.D, tree_key(k) + " edge " + id), f.p);
      }
      for (const auto& [id, m] : t.at("vertices").items()) {
        T.parse_vertex(id);
        f.radial[k - 1].vertices[id] = make_radial_entry(parse_mat(m, f.D, tree_key(k) + " vertex " + id), f.p);
      }
    }
    const auto& kj = j.at("kappa");
    std::string kind = kj.at("kind").get<std::string>();
    if (kind == "zero") {
      f.kappa = KappaOracle::zero();
    } else if (kind == "unit_exponent") {
      f.kappa = KappaOracle::unit_exponent();
    } else if (kind == "table") {
      std::map<std::string, i64> t;
      for (const auto& row : kj.at("table")) {
        if (!row.is_array() || row.size() != 2) throw Error(ErrorKind::SchemaError, "kappa table rows are [key, value]");
        t[row[0].get<std::string>()] = row[1].get<i64>();
      }
      f.kappa = KappaOracle::table(std::move(t));
    } else {
      throw Error(ErrorKind::SchemaError, "unknown kappa kind " + kind);
    }
    if (j.contains("expected")) f.expected = j["expected"];
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("fixture: ") + e.what());
  }
  return f;
}

Fixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SchemaError, "cannot open fixture " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, "fixture " + path + " does not parse: " + e.what());
  }
  Fixture f = parse_fixture(j);
  validate(f);
  return f;
}

nlohmann::json to_json(const Fixture& f) {
  nlohmann::json j;
  j["schema"] = f.schema;
  j["label"] = f.label;
  j["D"] = f.D;
  j["p"] = f.p;
  j["beta"] = fe_json(f.beta);
  j["curve"] = nlohmann::json::array();
  for (const auto& c : f.curve) j["curve"].push_back(fe_json(c));
  j["depth"] = f.depth;
  j["generators"] = nlohmann::json::array();
  for (const auto& g : f.generators) j["generators"].push_back(mat_json(g));
  j["psi"] = mat_json(f.psi);
  for (int k = 1; k <= 2; ++k) {
    nlohmann::json t;
    t["edges"] = nlohmann::json::object();
    t["vertices"] = nlohmann::json::object();
    for (const auto& [id, r] : f.radial[k - 1].edges) t["edges"][id] = mat_json(r.g);
    for (const auto& [id, r] : f.radial[k - 1].vertices) t["vertices"][id] = mat_json(r.g);
    j["radial"][tree_key(k)] = t;
  }
  j["kappa"]["kind"] = f.kappa.kind_name();
  if (f.kappa.kind() == KappaOracle::Kind::Table) {
    j["kappa"]["table"] = nlohmann::json::array();
    for (const auto& [k, v] : f.kappa.entries()) j["kappa"]["table"].push_back({k, v});
  }
  if (!f.expected.is_null()) j["expected"] = f.expected;
  return j;
}

void validate(const Fixture& f, int spot_depth) {
  Tree T(f.p);
  auto det_check = [&](const Mat2F& g, const std::string& what, ErrorKind kind) {
    if (!is_s_unit(g.det(), f.p)) throw Error(kind, what + ": determinant is not a unit times a power of p");
  };
  for (size_t i = 0; i < f.generators.size(); ++i)
    det_check(f.generators[i], "generators[" + std::to_string(i) + "]", ErrorKind::SchemaError);
  det_check(f.psi, "psi", ErrorKind::SchemaError);
  for (int k = 1; k <= 2; ++k) {
    const RadialSystem& R = f.radial[k - 1];
    int other = 2 - k;
    for (const TreeEdge& e : T.even_edges(f.depth)) {
      std::string id = T.id(e);
      auto it = R.edges.find(id);
      if (it == R.edges.end())
        throw Error(ErrorKind::RadialContractViolation, tree_key(k) + " radial system misses edge " + id);
      det_check(it->second.g, tree_key(k) + " edge " + id, ErrorKind::RadialContractViolation);
      if (e.depth() > spot_depth) continue;
      if (T.act(it->second.local_inv[k - 1], T.base_edge()) != e)
        throw Error(ErrorKind::RadialContractViolation, tree_key(k) + " radial element does not carry the base to edge " + id);
      if (T.act(it->second.local[other], T.base_edge()) != T.base_edge())
        throw Error(ErrorKind::RadialContractViolation,
                    tree_key(k) + " radial element for edge " + id + " moves the base edge of the other tree");
    }
    for (const Vertex& v : T.vertices(f.depth - 1)) {
      std::string id = T.id(v);
      auto it = R.vertices.find(id);
      if (it == R.vertices.end())
        throw Error(ErrorKind::RadialContractViolation, tree_key(k) + " radial system misses vertex " + id);
      det_check(it->second.g, tree_key(k) + " vertex " + id, ErrorKind::RadialContractViolation);
      if (v.dist > spot_depth) continue;
      if (T.act(it->second.local_inv[k - 1], base_of_parity(T, v)) != v)
        throw Error(ErrorKind::RadialContractViolation,
                    tree_key(k) + " radial element does not carry the base to vertex " + id);
      if (T.act(it->second.local[other], T.base_edge()) != T.base_edge())
        throw Error(ErrorKind::RadialContractViolation,
                    tree_key(k) + " radial element for vertex " + id + " moves the base edge of the other tree");
    }
  }
}

// -------------------------------------------------------- synthetic data

Mat2F radial_normal_form(long D, u64 p, int tree, const TreeEdge& e) {
  Tree T(p);
  FieldElement pi = uniformizer(D, {p, tree}), rho = uniformizer(D, {p, 3 - tree});
  FieldElement one = fe(D, 1), zero = fe(D, 0);
  if (!e.outward) {
    Mat2F J(pi, pi * rho, one, pi);
    return radial_normal_form(D, p, tree, T.opposite(e)) * J;
  }
  int K = e.far.dist;
  if (T.infinite_branch(e.far)) {
    Mat2F Y(one, rho, one, one + rho);
    TreeEdge f = T.act(embed_matrix(Y.inverse(), {p, tree}), e);
    if (T.infinite_branch(f.far) || !f.outward) throw Error(ErrorKind::InvalidArgument, "branch change failed");
    return Y * radial_normal_form(D, p, tree, f);
  }
  u64 pk = ppow(p, K);
  u64 r = embed_F(rho, {p, tree}, K).residue(K);
  u64 s = invmod(r, pk);
  u64 ct = mulmod(e.far.code % pk, s, pk);
  return Mat2F(pi.pow(K - 1), rho * FieldElement(D, mpz_class(std::to_string(ct))), zero, one);
}

namespace {

Mat2F radial_vertex_form(long D, u64 p, int tree, const Vertex& v) {
  Tree T(p);
  return radial_normal_form(D, p, tree, vertex_edge(T, v));
}

int twist_exponent(u64 seed, int tree, const std::string& id) {
  size_t h = std::hash<std::string>{}(std::to_string(seed) + "/" + std::to_string(tree) + "/" + id);
  return static_cast<int>(h % 3) - 1;
}

}  // namespace

Fixture synthetic_fixture(const SyntheticOptions& opt) {
  Fixture f;
  f.label = "synthetic";
  f.D = 37;
  f.p = 3;
  long D = f.D;
  f.beta = FieldElement(D, 62, -21);
  f.curve = {fe(D, 1), fe(D, 0, 1), fe(D, 1), fe(D, 1, 1), fe(D, 2)};
  f.depth = opt.depth;
  Tree T(f.p);
  FieldElement eps = fundamental_unit(D), one = fe(D, 1), zero = fe(D, 0);
  FieldElement pi1 = uniformizer(D, {f.p, 1}), pi2 = uniformizer(D, {f.p, 2});
  f.generators = {Mat2F(one, one, zero, one), Mat2F(eps, zero, zero, one), Mat2F(one, zero, fe(D, 3), one),
                  Mat2F(one, pi2, one, one + pi2), Mat2F(one, pi1, one, one + pi1)};
  f.psi = Mat2F(zero, fe(D, -1), one, zero);
  for (int k = 1; k <= 2; ++k) {
    auto twisted = [&](const Mat2F& g, const std::string& id) {
      if (!opt.twist) return g;
      return Mat2F(eps.pow(twist_exponent(opt.seed, k, id)), zero, zero, one) * g;
    };
    for (const TreeEdge& e : T.even_edges(f.depth)) {
      std::string id = T.id(e);
      f.radial[k - 1].edges[id] = make_radial_entry(twisted(radial_normal_form(D, f.p, k, e).inverse(), id), f.p);
    }
    for (const Vertex& v : T.vertices(f.depth - 1)) {
      std::string id = T.id(v);
      f.radial[k - 1].vertices[id] = make_radial_entry(twisted(radial_vertex_form(D, f.p, k, v).inverse(), id), f.p);
    }
  }
  if (opt.kappa == "zero") {
    f.kappa = KappaOracle::zero();
  } else if (opt.kappa == "unit") {
    f.kappa = KappaOracle::unit_exponent();
  } else if (opt.kappa == "table") {
    // Record the values of the computed oracle on every query of the pipeline at this depth.
    f.kappa = KappaOracle::unit_exponent();
    f.kappa.start_recording();
    ShapiroCocycle c(f);
    for (int comp = 1; comp <= 2; ++comp)
      for (const Vertex& v : T.vertices(f.depth - 1))
        for (const TreeEdge& e : T.even_edges(f.depth)) {
          GroupElement g = c.transporter(comp, v, e);
          for (const TreeEdge& s : T.star(base_of_parity(T, v))) {
            int sg;
            TreeEdge se = T.to_even(s, &sg);
            if (comp == 1)
              c.value(g, se, T.base_edge());
            else
              c.value(g, T.base_edge(), se);
          }
        }
    std::vector<Mat2F> gs = f.generators;
    gs.push_back(f.psi);
    for (const Mat2F& m : gs) {
      GroupElement g = GroupElement::from_exact(m, f.p);
      int mo = f.depth - reach(T, g.s);
      if (mo >= 1) evaluate(c, g, mo);
    }
    f.kappa = KappaOracle::table(f.kappa.recorded());
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown synthetic kappa " + opt.kappa);
  }
  return f;
}

// --------------------------------------------------------------- Shapiro

ShapiroCocycle::ShapiroCocycle(const Fixture& f) : f_(f), T_(f.p) {}

const RadialEntry& ShapiroCocycle::edge_radial(int tree, const TreeEdge& e) const {
  const auto& R = f_.radial[tree - 1].edges;
  auto it = R.find(T_.id(e));
  if (it == R.end())
    throw Error(ErrorKind::DepthExceeded, tree_key(tree) + " edge " + T_.id(e) + " outside the radial system");
  return it->second;
}

const RadialEntry& ShapiroCocycle::vertex_radial(int tree, const Vertex& v) const {
  const auto& R = f_.radial[tree - 1].vertices;
  auto it = R.find(T_.id(v));
  if (it == R.end())
    throw Error(ErrorKind::DepthExceeded, tree_key(tree) + " vertex " + T_.id(v) + " outside the radial system");
  return it->second;
}

Reduction ShapiroCocycle::reduce(const Mat2F& g, const TreeEdge& e, int tree) const {
  Mat2p gi = embed_matrix(g.inverse(), {f_.p, tree});
  TreeEdge ep = T_.act(gi, e);
  if (!T_.is_even(ep)) throw Error(ErrorKind::InvalidArgument, "group element does not preserve parity");
  const RadialEntry& a = edge_radial(tree, e);
  const RadialEntry& b = edge_radial(tree, ep);
  return {a.g * g * b.ginv, ep};
}

Mat2F ShapiroCocycle::reduce_pair(const Mat2F& g, const TreeEdge& e1, const TreeEdge& e2) const {
  Reduction r1 = reduce(g, e1, 1);
  TreeEdge f2 = T_.act(edge_radial(1, e1).local[1], e2);
  return reduce(r1.b, f2, 2).b;
}

i64 ShapiroCocycle::value_uncached(const Mat2F& g, const TreeEdge& e1, const TreeEdge& e2) const {
  return f_.kappa(reduce_pair(g, e1, e2), f_.p);
}

i64 ShapiroCocycle::value(const GroupElement& g, const TreeEdge& e1, const TreeEdge& e2) const {
  if (!g.exact) throw Error(ErrorKind::InvalidArgument, "Shapiro cocycle needs exact group elements");
  std::string key = g.exact->str() + "|" + T_.id(e1) + "|" + T_.id(e2);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  i64 v = value_uncached(*g.exact, e1, e2);
  std::lock_guard<std::mutex> lock(mu_);
  cache_[key] = v;
  return v;
}

GroupElement ShapiroCocycle::transporter(int component, const Vertex& v, const TreeEdge& e) const {
  int other = 3 - component;
  const RadialEntry& gv = vertex_radial(component, v);
  TreeEdge y = T_.act(gv.local[other - 1], e);
  const RadialEntry& ge = edge_radial(other, y);
  return GroupElement::from_exact(ge.g * gv.g, f_.p);
}

size_t ShapiroCocycle::cache_size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

}  // namespace plectic
