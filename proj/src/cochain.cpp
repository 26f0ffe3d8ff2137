#include "plectic/cochain.hpp"

#include <cstdio>

namespace plectic {

int reach(const Tree& T, const SMatrix& g) { return std::max(T.reach(g.g1), T.reach(g.g2)); }

// ------------------------------------------------------------ TreeCochain

TreeCochain::TreeCochain(u64 p, int m) : p_(p), m_(m), v_(Tree(p).even_edges_upto(m), 0) {}

i64 TreeCochain::value(const TreeEdge& e) const {
  Tree T(p_);
  if (e.depth() > m_) throw Error(ErrorKind::OutOfDepth, "edge " + T.id(e) + " beyond cochain depth");
  int s;
  TreeEdge ee = T.to_even(e, &s);
  return s * v_[T.even_index(ee)];
}

void TreeCochain::set(const TreeEdge& e, i64 x) {
  Tree T(p_);
  if (e.depth() > m_) throw Error(ErrorKind::OutOfDepth, "edge " + T.id(e) + " beyond cochain depth");
  int s;
  TreeEdge ee = T.to_even(e, &s);
  v_[T.even_index(ee)] = s * x;
}

TreeCochain dirac_cochain(const Tree& T, const P1Point& x, const P1Point& y, int m) {
  TreeCochain c(T.p(), m);
  auto ev = T.even_edges(m);
  for (size_t i = 0; i < ev.size(); ++i) {
    Ball b = T.edge_ball(ev[i]);
    c.data()[i] = static_cast<i64>(b.contains(x)) - static_cast<i64>(b.contains(y));
  }
  return c;
}

std::vector<i64> phi(const TreeCochain& c) {
  Tree T(c.p());
  std::vector<i64> out;
  for (const Vertex& v : T.vertices(c.depth() - 1)) {
    i64 s = 0;
    for (const TreeEdge& e : T.star(v)) s += c.value(e);
    out.push_back(s);
  }
  return out;
}

i64 measure(const TreeCochain& c, const std::vector<TreeEdge>& U) {
  i64 s = 0;
  for (const TreeEdge& e : U) s += c.value(e);
  return s;
}

// ---------------------------------------------------------- FiniteCochain

FiniteCochain::FiniteCochain(u64 p, int m, u64 modulus)
    : p_(p), m_(m), mod_(modulus), n_(Tree(p).even_edges_upto(m)), v_(n_ * n_, 0) {}

i64 FiniteCochain::normalize(i64 x) const {
  if (mod_ == 0) return x;
  i64 m = static_cast<i64>(mod_);
  x %= m;
  return x < 0 ? x + m : x;
}

i64 FiniteCochain::value(const TreeEdge& e1, const TreeEdge& e2) const {
  Tree T(p_);
  if (e1.depth() > m_ || e2.depth() > m_) throw Error(ErrorKind::OutOfDepth, "multiedge beyond cochain depth");
  int s1, s2;
  TreeEdge a = T.to_even(e1, &s1), b = T.to_even(e2, &s2);
  return normalize(s1 * s2 * at(T.even_index(a), T.even_index(b)));
}

void FiniteCochain::set(const TreeEdge& e1, const TreeEdge& e2, i64 x) {
  Tree T(p_);
  if (e1.depth() > m_ || e2.depth() > m_) throw Error(ErrorKind::OutOfDepth, "multiedge beyond cochain depth");
  int s1, s2;
  TreeEdge a = T.to_even(e1, &s1), b = T.to_even(e2, &s2);
  set_at(T.even_index(a), T.even_index(b), s1 * s2 * x);
}

FiniteCochain FiniteCochain::operator+(const FiniteCochain& o) const {
  FiniteCochain r = *this;
  for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = normalize(v_[i] + o.v_[i]);
  return r;
}

FiniteCochain FiniteCochain::operator-(const FiniteCochain& o) const {
  FiniteCochain r = *this;
  for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = normalize(v_[i] - o.v_[i]);
  return r;
}

FiniteCochain FiniteCochain::operator*(i64 k) const {
  FiniteCochain r = *this;
  for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = normalize(v_[i] * normalize(k));
  return r;
}

bool FiniteCochain::operator==(const FiniteCochain& o) const {
  return p_ == o.p_ && m_ == o.m_ && mod_ == o.mod_ && v_ == o.v_;
}

bool FiniteCochain::is_zero() const {
  for (i64 x : v_)
    if (x != 0) return false;
  return true;
}

FiniteCochain FiniteCochain::reduced(u64 modulus) const {
  FiniteCochain r(p_, m_, modulus);
  for (size_t i = 0; i < v_.size(); ++i) r.v_[i] = r.normalize(v_[i]);
  return r;
}

FiniteCochain FiniteCochain::truncated(int k) const {
  if (k > m_) throw Error(ErrorKind::OutOfDepth, "truncation deeper than cochain");
  FiniteCochain r(p_, k, mod_);
  for (size_t i = 0; i < r.n_; ++i)
    for (size_t j = 0; j < r.n_; ++j) r.v_[i * r.n_ + j] = at(i, j);
  return r;
}

FiniteCochain tensor(const TreeCochain& a, const TreeCochain& b) {
  if (a.depth() != b.depth()) throw Error(ErrorKind::InvalidArgument, "tensor of cochains of different depth");
  FiniteCochain c(a.p(), a.depth());
  size_t n = a.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) c.set_at(i, j, a.data()[i] * b.data()[j]);
  return c;
}

// ------------------------------------------------------------------ phi

bool PhiTable::is_zero() const {
  for (i64 x : v)
    if (x != 0) return false;
  return true;
}

namespace {

struct Signed {
  size_t index;
  int sign;
};

std::vector<std::vector<Signed>> star_stencils(const Tree& T, int m) {
  std::vector<std::vector<Signed>> out;
  for (const Vertex& v : T.vertices(m - 1)) {
    std::vector<Signed> st;
    for (const TreeEdge& e : T.star(v)) {
      int s;
      TreeEdge ee = T.to_even(e, &s);
      st.push_back({T.even_index(ee), s});
    }
    out.push_back(st);
  }
  return out;
}

}  // namespace

PhiTable phi(const FiniteCochain& c, int component) {
  Tree T(c.p());
  int m = c.depth();
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "phi needs depth >= 1");
  auto stencils = star_stencils(T, m);
  PhiTable t;
  t.m = m;
  t.rows = stencils.size();
  t.cols = c.side();
  t.modulus = c.modulus();
  t.v.assign(t.rows * t.cols, 0);
#pragma omp parallel for schedule(static)
  for (size_t r = 0; r < t.rows; ++r) {
    for (size_t j = 0; j < t.cols; ++j) {
      i64 s = 0;
      for (const Signed& st : stencils[r])
        s += st.sign * (component == 1 ? c.at(st.index, j) : c.at(j, st.index));
      t.v[r * t.cols + j] = c.normalize(s);
    }
  }
  return t;
}

bool is_harmonic(const FiniteCochain& c) { return phi(c, 1).is_zero() && phi(c, 2).is_zero(); }

i64 measure(const FiniteCochain& c, const std::vector<MultiEdge>& U) {
  i64 s = 0;
  for (const auto& [e1, e2] : U) {
    if (e1.depth() > c.depth() || e2.depth() > c.depth())
      throw Error(ErrorKind::OutOfDepth, "set not expressible at cochain depth");
    s += c.value(e1, e2);
  }
  return c.normalize(s);
}

// -------------------------------------------------------------- action

namespace {

std::vector<Signed> pullback(const Tree& T, const Mat2p& ginv, int mout) {
  auto ev = T.even_edges(mout);
  std::vector<Signed> out(ev.size());
  for (size_t i = 0; i < ev.size(); ++i) {
    int s;
    TreeEdge ee = T.to_even(T.act(ginv, ev[i]), &s);
    out[i] = {T.even_index(ee), s};
  }
  return out;
}

}  // namespace

FiniteCochain act(const SMatrix& g, const FiniteCochain& D) {
  Tree T(D.p());
  int mout = D.depth() - reach(T, g);
  if (mout < 0) throw Error(ErrorKind::OutOfDepth, "group element moves the base beyond cochain depth");
  SMatrix gi = g.inverse();
  auto f1 = pullback(T, gi.g1, mout);
  auto f2 = pullback(T, gi.g2, mout);
  FiniteCochain r(D.p(), mout, D.modulus());
  size_t n = r.side();
#pragma omp parallel for schedule(static)
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      r.set_at(i, j, f1[i].sign * f2[j].sign * D.at(f1[i].index, f2[j].index));
  return r;
}

FiniteCochain coboundary(const FiniteCochain& D, const SMatrix& g) {
  FiniteCochain gd = act(g, D);
  return gd - D.truncated(gd.depth());
}

// ------------------------------------------------------------ serialization

nlohmann::json dump(const FiniteCochain& c) {
  Tree T(c.p());
  nlohmann::json j;
  j["p"] = {c.p(), c.p()};
  j["m"] = c.depth();
  j["modulus"] = c.modulus();
  nlohmann::json vals = nlohmann::json::array();
  auto ev = T.even_edges(c.depth());
  for (size_t a = 0; a < ev.size(); ++a)
    for (size_t b = 0; b < ev.size(); ++b) {
      i64 x = c.at(a, b);
      if (x != 0) vals.push_back({T.id(ev[a]) + "|" + T.id(ev[b]), x});
    }
  j["values"] = vals;
  j["digest"] = digest(c);
  return j;
}

FiniteCochain load_cochain(const nlohmann::json& j) {
  try {
    u64 p = j.at("p").at(0).get<u64>();
    FiniteCochain c(p, j.at("m").get<int>(), j.value("modulus", u64(0)));
    Tree T(p);
    for (const auto& e : j.at("values")) {
      std::string key = e.at(0).get<std::string>();
      size_t bar = key.find('|');
      if (bar == std::string::npos) throw Error(ErrorKind::SchemaError, "bad multiedge id " + key);
      c.set(T.parse_edge(key.substr(0, bar)), T.parse_edge(key.substr(bar + 1)), e.at(1).get<i64>());
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("cochain dump: ") + e.what());
  }
}

std::string digest(const FiniteCochain& c) {
  u64 h = 1469598103934665603ULL;
  auto mix = [&](u64 x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  mix(c.p());
  mix(static_cast<u64>(c.depth()));
  mix(c.modulus());
  for (i64 x : c.data()) mix(static_cast<u64>(x));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace plectic
