#include "plectic/bttree.hpp"

#include <algorithm>

namespace plectic {

namespace {

const char kDigits[] = "0123456789abcdefghijklmnopqrstuvwxyz";

int digit_value(char ch) {
  for (int i = 0; i < 36; ++i)
    if (kDigits[i] == ch) return i;
  return -1;
}

}  // namespace

// ------------------------------------------------------------------- Mat2p

Mat2p Mat2p::identity(u64 p) { return from_ints(p, 1, 0, 0, 1); }

Mat2p Mat2p::from_ints(u64 p, i64 a, i64 b, i64 c, i64 d) {
  return {PadicNumber::from_int(p, a), PadicNumber::from_int(p, b), PadicNumber::from_int(p, c),
          PadicNumber::from_int(p, d)};
}

Mat2p Mat2p::operator*(const Mat2p& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

PadicNumber Mat2p::det() const { return a * d - b * c; }

Mat2p Mat2p::adjugate() const { return {d, -b, -c, a}; }

int Mat2p::min_abs_prec() const {
  return std::min(std::min(a.abs_prec(), b.abs_prec()), std::min(c.abs_prec(), d.abs_prec()));
}

// -------------------------------------------------------------------- Ball

bool Ball::contains(const P1Point& x) const {
  bool in;
  if (x.inf) {
    in = false;
  } else {
    PadicNumber diff = x.t - center;
    if (diff.is_zero()) {
      if (diff.abs_prec() < k) throw Error(ErrorKind::InsufficientPrecision, "point too imprecise for ball test");
      in = true;
    } else {
      in = diff.valuation() >= k;
    }
  }
  return complement ? !in : in;
}

std::string Ball::str() const {
  std::string s = center.str() + " + " + std::to_string(center.prime()) + "^" + std::to_string(k) + " Z_p";
  return complement ? "P1 \\ (" + s + ")" : s;
}

// -------------------------------------------------------------------- Tree

u64 Tree::level_size(int k) const { return k == 0 ? 1 : (p_ + 1) * ppow(p_, k - 1); }

u64 Tree::vertices_upto(int m) const {
  if (m < 0) return 0;
  return 1 + (p_ + 1) * (ppow(p_, m) - 1) / (p_ - 1);
}

u64 Tree::even_edges_upto(int m) const { return vertices_upto(m) - 1; }

u64 Tree::vertex_index(const Vertex& v) const {
  if (v.dist == 0) return 0;
  return vertices_upto(v.dist - 1) + v.code;
}

Vertex Tree::vertex_at(u64 index) const {
  if (index == 0) return {0, 0};
  int k = 1;
  while (vertices_upto(k) <= index) ++k;
  return {k, index - vertices_upto(k - 1)};
}

TreeEdge Tree::even_edge_at(u64 index) const {
  Vertex v = vertex_at(index + 1);
  return {v, v.dist % 2 == 1};
}

bool Tree::infinite_branch(const Vertex& v) const { return v.dist >= 1 && v.code >= ppow(p_, v.dist); }

Vertex Tree::parent(const Vertex& v) const {
  int k = v.dist;
  if (k <= 1) return {0, 0};
  if (!infinite_branch(v)) return {k - 1, v.code % ppow(p_, k - 1)};
  u64 q = v.code - ppow(p_, k);
  return {k - 1, ppow(p_, k - 1) + q % ppow(p_, k - 2)};
}

std::vector<Vertex> Tree::children(const Vertex& v) const {
  std::vector<Vertex> out;
  int k = v.dist;
  if (k == 0) {
    for (u64 c = 0; c <= p_; ++c) out.push_back({1, c});
    return out;
  }
  if (!infinite_branch(v)) {
    for (u64 j = 0; j < p_; ++j) out.push_back({k + 1, v.code + j * ppow(p_, k)});
  } else {
    u64 q = v.code - ppow(p_, k);
    for (u64 j = 0; j < p_; ++j) out.push_back({k + 1, ppow(p_, k + 1) + q + j * ppow(p_, k - 1)});
  }
  return out;
}

Vertex Tree::source(const TreeEdge& e) const { return e.outward ? parent(e.far) : e.far; }

Vertex Tree::target(const TreeEdge& e) const { return e.outward ? e.far : parent(e.far); }

TreeEdge Tree::to_even(const TreeEdge& e, int* sign) const {
  if (is_even(e)) {
    if (sign) *sign = 1;
    return e;
  }
  if (sign) *sign = -1;
  return opposite(e);
}

std::vector<TreeEdge> Tree::star(const Vertex& v) const {
  std::vector<TreeEdge> out;
  for (const Vertex& c : children(v)) out.push_back({c, true});
  if (v.dist > 0) out.push_back({v, false});
  return out;
}

std::vector<Vertex> Tree::vertices(int m) const {
  std::vector<Vertex> out;
  for (int k = 0; k <= m; ++k)
    for (u64 c = 0; c < level_size(k); ++c) out.push_back({k, c});
  return out;
}

std::vector<TreeEdge> Tree::edges(int m) const {
  std::vector<TreeEdge> out;
  for (int k = 1; k <= m; ++k)
    for (u64 c = 0; c < level_size(k); ++c) {
      out.push_back({{k, c}, true});
      out.push_back({{k, c}, false});
    }
  return out;
}

std::vector<TreeEdge> Tree::even_edges(int m) const {
  std::vector<TreeEdge> out;
  for (int k = 1; k <= m; ++k)
    for (u64 c = 0; c < level_size(k); ++c) out.push_back({{k, c}, k % 2 == 1});
  return out;
}

std::vector<TreeEdge> Tree::outward_level(int m) const {
  std::vector<TreeEdge> out;
  if (m < 1) return out;
  for (u64 c = 0; c < level_size(m); ++c) out.push_back({{m, c}, true});
  return out;
}

Mat2p Tree::normal_form(const TreeEdge& e) const {
  int k = e.far.dist;
  i64 pk1 = static_cast<i64>(ppow(p_, k - 1));
  Mat2p h;
  if (!infinite_branch(e.far)) {
    h = Mat2p::from_ints(p_, pk1, static_cast<i64>(e.far.code), 0, 1);
  } else {
    i64 cp = static_cast<i64>((e.far.code - ppow(p_, k)) * p_);
    h = Mat2p::from_ints(p_, 0, 1, pk1, cp);
  }
  if (e.outward) return h;
  return h * Mat2p::from_ints(p_, 0, static_cast<i64>(p_), 1, 0);
}

namespace {

// Image of pZ_p under the Moebius map of N.
Ball image_of_pZp(const Mat2p& N) {
  PadicNumber det = N.det();
  if (det.is_zero()) throw Error(ErrorKind::InsufficientPrecision, "determinant indistinguishable from zero");
  const PadicNumber& c = N.c;
  const PadicNumber& d = N.d;
  bool pole;
  if (c.is_exact_zero()) {
    if (d.is_zero()) throw Error(ErrorKind::InsufficientPrecision, "matrix column indistinguishable from zero");
    pole = false;
  } else if (c.is_zero()) {
    if (d.is_zero() || d.valuation() > c.abs_prec())
      throw Error(ErrorKind::InsufficientPrecision, "cannot certify pole location");
    pole = false;
  } else if (d.is_zero()) {
    if (d.abs_prec() < c.valuation() + 1)
      throw Error(ErrorKind::InsufficientPrecision, "cannot certify pole location");
    pole = true;
  } else {
    pole = d.valuation() >= c.valuation() + 1;
  }
  Ball b;
  if (!pole) {
    b.complement = false;
    b.center = N.b / d;
    b.k = 1 + det.valuation() - 2 * d.valuation();
  } else {
    b.complement = true;
    b.center = N.a / c;
    b.k = det.valuation() - 2 * c.valuation();
  }
  return b;
}

}  // namespace

Ball Tree::edge_ball(const TreeEdge& e) const { return image_of_pZp(normal_form(e)); }

TreeEdge Tree::edge_of_ball(const Ball& b) const {
  const PadicNumber& c = b.center;
  int k = b.k;
  TreeEdge e;
  bool contains_zero;
  if (c.is_exact_zero()) {
    contains_zero = true;
  } else if (c.is_zero()) {
    if (c.abs_prec() < k) throw Error(ErrorKind::InsufficientPrecision, "ball center too imprecise");
    contains_zero = true;
  } else {
    contains_zero = c.valuation() >= k;
  }
  if (contains_zero) {
    if (k >= 1)
      e = {{k, 0}, true};
    else
      e = {{1 - k, ppow(p_, 1 - k)}, false};
  } else {
    if (c.abs_prec() < k) throw Error(ErrorKind::InsufficientPrecision, "ball center too imprecise");
    int vc = c.valuation();
    if (vc >= 0) {
      e = {{k, c.residue(k)}, true};
    } else {
      int K = k - 2 * vc;
      PadicNumber ci = c.inverse();
      if (ci.abs_prec() < K) throw Error(ErrorKind::InsufficientPrecision, "ball center too imprecise");
      e = {{K, ppow(p_, K) + ci.residue(K) / p_}, true};
    }
  }
  return b.complement ? opposite(e) : e;
}

P1Point Tree::sample_point(const TreeEdge& e) const {
  Mat2p g = normal_form(e);
  return mobius(g, P1Point::at(PadicNumber::zero(p_)));
}

TreeEdge Tree::act(const Mat2p& g, const TreeEdge& e) const { return edge_of_ball(image_of_pZp(g * normal_form(e))); }

Vertex Tree::act(const Mat2p& g, const Vertex& v) const {
  if (v.dist == 0) return target(act(g, TreeEdge{{1, 0}, false}));
  return target(act(g, TreeEdge{v, true}));
}

int Tree::reach(const Mat2p& g) const { return act(g, base()).dist; }

std::string Tree::id(const Vertex& v) const {
  std::string s = std::to_string(v.dist) + ":";
  if (v.dist == 0) return s;
  u64 x;
  int n;
  if (!infinite_branch(v)) {
    x = v.code;
    n = v.dist;
  } else {
    s += '*';
    x = v.code - ppow(p_, v.dist);
    n = v.dist - 1;
  }
  for (int i = 0; i < n; ++i) {
    s += kDigits[x % p_];
    x /= p_;
  }
  return s;
}

std::string Tree::id(const TreeEdge& e) const { return id(e.far) + (e.outward ? "+" : "-"); }

Vertex Tree::parse_vertex(const std::string& s) const {
  size_t colon = s.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::SchemaError, "bad vertex id " + s);
  int k = std::stoi(s.substr(0, colon));
  std::string digits = s.substr(colon + 1);
  if (k == 0) {
    if (!digits.empty()) throw Error(ErrorKind::SchemaError, "bad vertex id " + s);
    return {0, 0};
  }
  bool inf = !digits.empty() && digits[0] == '*';
  if (inf) digits = digits.substr(1);
  if (static_cast<int>(digits.size()) != (inf ? k - 1 : k)) throw Error(ErrorKind::SchemaError, "bad vertex id " + s);
  u64 x = 0;
  for (int i = static_cast<int>(digits.size()) - 1; i >= 0; --i) {
    int dv = digit_value(digits[i]);
    if (dv < 0 || static_cast<u64>(dv) >= p_) throw Error(ErrorKind::SchemaError, "bad vertex id " + s);
    x = x * p_ + static_cast<u64>(dv);
  }
  return {k, inf ? ppow(p_, k) + x : x};
}

TreeEdge Tree::parse_edge(const std::string& s) const {
  if (s.empty() || (s.back() != '+' && s.back() != '-')) throw Error(ErrorKind::SchemaError, "bad edge id " + s);
  Vertex v = parse_vertex(s.substr(0, s.size() - 1));
  if (v.dist == 0) throw Error(ErrorKind::SchemaError, "bad edge id " + s);
  return {v, s.back() == '+'};
}

// ----------------------------------------------------------------- Moebius

P1Point mobius(const Mat2p& g, const P1Point& x) {
  u64 p = g.prime();
  if (x.inf) {
    if (g.c.is_zero()) return P1Point::infinity(p);
    return P1Point::at(g.a / g.c);
  }
  PadicNumber den = g.c * x.t + g.d;
  if (den.is_zero()) return P1Point::infinity(p);
  return P1Point::at((g.a * x.t + g.b) / den);
}

QuadExtElement mobius(const Mat2p& g, const QuadExtElement& x) {
  QuadExtElement num = x * g.a + QuadExtElement(g.b);
  QuadExtElement den = x * g.c + QuadExtElement(g.d);
  return num / den;
}

}  // namespace plectic
