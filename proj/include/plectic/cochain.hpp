#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "plectic/bttree.hpp"

namespace plectic {

// Images of a group element at the two primes above p.
struct SMatrix {
  Mat2p g1, g2;
  static SMatrix identity(u64 p) { return {Mat2p::identity(p), Mat2p::identity(p)}; }
  SMatrix operator*(const SMatrix& o) const { return {g1 * o.g1, g2 * o.g2}; }
  SMatrix inverse() const { return {g1.adjugate(), g2.adjugate()}; }
};

// Largest reach of the two components.
int reach(const Tree& T, const SMatrix& g);

// Integer-valued cochain on oriented edges of depth <= m of one tree,
// stored on even edges; c(e) + c(opposite e) = 0.
class TreeCochain {
 public:
  TreeCochain() = default;
  TreeCochain(u64 p, int m);

  u64 p() const { return p_; }
  int depth() const { return m_; }
  size_t size() const { return v_.size(); }
  i64 value(const TreeEdge& e) const;
  void set(const TreeEdge& e, i64 x);
  const std::vector<i64>& data() const { return v_; }
  std::vector<i64>& data() { return v_; }
  bool operator==(const TreeCochain& o) const { return m_ == o.m_ && v_ == o.v_; }

 private:
  u64 p_ = 3;
  int m_ = 0;
  std::vector<i64> v_;
};

// c(e) = [x in U_e] - [y in U_e].
TreeCochain dirac_cochain(const Tree& T, const P1Point& x, const P1Point& y, int m);
// Sum of c over the star of each vertex of depth <= m - 1, indexed by vertex.
std::vector<i64> phi(const TreeCochain& c);
// Sum of c over the listed edges (a disjoint union of balls).
i64 measure(const TreeCochain& c, const std::vector<TreeEdge>& U);

// Cochain on multiedges (e1, e2) of depth <= m in both factors, stored densely
// on even multiedges in enumeration order.  Odd values follow the F0 relation
// in each component.  A nonzero modulus means values live in Z/modulus,
// stored in [0, modulus).
class FiniteCochain {
 public:
  FiniteCochain() = default;
  FiniteCochain(u64 p, int m, u64 modulus = 0);

  u64 p() const { return p_; }
  int depth() const { return m_; }
  u64 modulus() const { return mod_; }
  size_t side() const { return n_; }
  size_t size() const { return v_.size(); }

  i64 at(size_t i1, size_t i2) const { return v_[i1 * n_ + i2]; }
  void set_at(size_t i1, size_t i2, i64 x) { v_[i1 * n_ + i2] = normalize(x); }
  i64 value(const TreeEdge& e1, const TreeEdge& e2) const;
  void set(const TreeEdge& e1, const TreeEdge& e2, i64 x);
  const std::vector<i64>& data() const { return v_; }
  std::vector<i64>& data() { return v_; }

  FiniteCochain operator+(const FiniteCochain& o) const;
  FiniteCochain operator-(const FiniteCochain& o) const;
  FiniteCochain operator*(i64 k) const;
  bool operator==(const FiniteCochain& o) const;
  bool is_zero() const;
  // Same values reduced into Z/modulus.
  FiniteCochain reduced(u64 modulus) const;
  // Restriction to depth k <= m.
  FiniteCochain truncated(int k) const;
  i64 normalize(i64 x) const;

 private:
  u64 p_ = 3;
  int m_ = 0;
  u64 mod_ = 0;
  size_t n_ = 0;
  std::vector<i64> v_;
};

FiniteCochain tensor(const TreeCochain& a, const TreeCochain& b);

// Table on (vertex of depth <= m - 1) x (even edge of depth <= m): the value
// of phi_k at the vertex in component k, the edge in the other component.
struct PhiTable {
  int m = 0;
  size_t rows = 0, cols = 0;
  u64 modulus = 0;
  std::vector<i64> v;
  i64 at(size_t r, size_t c) const { return v[r * cols + c]; }
  bool is_zero() const;
  bool operator==(const PhiTable& o) const { return m == o.m && v == o.v; }
};

PhiTable phi(const FiniteCochain& c, int component);
bool is_harmonic(const FiniteCochain& c);

using MultiEdge = std::pair<TreeEdge, TreeEdge>;
// Sum of c over a disjoint union of product balls; OutOfDepth if any
// multiedge lies deeper than the cochain.
i64 measure(const FiniteCochain& c, const std::vector<MultiEdge>& U);

// (g * D)(x) = D(g^-1 x), on depth <= m - reach(g).
FiniteCochain act(const SMatrix& g, const FiniteCochain& D);
// g * D - D on depth <= m - reach(g).
FiniteCochain coboundary(const FiniteCochain& D, const SMatrix& g);

nlohmann::json dump(const FiniteCochain& c);
FiniteCochain load_cochain(const nlohmann::json& j);
// FNV-1a digest of the header and values.
std::string digest(const FiniteCochain& c);

}  // namespace plectic
