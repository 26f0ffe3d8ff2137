#pragma once

#include <string>
#include <vector>

#include "plectic/padic.hpp"

namespace plectic {

// Vertex at distance k from the base vertex v0 (the class of Z_p^2).
// Codes: finite branch c in [0, p^k) for the ball c + p^k Z_p; infinite
// branch p^k + c'/p for the ball 1/(c' + p^k Z_p), c' in pZ mod p^k.
struct Vertex {
  int dist = 0;
  u64 code = 0;
  bool operator==(const Vertex& o) const { return dist == o.dist && code == o.code; }
  bool operator!=(const Vertex& o) const { return !(*this == o); }
  bool operator<(const Vertex& o) const { return dist != o.dist ? dist < o.dist : code < o.code; }
};

// Oriented edge identified by its far vertex and orientation; outward edges
// point away from v0.  The base edge e0 = v0 -> (1, 0) has U = pZ_p.
struct TreeEdge {
  Vertex far;
  bool outward = true;
  int depth() const { return far.dist; }
  bool operator==(const TreeEdge& o) const { return far == o.far && outward == o.outward; }
  bool operator!=(const TreeEdge& o) const { return !(*this == o); }
  bool operator<(const TreeEdge& o) const { return far != o.far ? far < o.far : outward < o.outward; }
};

struct P1Point {
  bool inf = false;
  PadicNumber t;
  static P1Point infinity(u64 p) { return {true, PadicNumber::zero(p)}; }
  static P1Point at(PadicNumber x) { return {false, x}; }
};

// c + p^k Z_p, or its complement in P^1(Q_p).
struct Ball {
  bool complement = false;
  PadicNumber center;
  int k = 0;
  bool contains(const P1Point& x) const;
  std::string str() const;
};

struct Mat2p {
  PadicNumber a, b, c, d;
  static Mat2p identity(u64 p);
  static Mat2p from_ints(u64 p, i64 a, i64 b, i64 c, i64 d);
  u64 prime() const { return a.prime(); }
  Mat2p operator*(const Mat2p& o) const;
  PadicNumber det() const;
  Mat2p adjugate() const;  // inverse up to the scalar det
  int min_abs_prec() const;
};

class Tree {
 public:
  explicit Tree(u64 p) : p_(p) {}
  u64 p() const { return p_; }

  Vertex base() const { return {0, 0}; }
  TreeEdge base_edge() const { return {{1, 0}, true}; }
  Vertex base_hat() const { return {1, 0}; }

  u64 level_size(int k) const;  // vertices at distance k
  u64 vertices_upto(int m) const;
  u64 even_edges_upto(int m) const;
  u64 vertex_index(const Vertex& v) const;
  Vertex vertex_at(u64 index) const;
  // Dense index of an even edge (depth >= 1): index of its far vertex - 1.
  u64 even_index(const TreeEdge& e) const { return vertex_index(e.far) - 1; }
  TreeEdge even_edge_at(u64 index) const;

  bool infinite_branch(const Vertex& v) const;
  Vertex parent(const Vertex& v) const;
  std::vector<Vertex> children(const Vertex& v) const;
  Vertex source(const TreeEdge& e) const;
  Vertex target(const TreeEdge& e) const;
  TreeEdge opposite(const TreeEdge& e) const { return {e.far, !e.outward}; }
  bool is_even(const TreeEdge& e) const { return (source(e).dist % 2) == 0; }
  TreeEdge to_even(const TreeEdge& e, int* sign) const;
  // The p + 1 edges with the given source.
  std::vector<TreeEdge> star(const Vertex& v) const;

  std::vector<Vertex> vertices(int m) const;
  std::vector<TreeEdge> edges(int m) const;
  std::vector<TreeEdge> even_edges(int m) const;
  std::vector<TreeEdge> outward_level(int m) const;

  Mat2p normal_form(const TreeEdge& e) const;
  Ball edge_ball(const TreeEdge& e) const;
  P1Point sample_point(const TreeEdge& e) const;
  TreeEdge edge_of_ball(const Ball& b) const;
  TreeEdge act(const Mat2p& g, const TreeEdge& e) const;
  Vertex act(const Mat2p& g, const Vertex& v) const;
  // Distance from v0 to g v0.
  int reach(const Mat2p& g) const;

  std::string id(const Vertex& v) const;
  std::string id(const TreeEdge& e) const;
  Vertex parse_vertex(const std::string& s) const;
  TreeEdge parse_edge(const std::string& s) const;

 private:
  u64 p_;
};

P1Point mobius(const Mat2p& g, const P1Point& x);
QuadExtElement mobius(const Mat2p& g, const QuadExtElement& x);

}  // namespace plectic
