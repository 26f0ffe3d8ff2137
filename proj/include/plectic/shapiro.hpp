#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "plectic/cochain.hpp"
#include "plectic/numberfield.hpp"

namespace plectic {

Mat2p embed_matrix(const Mat2F& g, PrimeSide s);

// Group element with its images at the two primes; the exact matrix is
// absent for purely local (synthetic) elements.
struct GroupElement {
  std::optional<Mat2F> exact;
  SMatrix s;
  static GroupElement from_exact(const Mat2F& g, u64 p);
  static GroupElement local(const SMatrix& s) { return {std::nullopt, s}; }
  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const;
};

// A 1-cocycle g -> c(g) with values in cochains on multiedges, evaluated
// pointwise on even multiedges.
class Cocycle {
 public:
  virtual ~Cocycle() = default;
  virtual u64 p() const = 0;
  virtual i64 value(const GroupElement& g, const TreeEdge& e1, const TreeEdge& e2) const = 0;
  // g with g^-1 (b, e0) = (v, e), where v is a vertex of tree `component`, e an
  // even edge of the other tree and b = v0 or the far end of e0 by parity of v.
  virtual GroupElement transporter(int component, const Vertex& v, const TreeEdge& e) const = 0;
};

// c(g) on all even multiedges of depth <= m.
FiniteCochain evaluate(const Cocycle& c, const GroupElement& g, int m, u64 modulus = 0, int threads = 0);

// The base vertex of the given parity: v0 for even distance, v0-hat for odd.
Vertex base_of_parity(const Tree& T, const Vertex& v);
// Local transporter built from tree normal forms.
SMatrix local_transporter(const Tree& T, int component, const Vertex& v, const TreeEdge& e);

// c(g) = (g * M - M) + (g * D0 - D0) for M a sum of Dirac tensors and D0
// supported on depth <= depth(D0); defined for every local element.
class SyntheticCocycle : public Cocycle {
 public:
  struct Dirac {
    P1Point x1, y1, x2, y2;
    i64 coeff = 1;
  };
  SyntheticCocycle(u64 p, std::vector<Dirac> M, FiniteCochain D0);
  u64 p() const override { return p_; }
  i64 value(const GroupElement& g, const TreeEdge& e1, const TreeEdge& e2) const override;
  GroupElement transporter(int component, const Vertex& v, const TreeEdge& e) const override;
  // M on a multiedge of any depth.
  i64 harmonic_part(const TreeEdge& e1, const TreeEdge& e2) const;
  i64 d0(const TreeEdge& e1, const TreeEdge& e2) const;
  // g * M - M on depth <= m.
  FiniteCochain clean(const GroupElement& g, int m, u64 modulus = 0) const;
  const FiniteCochain& D0() const { return D0_; }

 private:
  u64 p_;
  Tree T_;
  std::vector<Dirac> M_;
  FiniteCochain D0_;
};

// x = +-eps^n pi1^a pi2^b in O_F[1/p]^x; returns n (InvalidArgument otherwise).
i64 unit_exponent(const FieldElement& x, u64 p);
// Matrix key normalized by the scalars +-pi1^i pi2^j.
std::string kappa_key(const Mat2F& h, u64 p);

class KappaOracle {
 public:
  enum class Kind { Zero, UnitExponent, Table };
  static KappaOracle zero() { return KappaOracle(Kind::Zero); }
  // kappa(h) = exponent of the fundamental unit in det h.
  static KappaOracle unit_exponent() { return KappaOracle(Kind::UnitExponent); }
  static KappaOracle table(std::map<std::string, i64> t);

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  i64 operator()(const Mat2F& h, u64 p) const;
  const std::map<std::string, i64>& entries() const { return table_; }
  // Record every evaluated key with its value (UnitExponent only).
  void start_recording();
  std::map<std::string, i64> recorded() const;

 private:
  explicit KappaOracle(Kind k) : kind_(k) {}
  struct Recorder {
    std::mutex mu;
    std::map<std::string, i64> seen;
  };
  Kind kind_;
  std::map<std::string, i64> table_;
  std::shared_ptr<Recorder> rec_;
};

struct RadialEntry {
  Mat2F g, ginv;
  Mat2p local[2], local_inv[2];
};

// Radial system of one tree, indexed by tree ids: gamma_x with gamma_x^-1 base = x.
struct RadialSystem {
  std::map<std::string, RadialEntry> edges, vertices;
};

struct Fixture {
  int schema = 1;
  std::string label;
  long D = 37;
  u64 p = 3;
  FieldElement beta;
  std::array<FieldElement, 5> curve;
  int depth = 0;
  std::vector<Mat2F> generators;
  RadialSystem radial[2];
  Mat2F psi;
  KappaOracle kappa = KappaOracle::zero();
  nlohmann::json expected;
};

Fixture parse_fixture(const nlohmann::json& j);
Fixture load_fixture(const std::string& path);
nlohmann::json to_json(const Fixture& f);
// Radial contracts up to the given depth, S-unit determinants, index coverage.
void validate(const Fixture& f, int spot_depth = 2);
RadialEntry make_radial_entry(const Mat2F& g, u64 p);

struct SyntheticOptions {
  int depth = 3;
  std::string kappa = "zero";  // zero | unit | table
  bool twist = false;          // multiply radials by diag(eps^f, 1)
  u64 seed = 1;
};
// Radial systems built from the uniformizers of the two primes above p.
Fixture synthetic_fixture(const SyntheticOptions& opt);
// Matrix carrying the base edge of tree k to e while fixing the base edge of the other tree.
Mat2F radial_normal_form(long D, u64 p, int tree, const TreeEdge& e);

struct Reduction {
  Mat2F b;
  TreeEdge e;
};

// c(g)(e1, e2) = kappa(h) through the two radial reductions.
class ShapiroCocycle : public Cocycle {
 public:
  explicit ShapiroCocycle(const Fixture& f);
  u64 p() const override { return f_.p; }
  i64 value(const GroupElement& g, const TreeEdge& e1, const TreeEdge& e2) const override;
  GroupElement transporter(int component, const Vertex& v, const TreeEdge& e) const override;
  // e' = g^-1 e and b = gamma_e g gamma_e'^-1 on the given tree.
  Reduction reduce(const Mat2F& g, const TreeEdge& e, int tree) const;
  // h from the reduction on tree 1 followed by the one on tree 2 at gamma_e1 e2.
  Mat2F reduce_pair(const Mat2F& g, const TreeEdge& e1, const TreeEdge& e2) const;
  i64 value_uncached(const Mat2F& g, const TreeEdge& e1, const TreeEdge& e2) const;
  const Fixture& fixture() const { return f_; }
  size_t cache_size() const;

 private:
  const RadialEntry& edge_radial(int tree, const TreeEdge& e) const;
  const RadialEntry& vertex_radial(int tree, const Vertex& v) const;

  Fixture f_;
  Tree T_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, i64> cache_;
};

}  // namespace plectic
