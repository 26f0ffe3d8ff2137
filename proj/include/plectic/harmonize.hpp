#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"
#include "plectic/cochain.hpp"
#include "plectic/shapiro.hpp"

namespace plectic {

// D1 on (vertex of tree 1, even edge of tree 2) and D2 on (vertex of tree 2,
// even edge of tree 1), in the row/column layout of PhiTable.
struct DegenerationTable {
  u64 p = 3;
  int m = 0;
  u64 modulus = 0;
  PhiTable d1, d2;
  // D1(v0, e0), D1(v0^, e0), D2(e0, v0), D2(e0, v0^).
  std::array<i64, 4> base{};
};

// Degenerations of a cocycle cohomologous to a harmonic one, with the base
// values fixed by the nu conditions and the gauge D1(v0, e0) = 0.
DegenerationTable degenerations(const Cocycle& c, int m, u64 modulus, int threads = 0);
// (phi_1 D, phi_2 D) for a finite cochain D.
DegenerationTable degenerations_of(const FiniteCochain& D);
// Shift by the nu-kernel element so that D1(v0, e0) = 0.
DegenerationTable gauge_normalized(const DegenerationTable& t);
// Number of vertex pairs of depth <= m - 1 where nu_2(D1) != nu_1(D2).
size_t nu_defects(const DegenerationTable& t);

// Sparse linear system over Z/modulus; each row lists (column, coefficient).
struct ModSystem {
  u64 p = 3;
  u64 modulus = 0;  // a power of p
  size_t cols = 0;
  std::vector<std::vector<std::pair<uint32_t, i64>>> rows;
  std::vector<i64> rhs;
  size_t nonzeros() const;
};

struct SolveStats {
  size_t rows = 0, cols = 0, nonzeros = 0, fill = 0, pivots = 0, free_vars = 0, peak_entries = 0;
  size_t non_unit_pivots = 0;
  double seconds = 0;
  nlohmann::json to_json() const;
};

// Columns are even multiedges of depth <= m (row-major over tree-1 index),
// rows the phi_1 equations followed by the phi_2 equations.
ModSystem lift_system(const DegenerationTable& t, int threads = 0);
// Markowitz-style elimination with unit pivots; free variables are 0.
// LiftInconsistent when the system has no solution.
std::vector<i64> solve_sparse(const ModSystem& s, SolveStats* stats = nullptr);
// Dense reference elimination by columns.
std::vector<i64> solve_dense(const ModSystem& s);
bool satisfies(const ModSystem& s, const std::vector<i64>& x);

FiniteCochain lift(const DegenerationTable& t, SolveStats* stats = nullptr, int threads = 0);
// Representative of D0 modulo the kernel of (phi_1, phi_2) chosen by the lift.
FiniteCochain canonical_d0(const FiniteCochain& D0);

// Harmonic representative c(g) - (g * D - D) on depth m - reach(g).
class Harmonizer {
 public:
  Harmonizer(const Cocycle& c, int m, u64 modulus, int threads = 0);
  const DegenerationTable& table() const { return table_; }
  const FiniteCochain& D() const { return D_; }
  const SolveStats& stats() const { return stats_; }
  // Raw cocycle value on depth m - reach(g).
  FiniteCochain raw(const GroupElement& g) const;
  // Checked to be harmonic; LiftInconsistent otherwise.
  FiniteCochain corrected(const GroupElement& g) const;

 private:
  const Cocycle& c_;
  int m_;
  u64 modulus_;
  int threads_;
  DegenerationTable table_;
  FiniteCochain D_;
  SolveStats stats_;
};

}  // namespace plectic
