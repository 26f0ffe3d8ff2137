#pragma once

#include <array>
#include <string>

#include "json.hpp"
#include "plectic/integrate.hpp"
#include "plectic/numberfield.hpp"

namespace plectic {

// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q_p.
class LocalCurve {
 public:
  LocalCurve() = default;
  // Coefficients a1, a2, a3, a4, a6.
  explicit LocalCurve(std::array<PadicNumber, 5> a);
  static LocalCurve from_ints(u64 p, i64 a1, i64 a2, i64 a3, i64 a4, i64 a6);

  u64 prime() const { return a_[0].prime(); }
  const PadicNumber& a1() const { return a_[0]; }
  const PadicNumber& a2() const { return a_[1]; }
  const PadicNumber& a3() const { return a_[2]; }
  const PadicNumber& a4() const { return a_[3]; }
  const PadicNumber& a6() const { return a_[4]; }
  PadicNumber b2() const;
  PadicNumber b4() const;
  PadicNumber b6() const;
  PadicNumber b8() const;
  PadicNumber c4() const;
  PadicNumber c6() const;
  PadicNumber disc() const;
  PadicNumber j() const;
  // Multiplicative reduction: v(j) < 0 with c4 a unit.
  bool multiplicative() const;

 private:
  std::array<PadicNumber, 5> a_;
};

// Projective point (X : Y : Z) with coordinates in the quadratic extension.
struct LocalPoint {
  QuadExtElement X, Y, Z;
  static LocalPoint identity(u64 p);
  static LocalPoint affine(const QuadExtElement& x, const QuadExtElement& y);
  bool is_identity() const { return Z.is_zero(); }
  QuadExtElement x() const { return X / Z; }
  QuadExtElement y() const { return Y / Z; }
};

bool on_curve(const LocalCurve& E, const LocalPoint& P);
LocalPoint negate(const LocalCurve& E, const LocalPoint& P);
LocalPoint add(const LocalCurve& E, const LocalPoint& P, const LocalPoint& Q);
LocalPoint dbl(const LocalCurve& E, const LocalPoint& P);
LocalPoint mul(const LocalCurve& E, i64 k, const LocalPoint& P);

// Tate parameter q with j(q) = j, to absolute precision prec.
PadicNumber tate_period(const LocalCurve& E, int prec);
// Eisenstein series of the Tate curve.
PadicNumber tate_E4(const PadicNumber& q, int prec);
PadicNumber tate_E6(const PadicNumber& q, int prec);
// j(q) = E4^3 / (q prod (1 - q^n)^24).
PadicNumber j_invariant_of_q(const PadicNumber& q, int prec);
// Tate curve E_q: y^2 + xy = x^3 + a4 x + a6.
LocalCurve tate_curve(const PadicNumber& q, int prec);

bool is_split(const LocalCurve& E);
// Scale u with u^2 = c6 E4(q) / (c4 (-E6(q))), comparing E with E_q.
QuadExtElement tate_scale(const LocalCurve& E, const PadicNumber& q);
// Logarithm of the formal group at parameter t, v(t) >= 1.
QuadExtElement formal_log(const LocalCurve& E, const QuadExtElement& t, int prec);
// Logarithm normalized to log_q of the Tate parameter.
QuadExtElement elliptic_log(const LocalCurve& E, const PadicNumber& q, const LocalPoint& P, int prec);

struct EPoint {
  EFieldElement x, y;
};

struct PointSideInput {
  long D = 37;
  u64 p = 3;
  FieldElement beta;
  std::array<FieldElement, 5> a;
  EPoint P1, P2;
  int prec = 20;
};

struct PointSideResult {
  bool split[2] = {false, false};
  PadicNumber q[2];
  QuadExtElement logs[2][2];  // logs[side][point]
  TensorValue det, value;
};

LocalCurve embed_curve(const std::array<FieldElement, 5>& a, PrimeSide s);
LocalPoint embed_point(const EPoint& P, PrimeSide s);
// log(P1) (x) log'(P2) - log(P2) (x) log'(P1) from the per-side logs.
TensorValue det_S(const QuadExtElement& l1P1, const QuadExtElement& l1P2, const QuadExtElement& l2P1,
                  const QuadExtElement& l2P2);
// (1 - sigma*) on split factors and (1 + sigma*) on non-split ones, where
// sigma* acts on logs as frobenius (split) or -frobenius (non-split).
TensorValue pi_S(const TensorValue& x, bool split1, bool split2);
PointSideResult point_side(const PointSideInput& in);

// Rational pair literal ["a", "b"] for a + b w; E literals are either such a
// pair or {"x": pair, "y": pair} for x + y sqrt(beta).
FieldElement parse_field_element(const nlohmann::json& j, long D);
EFieldElement parse_e_element(const nlohmann::json& j, const FieldElement& beta);
PointSideInput load_point_side(const nlohmann::json& j);

}  // namespace plectic
