#pragma once

#include <string>
#include <variant>

#include "plectic/cochain.hpp"

namespace plectic {

// Element of E_1 (x) E_2 in the basis {1, alpha} (x) {1, alpha}; c[i][j] is
// the coordinate of alpha^i (x) alpha^j.
struct TensorValue {
  PadicNumber c[2][2];

  static TensorValue zero(u64 p);
  static TensorValue tensor(const QuadExtElement& x, const QuadExtElement& y);
  u64 prime() const { return c[0][0].prime(); }

  TensorValue operator+(const TensorValue& o) const;
  TensorValue operator-(const TensorValue& o) const;
  TensorValue operator-() const;
  TensorValue operator*(const PadicNumber& s) const;
  TensorValue operator*(i64 k) const;
  // Exchange of the two factors (transpose of the coordinate matrix).
  TensorValue swapped() const;
  // Frobenius (alpha -> -alpha) in the given factor (1 or 2).
  TensorValue conjugated(int factor) const;
  TensorValue with_abs_prec(int k) const;
  int abs_prec() const;
  bool is_zero() const;
  bool congruent(const TensorValue& o) const;
  bool operator==(const TensorValue& o) const;
  // Scalar s when the value is s * (alpha (x) alpha).
  bool is_alpha_alpha() const;
  std::string str() const;
};

// Number of absolute digits on which all coordinates agree.
int agreement(const TensorValue& x, const TensorValue& y);

// {"p", "coords": [[c00, c01], [c10, c11]], "str"}; parsing also accepts
// {"alpha_alpha": s} for s * (alpha (x) alpha).
nlohmann::json to_json(const TensorValue& t);
TensorValue tensor_from_json(const nlohmann::json& j, u64 p = 3);

// log_q((t - tau)/(t - taubar)).
struct LogCrossRatio {
  QuadExtElement tau, taubar;
  PadicNumber q;
};
// A factor that does not depend on t.
struct Constant {
  QuadExtElement value;
};
using FactorIntegrand = std::variant<LogCrossRatio, Constant>;

struct IntegrandSpec {
  FactorIntegrand f1, f2;
};

// Value of the factor at a point of P^1(Q_p); the point at infinity gives 0.
QuadExtElement evaluate(const FactorIntegrand& f, const P1Point& t);
void validate(const FactorIntegrand& f);

// Riemann sum over outward_level(m) x outward_level(m).  The parallel kernel
// works in fixed point modulo a power of p, so the result is independent of
// the thread count; threads <= 0 keeps the OpenMP default.
TensorValue riemann_log_integral(const FiniteCochain& c, const IntegrandSpec& spec, int m, int threads = 0);
// Term-by-term p-adic sum, used as the reference for the kernel.
TensorValue riemann_log_integral_serial(const FiniteCochain& c, const IntegrandSpec& spec, int m);

// Riemann product of f(t) = (t - x)/(t - y) against a single-tree cochain.
QuadExtElement mult_integral_single(const TreeCochain& c, const QuadExtElement& x, const QuadExtElement& y, int m);

struct InvarianceReport {
  int depth = 0;
  TensorValue plain, shifted;
  int digits = 0;  // agreement of the two integrals
};

// Compares the integral of c with that of c + (g * D - D) at depth m - reach(g).
InvarianceReport coboundary_invariance_check(const FiniteCochain& c, const FiniteCochain& D, const SMatrix& g,
                                             const IntegrandSpec& spec, int m);

}  // namespace plectic
