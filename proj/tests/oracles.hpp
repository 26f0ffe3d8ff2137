#pragma once

// Independent closed forms and random instances shared by the unit tests and
// the acceptance runner.

#include "plectic/integrate.hpp"
#include "testutil.hpp"

namespace oracles {

using namespace plectic;

// Random point of P^1(Q_p) for the PGL_2(Z_p)-invariant measure: x in Z_p
// with probability p/(p+1), otherwise 1/y with y in pZ_p; 25 digits.
inline P1Point random_point(u64 p) {
  long long N = static_cast<long long>(ppow(p, 25));
  if (testutil::uniform(0, static_cast<long long>(p)) < static_cast<long long>(p)) {
    long long x = testutil::uniform(0, N - 1);
    return P1Point::at(x == 0 ? PadicNumber::zero(p) : PadicNumber::from_int(p, x, 25));
  }
  long long y = testutil::uniform(0, N / static_cast<long long>(p) - 1) * static_cast<long long>(p);
  if (y == 0) return P1Point::infinity(p);
  return P1Point::at(PadicNumber::from_int(p, y, 26).inverse());
}

// Point of the p-adic upper half plane: a + b*alpha with b a unit.
inline QuadExtElement random_tau(u64 p) {
  unsigned pp = static_cast<unsigned>(p);
  PadicNumber a = testutil::uniform(0, 4) ? testutil::random_padic(pp, 0, 2, 25) : PadicNumber::zero(p);
  return QuadExtElement(a, testutil::random_unit(pp, 25));
}

inline LogCrossRatio random_log_factor(u64 p) {
  QuadExtElement tau = random_tau(p);
  PadicNumber q = testutil::random_padic(static_cast<unsigned>(p), 1, 3, 25);
  return {tau, frobenius(tau), q};
}

// log_q((x - tau)/(x - taubar)), zero at infinity.
inline QuadExtElement log_factor(const LogCrossRatio& f, const P1Point& x) {
  u64 p = f.q.prime();
  if (x.inf) return QuadExtElement(PadicNumber::zero(p), PadicNumber::zero(p));
  QuadExtElement t(x.t);
  return log_q((t - f.tau) / (t - f.taubar), f.q);
}

// Integral of the Dirac measure (d_x1 - d_y1) (x) (d_x2 - d_y2) by finite additivity.
inline TensorValue dirac_closed_form(const LogCrossRatio& f1, const LogCrossRatio& f2, const P1Point& x1,
                                     const P1Point& y1, const P1Point& x2, const P1Point& y2) {
  return TensorValue::tensor(log_factor(f1, x1) - log_factor(f1, y1), log_factor(f2, x2) - log_factor(f2, y2));
}

// f(a)/f(b) for f(t) = (t - x)/(t - y).
inline QuadExtElement mult_closed_form(const QuadExtElement& x, const QuadExtElement& y, const QuadExtElement& a,
                                       const QuadExtElement& b) {
  return ((a - x) * (b - y)) / ((a - y) * (b - x));
}

// Moebius matrix with fixed points tau and taubar: [[d + tr, -n], [1, d]].
inline Mat2p fixing_matrix(const QuadExtElement& tau, i64 d) {
  u64 p = tau.prime();
  QuadExtElement tb = frobenius(tau);
  PadicNumber tr = (tau + tb).a();
  PadicNumber n = (tau * tb).a();
  PadicNumber dd = PadicNumber::from_int(p, d);
  return {dd + tr, -n, PadicNumber::from_int(p, 1), dd};
}

}  // namespace oracles
