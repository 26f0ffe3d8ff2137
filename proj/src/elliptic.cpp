#include "plectic/elliptic.hpp"

#include <algorithm>
#include <vector>

namespace plectic {

// ------------------------------------------------------------ LocalCurve

LocalCurve::LocalCurve(std::array<PadicNumber, 5> a) : a_(std::move(a)) {}

LocalCurve LocalCurve::from_ints(u64 p, i64 a1, i64 a2, i64 a3, i64 a4, i64 a6) {
  return LocalCurve({PadicNumber::from_int(p, a1), PadicNumber::from_int(p, a2), PadicNumber::from_int(p, a3),
                     PadicNumber::from_int(p, a4), PadicNumber::from_int(p, a6)});
}

PadicNumber LocalCurve::b2() const { return a1() * a1() + a2() * 4; }
PadicNumber LocalCurve::b4() const { return a4() * 2 + a1() * a3(); }
PadicNumber LocalCurve::b6() const { return a3() * a3() + a6() * 4; }

PadicNumber LocalCurve::b8() const {
  return a1() * a1() * a6() + a2() * a6() * 4 - a1() * a3() * a4() + a2() * a3() * a3() - a4() * a4();
}

PadicNumber LocalCurve::c4() const { return b2() * b2() - b4() * 24; }

PadicNumber LocalCurve::c6() const { return -(b2() * b2() * b2()) + b2() * b4() * 36 - b6() * 216; }

PadicNumber LocalCurve::disc() const {
  PadicNumber B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
  return -(B2 * B2 * B8) - B4 * B4 * B4 * 8 - B6 * B6 * 27 + B2 * B4 * B6 * 9;
}

PadicNumber LocalCurve::j() const {
  PadicNumber c = c4();
  return c * c * c / disc();
}

bool LocalCurve::multiplicative() const {
  PadicNumber c = c4(), d = disc();
  if (c.is_zero() || d.is_zero()) return false;
  return c.valuation() == 0 && d.valuation() > 0;
}

// ------------------------------------------------------------ group law

namespace {

QuadExtElement qshift(const QuadExtElement& x, int k) { return QuadExtElement(x.a().shift(k), x.b().shift(k)); }

int min_nonzero_valuation(const QuadExtElement& x) {
  int v = PadicNumber::kInf;
  if (!x.a().is_zero()) v = std::min(v, x.a().valuation());
  if (!x.b().is_zero()) v = std::min(v, x.b().valuation());
  return v;
}

LocalPoint normalized(LocalPoint P) {
  int v = std::min({min_nonzero_valuation(P.X), min_nonzero_valuation(P.Y), min_nonzero_valuation(P.Z)});
  if (v >= PadicNumber::kInf) throw Error(ErrorKind::InsufficientPrecision, "point coordinates lost all precision");
  if (v == 0) return P;
  return {qshift(P.X, -v), qshift(P.Y, -v), qshift(P.Z, -v)};
}

}  // namespace

LocalPoint LocalPoint::identity(u64 p) {
  return {QuadExtElement::from_int(p, 0), QuadExtElement::from_int(p, 1),
          QuadExtElement(PadicNumber::zero(p), PadicNumber::zero(p))};
}

LocalPoint LocalPoint::affine(const QuadExtElement& x, const QuadExtElement& y) {
  return normalized({x, y, QuadExtElement::from_int(x.prime(), 1)});
}

bool on_curve(const LocalCurve& E, const LocalPoint& P) {
  const auto &X = P.X, &Y = P.Y, &Z = P.Z;
  QuadExtElement lhs = Y * Y * Z + X * Y * Z * E.a1() + Y * Z * Z * E.a3();
  QuadExtElement rhs = X * X * X + X * X * Z * E.a2() + X * Z * Z * E.a4() + Z * Z * Z * E.a6();
  return (lhs - rhs).is_zero();
}

LocalPoint negate(const LocalCurve& E, const LocalPoint& P) {
  return {P.X, -P.Y - P.X * E.a1() - P.Z * E.a3(), P.Z};
}

LocalPoint dbl(const LocalCurve& E, const LocalPoint& P) {
  u64 p = E.prime();
  if (P.is_identity()) return P;
  const auto &X = P.X, &Y = P.Y, &Z = P.Z;
  QuadExtElement D = Y * 2 + X * E.a1() + Z * E.a3();
  if (D.is_zero()) return LocalPoint::identity(p);
  QuadExtElement u = X * X * 3 + X * Z * E.a2() * 2 + Z * Z * E.a4() - Y * Z * E.a1();
  QuadExtElement v = D * Z;
  QuadExtElement D2Z = D * D * Z;
  QuadExtElement A = u * u + u * v * E.a1() - v * v * E.a2() - X * D2Z * 2;
  QuadExtElement v3 = v * v * v;
  LocalPoint R{v * A, -(u + v * E.a1()) * A - (Y * v - u * X) * D2Z - v3 * E.a3(), v3};
  return normalized(R);
}

LocalPoint add(const LocalCurve& E, const LocalPoint& P, const LocalPoint& Q) {
  if (P.is_identity()) return Q;
  if (Q.is_identity()) return P;
  QuadExtElement u = Q.Y * P.Z - P.Y * Q.Z;
  QuadExtElement v = Q.X * P.Z - P.X * Q.Z;
  if (v.is_zero()) {
    if (u.is_zero()) return dbl(E, P);
    return LocalPoint::identity(E.prime());
  }
  QuadExtElement Z = P.Z * Q.Z;
  QuadExtElement v2Z = v * v * Z;
  QuadExtElement A = u * u * Z + u * v * Z * E.a1() - v2Z * E.a2() - v * v * (P.X * Q.Z + Q.X * P.Z);
  QuadExtElement W = P.Y * Q.X - Q.Y * P.X;
  LocalPoint R{v * A, -(u + v * E.a1()) * A - W * v2Z - v2Z * v * E.a3(), v2Z * v};
  return normalized(R);
}

LocalPoint mul(const LocalCurve& E, i64 k, const LocalPoint& P) {
  if (k < 0) return mul(E, -k, negate(E, P));
  LocalPoint R = LocalPoint::identity(E.prime());
  for (int bit = 62; bit >= 0; --bit) {
    R = dbl(E, R);
    if ((k >> bit) & 1) R = add(E, R, P);
  }
  return R;
}

// ------------------------------------------------------------ Tate curve

namespace {

i64 sigma(i64 n, int k) {
  i64 s = 0;
  for (i64 d = 1; d <= n; ++d)
    if (n % d == 0) {
      i64 t = 1;
      for (int i = 0; i < k; ++i) t *= d;
      s += t;
    }
  return s;
}

int terms_needed(const PadicNumber& q, int prec) {
  if (q.is_zero() || q.valuation() <= 0) throw Error(ErrorKind::InvalidPeriod, "Tate period must have positive valuation");
  return prec / q.valuation() + 2;
}

// sum_{n >= 1} sigma_k(n) q^n
PadicNumber divisor_series(const PadicNumber& q, int k, int prec) {
  u64 p = q.prime();
  int N = terms_needed(q, prec);
  PadicNumber s = PadicNumber::zero(p), qn = PadicNumber::from_int(p, 1);
  for (int n = 1; n <= N; ++n) {
    qn = qn * q;
    s = s + qn * sigma(n, k);
  }
  return s;
}

PadicNumber eta_product24(const PadicNumber& q, int prec) {
  u64 p = q.prime();
  int N = terms_needed(q, prec);
  PadicNumber prod = PadicNumber::from_int(p, 1), qn = PadicNumber::from_int(p, 1);
  PadicNumber one = PadicNumber::from_int(p, 1);
  for (int n = 1; n <= N; ++n) {
    qn = qn * q;
    prod = prod * (one - qn).pow(24);
  }
  return prod;
}

}  // namespace

PadicNumber tate_E4(const PadicNumber& q, int prec) {
  return PadicNumber::from_int(q.prime(), 1) + divisor_series(q, 3, prec) * 240;
}

PadicNumber tate_E6(const PadicNumber& q, int prec) {
  return PadicNumber::from_int(q.prime(), 1) - divisor_series(q, 5, prec) * 504;
}

PadicNumber j_invariant_of_q(const PadicNumber& q, int prec) {
  PadicNumber e4 = tate_E4(q, prec);
  return e4 * e4 * e4 / (q * eta_product24(q, prec));
}

LocalCurve tate_curve(const PadicNumber& q, int prec) {
  u64 p = q.prime();
  PadicNumber s3 = divisor_series(q, 3, prec), s5 = divisor_series(q, 5, prec);
  PadicNumber a4 = -(s3 * 5);
  PadicNumber a6 = -(s3 * 5 + s5 * 7) / PadicNumber::from_int(p, 12);
  PadicNumber zero = PadicNumber::zero(p);
  return LocalCurve({PadicNumber::from_int(p, 1), zero, zero, a4, a6});
}

PadicNumber tate_period(const LocalCurve& E, int prec) {
  if (!E.multiplicative()) throw Error(ErrorKind::NotMultiplicative, "curve does not have multiplicative reduction");
  PadicNumber j = E.j();
  int work = std::min(prec + 4, max_digits(E.prime()));
  PadicNumber q = j.inverse();
  for (int it = 0; it < 4 * work + 8; ++it) {
    PadicNumber e4 = tate_E4(q, work);
    PadicNumber next = e4 * e4 * e4 / (j * eta_product24(q, work));
    if (next.congruent(q) && next.abs_prec() >= q.abs_prec() && agreement(next, q) >= work) {
      q = next;
      break;
    }
    q = next;
  }
  return q.with_abs_prec(prec);
}

bool is_split(const LocalCurve& E) {
  u64 p = E.prime();
  if (p == 2) throw Error(ErrorKind::InvalidArgument, "split test implemented for odd p");
  if (p > 1000) throw Error(ErrorKind::InvalidArgument, "residue field too large for the node search");
  if (!E.multiplicative()) throw Error(ErrorKind::NotMultiplicative, "curve does not have multiplicative reduction");
  i64 a[5];
  for (int i = 0; i < 5; ++i) {
    const PadicNumber& c = i == 0 ? E.a1() : i == 1 ? E.a2() : i == 2 ? E.a3() : i == 3 ? E.a4() : E.a6();
    if (!c.is_zero() && c.valuation() < 0) throw Error(ErrorKind::InvalidArgument, "non-integral Weierstrass model");
    a[i] = static_cast<i64>(c.residue(1));
  }
  i64 P = static_cast<i64>(p);
  auto md = [P](i64 x) { return ((x % P) + P) % P; };
  for (i64 x = 0; x < P; ++x)
    for (i64 y = 0; y < P; ++y) {
      i64 F = md(y * y + a[0] * x * y + a[2] * y - x * x * x - a[1] * x * x - a[3] * x - a[4]);
      i64 Fx = md(a[0] * y - 3 * x * x - 2 * a[1] * x - a[3]);
      i64 Fy = md(2 * y + a[0] * x + a[2]);
      if (F || Fx || Fy) continue;
      // Tangent cone Y^2 + a1 XY - (3 x0 + a2) X^2 at the node.
      i64 disc = md(a[0] * a[0] + 4 * (3 * x + a[1]));
      if (disc == 0) throw Error(ErrorKind::NotMultiplicative, "cusp: additive reduction");
      return is_residue(disc, p);
    }
  throw Error(ErrorKind::NotMultiplicative, "no singular point mod p");
}

QuadExtElement tate_scale(const LocalCurve& E, const PadicNumber& q) {
  int prec = max_digits(E.prime());
  PadicNumber u2 = E.c6() * tate_E4(q, prec) / (E.c4() * -tate_E6(q, prec));
  return quad_sqrt(u2);
}

// ---------------------------------------------------------- formal group

namespace {

using Series = std::vector<PadicNumber>;

Series series_mul(const Series& a, const Series& b, size_t L) {
  u64 p = a[0].prime();
  Series r(L, PadicNumber::zero(p));
  for (size_t i = 0; i < std::min(a.size(), L); ++i) {
    if (a[i].is_exact_zero()) continue;
    for (size_t j = 0; i + j < L && j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  }
  return r;
}

Series series_div(const Series& a, const Series& b, size_t L) {
  u64 p = a[0].prime();
  Series r(L, PadicNumber::zero(p));
  PadicNumber b0inv = b[0].inverse();
  for (size_t n = 0; n < L; ++n) {
    PadicNumber s = n < a.size() ? a[n] : PadicNumber::zero(p);
    for (size_t k = 1; k <= n && k < b.size(); ++k) s = s - b[k] * r[n - k];
    r[n] = s * b0inv;
  }
  return r;
}

Series shift_up(const Series& a, size_t k, size_t L) {
  Series r(L, PadicNumber::zero(a[0].prime()));
  for (size_t i = 0; i + k < L && i < a.size(); ++i) r[i + k] = a[i];
  return r;
}

Series series_add(const Series& a, const Series& b) {
  Series r = a;
  for (size_t i = 0; i < b.size(); ++i) r[i] = r[i] + b[i];
  return r;
}

Series scaled(const Series& a, const PadicNumber& s) {
  Series r = a;
  for (auto& x : r) x = x * s;
  return r;
}

// Coefficients of the invariant differential dx/(2y + a1 x + a3) in t = -x/y.
Series invariant_differential(const LocalCurve& E, size_t L) {
  u64 p = E.prime();
  PadicNumber one = PadicNumber::from_int(p, 1);
  // W = w / t^3, w = -1/y: W = 1 + a1 t W + a2 t^2 W + a3 t^3 W^2 + a4 t^4 W^2 + a6 t^6 W^3.
  Series W(L, PadicNumber::zero(p));
  W[0] = one;
  for (size_t it = 0; it < L + 1; ++it) {
    Series W2 = series_mul(W, W, L), W3 = series_mul(W2, W, L);
    Series next(L, PadicNumber::zero(p));
    next[0] = one;
    next = series_add(next, scaled(shift_up(W, 1, L), E.a1()));
    next = series_add(next, scaled(shift_up(W, 2, L), E.a2()));
    next = series_add(next, scaled(shift_up(W2, 3, L), E.a3()));
    next = series_add(next, scaled(shift_up(W2, 4, L), E.a4()));
    next = series_add(next, scaled(shift_up(W3, 6, L), E.a6()));
    W = next;
  }
  Series dW(L, PadicNumber::zero(p));
  for (size_t i = 1; i < L; ++i) dW[i - 1] = W[i] * static_cast<i64>(i);
  // omega = (-2W - t W') / (-2W + a1 t W + a3 t^3 W^2)
  Series num = series_add(scaled(W, PadicNumber::from_int(p, -2)), scaled(shift_up(dW, 1, L), PadicNumber::from_int(p, -1)));
  Series den = scaled(W, PadicNumber::from_int(p, -2));
  den = series_add(den, scaled(shift_up(W, 1, L), E.a1()));
  den = series_add(den, scaled(shift_up(series_mul(W, W, L), 3, L), E.a3()));
  return series_div(num, den, L);
}

}  // namespace

QuadExtElement formal_log(const LocalCurve& E, const QuadExtElement& t, int prec) {
  u64 p = E.prime();
  if (t.is_zero()) return QuadExtElement(PadicNumber::zero_mod(p, t.abs_prec()), PadicNumber::zero_mod(p, t.abs_prec()));
  int vt = min_nonzero_valuation(t);
  if (vt < 1) throw Error(ErrorKind::InvalidArgument, "formal parameter outside the formal group");
  size_t L = 1;
  auto log_p = [p](size_t n) {
    int e = 0;
    for (u64 q = p; q <= n; q *= p) ++e;
    return e;
  };
  while (static_cast<int>(L) * vt - log_p(L) < prec) ++L;
  L += 2;
  Series w = invariant_differential(E, L);
  QuadExtElement sum = QuadExtElement(PadicNumber::zero(p), PadicNumber::zero(p));
  QuadExtElement tn = QuadExtElement::from_int(p, 1);
  for (size_t n = 1; n <= L; ++n) {
    tn = tn * t;
    sum = sum + tn * (w[n - 1] / PadicNumber::from_int(p, static_cast<i64>(n)));
  }
  return sum.with_abs_prec(prec);
}

QuadExtElement elliptic_log(const LocalCurve& E, const PadicNumber& q, const LocalPoint& P, int prec) {
  u64 p = E.prime();
  if (P.is_identity()) return QuadExtElement(PadicNumber::zero(p), PadicNumber::zero(p));
  PadicNumber d = E.disc();
  i64 k = static_cast<i64>(p * p - 1) * d.valuation();
  LocalPoint Q = mul(E, k, P);
  for (int extra = 0; extra < 4; ++extra) {
    if (Q.is_identity()) return QuadExtElement(PadicNumber::zero(p), PadicNumber::zero(p));
    QuadExtElement t = -(Q.X / Q.Y);
    if (!t.is_zero() && min_nonzero_valuation(t) >= 1) {
      PadicNumber kk = PadicNumber::from_int(p, k);
      int guard = kk.valuation() + 2;
      QuadExtElement l = formal_log(E, t, prec + guard) * tate_scale(E, q);
      return QuadExtElement(l.a() / kk, l.b() / kk).with_abs_prec(prec);
    }
    Q = mul(E, static_cast<i64>(p), Q);
    k *= static_cast<i64>(p);
  }
  throw Error(ErrorKind::InsufficientPrecision, "multiple of the point did not enter the formal group");
}

// ------------------------------------------------------------ point side

LocalCurve embed_curve(const std::array<FieldElement, 5>& a, PrimeSide s) {
  std::array<PadicNumber, 5> e;
  for (int i = 0; i < 5; ++i) e[i] = embed_F(a[i], s, -1);
  return LocalCurve(e);
}

LocalPoint embed_point(const EPoint& P, PrimeSide s) {
  return LocalPoint::affine(embed_E(P.x, s, -1), embed_E(P.y, s, -1));
}

TensorValue det_S(const QuadExtElement& l1P1, const QuadExtElement& l1P2, const QuadExtElement& l2P1,
                  const QuadExtElement& l2P2) {
  return TensorValue::tensor(l1P1, l2P2) - TensorValue::tensor(l1P2, l2P1);
}

TensorValue pi_S(const TensorValue& x, bool split1, bool split2) {
  TensorValue r = x;
  bool split[2] = {split1, split2};
  for (int k = 1; k <= 2; ++k) {
    // sigma* = frobenius on split factors and -frobenius on non-split ones.
    TensorValue sigma = split[k - 1] ? r.conjugated(k) : -r.conjugated(k);
    r = split[k - 1] ? r - sigma : r + sigma;
  }
  return r;
}

PointSideResult point_side(const PointSideInput& in) {
  PointSideResult res;
  const EPoint* pts[2] = {&in.P1, &in.P2};
  for (int side = 0; side < 2; ++side) {
    PrimeSide s{in.p, side + 1};
    LocalCurve E = embed_curve(in.a, s);
    res.split[side] = is_split(E);
    res.q[side] = tate_period(E, in.prec + 10);
    for (int i = 0; i < 2; ++i) {
      LocalPoint P = embed_point(*pts[i], s);
      if (!on_curve(E, P))
        throw Error(ErrorKind::InvalidArgument, "point P" + std::to_string(i + 1) + " is not on the curve at side " +
                                                    std::to_string(side + 1));
      res.logs[side][i] = elliptic_log(E, res.q[side], P, in.prec + 4);
    }
  }
  res.det = det_S(res.logs[0][0], res.logs[0][1], res.logs[1][0], res.logs[1][1]);
  res.value = pi_S(res.det, res.split[0], res.split[1]).with_abs_prec(in.prec);
  return res;
}

// ------------------------------------------------------------ literals

namespace {

mpq_class parse_rational(const nlohmann::json& j) {
  try {
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    mpq_class q(j.get<std::string>());
    q.canonicalize();
    return q;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::SchemaError, "bad rational literal " + j.dump());
  }
}

}  // namespace

FieldElement parse_field_element(const nlohmann::json& j, long D) {
  if (j.is_array() && j.size() == 2) return FieldElement(D, parse_rational(j[0]), parse_rational(j[1]));
  if (j.is_string() || j.is_number_integer()) return FieldElement(D, parse_rational(j));
  throw Error(ErrorKind::SchemaError, "bad field element literal " + j.dump());
}

EFieldElement parse_e_element(const nlohmann::json& j, const FieldElement& beta) {
  long D = beta.D();
  if (j.is_object()) {
    if (!j.contains("x") || !j.contains("y")) throw Error(ErrorKind::SchemaError, "E literal needs x and y");
    return EFieldElement(beta, parse_field_element(j["x"], D), parse_field_element(j["y"], D));
  }
  return EFieldElement(beta, parse_field_element(j, D), FieldElement(D, 0));
}

PointSideInput load_point_side(const nlohmann::json& j) {
  try {
    PointSideInput in;
    in.D = j.at("D").get<long>();
    in.p = j.at("p").get<u64>();
    in.beta = parse_field_element(j.at("beta"), in.D);
    const auto& c = j.at("curve");
    if (!c.is_array() || c.size() != 5) throw Error(ErrorKind::SchemaError, "curve needs five coefficients");
    for (int i = 0; i < 5; ++i) in.a[i] = parse_field_element(c[i], in.D);
    auto point = [&](const char* key) {
      const auto& P = j.at(key);
      return EPoint{parse_e_element(P.at("x"), in.beta), parse_e_element(P.at("y"), in.beta)};
    };
    in.P1 = point("P1");
    in.P2 = point("P2");
    in.prec = j.value("prec", 10);
    return in;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("point-side input: ") + e.what());
  }
}

}  // namespace plectic
