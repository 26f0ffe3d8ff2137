#include "plectic/integrate.hpp"

#include <omp.h>

#include <algorithm>

namespace plectic {

// ------------------------------------------------------------ TensorValue

TensorValue TensorValue::zero(u64 p) {
  TensorValue t;
  for (auto& row : t.c)
    for (auto& x : row) x = PadicNumber::zero(p);
  return t;
}

TensorValue TensorValue::tensor(const QuadExtElement& x, const QuadExtElement& y) {
  TensorValue t;
  const PadicNumber* xs[2] = {&x.a(), &x.b()};
  const PadicNumber* ys[2] = {&y.a(), &y.b()};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.c[i][j] = *xs[i] * *ys[j];
  return t;
}

TensorValue TensorValue::operator+(const TensorValue& o) const {
  TensorValue t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.c[i][j] = c[i][j] + o.c[i][j];
  return t;
}

TensorValue TensorValue::operator-(const TensorValue& o) const { return *this + (-o); }

TensorValue TensorValue::operator-() const {
  TensorValue t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.c[i][j] = -c[i][j];
  return t;
}

TensorValue TensorValue::operator*(const PadicNumber& s) const {
  TensorValue t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.c[i][j] = c[i][j] * s;
  return t;
}

TensorValue TensorValue::operator*(i64 k) const { return *this * PadicNumber::from_int(prime(), k); }

TensorValue TensorValue::swapped() const {
  TensorValue t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.c[i][j] = c[j][i];
  return t;
}

TensorValue TensorValue::conjugated(int factor) const {
  TensorValue t = *this;
  for (int i = 0; i < 2; ++i) {
    if (factor == 1)
      t.c[1][i] = -c[1][i];
    else
      t.c[i][1] = -c[i][1];
  }
  return t;
}

TensorValue TensorValue::with_abs_prec(int k) const {
  TensorValue t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.c[i][j] = c[i][j].with_abs_prec(k);
  return t;
}

int TensorValue::abs_prec() const {
  int a = PadicNumber::kInf;
  for (const auto& row : c)
    for (const auto& x : row) a = std::min(a, x.abs_prec());
  return a;
}

bool TensorValue::is_zero() const {
  for (const auto& row : c)
    for (const auto& x : row)
      if (!x.is_zero()) return false;
  return true;
}

bool TensorValue::congruent(const TensorValue& o) const {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!c[i][j].congruent(o.c[i][j])) return false;
  return true;
}

bool TensorValue::operator==(const TensorValue& o) const {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!(c[i][j] == o.c[i][j])) return false;
  return true;
}

bool TensorValue::is_alpha_alpha() const { return c[0][0].is_zero() && c[0][1].is_zero() && c[1][0].is_zero(); }

std::string TensorValue::str() const {
  i64 d = canonical_nonresidue(prime());
  std::string a = d == -1 ? "√−1" : "√" + std::to_string(d);
  if (is_alpha_alpha()) return c[1][1].str() + "·(" + a + "⊗" + a + ")";
  std::string names[2][2] = {{"1⊗1", "1⊗" + a}, {a + "⊗1", a + "⊗" + a}};
  std::string out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (!out.empty()) out += " + ";
      out += "(" + c[i][j].str() + ")·(" + names[i][j] + ")";
    }
  return out;
}

int agreement(const TensorValue& x, const TensorValue& y) {
  int a = PadicNumber::kInf;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a = std::min(a, agreement(x.c[i][j], y.c[i][j]));
  return a;
}

// -------------------------------------------------------------- integrands

void validate(const FactorIntegrand& f) {
  if (const auto* l = std::get_if<LogCrossRatio>(&f)) {
    if (l->tau.b().is_zero() || l->taubar.b().is_zero())
      throw Error(ErrorKind::InvalidArgument, "integrand point lies in P^1(Q_p)");
    if ((l->tau - l->taubar).is_zero()) throw Error(ErrorKind::InvalidArgument, "degenerate zero-cycle");
    if (l->q.is_zero() || l->q.valuation() <= 0)
      throw Error(ErrorKind::InvalidPeriod, "Tate period must have positive valuation");
  }
}

QuadExtElement evaluate(const FactorIntegrand& f, const P1Point& t) {
  if (const auto* k = std::get_if<Constant>(&f)) return k->value;
  const auto& l = std::get<LogCrossRatio>(f);
  u64 p = l.q.prime();
  if (t.inf) return QuadExtElement(PadicNumber::zero(p), PadicNumber::zero(p));
  QuadExtElement x(t.t);
  return log_q((x - l.tau) / (x - l.taubar), l.q);
}

namespace {

struct LevelEdge {
  size_t index;
  int sign;
  QuadExtElement value;
};

std::vector<LevelEdge> level_table(const Tree& T, const FactorIntegrand& f, int m) {
  auto level = T.outward_level(m);
  std::vector<LevelEdge> out(level.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (size_t i = 0; i < level.size(); ++i) {
    int s;
    TreeEdge ee = T.to_even(level[i], &s);
    out[i] = {T.even_index(ee), s, evaluate(f, T.sample_point(level[i]))};
  }
  return out;
}

// Coordinates scaled by p^-v into integers mod p^N.
struct FixedPoint {
  int v = 0, N = 0;
  std::vector<u64> x[2];
};

FixedPoint to_fixed(const std::vector<LevelEdge>& tab, u64 p) {
  FixedPoint fp;
  int vmin = PadicNumber::kInf, amin = PadicNumber::kInf;
  for (const auto& t : tab)
    for (const PadicNumber* c : {&t.value.a(), &t.value.b()}) {
      amin = std::min(amin, c->abs_prec());
      if (!c->is_zero()) vmin = std::min(vmin, c->valuation());
    }
  if (vmin >= amin) vmin = amin;
  fp.v = vmin;
  fp.N = std::min(amin - vmin, max_digits(p));
  for (int k = 0; k < 2; ++k) {
    fp.x[k].resize(tab.size());
    for (size_t i = 0; i < tab.size(); ++i) {
      const PadicNumber& c = k == 0 ? tab[i].value.a() : tab[i].value.b();
      fp.x[k][i] = fp.N > 0 ? c.shift(-vmin).residue(fp.N) : 0;
    }
  }
  return fp;
}

int modulus_digits(const FiniteCochain& c) {
  if (c.modulus() == 0) return PadicNumber::kInf;
  u64 m = c.modulus();
  int k = 0;
  while (m % c.p() == 0) {
    m /= c.p();
    ++k;
  }
  if (m != 1) throw Error(ErrorKind::InvalidArgument, "cochain modulus is not a power of p");
  return k;
}

void check_inputs(const FiniteCochain& c, const IntegrandSpec& spec, int m) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "integration depth must be >= 1");
  if (m > c.depth()) throw Error(ErrorKind::OutOfDepth, "integration depth exceeds cochain depth");
  validate(spec.f1);
  validate(spec.f2);
}

}  // namespace

TensorValue riemann_log_integral(const FiniteCochain& c, const IntegrandSpec& spec, int m, int threads) {
  check_inputs(c, spec, m);
  u64 p = c.p();
  Tree T(p);
  auto t1 = level_table(T, spec.f1, m);
  auto t2 = level_table(T, spec.f2, m);
  FixedPoint f1 = to_fixed(t1, p), f2 = to_fixed(t2, p);
  if (f1.v >= PadicNumber::kInf || f2.v >= PadicNumber::kInf) return TensorValue::zero(p);
  int N = std::min({f1.N, f2.N, modulus_digits(c)});
  int vshift = f1.v + f2.v;
  TensorValue out;
  if (N <= 0) {
    for (auto& row : out.c)
      for (auto& x : row) x = PadicNumber::zero_mod(p, vshift + std::max(N, 0));
    return out;
  }
  u64 P = ppow(p, N);
  i64 Pi = static_cast<i64>(P);
  size_t n1 = t1.size(), n2 = t2.size();
  std::vector<u64> y[2];
  for (int k = 0; k < 2; ++k) {
    y[k].resize(n2);
    for (size_t j = 0; j < n2; ++j) y[k][j] = f2.x[k][j] % P;
  }
  u64 total[2][2] = {{0, 0}, {0, 0}};
  int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nt)
  {
    u64 local[2][2] = {{0, 0}, {0, 0}};
#pragma omp for schedule(static)
    for (size_t i = 0; i < n1; ++i) {
      u64 s[2] = {0, 0};
      for (size_t j = 0; j < n2; ++j) {
        i64 v = t1[i].sign * t2[j].sign * c.at(t1[i].index, t2[j].index);
        v %= Pi;
        if (v == 0) continue;
        u64 cv = static_cast<u64>(v < 0 ? v + Pi : v);
        for (int b = 0; b < 2; ++b) s[b] = (s[b] + mulmod(cv, y[b][j], P)) % P;
      }
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) local[a][b] = (local[a][b] + mulmod(f1.x[a][i] % P, s[b], P)) % P;
    }
#pragma omp critical
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) total[a][b] = (total[a][b] + local[a][b]) % P;
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.c[a][b] = PadicNumber::from_int(p, static_cast<i64>(total[a][b]), N).shift(vshift);
  return out;
}

TensorValue riemann_log_integral_serial(const FiniteCochain& c, const IntegrandSpec& spec, int m) {
  check_inputs(c, spec, m);
  u64 p = c.p();
  Tree T(p);
  int M = modulus_digits(c);
  TensorValue sum = TensorValue::zero(p);
  auto level = T.outward_level(m);
  std::vector<QuadExtElement> l2;
  for (const TreeEdge& e2 : level) l2.push_back(evaluate(spec.f2, T.sample_point(e2)));
  bool first = true;
  for (const TreeEdge& e1 : level) {
    QuadExtElement l1 = evaluate(spec.f1, T.sample_point(e1));
    for (size_t j = 0; j < level.size(); ++j) {
      i64 v = c.value(e1, level[j]);
      PadicNumber cv = M == PadicNumber::kInf ? PadicNumber::from_int(p, v) : PadicNumber::from_int(p, v, M);
      TensorValue term = TensorValue::tensor(l1, l2[j]) * cv;
      sum = first ? term : sum + term;
      first = false;
    }
  }
  return sum;
}

QuadExtElement mult_integral_single(const TreeCochain& c, const QuadExtElement& x, const QuadExtElement& y, int m) {
  if (m > c.depth()) throw Error(ErrorKind::OutOfDepth, "integration depth exceeds cochain depth");
  u64 p = c.p();
  Tree T(p);
  QuadExtElement prod = QuadExtElement::from_int(p, 1);
  for (const TreeEdge& e : T.outward_level(m)) {
    i64 k = c.value(e);
    if (k == 0) continue;
    P1Point t = T.sample_point(e);
    if (t.inf) continue;
    QuadExtElement tt(t.t);
    prod *= ((tt - x) / (tt - y)).pow(k);
  }
  return prod;
}

InvarianceReport coboundary_invariance_check(const FiniteCochain& c, const FiniteCochain& D, const SMatrix& g,
                                             const IntegrandSpec& spec, int m) {
  Tree T(c.p());
  InvarianceReport r;
  FiniteCochain cb = coboundary(D, g);
  r.depth = std::min(m, cb.depth());
  if (r.depth < 1) throw Error(ErrorKind::OutOfDepth, "group element reaches beyond the integration depth");
  FiniteCochain base = c.truncated(r.depth);
  r.plain = riemann_log_integral(base, spec, r.depth);
  r.shifted = riemann_log_integral(base + cb.truncated(r.depth), spec, r.depth);
  r.digits = agreement(r.plain, r.shifted);
  return r;
}

// ---------------------------------------------------------- serialization

nlohmann::json to_json(const TensorValue& t) {
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& row : t.c) coords.push_back({row[0].str(), row[1].str()});
  return {{"p", t.prime()}, {"coords", coords}, {"str", t.str()}};
}

TensorValue tensor_from_json(const nlohmann::json& j, u64 p) {
  try {
    if (j.contains("p")) p = j.at("p").get<u64>();
    if (j.contains("coords")) {
      TensorValue t;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) t.c[i][k] = PadicNumber::parse(j.at("coords").at(i).at(k).get<std::string>(), p);
      return t;
    }
    PadicNumber s = PadicNumber::parse(j.at("alpha_alpha").get<std::string>(), p);
    int k = s.abs_prec();
    TensorValue t = TensorValue::zero(p);
    if (k < PadicNumber::kInf)
      for (auto& row : t.c)
        for (auto& x : row) x = PadicNumber::zero_mod(p, k);
    t.c[1][1] = s;
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("tensor value: ") + e.what());
  }
}

}  // namespace plectic
