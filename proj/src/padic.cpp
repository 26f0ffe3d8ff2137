#include "plectic/padic.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <vector>

namespace plectic {

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorKind::NotASquare: return "NotASquare";
    case ErrorKind::InvalidPeriod: return "InvalidPeriod";
    case ErrorKind::EmbeddingUnavailable: return "EmbeddingUnavailable";
    case ErrorKind::PrimeNotInert: return "PrimeNotInert";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::RadialContractViolation: return "RadialContractViolation";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::OracleIncomplete: return "OracleIncomplete";
    case ErrorKind::DegenerationUnderdetermined: return "DegenerationUnderdetermined";
    case ErrorKind::LiftInconsistent: return "LiftInconsistent";
    case ErrorKind::NotMultiplicative: return "NotMultiplicative";
    case ErrorKind::EmbeddingNotInert: return "EmbeddingNotInert";
    case ErrorKind::OutOfDepth: return "OutOfDepth";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

constexpr u64 kLimit = u64(1) << 62;

struct PowTable {
  std::array<std::array<u64, 64>, 64> pw{};
  std::array<int, 64> cap{};
  PowTable() {
    for (u64 p = 2; p < 64; ++p) {
      pw[p][0] = 1;
      int k = 0;
      while (pw[p][k] <= kLimit / p) {
        pw[p][k + 1] = pw[p][k] * p;
        ++k;
      }
      cap[p] = k;
    }
  }
};

const PowTable& table() {
  static const PowTable t;
  return t;
}

int vp(u128 n, u64 p) {
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

int floor_log(i64 k, u64 p) {
  int r = 0;
  while (k >= static_cast<i64>(p)) {
    k /= static_cast<i64>(p);
    ++r;
  }
  return r;
}

// Signed integer reduced into [0, m).
u64 reduce_signed(i128 n, u64 m) {
  i128 r = n % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<u64>(r);
}

}  // namespace

u64 ppow(u64 p, int k) {
  if (p < 64) return table().pw[p][k];
  u64 r = 1;
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

int max_digits(u64 p) {
  if (p < 64) return table().cap[p];
  int k = 0;
  u64 r = 1;
  while (r <= kLimit / p) {
    r *= p;
    ++k;
  }
  return k;
}

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<u128>(a) * b) % m);
}

u64 invmod(u64 a, u64 m) {
  i128 t = 0, nt = 1, r = m, nr = a % m;
  while (nr != 0) {
    i128 q = r / nr;
    i128 tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw Error(ErrorKind::InsufficientPrecision, "non-invertible residue");
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

static u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_residue(i64 a, u64 p) {
  u64 r = reduce_signed(a, p);
  if (r == 0) return false;
  return powmod(r, (p - 1) / 2, p) == 1;
}

i64 canonical_nonresidue(u64 p) {
  if (p % 4 == 3) return -1;
  for (i64 a = 2;; ++a)
    if (!is_residue(a, p)) return a;
}

// ---------------------------------------------------------------- PadicNumber

PadicNumber PadicNumber::zero(u64 p) {
  PadicNumber r;
  r.p_ = p;
  return r;
}

PadicNumber PadicNumber::zero_mod(u64 p, int abs_prec) {
  PadicNumber r;
  r.p_ = p;
  r.v_ = abs_prec;
  return r;
}

PadicNumber PadicNumber::from_parts(u64 p, int v, u64 unit, int rel) {
  if (rel <= 0) return zero_mod(p, v + rel);
  rel = std::min(rel, max_digits(p));
  PadicNumber r;
  r.p_ = p;
  r.v_ = v;
  r.n_ = rel;
  r.u_ = unit % ppow(p, rel);
  if (r.u_ % p == 0) throw Error(ErrorKind::InvalidArgument, "unit part divisible by p");
  return r;
}

PadicNumber PadicNumber::from_i128(u64 p, i128 n, int abs_prec) {
  if (n == 0) return abs_prec < 0 ? zero(p) : zero_mod(p, abs_prec);
  int v = vp(n < 0 ? -n : n, p);
  i128 m = n;
  for (int i = 0; i < v; ++i) m /= static_cast<i128>(p);
  int rel = abs_prec < 0 ? max_digits(p) : abs_prec - v;
  if (rel <= 0) return zero_mod(p, abs_prec);
  rel = std::min(rel, max_digits(p));
  return from_parts(p, v, reduce_signed(m, ppow(p, rel)), rel);
}

PadicNumber PadicNumber::from_int(u64 p, i64 n, int abs_prec) {
  return from_i128(p, n, abs_prec);
}

PadicNumber PadicNumber::from_rational(u64 p, i64 num, i64 den, int abs_prec) {
  if (den == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
  if (num == 0) return abs_prec < 0 ? zero(p) : zero_mod(p, abs_prec);
  int vd = vp(den < 0 ? -static_cast<i128>(den) : den, p);
  i128 d = den;
  for (int i = 0; i < vd; ++i) d /= static_cast<i128>(p);
  int vn = vp(num < 0 ? -static_cast<i128>(num) : num, p);
  i128 n = num;
  for (int i = 0; i < vn; ++i) n /= static_cast<i128>(p);
  int v = vn - vd;
  int rel = abs_prec < 0 ? max_digits(p) : abs_prec - v;
  if (rel <= 0) return zero_mod(p, abs_prec);
  rel = std::min(rel, max_digits(p));
  u64 m = ppow(p, rel);
  u64 u = mulmod(reduce_signed(n, m), invmod(reduce_signed(d, m), m), m);
  return from_parts(p, v, u, rel);
}

u64 PadicNumber::digit(int k) const {
  if (n_ == 0 || k < v_ || k >= v_ + n_) return 0;
  return (u_ / ppow(p_, k - v_)) % p_;
}

u64 PadicNumber::residue(int k) const {
  if (k > abs_prec()) throw Error(ErrorKind::InsufficientPrecision, "residue beyond precision");
  if (n_ == 0 || v_ >= k) return 0;
  if (v_ < 0) throw Error(ErrorKind::InvalidArgument, "residue of non-integral value");
  u64 m = ppow(p_, k);
  return mulmod(u_ % m, ppow(p_, v_), m);
}

PadicNumber PadicNumber::with_abs_prec(int k) const {
  if (k >= abs_prec()) return *this;
  if (n_ == 0 || k <= v_) return zero_mod(p_, k);
  PadicNumber r = *this;
  r.n_ = k - v_;
  r.u_ = u_ % ppow(p_, r.n_);
  return r;
}

PadicNumber PadicNumber::unit_part() const {
  if (n_ == 0) throw Error(ErrorKind::InsufficientPrecision, "unit part of zero");
  PadicNumber r = *this;
  r.v_ = 0;
  return r;
}

PadicNumber PadicNumber::shift(int k) const {
  if (is_exact_zero()) return *this;
  PadicNumber r = *this;
  r.v_ += k;
  return r;
}

PadicNumber PadicNumber::operator-() const {
  if (n_ == 0) return *this;
  PadicNumber r = *this;
  r.u_ = ppow(p_, n_) - u_;
  return r;
}

PadicNumber PadicNumber::operator+(const PadicNumber& o) const {
  if (n_ == 0) return o.with_abs_prec(std::min(abs_prec(), o.abs_prec()));
  if (o.n_ == 0) return with_abs_prec(std::min(abs_prec(), o.abs_prec()));
  int a = std::min(abs_prec(), o.abs_prec());
  int vmin = std::min(v_, o.v_);
  int k = a - vmin;
  if (k <= 0) return zero_mod(p_, a);
  u64 m = ppow(p_, k);
  auto lift = [&](const PadicNumber& x) -> u64 {
    int s = x.v_ - vmin;
    if (s >= k) return 0;
    return mulmod(x.u_ % m, ppow(p_, s), m);
  };
  u64 s = lift(*this) + lift(o);
  if (s >= m) s -= m;
  if (s == 0) return zero_mod(p_, a);
  int extra = 0;
  while (s % p_ == 0) {
    s /= p_;
    ++extra;
  }
  PadicNumber r;
  r.p_ = p_;
  r.v_ = vmin + extra;
  r.n_ = k - extra;
  r.u_ = s;
  return r;
}

PadicNumber PadicNumber::operator-(const PadicNumber& o) const { return *this + (-o); }

PadicNumber PadicNumber::operator*(const PadicNumber& o) const {
  if (is_exact_zero() || o.is_exact_zero()) return zero(p_);
  if (n_ == 0 && o.n_ == 0) return zero_mod(p_, v_ + o.v_);
  if (n_ == 0) return zero_mod(p_, v_ + o.v_);
  if (o.n_ == 0) return zero_mod(p_, v_ + o.v_);
  int n = std::min(n_, o.n_);
  u64 m = ppow(p_, n);
  PadicNumber r;
  r.p_ = p_;
  r.v_ = v_ + o.v_;
  r.n_ = n;
  r.u_ = mulmod(u_ % m, o.u_ % m, m);
  return r;
}

PadicNumber PadicNumber::operator/(const PadicNumber& o) const {
  if (o.n_ == 0) throw Error(ErrorKind::InsufficientPrecision, "division by a value indistinguishable from zero");
  if (is_exact_zero()) return *this;
  if (n_ == 0) return zero_mod(p_, v_ - o.v_);
  int n = std::min(n_, o.n_);
  u64 m = ppow(p_, n);
  PadicNumber r;
  r.p_ = p_;
  r.v_ = v_ - o.v_;
  r.n_ = n;
  r.u_ = mulmod(u_ % m, invmod(o.u_ % m, m), m);
  return r;
}

PadicNumber PadicNumber::operator*(i64 k) const { return *this * from_int(p_, k); }

PadicNumber PadicNumber::inverse() const { return from_int(p_, 1) / *this; }

PadicNumber PadicNumber::pow(i64 e) const {
  if (e < 0) return inverse().pow(-e);
  PadicNumber r = from_int(p_, 1);
  PadicNumber b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

bool PadicNumber::congruent(const PadicNumber& o) const { return (*this - o).is_zero(); }

bool PadicNumber::operator==(const PadicNumber& o) const {
  return p_ == o.p_ && v_ == o.v_ && n_ == o.n_ && u_ == o.u_;
}

// --------------------------------------------------------------- rendering

namespace {

const char* kSup[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};

std::string superscript(int e) {
  std::string s;
  if (e < 0) {
    s = "⁻";
    e = -e;
  }
  std::string digits = std::to_string(e);
  for (char c : digits) s += kSup[c - '0'];
  return s;
}

std::string power(u64 p, int e) {
  if (e == 1) return std::to_string(p);
  return std::to_string(p) + superscript(e);
}

}  // namespace

std::string PadicNumber::str() const {
  if (is_exact_zero()) return "0";
  std::string out;
  if (n_ > 0) {
    for (int k = v_; k < v_ + n_; ++k) {
      u64 c = digit(k);
      if (c == 0) continue;
      if (!out.empty()) out += " + ";
      if (k == 0) {
        out += std::to_string(c);
      } else if (c == 1) {
        out += power(p_, k);
      } else {
        out += std::to_string(c) + "·" + power(p_, k);
      }
    }
  }
  if (!out.empty()) out += " + ";
  out += "O(" + power(p_, abs_prec()) + ")";
  return out;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& s) {
  throw Error(ErrorKind::InvalidArgument, "cannot parse p-adic literal: " + s);
}

i64 parse_int(const std::string& s) {
  if (s.empty()) bad(s);
  size_t pos = 0;
  i64 v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (...) {
    bad(s);
  }
  if (pos != s.size()) bad(s);
  return v;
}

// "p", "p^e", "p^{e}", "p²"; returns the exponent.
int parse_power(const std::string& s, u64 p) {
  std::string ps = std::to_string(p);
  if (s.compare(0, ps.size(), ps) != 0) bad(s);
  std::string rest = s.substr(ps.size());
  if (rest.empty()) return 1;
  if (rest[0] == '^') {
    rest = rest.substr(1);
    if (!rest.empty() && rest.front() == '{' && rest.back() == '}') rest = rest.substr(1, rest.size() - 2);
    return static_cast<int>(parse_int(rest));
  }
  int sign = 1;
  std::string digits;
  size_t i = 0;
  const std::string minus = "⁻";
  if (rest.compare(0, minus.size(), minus) == 0) {
    sign = -1;
    i = minus.size();
  }
  while (i < rest.size()) {
    bool found = false;
    for (int d = 0; d < 10; ++d) {
      std::string sd = kSup[d];
      if (rest.compare(i, sd.size(), sd) == 0) {
        digits += static_cast<char>('0' + d);
        i += sd.size();
        found = true;
        break;
      }
    }
    if (!found) bad(s);
  }
  if (digits.empty()) bad(s);
  return sign * static_cast<int>(parse_int(digits));
}

}  // namespace

PadicNumber PadicNumber::parse(const std::string& text, u64 p) {
  std::vector<std::string> terms;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '+') {
      terms.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  struct Term {
    i64 c;
    int e;
  };
  std::vector<Term> parsed;
  bool have_prec = false;
  int prec = 0;
  for (const std::string& t : terms) {
    if (t.empty()) bad(text);
    if (t.rfind("O(", 0) == 0) {
      if (t.back() != ')') bad(text);
      prec = parse_power(trim(t.substr(2, t.size() - 3)), p);
      have_prec = true;
      continue;
    }
    size_t dot = t.find("·");
    size_t dot_len = 2;
    if (dot == std::string::npos) {
      dot = t.find('*');
      dot_len = 1;
    }
    if (dot != std::string::npos) {
      parsed.push_back({parse_int(trim(t.substr(0, dot))), parse_power(trim(t.substr(dot + dot_len)), p)});
    } else if (t.find_first_not_of("0123456789-") == std::string::npos && t != std::to_string(p)) {
      parsed.push_back({parse_int(t), 0});
    } else {
      parsed.push_back({1, parse_power(t, p)});
    }
  }
  if (!have_prec) {
    int emin = 0;
    for (const Term& t : parsed) emin = std::min(emin, t.e);
    if (parsed.size() == 1 && parsed[0].c == 0) return zero(p);
    prec = emin + max_digits(p);
  }
  PadicNumber r = zero_mod(p, prec);
  for (const Term& t : parsed) {
    if (t.c == 0) continue;
    if (t.e >= prec) bad(text);
    r = r + from_int(p, t.c, prec - t.e).shift(t.e);
  }
  return r;
}

// ----------------------------------------------------------- QuadExtElement

QuadExtElement::QuadExtElement(PadicNumber a, PadicNumber b) : a_(a), b_(b) {
  if (a_.prime() != b_.prime()) throw Error(ErrorKind::InvalidArgument, "mixed primes");
}

QuadExtElement::QuadExtElement(PadicNumber a) : a_(a), b_(PadicNumber::zero(a.prime())) {}

QuadExtElement QuadExtElement::alpha(u64 p, int abs_prec) {
  return QuadExtElement(PadicNumber::zero(p), PadicNumber::from_int(p, 1, abs_prec));
}

QuadExtElement QuadExtElement::from_int(u64 p, i64 n, int abs_prec) {
  return QuadExtElement(PadicNumber::from_int(p, n, abs_prec));
}

int QuadExtElement::valuation() const { return std::min(a_.valuation(), b_.valuation()); }

int QuadExtElement::abs_prec() const { return std::min(a_.abs_prec(), b_.abs_prec()); }

QuadExtElement QuadExtElement::with_abs_prec(int k) const {
  return QuadExtElement(a_.with_abs_prec(k), b_.with_abs_prec(k));
}

QuadExtElement QuadExtElement::operator-() const { return QuadExtElement(-a_, -b_); }

QuadExtElement QuadExtElement::operator+(const QuadExtElement& o) const {
  return QuadExtElement(a_ + o.a_, b_ + o.b_);
}

QuadExtElement QuadExtElement::operator-(const QuadExtElement& o) const {
  return QuadExtElement(a_ - o.a_, b_ - o.b_);
}

QuadExtElement QuadExtElement::operator*(const QuadExtElement& o) const {
  PadicNumber bb = b_ * o.b_;
  return QuadExtElement(a_ * o.a_ + bb * d(), a_ * o.b_ + b_ * o.a_);
}

QuadExtElement QuadExtElement::operator*(const PadicNumber& s) const {
  return QuadExtElement(a_ * s, b_ * s);
}

QuadExtElement QuadExtElement::operator*(i64 k) const { return *this * PadicNumber::from_int(prime(), k); }

PadicNumber QuadExtElement::norm() const { return a_ * a_ - b_ * b_ * d(); }

QuadExtElement QuadExtElement::inverse() const {
  PadicNumber n = norm();
  return QuadExtElement(a_ / n, -(b_ / n));
}

QuadExtElement QuadExtElement::operator/(const QuadExtElement& o) const {
  PadicNumber n = o.norm();
  QuadExtElement t = *this * frobenius(o);
  return QuadExtElement(t.a_ / n, t.b_ / n);
}

QuadExtElement QuadExtElement::pow(i64 e) const {
  if (e < 0) return inverse().pow(-e);
  QuadExtElement r = from_int(prime(), 1);
  QuadExtElement b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

bool QuadExtElement::congruent(const QuadExtElement& o) const {
  return a_.congruent(o.a_) && b_.congruent(o.b_);
}

std::string QuadExtElement::str() const {
  std::string s = "(" + a_.str() + ") + (" + b_.str() + ")·α";
  return s;
}

QuadExtElement frobenius(const QuadExtElement& x) { return QuadExtElement(x.a(), -x.b()); }

// ------------------------------------------------------------- sqrt and log

PadicNumber hensel_sqrt(const PadicNumber& x) {
  if (x.is_zero()) throw Error(ErrorKind::InsufficientPrecision, "square root of zero");
  u64 p = x.prime();
  if (p == 2) throw Error(ErrorKind::InvalidArgument, "p = 2 unsupported");
  if (x.valuation() % 2 != 0) throw Error(ErrorKind::NotASquare, "odd valuation");
  u64 u0 = x.unit() % p;
  u64 r0 = 0;
  for (u64 r = 1; r <= (p - 1) / 2; ++r)
    if (r * r % p == u0) {
      r0 = r;
      break;
    }
  if (r0 == 0) throw Error(ErrorKind::NotASquare, "unit part is a non-residue");
  int n = x.rel_prec();
  u64 m = ppow(p, n);
  u64 u = x.unit();
  u64 inv2 = invmod(2 % m, m);
  u64 r = r0;
  for (int known = 1; known < n; known *= 2) {
    u64 t = (r + mulmod(u, invmod(r, m), m)) % m;
    r = mulmod(t, inv2, m);
  }
  return PadicNumber::from_parts(p, x.valuation() / 2, r, n);
}

QuadExtElement quad_sqrt(const PadicNumber& x) {
  if (x.is_zero()) throw Error(ErrorKind::InsufficientPrecision, "square root of zero");
  u64 p = x.prime();
  if (x.valuation() % 2 != 0) throw Error(ErrorKind::NotASquare, "odd valuation (ramified)");
  if (is_residue(static_cast<i64>(x.unit() % p), p)) return QuadExtElement(hensel_sqrt(x));
  i64 d = canonical_nonresidue(p);
  return QuadExtElement(PadicNumber::zero(p), hensel_sqrt(x / PadicNumber::from_int(p, d)));
}

namespace {

template <class T>
T log_series(const T& z, const T& zero, u64 p) {
  int target = z.abs_prec();
  if (z.is_zero()) return zero.with_abs_prec(target);
  int vz = z.valuation();
  T sum = zero;
  T pw = z;
  for (i64 k = 1;; ++k) {
    i64 bound = k * vz - floor_log(k, p);
    if (bound >= target) break;
    T term = pw * (PadicNumber::from_int(p, 1) / PadicNumber::from_int(p, k));
    if (k % 2 == 1)
      sum = sum + term;
    else
      sum = sum - term;
    pw = pw * z;
  }
  return sum.with_abs_prec(target);
}

}  // namespace

PadicNumber iwasawa_log(const PadicNumber& x) {
  if (x.is_zero()) throw Error(ErrorKind::InsufficientPrecision, "log of zero");
  u64 p = x.prime();
  PadicNumber one = PadicNumber::from_int(p, 1);
  PadicNumber y = x.unit_part().pow(static_cast<i64>(p - 1));
  PadicNumber s = log_series(y - one, PadicNumber::zero(p), p);
  return s / PadicNumber::from_int(p, static_cast<i64>(p - 1));
}

QuadExtElement iwasawa_log(const QuadExtElement& x) {
  if (x.is_zero()) throw Error(ErrorKind::InsufficientPrecision, "log of zero");
  u64 p = x.prime();
  int v = x.valuation();
  QuadExtElement u(x.a().shift(-v), x.b().shift(-v));
  QuadExtElement y = u.pow(static_cast<i64>(p * p - 1));
  QuadExtElement z = y - QuadExtElement::from_int(p, 1);
  QuadExtElement s = log_series(z, QuadExtElement(PadicNumber::zero(p)), p);
  PadicNumber k = PadicNumber::from_int(p, static_cast<i64>(p * p - 1));
  return QuadExtElement(s.a() / k, s.b() / k);
}

PadicNumber log_q(const PadicNumber& x, const PadicNumber& q) {
  if (q.is_zero() || q.valuation() <= 0) throw Error(ErrorKind::InvalidPeriod, "Tate period must have positive valuation");
  u64 p = x.prime();
  PadicNumber lx = iwasawa_log(x);
  if (x.valuation() == 0) return lx;
  PadicNumber lq = iwasawa_log(q);
  return lx - lq * PadicNumber::from_int(p, x.valuation()) / PadicNumber::from_int(p, q.valuation());
}

QuadExtElement log_q(const QuadExtElement& x, const PadicNumber& q) {
  if (q.is_zero() || q.valuation() <= 0) throw Error(ErrorKind::InvalidPeriod, "Tate period must have positive valuation");
  u64 p = x.prime();
  QuadExtElement lx = iwasawa_log(x);
  if (x.valuation() == 0) return lx;
  PadicNumber lq = iwasawa_log(q);
  PadicNumber corr = lq * PadicNumber::from_int(p, x.valuation()) / PadicNumber::from_int(p, q.valuation());
  return lx - QuadExtElement(corr);
}

int agreement(const PadicNumber& x, const PadicNumber& y) { return (x - y).valuation(); }

int agreement(const QuadExtElement& x, const QuadExtElement& y) {
  return std::min(agreement(x.a(), y.a()), agreement(x.b(), y.b()));
}

}  // namespace plectic
