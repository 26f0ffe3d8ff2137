#include "plectic/numberfield.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace plectic {

FieldElement::FieldElement(long D, mpq_class a, mpq_class b) : D_(D), a_(std::move(a)), b_(std::move(b)) {
  a_.canonicalize();
  b_.canonicalize();
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  return FieldElement(D_, a_ + o.a_, b_ + o.b_);
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  return FieldElement(D_, a_ - o.a_, b_ - o.b_);
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  mpq_class k(D_ - 1, 4);
  k.canonicalize();
  mpq_class bd = b_ * o.b_;
  return FieldElement(D_, a_ * o.a_ + bd * k, a_ * o.b_ + b_ * o.a_ + bd);
}

FieldElement FieldElement::conj() const { return FieldElement(D_, a_ + b_, -b_); }

mpq_class FieldElement::norm() const {
  mpq_class k(D_ - 1, 4);
  k.canonicalize();
  return a_ * a_ + a_ * b_ - k * b_ * b_;
}

mpq_class FieldElement::trace() const { return 2 * a_ + b_; }

FieldElement FieldElement::inverse() const {
  mpq_class n = norm();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "inverse of zero field element");
  FieldElement c = conj();
  return FieldElement(D_, c.a_ / n, c.b_ / n);
}

FieldElement FieldElement::operator/(const FieldElement& o) const { return *this * o.inverse(); }

FieldElement FieldElement::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  FieldElement r(D_, 1, 0), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

double FieldElement::to_double() const {
  return a_.get_d() + b_.get_d() * (1.0 + std::sqrt(static_cast<double>(D_))) / 2.0;
}

std::string FieldElement::str() const {
  return "(" + a_.get_str() + ") + (" + b_.get_str() + ")*w";
}

EFieldElement::EFieldElement(FieldElement beta, FieldElement x, FieldElement y)
    : beta_(std::move(beta)), x_(std::move(x)), y_(std::move(y)) {}

EFieldElement EFieldElement::operator+(const EFieldElement& o) const {
  return EFieldElement(beta_, x_ + o.x_, y_ + o.y_);
}

EFieldElement EFieldElement::operator-(const EFieldElement& o) const {
  return EFieldElement(beta_, x_ - o.x_, y_ - o.y_);
}

EFieldElement EFieldElement::operator*(const EFieldElement& o) const {
  return EFieldElement(beta_, x_ * o.x_ + y_ * o.y_ * beta_, x_ * o.y_ + y_ * o.x_);
}

// ---------------------------------------------------------------- embeddings

namespace {

int remove_p(mpz_class& n, u64 p) {
  if (n == 0) return PadicNumber::kInf;
  mpz_class pz(static_cast<unsigned long>(p));
  return static_cast<int>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t()));
}

u64 reduce(const mpz_class& n, u64 m) {
  mpz_class mz(static_cast<unsigned long>(m));
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), n.get_mpz_t(), mz.get_mpz_t());
  return r.get_ui();
}

}  // namespace

PadicNumber embed_Q(const mpq_class& x, u64 p, int prec) {
  if (x == 0) return PadicNumber::zero(p);
  mpz_class num = x.get_num(), den = x.get_den();
  int v = remove_p(num, p) - remove_p(den, p);
  int cap = max_digits(p);
  int rel = prec < 0 ? cap : std::min(cap, prec - v);
  if (rel <= 0) return PadicNumber::zero_mod(p, prec);
  u64 m = ppow(p, rel);
  u64 u = mulmod(reduce(num, m), invmod(reduce(den, m), m), m);
  return PadicNumber::from_parts(p, v, u, rel);
}

PadicNumber side_root(long D, PrimeSide s, int prec) {
  static std::mutex mu;
  static std::map<std::pair<long, u64>, PadicNumber> cache;
  PadicNumber r;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({D, s.p});
    if (it != cache.end()) r = it->second;
  }
  if (!r.valid()) {
    if (!is_residue(D, s.p))
      throw Error(ErrorKind::EmbeddingUnavailable,
                  "p = " + std::to_string(s.p) + " does not split in Q(sqrt " + std::to_string(D) + ")");
    r = hensel_sqrt(PadicNumber::from_int(s.p, D));
    std::lock_guard<std::mutex> lock(mu);
    cache[{D, s.p}] = r;
  }
  if (s.side == 2) r = -r;
  return prec < 0 ? r : r.with_abs_prec(prec);
}

PadicNumber embed_F(const FieldElement& x, PrimeSide s, int prec) {
  if (x.is_zero()) return PadicNumber::zero(s.p);
  PadicNumber r = side_root(x.D(), s, -1);
  PadicNumber one = PadicNumber::from_int(s.p, 1);
  PadicNumber w = (one + r) / PadicNumber::from_int(s.p, 2);
  PadicNumber v = embed_Q(x.a(), s.p, -1);
  if (x.b() != 0) v = v + embed_Q(x.b(), s.p, -1) * w;
  return prec < 0 ? v : v.with_abs_prec(prec);
}

QuadExtElement embed_sqrt_beta(const FieldElement& beta, PrimeSide s, int prec) {
  PadicNumber b = embed_F(beta, s, -1);
  QuadExtElement r;
  try {
    r = quad_sqrt(b);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotASquare)
      throw Error(ErrorKind::PrimeNotInert, "beta has odd valuation at side " + std::to_string(s.side));
    throw;
  }
  if (r.b().is_exact_zero())
    throw Error(ErrorKind::PrimeNotInert, "beta is a square at side " + std::to_string(s.side));
  return prec < 0 ? r : r.with_abs_prec(prec);
}

QuadExtElement embed_E(const EFieldElement& z, PrimeSide s, int prec) {
  QuadExtElement x(embed_F(z.x(), s, -1));
  QuadExtElement r = x;
  if (!z.y().is_zero()) r = x + embed_sqrt_beta(z.beta(), s, -1) * embed_F(z.y(), s, -1);
  return prec < 0 ? r : r.with_abs_prec(prec);
}

int valuation_at(const FieldElement& x, PrimeSide s) {
  if (x.is_zero()) return PadicNumber::kInf;
  PadicNumber e = embed_F(x, s, -1);
  if (e.is_zero()) throw Error(ErrorKind::InsufficientPrecision, "valuation beyond working precision");
  return e.valuation();
}

namespace {

FieldElement search_uniformizer(long D, PrimeSide s) {
  for (long b = 0; b <= 60; ++b)
    for (long mag = 0; mag <= 200; ++mag)
      for (long a : {mag, -mag}) {
        FieldElement x(D, a, b);
        mpq_class n = x.norm();
        if (n != static_cast<long>(s.p) && n != -static_cast<long>(s.p)) continue;
        if (valuation_at(x, s) == 1) return x;
      }
  throw Error(ErrorKind::EmbeddingUnavailable, "no small generator of the prime above p");
}

FieldElement search_fundamental_unit(long D) {
  long k = (D - 1) / 4;
  for (long b = 1; b < 100000; ++b)
    for (long sign : {1L, -1L}) {
      // a^2 + a b - k b^2 = sign
      long disc = b * b + 4 * (k * b * b + sign);
      if (disc < 0) continue;
      long r = static_cast<long>(std::llround(std::sqrt(static_cast<double>(disc))));
      if (r * r != disc) continue;
      for (long a : {(-b + r) / 2, (-b - r) / 2}) {
        if ((-b + r) % 2 != 0) continue;
        for (FieldElement x : {FieldElement(D, a, b), FieldElement(D, -a, -b)}) {
          if (x.norm() * x.norm() != 1) continue;
          for (FieldElement y : {x, x.conj()})
            if (y.to_double() > 1.0 + 1e-9 && y.norm() * y.norm() == 1 && y.b() > 0) return y;
        }
      }
    }
  throw Error(ErrorKind::InvalidArgument, "fundamental unit search failed");
}

}  // namespace

FieldElement uniformizer(long D, PrimeSide s) {
  static std::mutex mu;
  static std::map<std::tuple<long, u64, int>, FieldElement> cache;
  std::tuple<long, u64, int> key{D, s.p, s.side};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  FieldElement x = search_uniformizer(D, s);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, x);
  return x;
}

FieldElement fundamental_unit(long D) {
  static std::mutex mu;
  static std::map<long, FieldElement> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(D);
    if (it != cache.end()) return it->second;
  }
  FieldElement x = search_fundamental_unit(D);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(D, x);
  return x;
}

// --------------------------------------------------------------- matrices

Mat2F Mat2F::identity(long D) {
  return Mat2F(FieldElement(D, 1), FieldElement(D, 0), FieldElement(D, 0), FieldElement(D, 1));
}

Mat2F Mat2F::operator*(const Mat2F& o) const {
  const Mat2F& a = *this;
  return Mat2F(a(0, 0) * o(0, 0) + a(0, 1) * o(1, 0), a(0, 0) * o(0, 1) + a(0, 1) * o(1, 1),
               a(1, 0) * o(0, 0) + a(1, 1) * o(1, 0), a(1, 0) * o(0, 1) + a(1, 1) * o(1, 1));
}

FieldElement Mat2F::det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

Mat2F Mat2F::inverse() const {
  FieldElement d = det();
  if (d.is_zero()) throw Error(ErrorKind::InvalidArgument, "singular matrix");
  FieldElement di = d.inverse();
  return Mat2F(m_[3] * di, -m_[1] * di, -m_[2] * di, m_[0] * di);
}

bool Mat2F::operator==(const Mat2F& o) const {
  for (int i = 0; i < 4; ++i)
    if (m_[i] != o.m_[i]) return false;
  return true;
}

std::string Mat2F::fingerprint() const {
  FieldElement s;
  for (int i = 0; i < 4; ++i)
    if (!m_[i].is_zero()) {
      s = m_[i].inverse();
      break;
    }
  std::string out;
  for (int i = 0; i < 4; ++i) {
    FieldElement x = m_[i] * s;
    if (i) out += ";";
    out += x.a().get_str() + "," + x.b().get_str();
  }
  return out;
}

std::string Mat2F::str() const {
  return "[[" + m_[0].str() + ", " + m_[1].str() + "], [" + m_[2].str() + ", " + m_[3].str() + "]]";
}

}  // namespace plectic
