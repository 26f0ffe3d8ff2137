#pragma once

#include <gmpxx.h>

#include <string>

#include "plectic/padic.hpp"

namespace plectic {

// a + b*w in F = Q(sqrt D), w = (1 + sqrt D)/2, D = 1 mod 4.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(long D, mpq_class a, mpq_class b = 0);
  static FieldElement w(long D) { return FieldElement(D, 0, 1); }

  long D() const { return D_; }
  const mpq_class& a() const { return a_; }
  const mpq_class& b() const { return b_; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  FieldElement operator-() const { return FieldElement(D_, -a_, -b_); }
  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;
  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }
  bool operator==(const FieldElement& o) const { return a_ == o.a_ && b_ == o.b_; }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

  FieldElement conj() const;  // w -> 1 - w
  mpq_class norm() const;
  mpq_class trace() const;
  FieldElement inverse() const;
  FieldElement pow(long e) const;
  // Real embedding with sqrt D -> +sqrt D.
  double to_double() const;
  std::string str() const;

 private:
  long D_ = 1;
  mpq_class a_ = 0, b_ = 0;
};

// x + y*sqrt(beta) in E = F(sqrt beta).
class EFieldElement {
 public:
  EFieldElement() = default;
  EFieldElement(FieldElement beta, FieldElement x, FieldElement y);
  const FieldElement& x() const { return x_; }
  const FieldElement& y() const { return y_; }
  const FieldElement& beta() const { return beta_; }
  EFieldElement operator+(const EFieldElement& o) const;
  EFieldElement operator-(const EFieldElement& o) const;
  EFieldElement operator*(const EFieldElement& o) const;
  bool operator==(const EFieldElement& o) const { return x_ == o.x_ && y_ == o.y_; }

 private:
  FieldElement beta_, x_, y_;
};

struct PrimeSide {
  u64 p = 3;
  int side = 1;
};

// The selected root of D mod p (canonical root on side 1, its negative on side 2).
PadicNumber side_root(long D, PrimeSide s, int prec);
PadicNumber embed_Q(const mpq_class& x, u64 p, int prec);
PadicNumber embed_F(const FieldElement& x, PrimeSide s, int prec);
QuadExtElement embed_E(const EFieldElement& z, PrimeSide s, int prec);
QuadExtElement embed_sqrt_beta(const FieldElement& beta, PrimeSide s, int prec);
// Valuation at the prime of the given side (exact; kInf for zero).
int valuation_at(const FieldElement& x, PrimeSide s);

// Generator of the prime above p on the given side, a + b*w with norm +-p.
FieldElement uniformizer(long D, PrimeSide s);
// Fundamental unit eps > 1 of the ring of integers.
FieldElement fundamental_unit(long D);

class Mat2F {
 public:
  Mat2F() = default;
  Mat2F(FieldElement a, FieldElement b, FieldElement c, FieldElement d) : m_{a, b, c, d} {}
  static Mat2F identity(long D);
  const FieldElement& operator()(int i, int j) const { return m_[2 * i + j]; }
  FieldElement& operator()(int i, int j) { return m_[2 * i + j]; }
  long D() const { return m_[0].D(); }
  Mat2F operator*(const Mat2F& o) const;
  FieldElement det() const;
  Mat2F inverse() const;
  bool operator==(const Mat2F& o) const;
  // Exact key of the class of the matrix modulo scalars.
  std::string fingerprint() const;
  std::string str() const;

 private:
  FieldElement m_[4];
};

}  // namespace plectic
