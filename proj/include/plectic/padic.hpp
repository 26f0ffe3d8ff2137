#pragma once

#include <climits>
#include <cstdint>
#include <string>

#include "plectic/error.hpp"

namespace plectic {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// p^k as a 64-bit integer; k must not exceed max_digits(p).
u64 ppow(u64 p, int k);
// Largest N with p^N < 2^62.
int max_digits(u64 p);
u64 mulmod(u64 a, u64 b, u64 m);
u64 invmod(u64 a, u64 m);
// Smallest positive non-residue mod p, except -1 when p = 3 mod 4.
i64 canonical_nonresidue(u64 p);
bool is_residue(i64 a, u64 p);

// p^v * u with u a unit known mod p^n.  n == 0 encodes zero known to
// absolute precision v (O(p^v)); v == kInf additionally marks exact zero.
class PadicNumber {
 public:
  static constexpr int kInf = INT_MAX / 4;

  PadicNumber() = default;

  static PadicNumber zero(u64 p);
  static PadicNumber zero_mod(u64 p, int abs_prec);
  // n mod p^abs_prec.  abs_prec < 0 means the cap for p.
  static PadicNumber from_int(u64 p, i64 n, int abs_prec = -1);
  static PadicNumber from_i128(u64 p, i128 n, int abs_prec = -1);
  static PadicNumber from_rational(u64 p, i64 num, i64 den, int abs_prec = -1);
  // p^v * unit, unit taken mod p^rel.
  static PadicNumber from_parts(u64 p, int v, u64 unit, int rel);

  u64 prime() const { return p_; }
  int valuation() const { return v_; }
  u64 unit() const { return u_; }
  int rel_prec() const { return n_; }
  int abs_prec() const { return n_ == 0 ? v_ : v_ + n_; }
  bool is_zero() const { return n_ == 0; }
  bool is_exact_zero() const { return n_ == 0 && v_ >= kInf; }
  bool is_unit() const { return n_ > 0 && v_ == 0; }
  bool valid() const { return p_ != 0; }

  // Coefficient of p^k in the canonical expansion (0 beyond precision).
  u64 digit(int k) const;
  // Residue of the value mod p^k when v >= 0; requires k <= abs_prec().
  u64 residue(int k) const;
  PadicNumber with_abs_prec(int k) const;
  PadicNumber unit_part() const;
  PadicNumber shift(int k) const;  // multiply by p^k

  PadicNumber operator-() const;
  PadicNumber operator+(const PadicNumber& o) const;
  PadicNumber operator-(const PadicNumber& o) const;
  PadicNumber operator*(const PadicNumber& o) const;
  PadicNumber operator/(const PadicNumber& o) const;
  PadicNumber& operator+=(const PadicNumber& o) { return *this = *this + o; }
  PadicNumber& operator-=(const PadicNumber& o) { return *this = *this - o; }
  PadicNumber& operator*=(const PadicNumber& o) { return *this = *this * o; }
  PadicNumber operator*(i64 k) const;
  PadicNumber pow(i64 e) const;
  PadicNumber inverse() const;

  // Equal as elements known to the lower of the two precisions.
  bool congruent(const PadicNumber& o) const;
  // Identical representation (value and precision).
  bool operator==(const PadicNumber& o) const;

  std::string str() const;
  static PadicNumber parse(const std::string& s, u64 p);

 private:
  u64 p_ = 0;
  int v_ = kInf;
  u64 u_ = 0;
  int n_ = 0;
};

// a + b*alpha with alpha^2 = d, d = canonical_nonresidue(p).
class QuadExtElement {
 public:
  QuadExtElement() = default;
  QuadExtElement(PadicNumber a, PadicNumber b);
  explicit QuadExtElement(PadicNumber a);
  static QuadExtElement alpha(u64 p, int abs_prec = -1);
  static QuadExtElement from_int(u64 p, i64 n, int abs_prec = -1);

  const PadicNumber& a() const { return a_; }
  const PadicNumber& b() const { return b_; }
  u64 prime() const { return a_.prime(); }
  i64 d() const { return canonical_nonresidue(a_.prime()); }
  int valuation() const;
  int abs_prec() const;
  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  QuadExtElement with_abs_prec(int k) const;

  QuadExtElement operator-() const;
  QuadExtElement operator+(const QuadExtElement& o) const;
  QuadExtElement operator-(const QuadExtElement& o) const;
  QuadExtElement operator*(const QuadExtElement& o) const;
  QuadExtElement operator/(const QuadExtElement& o) const;
  QuadExtElement operator*(const PadicNumber& s) const;
  QuadExtElement operator*(i64 k) const;
  QuadExtElement& operator+=(const QuadExtElement& o) { return *this = *this + o; }
  QuadExtElement& operator-=(const QuadExtElement& o) { return *this = *this - o; }
  QuadExtElement& operator*=(const QuadExtElement& o) { return *this = *this * o; }
  QuadExtElement pow(i64 e) const;
  QuadExtElement inverse() const;
  PadicNumber norm() const;

  bool congruent(const QuadExtElement& o) const;
  bool operator==(const QuadExtElement& o) const { return a_ == o.a_ && b_ == o.b_; }
  std::string str() const;

 private:
  PadicNumber a_, b_;
};

QuadExtElement frobenius(const QuadExtElement& x);

PadicNumber hensel_sqrt(const PadicNumber& x);
// Square root in the quadratic extension: (r, 0) if x is a square in Q_p,
// otherwise (0, s) with s^2 = x/d.
QuadExtElement quad_sqrt(const PadicNumber& x);

PadicNumber iwasawa_log(const PadicNumber& x);
QuadExtElement iwasawa_log(const QuadExtElement& x);
QuadExtElement log_q(const QuadExtElement& x, const PadicNumber& q);
PadicNumber log_q(const PadicNumber& x, const PadicNumber& q);

// Valuation difference between two values, i.e. how many absolute digits
// they share; kInf when both are zero to their precision.
int agreement(const PadicNumber& x, const PadicNumber& y);
int agreement(const QuadExtElement& x, const QuadExtElement& y);

}  // namespace plectic
