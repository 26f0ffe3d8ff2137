#include "doctest.h"
#include "oracles.hpp"

using namespace plectic;
using namespace oracles;

namespace {

const u64 P = 3;

FiniteCochain random_cochain(int m, i64 bound) {
  FiniteCochain c(P, m);
  for (auto& x : c.data()) x = testutil::uniform(-bound, bound);
  return c;
}

IntegrandSpec random_spec() { return {random_log_factor(P), random_log_factor(P)}; }

FiniteCochain random_harmonic(int m, int terms) {
  Tree T(P);
  FiniteCochain c(P, m);
  for (int k = 0; k < terms; ++k)
    c = c + tensor(dirac_cochain(T, random_point(P), random_point(P), m),
                   dirac_cochain(T, random_point(P), random_point(P), m)) *
                testutil::uniform(-3, 3);
  return c;
}

}  // namespace

TEST_CASE("tensor values") {
  QuadExtElement x = testutil::random_quad(P, 0, 2, 20), y = testutil::random_quad(P, 0, 2, 20);
  TensorValue t = TensorValue::tensor(x, y);
  CHECK(t.c[0][1].congruent(x.a() * y.b()));
  CHECK(t.c[1][0].congruent(x.b() * y.a()));
  CHECK(t.swapped().congruent(TensorValue::tensor(y, x)));
  CHECK(t.conjugated(1).congruent(TensorValue::tensor(frobenius(x), y)));
  CHECK(t.conjugated(2).congruent(TensorValue::tensor(x, frobenius(y))));
  CHECK((t - t).is_zero());
  TensorValue aa = TensorValue::tensor(QuadExtElement::alpha(P), QuadExtElement::alpha(P)) *
                   PadicNumber::parse("2·3² + 3⁶ + O(3⁷)", P);
  CHECK(aa.is_alpha_alpha());
  CHECK(aa.str() == "2·3² + 3⁶ + O(3⁷)·(√−1⊗√−1)");
}

TEST_CASE("zero cochain integrates to zero") {
  FiniteCochain c(P, 3);
  TensorValue r = riemann_log_integral(c, random_spec(), 3);
  CHECK(r.is_zero());
  CHECK(riemann_log_integral_serial(c, random_spec(), 2).is_zero());
}

TEST_CASE("kernel agrees with the serial reference") {
  for (int it = 0; it < 12; ++it) {
    int m = static_cast<int>(testutil::uniform(1, 3));
    FiniteCochain c = random_cochain(m, 40);
    if (it % 3 == 0) c = c.reduced(ppow(P, 7));
    IntegrandSpec s = random_spec();
    TensorValue k = riemann_log_integral(c, s, m);
    TensorValue r = riemann_log_integral_serial(c, s, m);
    CHECK(k.congruent(r));
    CHECK(k.abs_prec() >= 7);
    CHECK(agreement(k, r) >= std::min(k.abs_prec(), r.abs_prec()));
  }
}

TEST_CASE("determinism across thread counts") {
  FiniteCochain c = random_cochain(4, 1000);
  IntegrandSpec s = random_spec();
  TensorValue ref = riemann_log_integral(c, s, 4, 1);
  for (int t : {2, 3, 4, 8}) CHECK(riemann_log_integral(c, s, 4, t) == ref);
}

TEST_CASE("dirac integrals converge to the closed form") {
  Tree T(P);
  const int runs = 20;
  double mean[7] = {0};
  for (int it = 0; it < runs; ++it) {
    LogCrossRatio f1 = random_log_factor(P), f2 = random_log_factor(P);
    P1Point x1 = random_point(P), y1 = random_point(P), x2 = random_point(P), y2 = random_point(P);
    TensorValue exact = dirac_closed_form(f1, f2, x1, y1, x2, y2);
    for (int m = 2; m <= 6; ++m) {
      FiniteCochain c = tensor(dirac_cochain(T, x1, y1, m), dirac_cochain(T, x2, y2, m));
      int d = agreement(riemann_log_integral(c, {f1, f2}, m), exact);
      CHECK(d >= m - 2);
      mean[m] += static_cast<double>(d) / runs;
    }
  }
  for (int m = 3; m <= 6; ++m) CHECK(mean[m] >= mean[m - 1]);
  CHECK((mean[6] - mean[2]) / 4 >= 1.0);
}

TEST_CASE("a constant factor integrates to zero against harmonic cochains") {
  for (int it = 0; it < 10; ++it) {
    int m = static_cast<int>(testutil::uniform(2, 4));
    FiniteCochain c = random_harmonic(m, 3);
    Constant k{testutil::random_quad(P, 0, 3, 20)};
    IntegrandSpec s1{k, random_log_factor(P)}, s2{random_log_factor(P), k};
    for (const IntegrandSpec& s : {s1, s2}) {
      TensorValue r = riemann_log_integral(c, s, m);
      CHECK(r.is_zero());
      CHECK(r.abs_prec() >= 15);
    }
  }
}

TEST_CASE("linearity and factor swap") {
  for (int it = 0; it < 6; ++it) {
    FiniteCochain a = random_cochain(2, 30), b = random_cochain(2, 30);
    IntegrandSpec s = random_spec();
    TensorValue ia = riemann_log_integral(a, s, 2), ib = riemann_log_integral(b, s, 2);
    CHECK(riemann_log_integral(a + b, s, 2).congruent(ia + ib));
    CHECK(riemann_log_integral(a * 5, s, 2).congruent(ia * 5));
    FiniteCochain at(P, 2);
    for (size_t i = 0; i < a.side(); ++i)
      for (size_t j = 0; j < a.side(); ++j) at.set_at(i, j, a.at(j, i));
    CHECK(riemann_log_integral(at, {s.f2, s.f1}, 2).congruent(ia.swapped()));
  }
  // Dirac additivity in the zero-cycle: (x - y) + (y - z) = (x - z).
  Tree T(P);
  LogCrossRatio f1 = random_log_factor(P), f2 = random_log_factor(P);
  P1Point x = random_point(P), y = random_point(P), z = random_point(P), w = random_point(P), u = random_point(P);
  auto I = [&](const P1Point& a, const P1Point& b) {
    return riemann_log_integral(tensor(dirac_cochain(T, a, b, 3), dirac_cochain(T, w, u, 3)), {f1, f2}, 3);
  };
  CHECK((I(x, y) + I(y, z)).congruent(I(x, z)));
}

TEST_CASE("single-prime multiplicative integral") {
  Tree T(P);
  QuadExtElement x = random_tau(P), y = random_tau(P);
  TreeCochain c(P, 3);
  for (auto& v : c.data()) v = testutil::uniform(-4, 4);
  CHECK(agreement(mult_integral_single(c, x, x, 3), QuadExtElement::from_int(P, 1)) >= 20);
  for (int it = 0; it < 10; ++it) {
    PadicNumber a = testutil::random_padic(P, 0, 4, 25), b = testutil::random_padic(P, -2, 4, 25);
    QuadExtElement exact = mult_closed_form(x, y, QuadExtElement(a), QuadExtElement(b));
    for (int m = 2; m <= 5; ++m) {
      QuadExtElement r = mult_integral_single(dirac_cochain(T, P1Point::at(a), P1Point::at(b), m), x, y, m);
      CHECK(agreement(r, exact) >= m - 2);
    }
  }
}

TEST_CASE("coboundary invariance on the cycle") {
  int m = 4;
  QuadExtElement tau1 = random_tau(P), tau2 = random_tau(P);
  IntegrandSpec s{LogCrossRatio{tau1, frobenius(tau1), testutil::random_padic(P, 1, 2, 25)},
                  LogCrossRatio{tau2, frobenius(tau2), testutil::random_padic(P, 1, 2, 25)}};
  SMatrix g{fixing_matrix(tau1, 2), fixing_matrix(tau2, 5)};
  Tree T(P);
  CHECK(mobius(g.g1, tau1).congruent(tau1));
  FiniteCochain c = random_harmonic(m, 2);
  auto r0 = coboundary_invariance_check(c, FiniteCochain(P, m), g, s, m);
  CHECK(r0.plain == r0.shifted);
  FiniteCochain D = random_harmonic(m, 2);
  auto r = coboundary_invariance_check(c, D, g, s, m);
  CHECK(r.digits >= r.depth - 2);
  // Negative control: a group element that does not fix the cycle.
  SMatrix bad{Mat2p::from_ints(P, 1, 1, 0, 1), Mat2p::from_ints(P, 2, 1, 1, 1)};
  int worst = PadicNumber::kInf;
  for (int it = 0; it < 5; ++it) {
    FiniteCochain D2 = random_harmonic(m, 2);
    worst = std::min(worst, coboundary_invariance_check(c, D2, bad, s, m).digits);
  }
  CHECK(worst < r.digits - 2);
}
