#include "plectic/homology.hpp"

#include <algorithm>

#include "plectic/elliptic.hpp"

namespace plectic {

namespace {

// Rethrow with the stage name in front of the message.
template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

}  // namespace

QuadExtElement moebius(const Mat2p& M, const QuadExtElement& t) {
  return (t * M.a + QuadExtElement(M.b)) / (t * M.c + QuadExtElement(M.d));
}

std::pair<QuadExtElement, QuadExtElement> fixed_points(const Mat2p& M, int prec) {
  u64 p = M.prime();
  if (M.c.is_zero()) throw Error(ErrorKind::EmbeddingNotInert, "infinity is a fixed point");
  PadicNumber amd = M.a - M.d;
  PadicNumber disc = amd * amd + PadicNumber::from_int(p, 4) * M.b * M.c;
  if (disc.is_zero()) throw Error(ErrorKind::EmbeddingNotInert, "Moebius map is parabolic");
  QuadExtElement r;
  try {
    r = quad_sqrt(disc);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotASquare)
      throw Error(ErrorKind::EmbeddingNotInert, "fixed points lie in a ramified extension");
    throw;
  }
  if (!r.b().is_zero() && !r.a().is_zero()) throw Error(ErrorKind::InvalidArgument, "unexpected square root");
  if (r.b().is_zero()) throw Error(ErrorKind::EmbeddingNotInert, "fixed points are rational");
  QuadExtElement two_c(M.c * PadicNumber::from_int(p, 2));
  QuadExtElement tau = (QuadExtElement(amd) + r) / two_c;
  u64 res = tau.b().unit() % p;
  if (res > (p - 1) / 2) tau = frobenius(tau);
  if (prec > 0) tau = tau.with_abs_prec(std::min(prec, tau.abs_prec()));
  return {tau, frobenius(tau)};
}

CycleData cycle_data(const Fixture& f, int prec) {
  CycleData d;
  d.psi = f.psi;
  for (int k = 0; k < 2; ++k) {
    auto [t, tb] = fixed_points(embed_matrix(f.psi, {f.p, k + 1}), prec);
    d.tau[k] = t;
    d.taubar[k] = tb;
  }
  return d;
}

PlecticResult plectic_invariant(const Cocycle& c, const GroupElement& psi, const IntegrandSpec& spec, int m, int prec,
                                int threads) {
  u64 p = c.p();
  Tree T(p);
  int r = reach(T, psi.s);
  int mout = m - r;
  if (mout < 1) throw Error(ErrorKind::DepthExceeded, "psi reaches beyond the harmonization depth");
  u64 modulus = ppow(p, prec + 1);
  PlecticResult out;
  auto& dg = out.diagnostics;
  dg["m"] = m;
  dg["reach"] = r;
  dg["m_out"] = mout;
  dg["prec"] = prec;
  dg["modulus_digits"] = prec + 1;
  Harmonizer H = staged("harmonize", [&] { return Harmonizer(c, m, modulus, threads); });
  dg["harmonize"] = {{"base", H.table().base}, {"solver", H.stats().to_json()}, {"D_digest", digest(H.D())}};
  FiniteCochain raw = staged("evaluate", [&] { return H.raw(psi); });
  FiniteCochain cochain = staged("correct", [&] { return H.corrected(psi); });
  dg["cochain"] = {{"raw_digest", digest(raw)},
                   {"raw_harmonic", is_harmonic(raw)},
                   {"digest", digest(cochain)},
                   {"nonzero", std::count_if(cochain.data().begin(), cochain.data().end(), [](i64 x) { return x != 0; })}};
  out.value = staged("integrate", [&] { return riemann_log_integral(cochain, spec, mout, threads); });
  dg["integral"] = to_json(out.value);
  return out;
}

IntegrandSpec fixture_integrand(const Fixture& f, int prec) {
  CycleData cd = staged("cycle", [&] { return cycle_data(f, prec); });
  PadicNumber q[2];
  for (int k = 0; k < 2; ++k)
    q[k] = staged("tate", [&] { return tate_period(embed_curve(f.curve, {f.p, k + 1}), prec); });
  return {LogCrossRatio{cd.tau[0], cd.taubar[0], q[0]}, LogCrossRatio{cd.tau[1], cd.taubar[1], q[1]}};
}

PlecticResult plectic_invariant(const Fixture& f, int m, int prec, int threads) {
  if (m > f.depth) throw Error(ErrorKind::DepthExceeded, "fixture radial systems stop at depth " + std::to_string(f.depth));
  IntegrandSpec spec = fixture_integrand(f, prec + 4);
  ShapiroCocycle c(f);
  GroupElement psi = GroupElement::from_exact(f.psi, f.p);
  PlecticResult r = plectic_invariant(c, psi, spec, m, prec, threads);
  const auto& l1 = std::get<LogCrossRatio>(spec.f1);
  const auto& l2 = std::get<LogCrossRatio>(spec.f2);
  r.diagnostics["fixture"] = f.label;
  r.diagnostics["kappa"] = f.kappa.kind_name();
  r.diagnostics["cycle"] = {{"tau1", l1.tau.str()}, {"tau2", l2.tau.str()}};
  r.diagnostics["tate"] = {{"q1", l1.q.str()}, {"q2", l2.q.str()}};
  return r;
}

}  // namespace plectic
