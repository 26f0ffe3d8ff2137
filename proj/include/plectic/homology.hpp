#pragma once

#include <utility>

#include "json.hpp"
#include "plectic/harmonize.hpp"
#include "plectic/integrate.hpp"

namespace plectic {

// Fixed points (tau, taubar) of the Moebius map of M, roots of
// c t^2 + (d - a) t - b; tau is the root whose alpha coordinate has unit
// residue in 1..(p-1)/2.  EmbeddingNotInert when they are not in H_p.
std::pair<QuadExtElement, QuadExtElement> fixed_points(const Mat2p& M, int prec);
QuadExtElement moebius(const Mat2p& M, const QuadExtElement& t);

struct CycleData {
  Mat2F psi;
  QuadExtElement tau[2], taubar[2];
};
CycleData cycle_data(const Fixture& f, int prec);
// Log cross ratios of the fixed points of psi with the Tate periods of the
// curve at the two primes.
IntegrandSpec fixture_integrand(const Fixture& f, int prec);

struct PlecticResult {
  TensorValue value;
  nlohmann::json diagnostics;
};

// Harmonize c at depth m, evaluate at psi and integrate the log cross ratios
// of the given integrand against the result on depth m - reach(psi).
PlecticResult plectic_invariant(const Cocycle& c, const GroupElement& psi, const IntegrandSpec& spec, int m, int prec,
                                int threads = 0);
// Full pipeline for a fixture; the integrand uses the fixed points of psi and
// the Tate periods of the curve at the two primes.
PlecticResult plectic_invariant(const Fixture& f, int m, int prec, int threads = 0);

}  // namespace plectic
