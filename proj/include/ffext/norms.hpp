#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ffext/energy.hpp"
#include "ffext/paraboloid.hpp"
#include "ffext/rational.hpp"

namespace ffext {

enum class NormMethod { Exact22, Ascent, IndicatorSweep, ConstantFunction };

// A certified lower bound on the extension norm R*(p->r): the norm ratio of
// a concrete witness, so recomputing
// lp_norm(extension(witness), r) / surface_lp_norm(witness, p)
// reproduces value to 1e-9.
struct NormEstimate {
  int d = 0;
  int q = 0;
  Exponent p;
  Exponent r;
  double value = 0.0;
  SurfaceFunction witness;
  NormMethod method = NormMethod::Ascent;
  int restarts = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  double dual_gap = 0.0;  // max(0, restriction ratio of final g - value)
};

// Returns sqrt(q) after checking the L2 extension identity
// ||(f dsigma)^v||_2 = sqrt(q) ||f||_{L2(dsigma)} on 20 fixed pseudorandom f;
// a failure throws consistency_error (it would mean a transform bug).
double exact_norm_2_2(const GeometryPtr& geom);

// Best lower bound from (a) alternating dual ascent maximizing
// Re<(f dsigma)^v, g> over unit balls ||f||_{L^p(dsigma)} <= 1,
// ||g||_{L^{r'}(dm)} <= 1, with closed-form factor updates, and (b) a sweep
// of structured witnesses (constant, the embedded isotropic subspace,
// point masses, random indicators). Deterministic in seed.
NormEstimate norm_lower_bound(const GeometryPtr& geom, Exponent p, Exponent r,
                              int restarts, int max_iter, double tol,
                              std::uint64_t seed);

// The two necessary conditions on (p, r) coming from a k-dimensional
// subspace contained in P and from counting: r >= 2d/(d-1) and
// r >= p(d-k) / ((p-1)(d-1-k)).
struct NecessaryConstraints {
  int d = 0;
  int k = 0;
  Rat r_uniform;            // 2d/(d-1)
  Exponent subspace_r(const Exponent& p) const;
  Exponent min_r(const Exponent& p) const;  // max of the two constraints
};

NecessaryConstraints necessary_exponents(int d, int k);

// Ratio of the witness f = indicator of Omega = W x {0}: exactly
// q^{(k-d+1)/p' + (d-k)/r}, computable both ways.
Rat omega_witness_exponent(int d, int k, const Exponent& p, const Exponent& r);
double omega_witness_ratio(const GeometryPtr& geom, const Exponent& p,
                           const Exponent& r);

enum class FieldClass { EvenD, D3Mod4MinusNonSquare, D1Mod4, OddDMinusSquare };

// Exponent constants attached to dimension d over a field where -1 is or is
// not a square: the necessary corner, the conjectured critical r at p = 2,
// the classical r = (2d+2)/(d-1), and the best currently known r with its
// provenance label.
struct ExponentProfile {
  int d = 0;
  FieldClass cls = FieldClass::EvenD;
  Rat corner_inv_p;   // 1/p at the necessary-region corner
  Rat corner_inv_r;   // 1/r at the necessary-region corner
  Rat conjectured_r;  // critical r at p = 2
  Rat stein_tomas_r;  // (2d+2)/(d-1)
  Rat best_known_r;
  bool best_known_open = false;  // endpoint requires epsilon loss
  bool stein_tomas_sharp = false;
  bool solved = false;
  std::string best_known_source;
};

ExponentProfile exponent_profile(int d, bool minus_one_square, bool prime_field);
ExponentProfile exponent_profile(const FieldContext& ctx, int d);

struct ScanPoint {
  int q = 0;
  double value = 0.0;
  NormEstimate estimate;
};

struct SlopeReport {
  std::vector<ScanPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max abs log-residual of the fit
};

struct ScanParams {
  int restarts = 6;
  int max_iter = 200;
  double tol = 1e-9;
  std::uint64_t seed = 1;
};

// norm_lower_bound per q, then a least-squares fit of log(value) against
// log(q): slope near 0 means bounded uniformly in q.
SlopeReport scaling_scan(int d, const Exponent& p, const Exponent& r,
                         const std::vector<int>& q_list,
                         const ScanParams& params);

}  // namespace ffext
