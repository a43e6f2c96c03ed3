#pragma once

#include <map>
#include <string>
#include <vector>

#include "ffext/paraboloid.hpp"
#include "ffext/rational.hpp"
#include "ffext/rng.hpp"
#include "ffext/transform.hpp"

namespace ffext {

// Support of a grid function organized by last coordinate: the slices G_a
// partition G, and the active levels are the a with nonempty G_a.
struct LevelStructure {
  std::vector<long long> support;               // sorted grid indices
  std::map<int, std::vector<long long>> slices; // level -> sorted indices
  std::vector<int> active_levels;               // sorted, = keys of slices
};

LevelStructure level_structure(const GridFunction& g);

// Witness for is_regular: either the pair of levels whose slice sizes differ
// by more than a factor 2, or a support point whose modulus leaves [1/2, 1].
struct RegularityCertificate {
  bool regular = true;
  int level_a = -1;
  int level_b = -1;
  long long point = -1;
  std::string reason;
};

// True iff every pair of nonempty slices has sizes within a factor 2 and
// |g| lies in [1/2, 1] on the support.
RegularityCertificate is_regular(const GridFunction& g);

// One dyadic piece: coefficient * func sums (with the other pieces and the
// residual) back to the decomposed function; func is regular with values of
// modulus in (1/2, 1] on its support.
struct RegularPiece {
  double coefficient = 0.0;
  GridFunction func;
  LevelStructure levels;
};

struct RegularDecomposition {
  std::vector<RegularPiece> pieces;
  GridFunction residual;  // only points with |g| <= 2^-depth * max|g|
  double max_abs = 0.0;
};

// Dyadic decomposition by modulus level (2^-k-1, 2^-k] * max|g| for k <
// depth; a modulus bucket that is not already regular is split further by
// dyadic slice-size class. Piece count <= depth * (d log2 q + 1).
RegularDecomposition regular_decomposition(const GridFunction& g,
                                           int depth = 40);

// A horizontal slice of g transplanted onto the paraboloid through the graph
// map: lifted(base n) = g(n, a).
struct SliceLift {
  int level = 0;
  GridFunction slice;      // g_a as a grid function, zero off the slice
  SurfaceFunction lifted;  // h_a on P, |supp| = |G_a|
};

SliceLift slice_to_surface(const GridFunction& g, int a,
                           const GeometryPtr& geom = nullptr);

// The oscillatory part of the inverse surface measure: K(0) = 0 and
// K(m) = (dsigma)^v(m) elsewhere; K vanishes on the whole slice m_d = 0.
GridFunction bochner_riesz_kernel(const GeometryPtr& geom);

// One verified numeric statement; serializes to JSON with exactly these
// fields. ratio = lhs/rhs (1 when both vanish).
struct CheckReport {
  std::string check;
  std::string params;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

CheckReport make_check_report(std::string check, std::string params,
                              double lhs, double rhs, bool pass);

// ||g^||^2_{L2(P,dsigma)} against <g, g * (dsigma)^v>, the two routes fully
// independent: restriction + surface norm vs direct convolution with the
// directly summed extension of 1. Passes iff the difference is below
// 1e-9 * (1 + lhs).
CheckReport verify_duality_identity(const GridFunction& g);

// For each active level a: ||g_a * K||_r <= q^{(d-1)/2} ||(h_a dsigma)^v||_r,
// plus the exact equality against the same norm restricted to outputs with
// nonzero last coordinate (the substitution behind it is a bijection).
// Two reports per level. Irregular input -> std::invalid_argument.
std::vector<CheckReport> verify_slice_inequality(const GridFunction& g,
                                                 const Exponent& r);

// Constant-one bounds on the restricted L2 norm of a regular g with support
// size |G|: actual <= sqrt(q) sqrt|G|, actual^2 <= |G| + q^{(1-d)/2}|G|^2,
// actual <= sqrt|G| + q^{(1-d)/4}|G|, plus an informational regime bound
// (|G|^{11/16} |L_G|^{3/16} q^{(6-3d)/32}) that carries an unspecified
// constant and is never asserted. Irregular input -> std::invalid_argument.
std::vector<CheckReport> l2_restriction_bounds(const GridFunction& g);

// Pseudorandom regular function: a random set of levels with slice sizes
// within one factor-2 band and values of modulus in [1/2, 1].
GridFunction random_regular_function(const FieldPtr& ctx, int d, Rng& rng);

}  // namespace ffext
