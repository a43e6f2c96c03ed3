#pragma once

#include <memory>
#include <vector>

#include "ffext/transform.hpp"

namespace ffext {

// The paraboloid P = {(x, x.x) : x in F_q^{d-1}} inside F_q^d. Points are
// indexed by their base point x as a little-endian base-q integer in
// [0, q^{d-1}); last_coord[i] is the final coordinate x.x of point i.
struct ParaboloidGeometry {
  FieldPtr ctx;
  int d = 2;
  std::vector<int> last_coord;

  long long size() const { return static_cast<long long>(last_coord.size()); }

  // Flat index of point i inside the full q^d grid.
  long long grid_index(long long i) const {
    return i + static_cast<long long>(last_coord[static_cast<std::size_t>(i)]) *
                   size();
  }

  // All d coordinates of point i.
  std::vector<int> point(long long i) const;
};

using GeometryPtr = std::shared_ptr<const ParaboloidGeometry>;

GeometryPtr build_paraboloid(FieldPtr ctx, int d);

// Complex function on P under the normalized surface measure dsigma
// (mass 1/|P| per point).
struct SurfaceFunction {
  GeometryPtr geom;
  std::vector<cplx> values;
};

SurfaceFunction make_surface_function(GeometryPtr geom);
SurfaceFunction constant_surface(GeometryPtr geom, cplx value);

// (f dsigma)^v(m) = (1/|P|) sum_xi f(xi) chi(m.xi), tagged Counting.
// Direct |P|-term summation per output point.
GridFunction extension_operator(const SurfaceFunction& f);

// Same map computed by zero-padding q*f onto the Normalized grid and
// applying the inverse transform; cross-checks extension_operator.
GridFunction extension_via_grid(const SurfaceFunction& f);

// Forward transform of g followed by the gather onto P.
SurfaceFunction restriction_operator(const GridFunction& g,
                                     const GeometryPtr& geom);

// ((1/|P|) sum |f|^p)^{1/p}; p = infinity gives the max. p < 1 throws.
double surface_lp_norm(const SurfaceFunction& f, double p);

// (1/|P|) sum f conj(g).
cplx surface_inner(const SurfaceFunction& a, const SurfaceFunction& b);

// Closed form for (dsigma)^v(m): 1 at m = 0; 0 when m_d = 0, m != 0; else
// q^{-(d-1)} chi(|m'|^2 / (-4 m_d)) eta(m_d)^{d-1} G^{d-1} where m' drops the
// last coordinate, eta is the quadratic character and G the Gauss sum.
cplx dsigma_inverse_explicit(const GeometryPtr& geom, long long m_index);

// A subspace W of F_q^{d-1} on which the standard quadratic form vanishes
// identically; every span element w satisfies w.w = 0 (verified exhaustively
// at construction). elements lists the encodings of all of span(W), sorted.
struct IsotropicSubspace {
  FieldPtr ctx;
  int d = 2;
  std::vector<std::vector<int>> basis;
  std::vector<long long> elements;

  int dim() const { return static_cast<int>(basis.size()); }
};

// Dimension of a maximal totally isotropic subspace of (F_q^{d-1}, sum x_i^2):
// with e = d-1, it is (e-1)/2 for odd e; e/2 when e is even and
// eta(-1)^{e/2} = 1; and e/2 - 1 otherwise.
int maximal_isotropic_dim(const FieldContext& ctx, int d);

// Constructs a maximal W: hyperbolic pairs (e_j + i e_{j+1}) when -1 = i^2 is
// a square, four-coordinate blocks built from a^2 + b^2 = -1 otherwise, with
// an exhaustive search fallback for d - 1 <= 4.
IsotropicSubspace maximal_isotropic_subspace(FieldPtr ctx, int d);

// Omega = W x {0} as paraboloid point indices (the base-point encodings).
std::vector<long long> subspace_in_paraboloid(const IsotropicSubspace& w);

}  // namespace ffext
