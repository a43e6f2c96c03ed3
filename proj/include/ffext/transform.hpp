#pragma once

#include <vector>

#include "ffext/field.hpp"

namespace ffext {

// Which measure the ambient space F_q^d carries. Counting is the physical
// side (mass 1 per point), Normalized the frequency side (total mass 1).
// Norms, convolutions, and inner products all depend on the tag, and mixed-tag
// operations are rejected.
enum class Measure { Counting, Normalized };

// Dense complex function on F_q^d. Index encoding is little-endian base q:
// index = x_1 + x_2 q + ... + x_d q^{d-1}, each digit a field element index.
struct GridFunction {
  FieldPtr ctx;
  int d = 1;
  Measure measure = Measure::Counting;
  std::vector<cplx> values;
};

// Global guard against exponential blowups: grids with more than this many
// points are refused. Default 2^26.
long long grid_cap();
void set_grid_cap(long long cap);

// q^d with overflow and cap checks; throws resource_error past the cap.
long long grid_size_checked(const FieldPtr& ctx, int d);

GridFunction make_grid_function(FieldPtr ctx, int d, Measure measure);

long long grid_encode(const FieldPtr& ctx, const std::vector<int>& coords);
std::vector<int> grid_decode(const FieldPtr& ctx, int d, long long index);

// Counting -> Normalized: out(xi) = sum_m g(m) chi(-m.xi).
GridFunction fourier_forward(const GridFunction& g);

// Normalized -> Counting: out(m) = q^{-d} sum_xi f(xi) chi(xi.m).
// Inverts fourier_forward exactly (up to roundoff).
GridFunction fourier_inverse(const GridFunction& f);

// Tag-dependent convolution: Counting is sum_m a(n-m) b(m); Normalized
// carries an extra q^{-d}. Direct summation, independent of the transform.
GridFunction convolve(const GridFunction& a, const GridFunction& b);

GridFunction pointwise_multiply(const GridFunction& a, const GridFunction& b);

// Counting: (sum |h|^p)^{1/p}; Normalized: (q^{-d} sum |h|^p)^{1/p};
// p may be infinity (max). p < 1 throws std::domain_error.
double lp_norm(const GridFunction& h, double p);

// Tag-weighted hermitian inner product <a, b>: plain sum for Counting,
// q^{-d}-weighted for Normalized. Conjugates b.
cplx grid_inner(const GridFunction& a, const GridFunction& b);

}  // namespace ffext
