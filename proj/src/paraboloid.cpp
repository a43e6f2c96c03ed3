#include "ffext/paraboloid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ffext/errors.hpp"

namespace ffext {
namespace {

int dot(const FieldContext& f, const std::vector<int>& a,
        const std::vector<int>& b) {
  int acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc = f.add(acc, f.mul(a[i], b[i]));
  return acc;
}

std::vector<int> decode_vec(const FieldContext& f, int e, long long index) {
  std::vector<int> v(e);
  for (int i = 0; i < e; ++i) {
    v[i] = static_cast<int>(index % f.q());
    index /= f.q();
  }
  return v;
}

long long encode_vec(const FieldContext& f, const std::vector<int>& v) {
  long long index = 0;
  for (std::size_t i = v.size(); i-- > 0;) index = index * f.q() + v[i];
  return index;
}

void check_same_geometry(const SurfaceFunction& a, const SurfaceFunction& b) {
  if (!a.geom || !b.geom ||
      !(a.geom == b.geom || (a.geom->d == b.geom->d &&
                             a.geom->ctx->same_field(*b.geom->ctx))))
    throw std::invalid_argument("surface functions live on different varieties");
}

// Depth-first search for `target` pairwise-orthogonal isotropic vectors whose
// span avoids repeats; used only for d - 1 <= 4 where it is cheap.
bool extend_basis(const FieldContext& f, int e,
                  const std::vector<std::vector<int>>& isotropic,
                  std::size_t from, std::vector<std::vector<int>>& basis,
                  int target) {
  if (static_cast<int>(basis.size()) == target) return true;
  for (std::size_t c = from; c < isotropic.size(); ++c) {
    const auto& v = isotropic[c];
    bool ok = true;
    for (const auto& u : basis)
      if (dot(f, u, v) != 0) {
        ok = false;
        break;
      }
    if (!ok) continue;
    // Independence: v must not lie in span(basis). Enumerate the span, which
    // has at most q^3 elements at this size.
    const int k = static_cast<int>(basis.size());
    long long count = 1;
    for (int i = 0; i < k; ++i) count *= f.q();
    bool in_span = false;
    for (long long c2 = 0; c2 < count && !in_span; ++c2) {
      long long t = c2;
      std::vector<int> w(e, 0);
      for (int i = 0; i < k; ++i) {
        const int coef = static_cast<int>(t % f.q());
        t /= f.q();
        for (int j = 0; j < e; ++j)
          w[j] = f.add(w[j], f.mul(coef, basis[i][j]));
      }
      in_span = (w == v);
    }
    if (in_span) continue;
    basis.push_back(v);
    if (extend_basis(f, e, isotropic, c + 1, basis, target)) return true;
    basis.pop_back();
  }
  return false;
}

std::vector<std::vector<int>> search_basis_exhaustive(const FieldContext& f,
                                                      int e, int target) {
  long long total = 1;
  for (int i = 0; i < e; ++i) total *= f.q();
  std::vector<std::vector<int>> isotropic;
  for (long long idx = 1; idx < total; ++idx) {
    auto v = decode_vec(f, e, idx);
    if (dot(f, v, v) == 0) isotropic.push_back(std::move(v));
  }
  std::vector<std::vector<int>> basis;
  if (!extend_basis(f, e, isotropic, 0, basis, target))
    throw consistency_error("isotropic basis search failed");
  return basis;
}

std::vector<std::vector<int>> build_basis_constructive(const FieldContext& f,
                                                       int e) {
  std::vector<std::vector<int>> basis;
  if (f.is_minus_one_square()) {
    int i_root = -1;
    for (int s = 1; s < f.q(); ++s)
      if (f.mul(s, s) == f.neg(1)) {
        i_root = s;
        break;
      }
    if (i_root < 0) throw consistency_error("square root of -1 not found");
    for (int j = 0; 2 * j + 1 < e; ++j) {
      std::vector<int> v(e, 0);
      v[2 * j] = 1;
      v[2 * j + 1] = i_root;
      basis.push_back(std::move(v));
    }
    return basis;
  }

  // -1 is a nonsquare: use two isotropic vectors per block of four
  // coordinates, built from a solution of a^2 + b^2 = -1.
  int a = -1, b = -1;
  for (int s = 0; s < f.q() && a < 0; ++s)
    for (int t = 0; t < f.q(); ++t)
      if (f.add(f.mul(s, s), f.mul(t, t)) == f.neg(1)) {
        a = s;
        b = t;
        break;
      }
  if (a < 0) throw consistency_error("a^2 + b^2 = -1 has no solution");

  const int blocks = e / 4;
  for (int blk = 0; blk < blocks; ++blk) {
    const int base = 4 * blk;
    std::vector<int> u(e, 0), v(e, 0);
    u[base] = 1;
    u[base + 2] = a;
    u[base + 3] = b;
    v[base + 1] = 1;
    v[base + 2] = b;
    v[base + 3] = f.neg(a);
    basis.push_back(std::move(u));
    basis.push_back(std::move(v));
  }
  if (e % 4 == 3) {
    // One more isotropic vector supported on the last three coordinates.
    int x = -1, y = -1, z = -1;
    for (int s = 0; s < f.q() && x < 0; ++s)
      for (int t = 0; t < f.q() && x < 0; ++t)
        for (int u2 = 0; u2 < f.q(); ++u2) {
          if (s == 0 && t == 0 && u2 == 0) continue;
          if (f.add(f.add(f.mul(s, s), f.mul(t, t)), f.mul(u2, u2)) == 0) {
            x = s;
            y = t;
            z = u2;
            break;
          }
        }
    if (x < 0) throw consistency_error("x^2+y^2+z^2 = 0 has no solution");
    std::vector<int> w(e, 0);
    w[e - 3] = x;
    w[e - 2] = y;
    w[e - 1] = z;
    basis.push_back(std::move(w));
  }
  return basis;
}

}  // namespace

std::vector<int> ParaboloidGeometry::point(long long i) const {
  auto coords = decode_vec(*ctx, d - 1, i);
  coords.push_back(last_coord[static_cast<std::size_t>(i)]);
  return coords;
}

GeometryPtr build_paraboloid(FieldPtr ctx, int d) {
  if (d < 2) throw std::invalid_argument("paraboloid needs dimension >= 2");
  const long long size = grid_size_checked(ctx, d - 1);
  auto geom = std::make_shared<ParaboloidGeometry>();
  geom->ctx = std::move(ctx);
  geom->d = d;
  geom->last_coord.resize(static_cast<std::size_t>(size));
  const auto& f = *geom->ctx;
  std::vector<int> x(d - 1, 0);
  for (long long i = 0; i < size; ++i) {
    geom->last_coord[static_cast<std::size_t>(i)] = dot(f, x, x);
    for (int j = 0; j < d - 1; ++j) {
      if (++x[j] < f.q()) break;
      x[j] = 0;
    }
  }
  return geom;
}

SurfaceFunction make_surface_function(GeometryPtr geom) {
  if (!geom) throw std::invalid_argument("null geometry");
  const auto n = static_cast<std::size_t>(geom->size());
  return SurfaceFunction{std::move(geom), std::vector<cplx>(n, 0.0)};
}

SurfaceFunction constant_surface(GeometryPtr geom, cplx value) {
  auto f = make_surface_function(std::move(geom));
  for (auto& v : f.values) v = value;
  return f;
}

GridFunction extension_operator(const SurfaceFunction& f) {
  const auto& geom = *f.geom;
  const auto& fld = *geom.ctx;
  const int q = fld.q();
  const int d = geom.d;
  auto out = make_grid_function(geom.ctx, d, Measure::Counting);
  const long long n = static_cast<long long>(out.values.size());
  const long long np = geom.size();

  std::vector<int> pts(static_cast<std::size_t>(np) * d);
  for (long long i = 0; i < np; ++i) {
    auto c = geom.point(i);
    std::copy(c.begin(), c.end(), pts.begin() + static_cast<std::size_t>(i) * d);
  }

  const double scale = 1.0 / static_cast<double>(np);
  std::vector<int> m(d, 0);
  for (long long mi = 0; mi < n; ++mi) {
    cplx acc = 0.0;
    for (long long i = 0; i < np; ++i) {
      const int* xi = &pts[static_cast<std::size_t>(i) * d];
      int s = 0;
      for (int j = 0; j < d; ++j) s = fld.add(s, fld.mul(m[j], xi[j]));
      acc += f.values[static_cast<std::size_t>(i)] * fld.additive_character(s);
    }
    out.values[static_cast<std::size_t>(mi)] = acc * scale;
    for (int j = 0; j < d; ++j) {
      if (++m[j] < q) break;
      m[j] = 0;
    }
  }
  return out;
}

GridFunction extension_via_grid(const SurfaceFunction& f) {
  const auto& geom = *f.geom;
  auto padded = make_grid_function(geom.ctx, geom.d, Measure::Normalized);
  const double q = static_cast<double>(geom.ctx->q());
  for (long long i = 0; i < geom.size(); ++i)
    padded.values[static_cast<std::size_t>(geom.grid_index(i))] =
        f.values[static_cast<std::size_t>(i)] * q;
  return fourier_inverse(padded);
}

SurfaceFunction restriction_operator(const GridFunction& g,
                                     const GeometryPtr& geom) {
  if (g.measure != Measure::Counting)
    throw std::invalid_argument("restriction expects a Counting input");
  if (!geom || !g.ctx->same_field(*geom->ctx) || g.d != geom->d)
    throw std::invalid_argument("grid and variety do not match");
  auto gh = fourier_forward(g);
  auto out = make_surface_function(geom);
  for (long long i = 0; i < geom->size(); ++i)
    out.values[static_cast<std::size_t>(i)] =
        gh.values[static_cast<std::size_t>(geom->grid_index(i))];
  return out;
}

double surface_lp_norm(const SurfaceFunction& f, double p) {
  if (std::isnan(p) || p < 1.0) throw std::domain_error("exponent must be >= 1");
  if (std::isinf(p)) {
    double mx = 0.0;
    for (const auto& v : f.values) mx = std::max(mx, std::abs(v));
    return mx;
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& v : f.values) sum += std::norm(v);
  } else {
    for (const auto& v : f.values) sum += std::pow(std::abs(v), p);
  }
  sum /= static_cast<double>(f.values.size());
  return (p == 2.0) ? std::sqrt(sum) : std::pow(sum, 1.0 / p);
}

cplx surface_inner(const SurfaceFunction& a, const SurfaceFunction& b) {
  check_same_geometry(a, b);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    acc += a.values[i] * std::conj(b.values[i]);
  return acc / static_cast<double>(a.values.size());
}

cplx dsigma_inverse_explicit(const GeometryPtr& geom, long long m_index) {
  const auto& f = *geom->ctx;
  const int d = geom->d;
  if (m_index == 0) return 1.0;
  auto m = grid_decode(geom->ctx, d, m_index);
  const int md = m[d - 1];
  if (md == 0) return 0.0;

  int norm = 0;
  for (int j = 0; j < d - 1; ++j) norm = f.add(norm, f.mul(m[j], m[j]));
  const int denom = f.neg(f.mul(f.from_int(4), md));
  const cplx phase = f.additive_character(f.mul(norm, f.inv(denom)));

  const int eta = f.quadratic_character(md);
  const double sign = ((d - 1) % 2 == 1 && eta == -1) ? -1.0 : 1.0;

  cplx gpow = 1.0;
  for (int i = 0; i < d - 1; ++i) gpow *= f.gauss_sum();

  const double scale = std::pow(static_cast<double>(f.q()), -(d - 1));
  return scale * sign * phase * gpow;
}

int maximal_isotropic_dim(const FieldContext& ctx, int d) {
  if (d < 2) throw std::invalid_argument("paraboloid needs dimension >= 2");
  const int e = d - 1;
  if (e % 2 == 1) return (e - 1) / 2;
  const bool eta_power_one = ctx.is_minus_one_square() || (e / 2) % 2 == 0;
  return eta_power_one ? e / 2 : e / 2 - 1;
}

IsotropicSubspace maximal_isotropic_subspace(FieldPtr ctx, int d) {
  const int e = d - 1;
  const int target = maximal_isotropic_dim(*ctx, d);
  const auto& f = *ctx;

  std::vector<std::vector<int>> basis;
  if (target > 0) {
    basis = (e <= 4) ? search_basis_exhaustive(f, e, target)
                     : build_basis_constructive(f, e);
    if (static_cast<int>(basis.size()) != target)
      throw consistency_error("isotropic basis has the wrong dimension");
  }

  // Enumerate the span, then verify independence (all q^k span elements
  // distinct) and total isotropy.
  const int k = static_cast<int>(basis.size());
  long long count = 1;
  for (int i = 0; i < k; ++i) count *= f.q();
  std::vector<long long> elements;
  elements.reserve(static_cast<std::size_t>(count));
  for (long long c = 0; c < count; ++c) {
    long long t = c;
    std::vector<int> w(e, 0);
    for (int i = 0; i < k; ++i) {
      const int coef = static_cast<int>(t % f.q());
      t /= f.q();
      for (int j = 0; j < e; ++j) w[j] = f.add(w[j], f.mul(coef, basis[i][j]));
    }
    if (dot(f, w, w) != 0)
      throw consistency_error("span element is not isotropic");
    elements.push_back(encode_vec(f, w));
  }
  std::sort(elements.begin(), elements.end());
  if (std::adjacent_find(elements.begin(), elements.end()) != elements.end())
    throw consistency_error("isotropic basis is linearly dependent");

  return IsotropicSubspace{std::move(ctx), d, std::move(basis),
                           std::move(elements)};
}

std::vector<long long> subspace_in_paraboloid(const IsotropicSubspace& w) {
  return w.elements;
}

}  // namespace ffext
