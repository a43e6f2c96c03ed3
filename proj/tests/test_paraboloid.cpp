#include "ffext/paraboloid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "ffext/rng.hpp"

namespace ffext {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SurfaceFunction random_surface(const GeometryPtr& geom, Rng& rng) {
  auto f = make_surface_function(geom);
  for (auto& v : f.values) v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return f;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double mx = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    mx = std::max(mx, std::abs(a.values[i] - b.values[i]));
  return mx;
}

TEST(Paraboloid, GeometryFrozen) {
  auto f = FieldContext::make(3);
  auto geom = build_paraboloid(f, 2);
  ASSERT_EQ(geom->size(), 3);
  EXPECT_EQ(geom->point(0), (std::vector<int>{0, 0}));
  EXPECT_EQ(geom->point(1), (std::vector<int>{1, 1}));
  EXPECT_EQ(geom->point(2), (std::vector<int>{2, 1}));

  EXPECT_EQ(build_paraboloid(f, 3)->size(), 9);
  EXPECT_EQ(build_paraboloid(FieldContext::make(5), 4)->size(), 125);
}

TEST(Paraboloid, PointsSatisfyEquation) {
  for (int q : {3, 5, 9}) {
    auto f = (q == 9) ? FieldContext::make(3, 2) : FieldContext::make(q);
    for (int d : {2, 3, 4}) {
      auto geom = build_paraboloid(f, d);
      std::set<long long> seen;
      for (long long i = 0; i < geom->size(); ++i) {
        auto c = geom->point(i);
        int s = 0;
        for (int j = 0; j < d - 1; ++j) s = f->add(s, f->mul(c[j], c[j]));
        EXPECT_EQ(c[d - 1], s);
        seen.insert(geom->grid_index(i));
      }
      EXPECT_EQ(static_cast<long long>(seen.size()), geom->size());
    }
  }
  EXPECT_THROW(build_paraboloid(FieldContext::make(3), 1), std::invalid_argument);
}

TEST(Paraboloid, ExtensionFrozenValues) {
  auto f = FieldContext::make(3);
  auto geom = build_paraboloid(f, 2);
  auto one = constant_surface(geom, 1.0);
  auto ext = extension_operator(one);
  EXPECT_EQ(ext.measure, Measure::Counting);
  EXPECT_NEAR(std::abs(ext.values[0] - cplx(1.0)), 0.0, 1e-12);

  // m = (0, 1): a 3-term sum (1/3)(chi(0) + 2 chi(1)).
  const cplx w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const cplx want = (cplx(1.0) + 2.0 * w) / 3.0;
  EXPECT_NEAR(std::abs(ext.values[grid_encode(f, {0, 1})] - want), 0.0, 1e-12);
}

TEST(Paraboloid, ExtensionOfPointMassHasUnitModulus) {
  auto f = FieldContext::make(5);
  auto geom = build_paraboloid(f, 3);
  auto spike = make_surface_function(geom);
  const long long xi0 = 7;
  spike.values[xi0] = static_cast<double>(geom->size());
  auto ext = extension_operator(spike);
  auto p = geom->point(xi0);
  for (std::size_t mi = 0; mi < ext.values.size(); ++mi) {
    EXPECT_NEAR(std::abs(ext.values[mi]), 1.0, 1e-12);
    auto m = grid_decode(f, 3, static_cast<long long>(mi));
    int s = 0;
    for (int j = 0; j < 3; ++j) s = f->add(s, f->mul(m[j], p[j]));
    EXPECT_NEAR(std::abs(ext.values[mi] - f->additive_character(s)), 0.0, 1e-12);
  }
}

TEST(Paraboloid, ExtensionRoutesAgree) {
  Rng rng(31);
  for (auto [d, q] : std::vector<std::pair<int, int>>{{2, 3}, {3, 5}, {2, 7}, {4, 3}}) {
    auto geom = build_paraboloid(FieldContext::make(q), d);
    for (int it = 0; it < 5; ++it) {
      auto f = random_surface(geom, rng);
      EXPECT_LT(max_abs_diff(extension_operator(f), extension_via_grid(f)), 1e-9)
          << "d=" << d << " q=" << q;
    }
  }
}

TEST(Paraboloid, RestrictionFrozenValues) {
  auto f = FieldContext::make(3);
  auto geom = build_paraboloid(f, 2);
  auto delta = make_grid_function(f, 2, Measure::Counting);
  delta.values[0] = 1.0;
  auto r = restriction_operator(delta, geom);
  for (const auto& v : r.values) EXPECT_NEAR(std::abs(v - cplx(1.0)), 0.0, 1e-12);

  auto shifted = make_grid_function(f, 2, Measure::Counting);
  const long long m0 = grid_encode(f, {1, 2});
  shifted.values[m0] = 1.0;
  auto r2 = restriction_operator(shifted, geom);
  for (long long i = 0; i < geom->size(); ++i) {
    EXPECT_NEAR(std::abs(r2.values[i]), 1.0, 1e-12);
    auto p = geom->point(i);
    int s = 0;
    for (int j = 0; j < 2; ++j) s = f->add(s, f->mul(p[j], j == 0 ? 1 : 2));
    EXPECT_NEAR(std::abs(r2.values[i] - f->additive_character(f->neg(s))), 0.0,
                1e-12);
  }
}

TEST(Paraboloid, ExtensionRestrictionAdjoint) {
  Rng rng(32);
  auto geom = build_paraboloid(FieldContext::make(5), 2);
  for (int it = 0; it < 20; ++it) {
    auto f = random_surface(geom, rng);
    auto g = make_grid_function(geom->ctx, 2, Measure::Counting);
    for (auto& v : g.values) v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const cplx lhs = grid_inner(extension_operator(f), g);
    const cplx rhs = surface_inner(f, restriction_operator(g, geom));
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-9);
  }
}

TEST(Paraboloid, SurfaceNormFrozen) {
  auto geom = build_paraboloid(FieldContext::make(5), 3);
  auto one = constant_surface(geom, 1.0);
  for (double p : {1.0, 2.0, 3.5, kInf})
    EXPECT_NEAR(surface_lp_norm(one, p), 1.0, 1e-12);

  auto ind = make_surface_function(geom);
  for (int i = 0; i < 10; ++i) ind.values[i] = 1.0;
  for (double p : {1.0, 2.0, 4.0})
    EXPECT_NEAR(surface_lp_norm(ind, p), std::pow(10.0 / 25.0, 1.0 / p), 1e-12);

  auto spike = make_surface_function(geom);
  spike.values[3] = static_cast<double>(geom->size());
  EXPECT_NEAR(surface_lp_norm(spike, 2.0), std::sqrt(25.0), 1e-12);
  EXPECT_NEAR(surface_lp_norm(spike, kInf), 25.0, 1e-12);
  EXPECT_THROW(surface_lp_norm(one, 0.9), std::domain_error);
}

TEST(Paraboloid, ExplicitFormulaFrozen) {
  auto f = FieldContext::make(3);
  auto geom = build_paraboloid(f, 2);
  EXPECT_NEAR(std::abs(dsigma_inverse_explicit(geom, 0) - cplx(1.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(dsigma_inverse_explicit(geom, grid_encode(f, {1, 0}))),
              0.0, 1e-12);
  const cplx want = f->gauss_sum() / 3.0;
  EXPECT_NEAR(
      std::abs(dsigma_inverse_explicit(geom, grid_encode(f, {0, 1})) - want),
      0.0, 1e-12);
  EXPECT_NEAR(std::abs(dsigma_inverse_explicit(geom, grid_encode(f, {0, 1}))),
              1.0 / std::sqrt(3.0), 1e-12);
}

TEST(Paraboloid, ExplicitFormulaMatchesDirectSum) {
  for (auto [d, q] : std::vector<std::pair<int, int>>{
           {2, 3}, {2, 5}, {3, 3}, {3, 5}, {4, 3}, {5, 3}}) {
    auto geom = build_paraboloid(FieldContext::make(q), d);
    auto ext = extension_operator(constant_surface(geom, 1.0));
    double mx = 0.0;
    const double bound = std::pow(static_cast<double>(q), -(d - 1) / 2.0);
    for (std::size_t m = 0; m < ext.values.size(); ++m) {
      const cplx explicit_value =
          dsigma_inverse_explicit(geom, static_cast<long long>(m));
      mx = std::max(mx, std::abs(ext.values[m] - explicit_value));
      auto coords = grid_decode(geom->ctx, d, static_cast<long long>(m));
      if (coords[d - 1] != 0)
        EXPECT_NEAR(std::abs(explicit_value), bound, 1e-12);
      else if (m != 0)
        EXPECT_NEAR(std::abs(explicit_value), 0.0, 1e-12);
    }
    EXPECT_LT(mx, 1e-9) << "d=" << d << " q=" << q;
  }
}

TEST(Paraboloid, SurfacePlancherel) {
  for (auto [d, q] : std::vector<std::pair<int, int>>{{2, 3}, {2, 5}, {3, 3}, {3, 7}}) {
    auto geom = build_paraboloid(FieldContext::make(q), d);
    Rng rng(100 * d + q);
    for (int it = 0; it < 100; ++it) {
      auto f = random_surface(geom, rng);
      const double lhs = lp_norm(extension_operator(f), 2.0);
      const double rhs = std::sqrt(static_cast<double>(q)) * surface_lp_norm(f, 2.0);
      EXPECT_LE(std::abs(lhs - rhs), 1e-9 * std::max(1.0, rhs));
    }
  }
}

TEST(Paraboloid, SubspaceDimensionTable) {
  for (int q : {3, 5, 7, 11}) {
    auto f = FieldContext::make(q);
    for (int d = 2; d <= 8; ++d) {
      const int e = d - 1;
      int expect;
      if (e % 2 == 1) {
        expect = (e - 1) / 2;
      } else {
        int eta_pow = 1;
        for (int i = 0; i < e / 2; ++i)
          eta_pow *= f->quadratic_character(f->neg(1));
        expect = (eta_pow == 1) ? e / 2 : e / 2 - 1;
      }
      EXPECT_EQ(maximal_isotropic_dim(*f, d), expect) << "d=" << d << " q=" << q;

      auto w = maximal_isotropic_subspace(f, d);
      EXPECT_EQ(w.dim(), expect);
      long long size = 1;
      for (int i = 0; i < expect; ++i) size *= q;
      EXPECT_EQ(static_cast<long long>(w.elements.size()), size);
    }
  }
}

TEST(Paraboloid, SubspaceFrozenCases) {
  auto w33 = maximal_isotropic_subspace(FieldContext::make(3), 3);
  EXPECT_EQ(w33.dim(), 0);
  EXPECT_EQ(w33.elements, (std::vector<long long>{0}));

  auto w53 = maximal_isotropic_subspace(FieldContext::make(3), 5);
  EXPECT_EQ(static_cast<long long>(w53.elements.size()), 9);

  auto w2 = maximal_isotropic_subspace(FieldContext::make(7), 2);
  EXPECT_EQ(static_cast<long long>(w2.elements.size()), 1);
}

TEST(Paraboloid, SubspaceIsotropyAndMembership) {
  for (int q : {3, 5, 7, 11}) {
    auto f = FieldContext::make(q);
    for (int d = 2; d <= 8; ++d) {
      auto w = maximal_isotropic_subspace(f, d);
      auto omega = subspace_in_paraboloid(w);
      EXPECT_EQ(omega.size(), w.elements.size());
      for (long long idx : omega) {
        auto v = grid_decode(f, d - 1, idx);
        int s = 0;
        for (int j = 0; j < d - 1; ++j) s = f->add(s, f->mul(v[j], v[j]));
        EXPECT_EQ(s, 0);
      }
    }
  }
}

}  // namespace
}  // namespace ffext
