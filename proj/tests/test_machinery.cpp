#include "ffext/machinery.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "ffext/errors.hpp"

namespace ffext {
namespace {

GridFunction delta_at(const FieldPtr& ctx, int d, long long idx,
                      cplx v = 1.0) {
  auto g = make_grid_function(ctx, d, Measure::Counting);
  g.values[static_cast<std::size_t>(idx)] = v;
  return g;
}

GridFunction random_counting(const FieldPtr& ctx, int d, Rng& rng) {
  auto g = make_grid_function(ctx, d, Measure::Counting);
  for (auto& v : g.values)
    v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return g;
}

TEST(LevelStructureOp, BasicCases) {
  auto ctx = FieldContext::make(3);
  auto ls0 = level_structure(delta_at(ctx, 2, 0));
  EXPECT_EQ(ls0.active_levels, (std::vector<int>{0}));
  EXPECT_EQ(ls0.slices.at(0).size(), 1u);

  // Indicator of the parabola in the 2-dimensional grid over F_3:
  // points (0,0), (1,1), (2,1) have last coordinates 0, 1, 1.
  auto geom = build_paraboloid(ctx, 2);
  auto gp = make_grid_function(ctx, 2, Measure::Counting);
  for (long long i = 0; i < geom->size(); ++i)
    gp.values[static_cast<std::size_t>(geom->grid_index(i))] = 1.0;
  auto lsp = level_structure(gp);
  EXPECT_EQ(lsp.active_levels, (std::vector<int>{0, 1}));
  EXPECT_EQ(lsp.slices.at(0).size(), 1u);
  EXPECT_EQ(lsp.slices.at(1).size(), 2u);
  EXPECT_EQ(lsp.support.size(), 3u);

  auto zero = make_grid_function(ctx, 2, Measure::Counting);
  auto lsz = level_structure(zero);
  EXPECT_TRUE(lsz.support.empty());
  EXPECT_TRUE(lsz.active_levels.empty());
}

TEST(IsRegularOp, CertificateCases) {
  auto ctx = FieldContext::make(3);

  auto single = make_grid_function(ctx, 2, Measure::Counting);
  single.values[0] = single.values[1] = 1.0;
  EXPECT_TRUE(is_regular(single).regular);

  auto geom = build_paraboloid(ctx, 2);
  auto gp = make_grid_function(ctx, 2, Measure::Counting);
  for (long long i = 0; i < geom->size(); ++i)
    gp.values[static_cast<std::size_t>(geom->grid_index(i))] = 1.0;
  EXPECT_TRUE(is_regular(gp).regular);

  // Slice sizes 1 and 3 violate the factor-2 condition.
  auto bad = make_grid_function(ctx, 2, Measure::Counting);
  bad.values[0] = 1.0;
  bad.values[3] = bad.values[4] = bad.values[5] = 1.0;
  auto cert = is_regular(bad);
  EXPECT_FALSE(cert.regular);
  EXPECT_EQ(cert.level_a, 0);
  EXPECT_EQ(cert.level_b, 1);
  EXPECT_FALSE(cert.reason.empty());

  auto small = delta_at(ctx, 2, 4, 0.3);
  auto cert2 = is_regular(small);
  EXPECT_FALSE(cert2.regular);
  EXPECT_EQ(cert2.point, 4);

  EXPECT_FALSE(is_regular(delta_at(ctx, 2, 0, 1.2)).regular);
  EXPECT_TRUE(is_regular(make_grid_function(ctx, 2, Measure::Counting)).regular);
}

TEST(Decomposition, BucketBoundaries) {
  auto ctx = FieldContext::make(3);
  auto g = make_grid_function(ctx, 2, Measure::Counting);
  g.values[0] = 1.0;
  g.values[1] = 0.5;  // 1/2 lies in (1/4, 1/2], one bucket down
  auto dec = regular_decomposition(g, 20);
  ASSERT_EQ(dec.pieces.size(), 2u);
  EXPECT_DOUBLE_EQ(dec.pieces[0].coefficient, 1.0);
  EXPECT_DOUBLE_EQ(dec.pieces[1].coefficient, 0.5);
  EXPECT_EQ(dec.pieces[0].levels.support, (std::vector<long long>{0}));
  EXPECT_EQ(dec.pieces[1].levels.support, (std::vector<long long>{1}));
  for (const auto& v : dec.residual.values) EXPECT_EQ(v, cplx(0.0));
}

TEST(Decomposition, RegularSingleBucketIsOnePiece) {
  auto ctx = FieldContext::make(5);
  Rng rng(5150);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_regular_function(ctx, 2, rng);
    ASSERT_TRUE(is_regular(g).regular);
    // Push all moduli into the top bucket (max/2, max].
    double mx = 0.0;
    for (auto& v : g.values) mx = std::max(mx, std::abs(v));
    for (auto& v : g.values)
      if (v != cplx(0.0)) v *= (0.6 + 0.4 * std::abs(v) / mx) / std::abs(v);
    auto dec = regular_decomposition(g, 40);
    ASSERT_EQ(dec.pieces.size(), 1u);
    EXPECT_TRUE(is_regular(dec.pieces[0].func).regular);
    double expected = 0.0;
    for (auto& v : g.values) expected = std::max(expected, std::abs(v));
    EXPECT_DOUBLE_EQ(dec.pieces[0].coefficient, expected);
    for (const auto& v : dec.residual.values) EXPECT_EQ(v, cplx(0.0));
  }
}

TEST(Decomposition, PseudorandomSoundness) {
  for (auto [d, q] : {std::pair{2, 5}, std::pair{3, 3}, std::pair{2, 7}}) {
    auto ctx = FieldContext::make(q);
    Rng rng(77 + d + q);
    for (int trial = 0; trial < 34; ++trial) {
      auto g = random_counting(ctx, d, rng);
      const int depth = trial % 2 == 0 ? 40 : 20;
      auto dec = regular_decomposition(g, depth);

      const double limit =
          depth * (d * std::log2(double(q)) + 1.0) + 1e-9;
      EXPECT_LE(double(dec.pieces.size()), limit);

      auto recon = dec.residual;
      for (const auto& piece : dec.pieces) {
        EXPECT_TRUE(is_regular(piece.func).regular);
        EXPECT_GT(piece.coefficient, 0.0);
        for (std::size_t i = 0; i < recon.values.size(); ++i)
          recon.values[i] += piece.coefficient * piece.func.values[i];
      }
      double err = 0.0, res_max = 0.0;
      for (std::size_t i = 0; i < recon.values.size(); ++i) {
        err = std::max(err, std::abs(recon.values[i] - g.values[i]));
        res_max = std::max(res_max, std::abs(dec.residual.values[i]));
      }
      EXPECT_LE(err, 1e-12 * dec.max_abs);
      EXPECT_LE(res_max, std::ldexp(dec.max_abs, -depth));
    }
  }
  auto ctx = FieldContext::make(3);
  EXPECT_THROW(
      regular_decomposition(make_grid_function(ctx, 2, Measure::Counting), 40),
      std::domain_error);
  auto g = delta_at(ctx, 2, 0);
  EXPECT_THROW(regular_decomposition(g, 0), std::domain_error);
}

TEST(SliceLiftOp, FrozenAndRandomCases) {
  auto ctx = FieldContext::make(3);

  // delta at (0, a): the lift sits at the base point 0 of P.
  auto g = delta_at(ctx, 2, 2 * 3 + 0);  // (0, 2) -> index 6
  auto lift = slice_to_surface(g, 2);
  EXPECT_EQ(lift.level, 2);
  EXPECT_EQ(lift.lifted.values[0], cplx(1.0));
  EXPECT_EQ(lift.lifted.values[1], cplx(0.0));
  EXPECT_EQ(lift.lifted.values[2], cplx(0.0));
  EXPECT_EQ(lift.slice.values[6], cplx(1.0));

  // d=2, q=3, indicator of {(0,1),(1,1)}: lift supported on base points 0, 1.
  auto g2 = make_grid_function(ctx, 2, Measure::Counting);
  g2.values[0 + 1 * 3] = 1.0;
  g2.values[1 + 1 * 3] = 1.0;
  auto lift2 = slice_to_surface(g2, 1);
  EXPECT_EQ(lift2.lifted.values[0], cplx(1.0));
  EXPECT_EQ(lift2.lifted.values[1], cplx(1.0));
  EXPECT_EQ(lift2.lifted.values[2], cplx(0.0));

  EXPECT_THROW(slice_to_surface(g2, 0), std::domain_error);

  // Support size identity |supp(h_a)| = |G_a| on random regular functions.
  auto ctx5 = FieldContext::make(5);
  auto geom5 = build_paraboloid(ctx5, 3);
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    auto h = random_regular_function(ctx5, 3, rng);
    auto ls = level_structure(h);
    for (int a : ls.active_levels) {
      auto sl = slice_to_surface(h, a, geom5);
      std::size_t supp = 0;
      for (const auto& v : sl.lifted.values)
        if (v != cplx(0.0)) ++supp;
      EXPECT_EQ(supp, ls.slices.at(a).size());
    }
  }
}

TEST(Kernel, MatchesExplicitFormula) {
  for (auto [d, q] : {std::pair{2, 3}, std::pair{3, 5}}) {
    auto geom = build_paraboloid(FieldContext::make(q), d);
    auto k = bochner_riesz_kernel(geom);
    EXPECT_EQ(k.measure, Measure::Counting);
    EXPECT_LT(std::abs(k.values[0]), 1e-12);
    long long bs = 1;
    for (int i = 0; i < d - 1; ++i) bs *= q;
    const double mod = std::pow(double(q), -0.5 * (d - 1));
    for (long long m = 1; m < static_cast<long long>(k.values.size()); ++m) {
      const auto expected = dsigma_inverse_explicit(geom, m);
      EXPECT_LT(std::abs(k.values[static_cast<std::size_t>(m)] - expected),
                1e-9);
      if (m / bs == 0) {
        EXPECT_LT(std::abs(k.values[static_cast<std::size_t>(m)]), 1e-12);
      } else {
        EXPECT_NEAR(std::abs(k.values[static_cast<std::size_t>(m)]), mod,
                    1e-9);
      }
    }
  }
}

TEST(Duality, FrozenAndRandom) {
  auto ctx = FieldContext::make(3);
  auto rep = verify_duality_identity(delta_at(ctx, 2, 0));
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.lhs, 1.0, 1e-12);
  EXPECT_NEAR(rep.rhs, 1.0, 1e-12);
  EXPECT_EQ(rep.check, "duality_identity");

  // Full slice {m_d = 0}: the restricted transform concentrates at xi = 0
  // with value q^{d-1}, so the squared norm is q^{2(d-1)} / |P| = q^{d-1}.
  auto slice = make_grid_function(ctx, 2, Measure::Counting);
  for (int i = 0; i < 3; ++i) slice.values[static_cast<std::size_t>(i)] = 1.0;
  auto rep2 = verify_duality_identity(slice);
  EXPECT_TRUE(rep2.pass);
  EXPECT_NEAR(rep2.lhs, 3.0, 1e-9);

  for (int d : {2, 3}) {
    for (int q : {3, 5, 7}) {
      auto c = FieldContext::make(q);
      Rng rng(1234u + static_cast<unsigned>(d * 100 + q));
      for (int trial = 0; trial < 100; ++trial) {
        auto rr = verify_duality_identity(random_counting(c, d, rng));
        ASSERT_TRUE(rr.pass) << "d=" << d << " q=" << q << " trial=" << trial;
      }
    }
  }
}

TEST(SliceInequality, FrozenAndRandom) {
  auto ctx = FieldContext::make(3);

  // Single-point slice.
  auto reps = verify_slice_inequality(delta_at(ctx, 2, 4), Exponent::of(4));
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_TRUE(reps[0].pass);
  EXPECT_TRUE(reps[1].pass);

  // Full slice indicator at r = 4.
  auto slice = make_grid_function(ctx, 2, Measure::Counting);
  for (int i = 0; i < 3; ++i) slice.values[static_cast<std::size_t>(i)] = 1.0;
  for (const auto& rep : verify_slice_inequality(slice, Exponent::of(4)))
    EXPECT_TRUE(rep.pass) << rep.check << " " << rep.params;

  auto bad = make_grid_function(ctx, 2, Measure::Counting);
  bad.values[0] = 1.0;
  bad.values[3] = bad.values[4] = bad.values[5] = 1.0;
  EXPECT_THROW(verify_slice_inequality(bad, Exponent::of(2)),
               std::invalid_argument);

  for (int d : {2, 3}) {
    for (int q : {3, 5, 7}) {
      auto c = FieldContext::make(q);
      Rng rng(4321u + static_cast<unsigned>(d * 100 + q));
      for (int trial = 0; trial < 100; ++trial) {
        auto g = random_regular_function(c, d, rng);
        const Exponent r = trial % 2 == 0 ? Exponent::of(2) : Exponent::of(4);
        for (const auto& rep : verify_slice_inequality(g, r))
          ASSERT_TRUE(rep.pass) << rep.check << " " << rep.params << " lhs="
                                << rep.lhs << " rhs=" << rep.rhs;
      }
    }
  }
}

TEST(RestrictionBounds, ExactChain) {
  auto ctx = FieldContext::make(3);

  auto reps = l2_restriction_bounds(delta_at(ctx, 2, 0));
  ASSERT_EQ(reps.size(), 4u);
  EXPECT_EQ(reps[0].check, "l2_sqrt_bound");
  EXPECT_NEAR(reps[0].lhs, 1.0, 1e-12);
  EXPECT_TRUE(reps[0].pass);
  EXPECT_EQ(reps[1].check, "l2_mass_bound");
  EXPECT_NEAR(reps[1].rhs, 1.0 + std::pow(3.0, -0.5), 1e-12);
  EXPECT_TRUE(reps[1].pass);
  EXPECT_TRUE(reps[2].pass);
  EXPECT_EQ(reps[3].check, "l2_regime_ratio");
  EXPECT_TRUE(reps[3].pass);

  auto slice = make_grid_function(ctx, 2, Measure::Counting);
  for (int i = 0; i < 3; ++i) slice.values[static_cast<std::size_t>(i)] = 1.0;
  for (const auto& rep : l2_restriction_bounds(slice))
    EXPECT_TRUE(rep.pass);

  auto bad = delta_at(ctx, 2, 0, 0.2);
  EXPECT_THROW(l2_restriction_bounds(bad), std::invalid_argument);

  for (int d : {2, 3}) {
    for (int q : {3, 5, 7}) {
      auto c = FieldContext::make(q);
      Rng rng(888u + static_cast<unsigned>(d * 10 + q));
      for (int trial = 0; trial < 50; ++trial) {
        auto g = random_regular_function(c, d, rng);
        auto rr = l2_restriction_bounds(g);
        ASSERT_TRUE(rr[0].pass);
        ASSERT_TRUE(rr[1].pass);
        ASSERT_TRUE(rr[2].pass);
      }
    }
  }
}

TEST(RandomRegular, GeneratorContract) {
  auto ctx = FieldContext::make(5);
  Rng rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_regular_function(ctx, 2, rng);
    auto cert = is_regular(g);
    ASSERT_TRUE(cert.regular) << cert.reason;
    ASSERT_FALSE(level_structure(g).support.empty());
  }
}

TEST(Reports, RatioConvention) {
  auto rep = make_check_report("x", "p", 0.0, 0.0, true);
  EXPECT_EQ(rep.ratio, 1.0);
  auto rep2 = make_check_report("x", "p", 2.0, 4.0, true);
  EXPECT_EQ(rep2.ratio, 0.5);
}

}  // namespace
}  // namespace ffext
