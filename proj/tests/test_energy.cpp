#include "ffext/energy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "ffext/errors.hpp"
#include "ffext/rng.hpp"

namespace ffext {
namespace {

// Four-loop reference counter, kept independent of the library's two methods.
long long brute_energy(const PointSubset& e) {
  const auto& geom = *e.geom;
  const auto& f = *geom.ctx;
  const int d = geom.d;
  std::vector<std::vector<int>> pts;
  for (long long i : e.members) pts.push_back(geom.point(i));
  long long count = 0;
  for (const auto& x : pts)
    for (const auto& y : pts)
      for (const auto& z : pts)
        for (const auto& w : pts) {
          bool ok = true;
          for (int j = 0; j < d && ok; ++j)
            ok = f.add(x[j], y[j]) == f.add(z[j], w[j]);
          count += ok;
        }
  return count;
}

PointSubset full_paraboloid(const GeometryPtr& geom) {
  std::vector<long long> all(geom->size());
  for (long long i = 0; i < geom->size(); ++i) all[i] = i;
  return make_point_subset(geom, std::move(all));
}

TEST(Energy, FrozenSmallSets) {
  auto geom = build_paraboloid(FieldContext::make(5), 2);
  auto single = make_point_subset(geom, {2});
  EXPECT_EQ(additive_energy(single, EnergyMethod::Quadruple), 1);
  EXPECT_EQ(additive_energy(single, EnergyMethod::Convolution), 1);

  auto pair = make_point_subset(geom, {1, 4});
  EXPECT_EQ(additive_energy(pair, EnergyMethod::Quadruple), 6);
  EXPECT_EQ(additive_energy(pair, EnergyMethod::Convolution), 6);
  EXPECT_EQ(brute_energy(pair), 6);
}

TEST(Energy, FullParabolaClosedForm) {
  for (int q : {3, 5, 7}) {
    auto geom = build_paraboloid(FieldContext::make(q), 2);
    auto e = full_paraboloid(geom);
    const long long want = 2LL * q * q - q;
    EXPECT_EQ(additive_energy(e, EnergyMethod::Quadruple), want);
    EXPECT_EQ(additive_energy(e, EnergyMethod::Convolution), want);
    if (q == 3) EXPECT_EQ(brute_energy(e), 15);
  }
}

TEST(Energy, SubgroupIsCubic) {
  auto f = FieldContext::make(3);
  auto geom = build_paraboloid(f, 5);
  auto w = maximal_isotropic_subspace(f, 5);
  auto e = make_point_subset(geom, subspace_in_paraboloid(w));
  ASSERT_EQ(e.size(), 9);
  EXPECT_EQ(additive_energy(e, EnergyMethod::Quadruple), 729);
  EXPECT_EQ(additive_energy(e, EnergyMethod::Convolution), 729);
}

TEST(Energy, MethodsAgreeOnRandomSubsets) {
  for (int q : {3, 5}) {
    auto f = FieldContext::make(q);
    for (int d : {2, 3, 4}) {
      auto geom = build_paraboloid(f, d);
      Rng rng(1000 * d + q);
      for (int it = 0; it < 100; ++it) {
        const auto np = static_cast<uint32_t>(geom->size());
        const uint32_t size = 1 + static_cast<uint32_t>(rng.below(
                                      std::min<uint64_t>(np, 30)));
        auto picks = sample_without_replacement(np, size, rng);
        auto e = make_point_subset(
            geom, std::vector<long long>(picks.begin(), picks.end()));
        const long long quad = additive_energy(e, EnergyMethod::Quadruple);
        const long long conv = additive_energy(e, EnergyMethod::Convolution);
        EXPECT_EQ(quad, conv) << "d=" << d << " q=" << q << " it=" << it;
        EXPECT_GE(quad, e.size() * e.size());
        EXPECT_LE(quad, e.size() * e.size() * e.size());
      }
    }
  }
}

TEST(Energy, MonotoneUnderInclusion) {
  auto geom = build_paraboloid(FieldContext::make(5), 2);
  const int np = static_cast<int>(geom->size());
  std::vector<long long> energy_of(1 << np, 0);
  for (int mask = 1; mask < (1 << np); ++mask) {
    std::vector<long long> members;
    for (int i = 0; i < np; ++i)
      if (mask & (1 << i)) members.push_back(i);
    energy_of[mask] =
        additive_energy(make_point_subset(geom, members), EnergyMethod::Quadruple);
  }
  for (int mask = 1; mask < (1 << np); ++mask)
    for (int i = 0; i < np; ++i) {
      const int larger = mask | (1 << i);
      if (larger != mask) EXPECT_LE(energy_of[mask], energy_of[larger]);
    }
}

TEST(Energy, BoundReportEvenD) {
  auto geom = build_paraboloid(FieldContext::make(3), 4);
  auto rep = energy_bound_report(full_paraboloid(geom));
  EXPECT_EQ(rep.regime, EnergyRegime::EvenD);
  EXPECT_EQ(rep.size, 27);
  EXPECT_TRUE(rep.in_window);
  EXPECT_TRUE(rep.corollary_applicable);
  const double want = std::sqrt(3.0) * std::pow(27.0, 2.5);
  EXPECT_NEAR(rep.corollary_bound, want, 1e-9 * want);
  EXPECT_GT(rep.ratio_corollary, 0.0);
  EXPECT_NEAR(rep.cube_bound, 27.0 * 27.0 * 27.0, 1e-9);
}

TEST(Energy, BoundReportInapplicableCases) {
  auto geom2 = build_paraboloid(FieldContext::make(5), 2);
  auto rep2 = energy_bound_report(make_point_subset(geom2, {0, 1, 2}));
  EXPECT_EQ(rep2.regime, EnergyRegime::None);
  EXPECT_FALSE(rep2.corollary_applicable);
  EXPECT_EQ(rep2.mixed_bound, 0.0);

  auto geom4 = build_paraboloid(FieldContext::make(3), 4);
  auto rep1 = energy_bound_report(make_point_subset(geom4, {5}));
  EXPECT_EQ(rep1.energy, 1);
  EXPECT_FALSE(rep1.in_window);  // 1 < q^{(d-2)/2} = 3
  EXPECT_GT(rep1.ratio_mixed, 0.0);
}

TEST(Energy, RegimeClassification) {
  auto f3 = FieldContext::make(3);
  auto f5 = FieldContext::make(5);
  EXPECT_EQ(energy_regime(*f3, 4), EnergyRegime::EvenD);
  EXPECT_EQ(energy_regime(*f3, 6), EnergyRegime::EvenD);
  EXPECT_EQ(energy_regime(*f3, 2), EnergyRegime::None);
  EXPECT_EQ(energy_regime(*f3, 3), EnergyRegime::None);  // needs d = 4l+3, l >= 1
  EXPECT_EQ(energy_regime(*f3, 7), EnergyRegime::D3Mod4NonSquare);
  EXPECT_EQ(energy_regime(*f3, 11), EnergyRegime::D3Mod4NonSquare);
  EXPECT_EQ(energy_regime(*f5, 7), EnergyRegime::None);  // -1 is a square mod 5
  EXPECT_EQ(energy_regime(*f3, 5), EnergyRegime::None);
}

TEST(Energy, BoundReportD3Regime) {
  auto geom = build_paraboloid(FieldContext::make(3), 7);
  Rng rng(9);
  auto picks = sample_without_replacement(static_cast<uint32_t>(geom->size()), 20, rng);
  auto rep = energy_bound_report(
      make_point_subset(geom, std::vector<long long>(picks.begin(), picks.end())));
  EXPECT_EQ(rep.regime, EnergyRegime::D3Mod4NonSquare);
  EXPECT_TRUE(rep.in_window);  // 15.6 <= 20 <= 81
  const double want = std::pow(3.0, 1.0) * std::pow(20.0, 2.5) +
                      std::pow(3.0, 2.5) * 400.0;
  EXPECT_NEAR(rep.corollary_bound, want, 1e-9 * want);
}

TEST(Energy, ExtremizerFullSetAndPair) {
  auto geom = build_paraboloid(FieldContext::make(3), 3);
  auto full = energy_extremizer_search(geom, geom->size(), 5, 42);
  EXPECT_EQ(full.set.size(), geom->size());
  for (long long i = 0; i < geom->size(); ++i) EXPECT_EQ(full.set.members[i], i);

  auto pair = energy_extremizer_search(geom, 2, 5, 42);
  EXPECT_EQ(pair.report.energy, 6);
}

TEST(Energy, ExtremizerBeatsRandomDraws) {
  auto geom = build_paraboloid(FieldContext::make(3), 3);
  auto found = energy_extremizer_search(geom, 9, 30, 7);
  const long long best = found.report.energy;
  EXPECT_EQ(additive_energy(found.set, EnergyMethod::Quadruple), best);
  EXPECT_EQ(additive_energy(found.set, EnergyMethod::Convolution), best);

  Rng rng(1234);
  for (int it = 0; it < 50; ++it) {
    auto picks = sample_without_replacement(9, 9, rng);
    std::vector<long long> members;
    for (auto p : picks) members.push_back(p);
    auto e = make_point_subset(geom, members);
    EXPECT_GE(best, additive_energy(e, EnergyMethod::Quadruple));
  }
}

TEST(Energy, ExtremizerDeterministic) {
  auto geom = build_paraboloid(FieldContext::make(5), 3);
  auto a = energy_extremizer_search(geom, 10, 10, 99);
  auto b = energy_extremizer_search(geom, 10, 10, 99);
  EXPECT_EQ(a.set.members, b.set.members);
  EXPECT_EQ(a.report.energy, b.report.energy);
}

TEST(Energy, Errors) {
  auto geom = build_paraboloid(FieldContext::make(5), 2);
  EXPECT_THROW(make_point_subset(geom, {0, 0}), std::invalid_argument);
  EXPECT_THROW(make_point_subset(geom, {-1}), std::invalid_argument);
  EXPECT_THROW(make_point_subset(geom, {5}), std::invalid_argument);
  EXPECT_THROW(energy_bound_report(make_point_subset(geom, {})),
               std::invalid_argument);
  EXPECT_THROW(energy_extremizer_search(geom, 6, 1, 0), std::domain_error);
  EXPECT_THROW(energy_extremizer_search(geom, 0, 1, 0), std::domain_error);

  auto big = build_paraboloid(FieldContext::make(11), 4);
  std::vector<long long> many(513);
  for (int i = 0; i < 513; ++i) many[i] = i;
  EXPECT_THROW(
      additive_energy(make_point_subset(big, many), EnergyMethod::Quadruple),
      resource_error);

  const long long old_cap = grid_cap();
  set_grid_cap(1000);
  auto small = build_paraboloid(FieldContext::make(11), 3);
  EXPECT_THROW(
      additive_energy(make_point_subset(small, {0, 1}), EnergyMethod::Convolution),
      resource_error);
  set_grid_cap(old_cap);
}

}  // namespace
}  // namespace ffext
