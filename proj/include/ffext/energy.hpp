#pragma once

#include <cstdint>
#include <vector>

#include "ffext/paraboloid.hpp"

namespace ffext {

// Subset of paraboloid points, stored as sorted unique point indices.
struct PointSubset {
  GeometryPtr geom;
  std::vector<long long> members;

  long long size() const { return static_cast<long long>(members.size()); }
};

// Validates, sorts, and rejects duplicates or out-of-range indices.
PointSubset make_point_subset(GeometryPtr geom, std::vector<long long> members);

enum class EnergyMethod { Quadruple, Convolution };

// Number of ordered quadruples (x, y, z, w) in E^4 with x + y = z + w in
// F_q^d. Quadruple walks all (x, y, z) and looks the fourth point up
// (needs |E| <= 512); Convolution squares the autocorrelation of the
// indicator on the full grid (needs the grid under the cap). Both exact.
long long additive_energy(const PointSubset& e, EnergyMethod method);

// Which energy-bound regime the ambient dimension falls in: even d >= 4, or
// d = 4l + 3 (l >= 1) with -1 a nonsquare; None otherwise.
enum class EnergyRegime { None, EvenD, D3Mod4NonSquare };

struct EnergyReport {
  int d = 0;
  int q = 0;
  long long size = 0;
  long long energy = 0;
  EnergyRegime regime = EnergyRegime::None;

  double cube_bound = 0.0;       // |E|^3, every regime
  double mixed_bound = 0.0;      // q^{-1}|E|^3 + q^a |E|^{5/2} + q^{(d-2)/2}|E|^2
  double corollary_bound = 0.0;  // the in-window simplification
  bool in_window = false;        // |E| inside the regime's size window
  bool corollary_applicable = false;  // regime set and in_window

  double ratio_cube = 0.0;
  double ratio_mixed = 0.0;
  double ratio_corollary = 0.0;
};

EnergyRegime energy_regime(const FieldContext& ctx, int d);

// Evaluates the bound expressions at (q, d, |E|) against the exact energy.
EnergyReport energy_bound_report(const PointSubset& e);

struct ExtremizerResult {
  PointSubset set;
  EnergyReport report;
};

// Best-effort search for a size-|E| subset of large additive energy:
// random draws, subsets and coset unions of the embedded isotropic subspace,
// then greedy random swaps from the best candidate. Deterministic in seed;
// ties broken toward the lexicographically smallest member list.
ExtremizerResult energy_extremizer_search(const GeometryPtr& geom,
                                          long long size, int trials,
                                          std::uint64_t seed);

}  // namespace ffext
