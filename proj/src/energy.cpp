#include "ffext/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "ffext/errors.hpp"
#include "ffext/rng.hpp"

namespace ffext {
namespace {

constexpr long long kQuadrupleLimit = 512;
constexpr long long kDenseLookupLimit = 1LL << 22;

long long ipow(long long base, int e) {
  long long r = 1;
  while (e-- > 0) r *= base;
  return r;
}

long long quadruple_energy(const PointSubset& e) {
  const auto& geom = *e.geom;
  const auto& f = *geom.ctx;
  const int d = geom.d;
  const long long m = e.size();
  if (m > kQuadrupleLimit)
    throw resource_error("quadruple method needs |E| <= 512");

  std::vector<int> coords(static_cast<std::size_t>(m) * d);
  std::vector<long long> weight(d);
  weight[0] = 1;
  for (int i = 1; i < d; ++i) weight[i] = weight[i - 1] * f.q();

  long long grid = 1;
  bool grid_small = true;
  for (int i = 0; i < d && grid_small; ++i) {
    grid *= f.q();
    grid_small = grid <= kDenseLookupLimit;
  }

  std::vector<unsigned char> dense;
  std::unordered_set<long long> sparse;
  for (long long i = 0; i < m; ++i) {
    auto p = geom.point(e.members[static_cast<std::size_t>(i)]);
    std::copy(p.begin(), p.end(),
              coords.begin() + static_cast<std::size_t>(i) * d);
  }
  if (grid_small) {
    dense.assign(static_cast<std::size_t>(grid), 0);
    for (long long i = 0; i < m; ++i) {
      long long idx = 0;
      for (int j = 0; j < d; ++j)
        idx += coords[static_cast<std::size_t>(i) * d + j] * weight[j];
      dense[static_cast<std::size_t>(idx)] = 1;
    }
  } else {
    for (long long i = 0; i < m; ++i) {
      long long idx = 0;
      for (int j = 0; j < d; ++j)
        idx += coords[static_cast<std::size_t>(i) * d + j] * weight[j];
      sparse.insert(idx);
    }
  }

  long long count = 0;
  std::vector<int> s(d);
  for (long long x = 0; x < m; ++x) {
    const int* cx = &coords[static_cast<std::size_t>(x) * d];
    for (long long y = 0; y < m; ++y) {
      const int* cy = &coords[static_cast<std::size_t>(y) * d];
      for (int j = 0; j < d; ++j) s[j] = f.add(cx[j], cy[j]);
      for (long long z = 0; z < m; ++z) {
        const int* cz = &coords[static_cast<std::size_t>(z) * d];
        long long w = 0;
        for (int j = 0; j < d; ++j) w += f.sub(s[j], cz[j]) * weight[j];
        if (grid_small ? dense[static_cast<std::size_t>(w)] != 0
                       : sparse.count(w) != 0)
          ++count;
      }
    }
  }
  return count;
}

long long convolution_energy(const PointSubset& e) {
  const auto& geom = *e.geom;
  auto ind = make_grid_function(geom.ctx, geom.d, Measure::Counting);
  for (long long i : e.members)
    ind.values[static_cast<std::size_t>(geom.grid_index(i))] = 1.0;
  auto r = convolve(ind, ind);
  long long total = 0;
  for (const auto& v : r.values) {
    const long long c = std::llround(v.real());
    total += c * c;
  }
  return total;
}

// Cheapest exact method available for this subset.
long long energy_auto(const PointSubset& e) {
  long long grid = 1;
  bool conv_ok = true;
  for (int i = 0; i < e.geom->d && conv_ok; ++i) {
    grid *= e.geom->ctx->q();
    conv_ok = grid <= std::min(grid_cap(), 1LL << 20);
  }
  if (conv_ok) return convolution_energy(e);
  return quadruple_energy(e);
}

// Basis of the orthogonal complement of span(rows) under the standard dot
// product, via row reduction over F_q.
std::vector<std::vector<int>> nullspace(const FieldContext& f,
                                        std::vector<std::vector<int>> rows,
                                        int e) {
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (int col = 0; col < e && r < rows.size(); ++col) {
    std::size_t sel = r;
    while (sel < rows.size() && rows[sel][col] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    const int scale = f.inv(rows[r][col]);
    for (int j = 0; j < e; ++j) rows[r][j] = f.mul(rows[r][j], scale);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][col] == 0) continue;
      const int c = rows[i][col];
      for (int j = 0; j < e; ++j)
        rows[i][j] = f.sub(rows[i][j], f.mul(c, rows[r][j]));
    }
    pivot_col.push_back(col);
    ++r;
  }

  std::vector<std::vector<int>> basis;
  for (int fc = 0; fc < e; ++fc) {
    if (std::find(pivot_col.begin(), pivot_col.end(), fc) != pivot_col.end())
      continue;
    std::vector<int> v(e, 0);
    v[fc] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
      v[pivot_col[i]] = f.neg(rows[i][fc]);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<long long> structured_candidate(const GeometryPtr& geom,
                                            long long size) {
  const auto& f = *geom->ctx;
  const int d = geom->d;
  const int e = d - 1;
  auto w = maximal_isotropic_subspace(geom->ctx, d);
  const long long wsize = static_cast<long long>(w.elements.size());

  std::vector<long long> members;
  if (size <= wsize) {
    members.assign(w.elements.begin(), w.elements.begin() + size);
    return members;
  }

  // Union of whole cosets (c + W) x {.} that stay inside P, i.e. with c
  // orthogonal to W; the last coset is filled from its smallest elements.
  std::unordered_set<long long> in_w(w.elements.begin(), w.elements.end());
  std::vector<std::vector<int>> perp_basis;
  if (w.dim() == 0) {
    for (int j = 0; j < e; ++j) {
      std::vector<int> v(e, 0);
      v[j] = 1;
      perp_basis.push_back(std::move(v));
    }
  } else {
    perp_basis = nullspace(f, w.basis, e);
  }

  const int pk = static_cast<int>(perp_basis.size());
  long long perp_count = 1;
  for (int i = 0; i < pk; ++i) perp_count *= f.q();
  std::vector<long long> perp;
  perp.reserve(static_cast<std::size_t>(perp_count));
  for (long long c = 0; c < perp_count; ++c) {
    long long t = c;
    std::vector<int> v(e, 0);
    for (int i = 0; i < pk; ++i) {
      const int coef = static_cast<int>(t % f.q());
      t /= f.q();
      for (int j = 0; j < e; ++j) v[j] = f.add(v[j], f.mul(coef, perp_basis[i][j]));
    }
    long long idx = 0;
    for (int j = e - 1; j >= 0; --j) idx = idx * f.q() + v[j];
    perp.push_back(idx);
  }
  std::sort(perp.begin(), perp.end());

  std::unordered_set<long long> used;
  for (long long rep : perp) {
    if (static_cast<long long>(members.size()) >= size) break;
    if (used.count(rep)) continue;
    // Mark the whole coset rep + W as visited and collect its points.
    auto rep_digits = grid_decode(geom->ctx, e, rep);
    std::vector<long long> coset;
    for (long long wi : w.elements) {
      auto wd = grid_decode(geom->ctx, e, wi);
      std::vector<int> sum(e);
      for (int j = 0; j < e; ++j) sum[j] = f.add(rep_digits[j], wd[j]);
      long long idx = 0;
      for (int j = e - 1; j >= 0; --j) idx = idx * f.q() + sum[j];
      coset.push_back(idx);
      used.insert(idx);
    }
    std::sort(coset.begin(), coset.end());
    const long long room = size - static_cast<long long>(members.size());
    const long long take = std::min<long long>(room, coset.size());
    members.insert(members.end(), coset.begin(), coset.begin() + take);
  }

  // Cosets may not cover the request; pad with the smallest unused indices.
  if (static_cast<long long>(members.size()) < size) {
    std::unordered_set<long long> have(members.begin(), members.end());
    for (long long i = 0; static_cast<long long>(members.size()) < size; ++i)
      if (!have.count(i)) members.push_back(i);
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace

PointSubset make_point_subset(GeometryPtr geom,
                              std::vector<long long> members) {
  if (!geom) throw std::invalid_argument("null geometry");
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end())
    throw std::invalid_argument("duplicate point index");
  if (!members.empty() &&
      (members.front() < 0 || members.back() >= geom->size()))
    throw std::invalid_argument("point index out of range");
  return PointSubset{std::move(geom), std::move(members)};
}

long long additive_energy(const PointSubset& e, EnergyMethod method) {
  return method == EnergyMethod::Quadruple ? quadruple_energy(e)
                                           : convolution_energy(e);
}

EnergyRegime energy_regime(const FieldContext& ctx, int d) {
  if (d >= 4 && d % 2 == 0) return EnergyRegime::EvenD;
  if (d >= 7 && d % 4 == 3 && !ctx.is_minus_one_square())
    return EnergyRegime::D3Mod4NonSquare;
  return EnergyRegime::None;
}

EnergyReport energy_bound_report(const PointSubset& e) {
  if (e.members.empty()) throw std::invalid_argument("empty subset");
  const auto& f = *e.geom->ctx;
  const int d = e.geom->d;
  const double q = static_cast<double>(f.q());
  const double s = static_cast<double>(e.size());

  EnergyReport rep;
  rep.d = d;
  rep.q = f.q();
  rep.size = e.size();
  rep.energy = energy_auto(e);
  rep.regime = energy_regime(f, d);
  rep.cube_bound = s * s * s;
  rep.ratio_cube = static_cast<double>(rep.energy) / rep.cube_bound;

  if (rep.energy < rep.size * rep.size || rep.energy > rep.size * rep.size * rep.size)
    throw consistency_error("energy outside [|E|^2, |E|^3]");

  if (rep.regime != EnergyRegime::None) {
    const double alpha =
        rep.regime == EnergyRegime::EvenD ? (d - 2) / 4.0 : (d - 3) / 4.0;
    rep.mixed_bound = rep.cube_bound / q +
                      std::pow(q, alpha) * std::pow(s, 2.5) +
                      std::pow(q, (d - 2) / 2.0) * s * s;
    rep.ratio_mixed = static_cast<double>(rep.energy) / rep.mixed_bound;

    const long long s2 = rep.size * rep.size;
    const int upper_exp = rep.regime == EnergyRegime::EvenD ? d + 2 : d + 1;
    rep.in_window =
        s2 >= ipow(f.q(), d - 2) && s2 <= ipow(f.q(), upper_exp);
    rep.corollary_bound =
        rep.regime == EnergyRegime::EvenD
            ? std::pow(q, (d - 2) / 4.0) * std::pow(s, 2.5)
            : std::pow(q, (d - 3) / 4.0) * std::pow(s, 2.5) +
                  std::pow(q, (d - 2) / 2.0) * s * s;
    rep.corollary_applicable = rep.in_window;
    rep.ratio_corollary = static_cast<double>(rep.energy) / rep.corollary_bound;
  }
  return rep;
}

ExtremizerResult energy_extremizer_search(const GeometryPtr& geom,
                                          long long size, int trials,
                                          std::uint64_t seed) {
  if (!geom) throw std::invalid_argument("null geometry");
  if (size < 1 || size > geom->size())
    throw std::domain_error("subset size must lie in [1, |P|]");

  std::vector<long long> best;
  long long best_energy = -1;
  auto consider = [&](std::vector<long long> members) {
    auto subset = make_point_subset(geom, std::move(members));
    const long long en = energy_auto(subset);
    if (en > best_energy ||
        (en == best_energy && subset.members < best)) {
      best_energy = en;
      best = std::move(subset.members);
    }
  };

  consider(structured_candidate(geom, size));

  const auto np = static_cast<uint32_t>(geom->size());
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<uint64_t>(t) + 1);
    auto picks = sample_without_replacement(np, static_cast<uint32_t>(size), rng);
    std::vector<long long> members(picks.begin(), picks.end());
    consider(std::move(members));
  }

  // Greedy random swaps from the champion.
  if (size < geom->size()) {
    Rng rng(seed, 0);
    auto current = best;
    long long current_energy = best_energy;
    std::unordered_set<long long> have(current.begin(), current.end());
    for (int round = 0; round < 200; ++round) {
      const auto out_pos = static_cast<std::size_t>(rng.below(current.size()));
      const long long in_idx =
          static_cast<long long>(rng.below(static_cast<uint64_t>(geom->size())));
      if (have.count(in_idx)) continue;
      const long long out_idx = current[out_pos];
      current[out_pos] = in_idx;
      auto trial_sorted = current;
      std::sort(trial_sorted.begin(), trial_sorted.end());
      const long long en =
          energy_auto(PointSubset{geom, trial_sorted});
      if (en > current_energy) {
        current_energy = en;
        have.erase(out_idx);
        have.insert(in_idx);
      } else {
        current[out_pos] = out_idx;
      }
    }
    std::sort(current.begin(), current.end());
    consider(std::move(current));
  }

  auto subset = make_point_subset(geom, std::move(best));
  auto report = energy_bound_report(subset);
  return ExtremizerResult{std::move(subset), std::move(report)};
}

}  // namespace ffext
