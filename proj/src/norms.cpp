#include "ffext/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ffext/errors.hpp"
#include "ffext/rng.hpp"

namespace ffext {
namespace {

double exp_val(const Exponent& e) {
  return e.is_infinity() ? std::numeric_limits<double>::infinity() : e.value();
}

cplx phase_of(cplx z) {
  const double a = std::abs(z);
  return a == 0.0 ? cplx(0.0) : z / a;
}

SurfaceFunction random_surface(const GeometryPtr& geom, Rng& rng) {
  auto f = make_surface_function(geom);
  for (auto& v : f.values)
    v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return f;
}

// Maximizer of Re<f, phi>_{dsigma} over the unit ball of L^p(dsigma):
// |f| proportional to |phi|^{p'-1} with phi's phase; point mass for p = 1,
// pure phase for p = infinity. Returns a zero function when phi vanishes.
SurfaceFunction align_surface(const SurfaceFunction& phi, const Exponent& p) {
  auto f = make_surface_function(phi.geom);
  if (p.is_infinity()) {
    for (std::size_t i = 0; i < f.values.size(); ++i)
      f.values[i] = phase_of(phi.values[i]);
    return f;
  }
  const double pv = p.value();
  if (pv == 1.0) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < phi.values.size(); ++i)
      if (std::abs(phi.values[i]) > best) {
        best = std::abs(phi.values[i]);
        arg = i;
      }
    if (best > 0.0)
      f.values[arg] =
          static_cast<double>(phi.geom->size()) * phase_of(phi.values[arg]);
    return f;
  }
  const double expo = 1.0 / (pv - 1.0);  // p' - 1
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double a = std::abs(phi.values[i]);
    if (a > 0.0) f.values[i] = std::pow(a, expo) * phase_of(phi.values[i]);
  }
  const double n = surface_lp_norm(f, pv);
  if (n > 0.0)
    for (auto& v : f.values) v /= n;
  return f;
}

// Maximizer of Re<u, g>_{dm} over the unit ball of L^{r'}(dm).
GridFunction align_grid(const GridFunction& u, const Exponent& r) {
  auto g = make_grid_function(u.ctx, u.d, Measure::Counting);
  if (r.is_infinity()) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
      if (std::abs(u.values[i]) > best) {
        best = std::abs(u.values[i]);
        arg = i;
      }
    if (best > 0.0) g.values[arg] = phase_of(u.values[arg]);
    return g;
  }
  const double rv = r.value();
  if (rv == 1.0) {
    for (std::size_t i = 0; i < g.values.size(); ++i)
      g.values[i] = phase_of(u.values[i]);
    return g;
  }
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const double a = std::abs(u.values[i]);
    if (a > 0.0) g.values[i] = std::pow(a, rv - 1.0) * phase_of(u.values[i]);
  }
  const double n = lp_norm(g, exp_val(r.conjugate()));
  if (n > 0.0)
    for (auto& v : g.values) v /= n;
  return g;
}

struct AscentOutcome {
  double value = 0.0;
  SurfaceFunction witness;
  int iterations = 0;
  bool converged = false;
  double dual_gap = 0.0;
};

AscentOutcome run_ascent(const GeometryPtr& geom, const Exponent& p,
                         const Exponent& r, SurfaceFunction f, int max_iter,
                         double tol) {
  const double pv = exp_val(p);
  const double rv = exp_val(r);
  const double pcv = exp_val(p.conjugate());

  const double fn = surface_lp_norm(f, pv);
  if (fn == 0.0) return {};
  for (auto& v : f.values) v /= fn;

  AscentOutcome out;
  out.witness = f;
  auto u = extension_via_grid(f);
  out.value = lp_norm(u, rv);
  auto g = align_grid(u, r);
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    auto phi = restriction_operator(g, geom);
    const double jf = surface_lp_norm(phi, pcv);
    if (jf + 1e-9 * std::max(1.0, out.value) < out.value)
      throw consistency_error("ascent objective decreased at the f-update");
    f = align_surface(phi, p);
    u = extension_via_grid(f);
    const double jg = lp_norm(u, rv);
    if (jg + 1e-9 * std::max(1.0, jf) < jf)
      throw consistency_error("ascent objective decreased at the g-update");
    g = align_grid(u, r);
    const double gain_f = jf - out.value;
    const double gain_g = jg - jf;
    out.value = jg;
    out.witness = f;
    if (gain_f < tol * std::max(1.0, jg) && gain_g < tol * std::max(1.0, jg)) {
      out.converged = true;
      break;
    }
  }
  const double dual_ratio = surface_lp_norm(restriction_operator(g, geom), pcv);
  out.dual_gap = std::max(0.0, dual_ratio - out.value);
  return out;
}

double witness_ratio(const SurfaceFunction& f, double pv, double rv) {
  const double den = surface_lp_norm(f, pv);
  if (den == 0.0) return 0.0;
  return lp_norm(extension_via_grid(f), rv) / den;
}

}  // namespace

double exact_norm_2_2(const GeometryPtr& geom) {
  const double root_q = std::sqrt(static_cast<double>(geom->ctx->q()));
  Rng rng(20220628);
  for (int it = 0; it < 20; ++it) {
    auto f = random_surface(geom, rng);
    const double lhs = lp_norm(extension_operator(f), 2.0);
    const double rhs = root_q * surface_lp_norm(f, 2.0);
    if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, rhs))
      throw consistency_error("L2 extension identity failed");
  }
  return root_q;
}

NormEstimate norm_lower_bound(const GeometryPtr& geom, Exponent p, Exponent r,
                              int restarts, int max_iter, double tol,
                              std::uint64_t seed) {
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!p.is_infinity() && p.v < Rat{1})
    throw std::domain_error("exponent must be >= 1");
  if (!r.is_infinity() && r.v < Rat{1})
    throw std::domain_error("exponent must be >= 1");

  const double pv = exp_val(p);
  const double rv = exp_val(r);

  NormEstimate best;
  best.d = geom->d;
  best.q = geom->ctx->q();
  best.p = p;
  best.r = r;
  best.restarts = restarts;
  best.seed = seed;
  best.value = -1.0;

  auto consider = [&](const SurfaceFunction& f, NormMethod method,
                      int iterations, bool converged, double dual_gap) {
    const double value = witness_ratio(f, pv, rv);
    if (value > best.value) {
      best.value = value;
      best.witness = f;
      best.method = method;
      best.iterations = iterations;
      best.converged = converged;
      best.dual_gap = dual_gap;
    }
  };

  consider(constant_surface(geom, 1.0), NormMethod::ConstantFunction, 0, true,
           0.0);

  auto w = maximal_isotropic_subspace(geom->ctx, geom->d);
  auto omega_ind = make_surface_function(geom);
  for (long long i : subspace_in_paraboloid(w))
    omega_ind.values[static_cast<std::size_t>(i)] = 1.0;
  consider(omega_ind, NormMethod::IndicatorSweep, 0, true, 0.0);

  auto spike = make_surface_function(geom);
  spike.values[0] = static_cast<double>(geom->size());
  consider(spike, NormMethod::IndicatorSweep, 0, true, 0.0);

  {
    Rng rng(seed, 999);
    const auto np = static_cast<uint32_t>(geom->size());
    for (int draw = 0; draw < 8; ++draw) {
      const uint32_t size = 1 + static_cast<uint32_t>(rng.below(np));
      auto ind = make_surface_function(geom);
      for (auto i : sample_without_replacement(np, size, rng))
        ind.values[i] = 1.0;
      consider(ind, NormMethod::IndicatorSweep, 0, true, 0.0);
    }
  }

  for (int s = 0; s < restarts; ++s) {
    SurfaceFunction f0 =
        (s == 0) ? constant_surface(geom, 1.0) : [&] {
          Rng rng(seed, static_cast<uint64_t>(s));
          return random_surface(geom, rng);
        }();
    auto outcome = run_ascent(geom, p, r, std::move(f0), max_iter, tol);
    if (outcome.value > best.value) {
      best.value = outcome.value;
      best.witness = outcome.witness;
      best.method = NormMethod::Ascent;
      best.iterations = outcome.iterations;
      best.converged = outcome.converged;
      best.dual_gap = outcome.dual_gap;
    }
  }
  return best;
}

Exponent NecessaryConstraints::subspace_r(const Exponent& p) const {
  if (p.is_infinity()) return Exponent::of(Rat{d - k} / Rat{d - 1 - k});
  if (p.v == Rat{1}) return Exponent::infinity();
  const Rat r = p.v * Rat{d - k} / ((p.v - Rat{1}) * Rat{d - 1 - k});
  return Exponent::of(r);
}

Exponent NecessaryConstraints::min_r(const Exponent& p) const {
  const Exponent sub = subspace_r(p);
  if (sub.is_infinity()) return sub;
  return sub.v > r_uniform ? sub : Exponent::of(r_uniform);
}

NecessaryConstraints necessary_exponents(int d, int k) {
  if (d < 2) throw std::domain_error("dimension must be >= 2");
  if (k < 0 || k > d - 2)
    throw std::domain_error("subspace dimension must lie in [0, d-2]");
  return NecessaryConstraints{d, k, Rat{2 * d, d - 1}};
}

Rat omega_witness_exponent(int d, int k, const Exponent& p, const Exponent& r) {
  Rat s{0};
  const Exponent pc = p.conjugate();
  if (!pc.is_infinity()) s += Rat{k - d + 1} / pc.v;
  if (!r.is_infinity()) s += Rat{d - k} / r.v;
  return s;
}

double omega_witness_ratio(const GeometryPtr& geom, const Exponent& p,
                           const Exponent& r) {
  auto w = maximal_isotropic_subspace(geom->ctx, geom->d);
  auto f = make_surface_function(geom);
  for (long long i : subspace_in_paraboloid(w))
    f.values[static_cast<std::size_t>(i)] = 1.0;
  return witness_ratio(f, exp_val(p), exp_val(r));
}

ExponentProfile exponent_profile(int d, bool minus_one_square,
                                 bool prime_field) {
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  ExponentProfile prof;
  prof.d = d;
  prof.stein_tomas_r = Rat{2 * d + 2, d - 1};

  if (d % 2 == 0) {
    prof.cls = FieldClass::EvenD;
    prof.corner_inv_p = Rat{d * d - d + 2, 2 * d * d};
    prof.corner_inv_r = Rat{d - 1, 2 * d};
    prof.conjectured_r = Rat{2 * d + 4, d};
    if (d == 2) {
      prof.best_known_r = Rat{4};
      prof.best_known_open = false;
      prof.solved = true;
      prof.best_known_source = "MT04";
    } else if (d == 4) {
      prof.best_known_r = Rat{2 * d * d, d * d - 2 * d + 2};  // 16/5
      prof.best_known_open = false;
      prof.best_known_source = "LL10";
    } else {
      prof.best_known_r = Rat{6 * d + 8, 3 * d - 2};
      prof.best_known_open = true;
      prof.best_known_source = "bootstrap";
    }
    return prof;
  }

  if (minus_one_square || d % 4 == 1) {
    prof.cls = minus_one_square ? FieldClass::OddDMinusSquare
                                : FieldClass::D1Mod4;
    prof.corner_inv_p = Rat{d - 1, 2 * d};
    prof.corner_inv_r = Rat{d - 1, 2 * d};
    prof.conjectured_r = Rat{2 * d + 2, d - 1};
    prof.best_known_r = prof.stein_tomas_r;
    prof.best_known_open = false;
    prof.stein_tomas_sharp = true;
    prof.solved = true;
    prof.best_known_source = "MT04";
    return prof;
  }

  prof.cls = FieldClass::D3Mod4MinusNonSquare;
  prof.corner_inv_p = Rat{d * d + 3, 2 * d * d + 2 * d};
  prof.corner_inv_r = Rat{d - 1, 2 * d};
  prof.conjectured_r = Rat{2 * d + 6, d + 1};
  if (d == 3) {
    prof.best_known_r = prime_field ? Rat{18, 5} - Rat{1, 1035} : Rat{18, 5};
    prof.best_known_open = true;
    prof.best_known_source = "LL13";
  } else {
    prof.best_known_r = Rat{6 * d + 10, 3 * d - 1};
    prof.best_known_open = true;
    prof.best_known_source = "bootstrap";
  }
  return prof;
}

ExponentProfile exponent_profile(const FieldContext& ctx, int d) {
  return exponent_profile(d, ctx.is_minus_one_square(), ctx.n() == 1);
}

SlopeReport scaling_scan(int d, const Exponent& p, const Exponent& r,
                         const std::vector<int>& q_list,
                         const ScanParams& params) {
  if (q_list.size() < 3)
    throw std::invalid_argument("scan needs at least three field sizes");
  SlopeReport rep;
  for (int q : q_list) {
    int base = q, n = 0;
    int pf = 2;
    while (pf * pf <= q && q % pf != 0) ++pf;
    if (q % pf != 0) pf = q;
    while (base % pf == 0) base /= pf, ++n;
    if (base != 1)
      throw std::invalid_argument("field size must be a prime power");
    auto geom = build_paraboloid(FieldContext::make(pf, n), d);
    auto est = norm_lower_bound(geom, p, r, params.restarts, params.max_iter,
                                params.tol, params.seed);
    rep.points.push_back(ScanPoint{q, est.value, std::move(est)});
  }

  const std::size_t n = rep.points.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& pt : rep.points) {
    const double x = std::log(static_cast<double>(pt.q));
    const double y = std::log(pt.value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  rep.slope = (n * sxy - sx * sy) / denom;
  rep.intercept = (sy - rep.slope * sx) / n;
  for (const auto& pt : rep.points) {
    const double x = std::log(static_cast<double>(pt.q));
    const double y = std::log(pt.value);
    rep.residual =
        std::max(rep.residual, std::abs(y - rep.slope * x - rep.intercept));
  }
  return rep;
}

}  // namespace ffext
