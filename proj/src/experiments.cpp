#include "ffext/experiments.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ffext/energy.hpp"
#include "ffext/errors.hpp"
#include "ffext/machinery.hpp"
#include "ffext/norms.hpp"
#include "ffext/paraboloid.hpp"
#include "ffext/rng.hpp"
#include "ffext/transform.hpp"

namespace ffext {
namespace {

// ---------------------------------------------------------------------------
// small string / formatting helpers

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  if (trim(s).empty()) return out;
  for (const auto& tok : split(s, ',')) {
    const auto t = trim(tok);
    if (t.empty()) throw std::invalid_argument("empty list entry in: " + s);
    out.push_back(std::stoi(t));
  }
  return out;
}

std::vector<long long> parse_ll_list(const std::string& s) {
  std::vector<long long> out;
  if (trim(s).empty()) return out;
  for (const auto& tok : split(s, ',')) {
    const auto t = trim(tok);
    if (t.empty()) throw std::invalid_argument("empty list entry in: " + s);
    out.push_back(std::stoll(t));
  }
  return out;
}

template <typename T>
std::string join_list(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out;
}

std::string md_sep(std::size_t n) {
  std::string out = "|";
  for (std::size_t i = 0; i < n; ++i) out += " --- |";
  return out;
}

// ---------------------------------------------------------------------------
// field / randomness plumbing

// Factors q, applies the optional modulus override, and builds the context.
FieldPtr make_field_for(int q, const std::vector<int>& modulus) {
  int pf = 2;
  while (pf * pf <= q && q % pf != 0) ++pf;
  if (q % pf != 0) pf = q;
  int n = 0;
  int rest = q;
  while (rest % pf == 0) {
    rest /= pf;
    ++n;
  }
  if (rest != 1 || q < 2)
    throw std::invalid_argument("field size must be a prime power");
  if (modulus.empty()) return n == 1 ? FieldContext::make(pf) : FieldContext::make(pf, n);
  if (n == 1)
    throw std::invalid_argument("modulus override needs a prime-power field size");
  return FieldContext::make(pf, n, modulus);
}

std::uint64_t stream_id(int check, int d, int q) {
  return (static_cast<std::uint64_t>(check) << 40) ^
         (static_cast<std::uint64_t>(d) << 20) ^ static_cast<std::uint64_t>(q);
}

GridFunction random_grid(const FieldPtr& ctx, int d, Measure measure, Rng& rng) {
  auto g = make_grid_function(ctx, d, measure);
  for (auto& v : g.values)
    v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return g;
}

SurfaceFunction random_surface(const GeometryPtr& geom, Rng& rng) {
  auto f = make_surface_function(geom);
  for (auto& v : f.values)
    v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return f;
}

double rel_sup_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / (1.0 + scale);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LineFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.residual = std::max(
        fit.residual, std::abs(ys[i] - (fit.slope * xs[i] + fit.intercept)));
  return fit;
}

// ---------------------------------------------------------------------------
// payload plumbing

json config_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["d"] = c.d_list;
  j["q"] = c.q_list;
  j["modulus"] = c.modulus;
  j["p"] = c.p.str();
  j["r"] = c.r.str();
  j["seed"] = c.seed;
  j["restarts"] = c.restarts;
  j["trials"] = c.trials;
  j["max_iter"] = c.max_iter;
  j["tol"] = c.tol;
  j["functions"] = c.functions;
  j["machinery_functions"] = c.machinery_functions;
  j["sizes"] = c.sizes;
  j["out"] = c.out;
  j["format"] = c.format;
  j["jobs"] = c.jobs;
  j["fault"] = c.fault;
  return j;
}

json payload_frame(const ExperimentConfig& config) {
  json j;
  j["artifact_version"] = kArtifactVersion;
  j["command"] = config.name;
  j["config"] = config_json(config);
  return j;
}

RunReport seal_report(const ExperimentConfig& config, json payload,
                      const std::vector<CheckReport>& cases,
                      std::chrono::steady_clock::time_point start) {
  json arr = json::array();
  int failures = 0;
  for (const auto& rep : cases) {
    if (!rep.pass) ++failures;
    arr.push_back(to_json(rep));
  }
  if (!payload.contains("cases")) payload["cases"] = arr;
  payload["summary"]["checks"] = cases.size();
  payload["summary"]["failures"] = failures;
  payload["summary"]["pass"] = failures == 0;
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  payload["timing"]["wall_seconds"] = wall;
  RunReport report;
  report.command = config.name;
  report.payload = std::move(payload);
  report.all_pass = failures == 0;
  report.wall_seconds = wall;
  return report;
}

// Runs one named check; an internal cross-check failure becomes a failed
// case instead of aborting the whole run.
template <typename Fn>
void run_check(std::vector<CheckReport>& cases, const std::string& name,
               const std::string& params, Fn&& fn) {
  try {
    cases.push_back(fn());
  } catch (const consistency_error& e) {
    cases.push_back(make_check_report(
        name, params + " error=" + e.what(), 1.0, 0.0, false));
  }
}

// ---------------------------------------------------------------------------
// verify checks (fixed order, fixed names)

CheckReport check_field_axioms(const FieldPtr& ctx) {
  const int q = ctx->q();
  long long bad = 0;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      for (int c = 0; c < q; ++c) {
        if (ctx->add(a, ctx->add(b, c)) != ctx->add(ctx->add(a, b), c)) ++bad;
        if (ctx->mul(a, ctx->mul(b, c)) != ctx->mul(ctx->mul(a, b), c)) ++bad;
        if (ctx->mul(a, ctx->add(b, c)) !=
            ctx->add(ctx->mul(a, b), ctx->mul(a, c)))
          ++bad;
      }
  for (int a = 0; a < q; ++a) {
    if (ctx->add(a, 0) != a) ++bad;
    if (ctx->mul(a, 1) != a) ++bad;
    if (ctx->add(a, ctx->neg(a)) != 0) ++bad;
    if (a != 0 && ctx->mul(a, ctx->inv(a)) != 1) ++bad;
    for (int b = 0; b < q; ++b) {
      if (ctx->add(a, b) != ctx->add(b, a)) ++bad;
      if (ctx->mul(a, b) != ctx->mul(b, a)) ++bad;
      if (ctx->trace(ctx->add(a, b)) !=
          (ctx->trace(a) + ctx->trace(b)) % ctx->p())
        ++bad;
      const int lq = ctx->quadratic_character(ctx->mul(a, b));
      const int rq = (a == 0 || b == 0)
                         ? 0
                         : ctx->quadratic_character(a) * ctx->quadratic_character(b);
      if (lq != rq) ++bad;
    }
  }
  return make_check_report("field_axioms", "q=" + std::to_string(q),
                           static_cast<double>(bad), 0.0, bad == 0);
}

CheckReport check_character_orthogonality(const FieldPtr& ctx) {
  const int q = ctx->q();
  double err = 0.0;
  for (int a = 0; a < q; ++a) {
    cplx sum = 0.0;
    for (int m = 0; m < q; ++m) sum += ctx->additive_character(ctx->mul(a, m));
    err = std::max(err, std::abs(sum - cplx(a == 0 ? q : 0.0)));
  }
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b)
      err = std::max(err, std::abs(ctx->additive_character(ctx->add(a, b)) -
                                   ctx->additive_character(a) *
                                       ctx->additive_character(b)));
  return make_check_report("character_orthogonality", "q=" + std::to_string(q),
                           err, 1e-9, err < 1e-9);
}

CheckReport check_gauss_magnitude(const FieldPtr& ctx) {
  const int q = ctx->q();
  const cplx g = ctx->gauss_sum();
  const double eta_minus =
      static_cast<double>(ctx->quadratic_character(ctx->neg(1)));
  double err = std::abs(std::norm(g) - q);
  err = std::max(err, std::abs(g * g - cplx(eta_minus * q)));
  return make_check_report("gauss_magnitude", "q=" + std::to_string(q), err,
                           1e-9, err < 1e-9);
}

CheckReport check_dsigma_explicit(const GeometryPtr& geom,
                                  const std::string& fault) {
  const long long total = grid_size_checked(geom->ctx, geom->d);
  const auto direct = extension_operator(constant_surface(geom, 1.0));
  const bool corrupt = fault == "gauss";
  double err = 0.0;
  for (long long m = 0; m < total; ++m) {
    cplx expl = dsigma_inverse_explicit(geom, m);
    if (corrupt) expl *= 1.0001;
    err = std::max(err, std::abs(direct.values[static_cast<std::size_t>(m)] -
                                 expl));
  }
  const std::string params =
      "d=" + std::to_string(geom->d) + ",q=" + std::to_string(geom->ctx->q());
  return make_check_report("dsigma_explicit", params, err, 1e-9, err < 1e-9);
}

CheckReport check_plancherel(const FieldPtr& ctx, int d, int draws,
                             std::uint64_t seed) {
  Rng rng(seed, stream_id(5, d, ctx->q()));
  double err = 0.0;
  for (int t = 0; t < draws; ++t) {
    if (t % 2 == 0) {
      const auto g = random_grid(ctx, d, Measure::Counting, rng);
      const double lhs = lp_norm(fourier_forward(g), 2.0);
      const double rhs = lp_norm(g, 2.0);
      err = std::max(err, std::abs(lhs - rhs) / (1.0 + rhs));
    } else {
      const auto f = random_grid(ctx, d, Measure::Normalized, rng);
      const double lhs = lp_norm(fourier_inverse(f), 2.0);
      const double rhs = lp_norm(f, 2.0);
      err = std::max(err, std::abs(lhs - rhs) / (1.0 + rhs));
    }
  }
  const std::string params =
      "d=" + std::to_string(d) + ",q=" + std::to_string(ctx->q());
  return make_check_report("plancherel", params, err, 1e-9, err < 1e-9);
}

CheckReport check_set_plancherel(const FieldPtr& ctx, int d, int draws,
                                 std::uint64_t seed) {
  Rng rng(seed, stream_id(6, d, ctx->q()));
  const long long total = grid_size_checked(ctx, d);
  double err = 0.0;
  for (int t = 0; t < draws; ++t) {
    const std::size_t k =
        1 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(total)));
    const auto picks =
        sample_without_replacement(static_cast<std::size_t>(total), k, rng);
    auto g = make_grid_function(ctx, d, Measure::Counting);
    for (auto i : picks) g.values[i] = 1.0;
    const double mass = lp_norm(fourier_forward(g), 2.0);
    err = std::max(err, std::abs(mass * mass - static_cast<double>(k)) /
                            static_cast<double>(k));
    auto f = make_grid_function(ctx, d, Measure::Normalized);
    for (auto i : picks) f.values[i] = 1.0;
    const double back = lp_norm(fourier_inverse(f), 2.0);
    const double want = static_cast<double>(k) / static_cast<double>(total);
    err = std::max(err, std::abs(back * back - want) / want);
  }
  const std::string params =
      "d=" + std::to_string(d) + ",q=" + std::to_string(ctx->q());
  return make_check_report("set_plancherel", params, err, 1e-9, err < 1e-9);
}

CheckReport check_convolution_theorem(const FieldPtr& ctx, int d, int draws,
                                      std::uint64_t seed) {
  Rng rng(seed, stream_id(7, d, ctx->q()));
  const long long total = grid_size_checked(ctx, d);
  const std::size_t support =
      static_cast<std::size_t>(std::min<long long>(total, 50));
  double err = 0.0;
  for (int t = 0; t < draws; ++t) {
    const Measure measure = t % 2 == 0 ? Measure::Counting : Measure::Normalized;
    const auto a = random_grid(ctx, d, measure, rng);
    auto b = make_grid_function(ctx, d, measure);
    for (auto i :
         sample_without_replacement(static_cast<std::size_t>(total), support, rng))
      b.values[i] = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    const auto c = convolve(a, b);
    if (measure == Measure::Counting) {
      const auto lhs = fourier_forward(c);
      const auto rhs = pointwise_multiply(fourier_forward(a), fourier_forward(b));
      err = std::max(err, rel_sup_diff(lhs.values, rhs.values));
    } else {
      const auto lhs = fourier_inverse(c);
      const auto rhs = pointwise_multiply(fourier_inverse(a), fourier_inverse(b));
      err = std::max(err, rel_sup_diff(lhs.values, rhs.values));
    }
  }
  const std::string params =
      "d=" + std::to_string(d) + ",q=" + std::to_string(ctx->q());
  return make_check_report("convolution_theorem", params, err, 1e-9, err < 1e-9);
}

CheckReport check_inversion_roundtrip(const FieldPtr& ctx, int d, int draws,
                                      std::uint64_t seed) {
  Rng rng(seed, stream_id(8, d, ctx->q()));
  double err = 0.0;
  for (int t = 0; t < draws; ++t) {
    if (t % 2 == 0) {
      const auto g = random_grid(ctx, d, Measure::Counting, rng);
      err = std::max(err,
                     rel_sup_diff(fourier_inverse(fourier_forward(g)).values,
                                  g.values));
    } else {
      const auto f = random_grid(ctx, d, Measure::Normalized, rng);
      err = std::max(err,
                     rel_sup_diff(fourier_forward(fourier_inverse(f)).values,
                                  f.values));
    }
  }
  const std::string params =
      "d=" + std::to_string(d) + ",q=" + std::to_string(ctx->q());
  return make_check_report("inversion_roundtrip", params, err, 1e-9, err < 1e-9);
}

CheckReport check_surface_plancherel(const GeometryPtr& geom, int draws,
                                     std::uint64_t seed) {
  const int q = geom->ctx->q();
  Rng rng(seed, stream_id(9, geom->d, q));
  double err = 0.0;
  for (int t = 0; t < draws; ++t) {
    const auto f = random_surface(geom, rng);
    const double lhs = lp_norm(extension_via_grid(f), 2.0);
    const double rhs = std::sqrt(static_cast<double>(q)) * surface_lp_norm(f, 2.0);
    err = std::max(err, std::abs(lhs - rhs) / (1.0 + rhs));
  }
  const std::string params =
      "d=" + std::to_string(geom->d) + ",q=" + std::to_string(q);
  return make_check_report("surface_plancherel", params, err, 1e-9, err < 1e-9);
}

CheckReport check_extension_routes(const GeometryPtr& geom, std::uint64_t seed) {
  Rng rng(seed, stream_id(10, geom->d, geom->ctx->q()));
  double err = 0.0;
  for (int t = 0; t < 5; ++t) {
    const auto f = random_surface(geom, rng);
    err = std::max(err, rel_sup_diff(extension_operator(f).values,
                                     extension_via_grid(f).values));
  }
  const std::string params =
      "d=" + std::to_string(geom->d) + ",q=" + std::to_string(geom->ctx->q());
  return make_check_report("extension_routes", params, err, 1e-9, err < 1e-9);
}

CheckReport check_subspace_table(const GeometryPtr& geom) {
  const auto& ctx = geom->ctx;
  const int d = geom->d;
  const int q = ctx->q();
  long long bad = 0;
  const auto w = maximal_isotropic_subspace(ctx, d);
  const int e = d - 1;
  int expected;
  if (e % 2 == 1) {
    expected = (e - 1) / 2;
  } else if (ctx->is_minus_one_square() || (e / 2) % 2 == 0) {
    expected = e / 2;
  } else {
    expected = e / 2 - 1;
  }
  if (w.dim() != expected) ++bad;
  long long want_size = 1;
  for (int i = 0; i < w.dim(); ++i) want_size *= q;
  if (static_cast<long long>(w.elements.size()) != want_size) ++bad;
  for (long long enc : w.elements) {
    const auto coords = grid_decode(ctx, e, enc);
    int dot = 0;
    for (int c : coords) dot = ctx->add(dot, ctx->mul(c, c));
    if (dot != 0) ++bad;
  }
  const auto omega = subspace_in_paraboloid(w);
  if (omega.size() != w.elements.size()) ++bad;
  for (long long idx : omega) {
    if (idx < 0 || idx >= geom->size()) {
      ++bad;
      continue;
    }
    if (geom->last_coord[static_cast<std::size_t>(idx)] != 0) ++bad;
  }
  const std::string params = "d=" + std::to_string(d) + ",q=" + std::to_string(q);
  return make_check_report("subspace_table", params, static_cast<double>(bad),
                           0.0, bad == 0);
}

CheckReport check_energy_methods(const GeometryPtr& geom, std::uint64_t seed) {
  Rng rng(seed, stream_id(12, geom->d, geom->ctx->q()));
  long long bad = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t cap = static_cast<std::size_t>(
        std::min<long long>(geom->size(), 12));
    const std::size_t k = 1 + static_cast<std::size_t>(rng.below(cap));
    std::vector<long long> members;
    for (auto i : sample_without_replacement(
             static_cast<std::size_t>(geom->size()), k, rng))
      members.push_back(i);
    const auto subset = make_point_subset(geom, members);
    if (additive_energy(subset, EnergyMethod::Quadruple) !=
        additive_energy(subset, EnergyMethod::Convolution))
      ++bad;
    energy_bound_report(subset);
  }
  const std::string params =
      "d=" + std::to_string(geom->d) + ",q=" + std::to_string(geom->ctx->q());
  return make_check_report("energy_methods", params, static_cast<double>(bad),
                           0.0, bad == 0);
}

CheckReport check_duality_identity(const FieldPtr& ctx, int d, int draws,
                                   std::uint64_t seed) {
  Rng rng(seed, stream_id(13, d, ctx->q()));
  double err = 0.0;
  long long bad = 0;
  for (int t = 0; t < draws; ++t) {
    const auto g = random_grid(ctx, d, Measure::Counting, rng);
    const auto rep = verify_duality_identity(g);
    if (!rep.pass) ++bad;
    err = std::max(err, std::abs(rep.lhs - rep.rhs) / (1.0 + rep.lhs));
  }
  const std::string params =
      "d=" + std::to_string(d) + ",q=" + std::to_string(ctx->q());
  return make_check_report("duality_identity", params, err, 1e-9, bad == 0);
}

CheckReport check_slice_inequality(const FieldPtr& ctx, int d, int draws,
                                   std::uint64_t seed) {
  Rng rng(seed, stream_id(14, d, ctx->q()));
  double err = 0.0;
  long long bad = 0;
  for (int t = 0; t < draws; ++t) {
    const auto g = random_regular_function(ctx, d, rng);
    const Exponent r = t % 2 == 0 ? Exponent::of(2) : Exponent::of(4);
    for (const auto& rep : verify_slice_inequality(g, r)) {
      if (!rep.pass) ++bad;
      if (rep.check == "slice_inequality")
        err = std::max(err, std::max(0.0, rep.lhs - rep.rhs));
      else
        err = std::max(err, std::abs(rep.lhs - rep.rhs) / (1.0 + rep.lhs));
    }
  }
  const std::string params =
      "d=" + std::to_string(d) + ",q=" + std::to_string(ctx->q());
  return make_check_report("slice_inequality", params, err, 1e-9, bad == 0);
}

CheckReport check_l2_restriction_bounds(const FieldPtr& ctx, int d, int draws,
                                        std::uint64_t seed) {
  Rng rng(seed, stream_id(15, d, ctx->q()));
  double err = 0.0;
  long long bad = 0;
  for (int t = 0; t < draws; ++t) {
    const auto g = random_regular_function(ctx, d, rng);
    const auto reps = l2_restriction_bounds(g);
    for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
      if (!reps[i].pass) ++bad;
      err = std::max(err, std::max(0.0, reps[i].lhs - reps[i].rhs));
    }
  }
  const std::string params =
      "d=" + std::to_string(d) + ",q=" + std::to_string(ctx->q());
  return make_check_report("l2_restriction_bounds", params, err, 1e-9, bad == 0);
}

CheckReport check_decomposition(const FieldPtr& ctx, int d, int draws,
                                std::uint64_t seed) {
  Rng rng(seed, stream_id(16, d, ctx->q()));
  const long long total = grid_size_checked(ctx, d);
  const double count_cap =
      40.0 * (d * std::log2(static_cast<double>(ctx->q())) + 1.0);
  long long bad = 0;
  for (int t = 0; t < draws; ++t) {
    auto g = make_grid_function(ctx, d, Measure::Counting);
    for (auto& v : g.values)
      if (rng.uniform() >= 0.2)
        v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    if (lp_norm(g, std::numeric_limits<double>::infinity()) == 0.0)
      g.values[0] = 1.0;
    const auto dec = regular_decomposition(g, 40);
    if (static_cast<double>(dec.pieces.size()) > count_cap) ++bad;
    auto recon = dec.residual;
    for (const auto& piece : dec.pieces) {
      if (!is_regular(piece.func).regular) ++bad;
      for (std::size_t i = 0; i < recon.values.size(); ++i)
        recon.values[i] += piece.coefficient * piece.func.values[i];
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < recon.values.size(); ++i)
      diff = std::max(diff, std::abs(recon.values[i] - g.values[i]));
    if (diff > 1e-12 * dec.max_abs) ++bad;
    double res = 0.0;
    for (long long i = 0; i < total; ++i)
      res = std::max(res, std::abs(dec.residual.values[static_cast<std::size_t>(i)]));
    if (res > std::ldexp(dec.max_abs, -40) * (1.0 + 1e-12)) ++bad;
  }
  const std::string params =
      "d=" + std::to_string(d) + ",q=" + std::to_string(ctx->q());
  return make_check_report("decomposition", params, static_cast<double>(bad),
                           0.0, bad == 0);
}

// ---------------------------------------------------------------------------
// shared command plumbing

struct Cell {
  int d = 0;
  int q = 0;
  FieldPtr ctx;
};

std::vector<FieldPtr> build_fields(const ExperimentConfig& config) {
  if (!config.modulus.empty() && config.q_list.size() != 1)
    throw std::invalid_argument(
        "a modulus override applies to a single field size");
  std::vector<FieldPtr> fields;
  fields.reserve(config.q_list.size());
  for (int q : config.q_list) fields.push_back(make_field_for(q, config.modulus));
  return fields;
}

std::vector<Cell> build_cells(const ExperimentConfig& config) {
  if (config.d_list.empty() || config.q_list.empty())
    throw std::invalid_argument("no cases");
  const auto fields = build_fields(config);
  std::vector<Cell> cells;
  for (int d : config.d_list) {
    if (d < 2) throw std::invalid_argument("dimension must be >= 2");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      grid_size_checked(fields[i], d);
      cells.push_back(Cell{d, config.q_list[i], fields[i]});
    }
  }
  return cells;
}

}  // namespace

// ---------------------------------------------------------------------------
// config handling

ExperimentConfig default_config(const std::string& name) {
  ExperimentConfig config;
  config.name = name;
  if (name == "verify") {
    config.d_list = {2, 3, 4};
    config.q_list = {3, 5, 7};
  } else if (name == "scan") {
    config.d_list = {2};
    config.q_list = {3, 5, 7, 11, 13};
    config.r = Exponent::of(4);
  } else if (name == "witness") {
    config.d_list = {5};
    config.q_list = {3, 7, 11};
    config.r = Exponent::of(5, 2);
  } else if (name == "energy") {
    config.d_list = {2, 4};
    config.q_list = {3, 5};
  } else if (name == "report") {
    // Pure exponent arithmetic; no grid.
  } else {
    throw std::invalid_argument("unknown command: " + name);
  }
  return config;
}

ExperimentConfig parse_config(const std::string& ini_text) {
  ExperimentConfig config;
  bool have_section = false;
  std::istringstream in(ini_text);
  std::string line;
  while (std::getline(in, line)) {
    const auto s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw std::invalid_argument("bad section header: " + s);
      if (have_section)
        throw std::invalid_argument("config must hold a single section");
      config.name = trim(s.substr(1, s.size() - 2));
      if (config.name.empty())
        throw std::invalid_argument("empty section name");
      have_section = true;
      continue;
    }
    if (!have_section)
      throw std::invalid_argument("key before section header: " + s);
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad config line: " + s);
    const auto key = trim(s.substr(0, eq));
    const auto value = trim(s.substr(eq + 1));
    if (key == "d") config.d_list = parse_int_list(value);
    else if (key == "q") config.q_list = parse_int_list(value);
    else if (key == "modulus") config.modulus = parse_int_list(value);
    else if (key == "p") config.p = Exponent::parse(value);
    else if (key == "r") config.r = Exponent::parse(value);
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "restarts") config.restarts = std::stoi(value);
    else if (key == "trials") config.trials = std::stoi(value);
    else if (key == "max_iter") config.max_iter = std::stoi(value);
    else if (key == "tol") config.tol = std::stod(value);
    else if (key == "functions") config.functions = std::stoi(value);
    else if (key == "machinery_functions")
      config.machinery_functions = std::stoi(value);
    else if (key == "sizes") config.sizes = parse_ll_list(value);
    else if (key == "out") config.out = value;
    else if (key == "format") config.format = value;
    else if (key == "jobs") config.jobs = std::stoi(value);
    else if (key == "fault") config.fault = value;
    else throw std::invalid_argument("unknown config key: " + key);
  }
  if (!have_section) throw std::invalid_argument("missing section header");
  return config;
}

std::string emit_config(const ExperimentConfig& config) {
  std::string out;
  out += "[" + config.name + "]\n";
  out += "d = " + join_list(config.d_list) + "\n";
  out += "q = " + join_list(config.q_list) + "\n";
  out += "modulus = " + join_list(config.modulus) + "\n";
  out += "p = " + config.p.str() + "\n";
  out += "r = " + config.r.str() + "\n";
  out += "seed = " + std::to_string(config.seed) + "\n";
  out += "restarts = " + std::to_string(config.restarts) + "\n";
  out += "trials = " + std::to_string(config.trials) + "\n";
  out += "max_iter = " + std::to_string(config.max_iter) + "\n";
  out += "tol = " + fmt17(config.tol) + "\n";
  out += "functions = " + std::to_string(config.functions) + "\n";
  out += "machinery_functions = " + std::to_string(config.machinery_functions) + "\n";
  out += "sizes = " + join_list(config.sizes) + "\n";
  out += "out = " + config.out + "\n";
  out += "format = " + config.format + "\n";
  out += "jobs = " + std::to_string(config.jobs) + "\n";
  out += "fault = " + config.fault + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// commands

RunReport cmd_verify(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (!config.fault.empty() && config.fault != "gauss")
    throw std::invalid_argument("unknown fault: " + config.fault);
  const auto cells = build_cells(config);
  const auto fields = build_fields(config);
  std::vector<CheckReport> cases;

  for (const auto& ctx : fields) {
    const std::string params = "q=" + std::to_string(ctx->q());
    run_check(cases, "field_axioms", params,
              [&] { return check_field_axioms(ctx); });
  }
  for (const auto& ctx : fields) {
    const std::string params = "q=" + std::to_string(ctx->q());
    run_check(cases, "character_orthogonality", params,
              [&] { return check_character_orthogonality(ctx); });
  }
  for (const auto& ctx : fields) {
    const std::string params = "q=" + std::to_string(ctx->q());
    run_check(cases, "gauss_magnitude", params,
              [&] { return check_gauss_magnitude(ctx); });
  }

  std::vector<GeometryPtr> geoms;
  geoms.reserve(cells.size());
  for (const auto& cell : cells) geoms.push_back(build_paraboloid(cell.ctx, cell.d));

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string params =
        "d=" + std::to_string(cells[i].d) + ",q=" + std::to_string(cells[i].q);
    run_check(cases, "dsigma_explicit", params,
              [&] { return check_dsigma_explicit(geoms[i], config.fault); });
  }
  for (const auto& cell : cells)
    run_check(cases, "plancherel", "", [&] {
      return check_plancherel(cell.ctx, cell.d, config.functions, config.seed);
    });
  for (const auto& cell : cells)
    run_check(cases, "set_plancherel", "", [&] {
      return check_set_plancherel(cell.ctx, cell.d,
                                  std::max(1, config.machinery_functions / 2),
                                  config.seed);
    });
  for (const auto& cell : cells)
    run_check(cases, "convolution_theorem", "", [&] {
      return check_convolution_theorem(cell.ctx, cell.d, config.functions,
                                       config.seed);
    });
  for (const auto& cell : cells)
    run_check(cases, "inversion_roundtrip", "", [&] {
      return check_inversion_roundtrip(cell.ctx, cell.d, config.functions,
                                       config.seed);
    });
  for (std::size_t i = 0; i < cells.size(); ++i)
    run_check(cases, "surface_plancherel", "", [&] {
      return check_surface_plancherel(geoms[i], config.machinery_functions,
                                      config.seed);
    });
  for (std::size_t i = 0; i < cells.size(); ++i)
    run_check(cases, "extension_routes", "",
              [&] { return check_extension_routes(geoms[i], config.seed); });
  for (std::size_t i = 0; i < cells.size(); ++i)
    run_check(cases, "subspace_table", "",
              [&] { return check_subspace_table(geoms[i]); });
  for (std::size_t i = 0; i < cells.size(); ++i)
    run_check(cases, "energy_methods", "",
              [&] { return check_energy_methods(geoms[i], config.seed); });
  for (const auto& cell : cells) {
    if (cell.d > 3) continue;  // dense-convolution route; kept desk-scale
    run_check(cases, "duality_identity", "", [&] {
      return check_duality_identity(cell.ctx, cell.d,
                                    config.machinery_functions, config.seed);
    });
  }
  for (const auto& cell : cells) {
    if (cell.d > 3) continue;
    run_check(cases, "slice_inequality", "", [&] {
      return check_slice_inequality(cell.ctx, cell.d,
                                    config.machinery_functions, config.seed);
    });
  }
  for (const auto& cell : cells) {
    if (cell.d > 3) continue;
    run_check(cases, "l2_restriction_bounds", "", [&] {
      return check_l2_restriction_bounds(cell.ctx, cell.d,
                                         config.machinery_functions,
                                         config.seed);
    });
  }
  for (const auto& cell : cells)
    run_check(cases, "decomposition", "", [&] {
      return check_decomposition(cell.ctx, cell.d, config.machinery_functions,
                                 config.seed);
    });

  return seal_report(config, payload_frame(config), cases, start);
}

RunReport cmd_scan(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.d_list.empty() || config.q_list.empty())
    throw std::invalid_argument("no cases");
  if (config.q_list.size() < 3)
    throw std::invalid_argument("scan needs at least 3 field sizes");
  if (!config.modulus.empty())
    throw std::invalid_argument("scan does not accept a modulus override");
  ScanParams params;
  params.restarts = config.restarts;
  params.max_iter = config.max_iter;
  params.tol = config.tol;
  params.seed = config.seed;

  json payload = payload_frame(config);
  json scans = json::array();
  for (int d : config.d_list) {
    const auto rep = scaling_scan(d, config.p, config.r, config.q_list, params);
    json entry;
    entry["d"] = d;
    entry["p"] = config.p.str();
    entry["r"] = config.r.str();
    entry["slope"] = rep.slope;
    entry["intercept"] = rep.intercept;
    entry["residual"] = rep.residual;
    json points = json::array();
    json estimates = json::array();
    for (const auto& pt : rep.points) {
      points.push_back({json(pt.q), json(pt.value)});
      estimates.push_back(to_json(pt.estimate));
    }
    entry["points"] = points;
    entry["estimates"] = estimates;
    scans.push_back(entry);
  }
  payload["scans"] = scans;
  return seal_report(config, std::move(payload), {}, start);
}

RunReport cmd_witness(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto cells = build_cells(config);
  std::vector<CheckReport> cases;
  json points = json::array();
  json slopes = json::array();

  // Grouped by dimension: per-q ratio checks, then the growth-rate fit.
  for (int d : config.d_list) {
    std::vector<double> log_q, log_ratio, predicted_exponents;
    for (const auto& cell : cells) {
      if (cell.d != d) continue;
      const std::string base_params =
          "d=" + std::to_string(d) + ",q=" + std::to_string(cell.q);
      run_check(cases, "omega_witness", base_params, [&]() -> CheckReport {
        const auto geom = build_paraboloid(cell.ctx, d);
        const auto w = maximal_isotropic_subspace(cell.ctx, d);
        const int k = w.dim();
        const auto prof = exponent_profile(*cell.ctx, d);
        const Rat s = omega_witness_exponent(d, k, config.p, config.r);
        const double predicted =
            std::pow(static_cast<double>(cell.q), to_double(s));
        const double actual = omega_witness_ratio(geom, config.p, config.r);
        const std::string params = base_params + ",k=" + std::to_string(k) +
                                   ",class=" + field_class_name(prof.cls);
        json pt;
        pt["d"] = d;
        pt["q"] = cell.q;
        pt["k"] = k;
        pt["class"] = field_class_name(prof.cls);
        pt["exponent"] = to_string(s);
        pt["actual"] = actual;
        pt["predicted"] = predicted;
        points.push_back(pt);
        log_q.push_back(std::log(static_cast<double>(cell.q)));
        log_ratio.push_back(std::log(actual));
        predicted_exponents.push_back(to_double(s));
        return make_check_report(
            "omega_witness", params, actual, predicted,
            std::abs(actual - predicted) <= 1e-9 * (1.0 + predicted));
      });
    }
    if (log_q.size() < 2) continue;
    const auto fit = fit_line(log_q, log_ratio);
    double mean = 0.0;
    for (double s : predicted_exponents) mean += s;
    mean /= static_cast<double>(predicted_exponents.size());
    const std::string params = "d=" + std::to_string(d) +
                               ",points=" + std::to_string(log_q.size());
    cases.push_back(make_check_report("witness_slope", params, fit.slope, mean,
                                      std::abs(fit.slope - mean) <= 0.05));
    json sj;
    sj["d"] = d;
    sj["slope"] = fit.slope;
    sj["predicted_slope"] = mean;
    sj["intercept"] = fit.intercept;
    sj["residual"] = fit.residual;
    slopes.push_back(sj);
  }

  json payload = payload_frame(config);
  payload["witness_points"] = points;
  payload["slopes"] = slopes;
  return seal_report(config, std::move(payload), cases, start);
}

RunReport cmd_energy(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto cells = build_cells(config);
  std::vector<CheckReport> cases;
  json case_details = json::array();
  std::map<std::string, double> max_ratios;

  auto record = [&](const CheckReport& rep, const EnergyReport& energy,
                    const std::vector<long long>& members) {
    cases.push_back(rep);
    json c = to_json(rep);
    c["energy"] = to_json(energy);
    c["members"] = members;
    case_details.push_back(c);
    const double ratio = energy.corollary_applicable
                             ? energy.ratio_corollary
                             : (energy.mixed_bound > 0.0 ? energy.ratio_mixed
                                                         : energy.ratio_cube);
    auto it = max_ratios.find(regime_name(energy.regime));
    if (it == max_ratios.end() || it->second < ratio)
      max_ratios[regime_name(energy.regime)] = ratio;
  };

  for (const auto& cell : cells) {
    const auto geom = build_paraboloid(cell.ctx, cell.d);
    std::vector<long long> sizes = config.sizes;
    if (sizes.empty()) {
      const long long cap = std::min<long long>(
          geom->size(), static_cast<long long>(cell.q) * cell.q * cell.q);
      for (long long s = cell.q; s <= cap; s *= cell.q) sizes.push_back(s);
    }
    for (long long size : sizes) {
      if (size < 1 || size > geom->size())
        throw std::invalid_argument("subset size outside the surface");
      const std::string params = "d=" + std::to_string(cell.d) +
                                 ",q=" + std::to_string(cell.q) +
                                 ",size=" + std::to_string(size);
      try {
        const std::uint64_t cell_seed =
            config.seed + 0x9e3779b97f4a7c15ULL *
                              ((static_cast<std::uint64_t>(cell.d) << 32) ^
                               (static_cast<std::uint64_t>(cell.q) << 16) ^
                               static_cast<std::uint64_t>(size));
        const auto res =
            energy_extremizer_search(geom, size, config.trials, cell_seed);
        double lhs, rhs;
        bool pass = res.report.ratio_cube <= 1.0 + 1e-12;
        if (res.report.corollary_applicable) {
          lhs = res.report.ratio_corollary;
          rhs = 8.0;
          pass = pass && lhs <= rhs;
        } else {
          lhs = res.report.ratio_cube;
          rhs = 1.0;
          pass = pass && lhs <= rhs + 1e-12;
        }
        record(make_check_report("energy_bounds", params, lhs, rhs, pass),
               res.report, res.set.members);
      } catch (const consistency_error& e) {
        const auto rep = make_check_report(
            "energy_bounds", params + " error=" + e.what(), 1.0, 0.0, false);
        cases.push_back(rep);
        case_details.push_back(to_json(rep));
      }
    }
  }

  // Closed-form anchors: the full parabola in the plane and the embedded
  // isotropic subgroup, both with exactly computable energies.
  bool has_d2 = false;
  for (int d : config.d_list) has_d2 = has_d2 || d == 2;
  if (has_d2) {
    const auto fields = build_fields(config);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& ctx = fields[i];
      const int q = ctx->q();
      const std::string params = "d=2,q=" + std::to_string(q);
      try {
        const auto geom = build_paraboloid(ctx, 2);
        std::vector<long long> members(static_cast<std::size_t>(geom->size()));
        for (std::size_t m = 0; m < members.size(); ++m)
          members[m] = static_cast<long long>(m);
        const auto subset = make_point_subset(geom, members);
        const long long lam = additive_energy(subset, EnergyMethod::Convolution);
        const long long lam2 = additive_energy(subset, EnergyMethod::Quadruple);
        const long long want = 2LL * q * q - q;
        record(make_check_report(
                   "energy_full_parabola",
                   params + ",size=" + std::to_string(geom->size()),
                   static_cast<double>(lam), static_cast<double>(want),
                   lam == want && lam == lam2),
               energy_bound_report(subset), subset.members);
      } catch (const consistency_error& e) {
        const auto rep = make_check_report(
            "energy_full_parabola", params + " error=" + e.what(), 1.0, 0.0,
            false);
        cases.push_back(rep);
        case_details.push_back(to_json(rep));
      }
    }
  }
  try {
    const auto ctx = FieldContext::make(3);
    const auto geom = build_paraboloid(ctx, 5);
    const auto w = maximal_isotropic_subspace(ctx, 5);
    const auto subset = make_point_subset(geom, subspace_in_paraboloid(w));
    const long long lam = additive_energy(subset, EnergyMethod::Convolution);
    const long long lam2 = additive_energy(subset, EnergyMethod::Quadruple);
    const long long n = subset.size();
    const long long want = n * n * n;
    const std::string params = "d=5,q=3,size=" + std::to_string(n);
    record(make_check_report("energy_omega_cubed", params,
                             static_cast<double>(lam),
                             static_cast<double>(want),
                             lam == want && lam == lam2),
           energy_bound_report(subset), subset.members);
  } catch (const consistency_error& e) {
    const auto rep = make_check_report(
        "energy_omega_cubed", std::string("d=5,q=3 error=") + e.what(), 1.0,
        0.0, false);
    cases.push_back(rep);
    case_details.push_back(to_json(rep));
  }

  json payload = payload_frame(config);
  payload["cases"] = case_details;
  json mr;
  for (const auto& [name, ratio] : max_ratios) mr[name] = ratio;
  payload["max_ratios"] = mr;
  return seal_report(config, std::move(payload), cases, start);
}

namespace {

struct TableRow {
  std::string setting;
  std::string p;
  std::string r;
  std::string status;
  std::string source;
};

std::vector<TableRow> low_dimension_rows() {
  const std::string d3sq = "d=3, -1 a square";
  const std::string d3pr = "d=3, -1 not a square, q prime";
  const std::string d3np = "d=3, -1 not a square, q non-prime";
  const std::string d3_prime_endpoint = "> " + to_string(Rat{18, 5} - Rat{1, 1035});
  return {
      {"d=2, general q", "2", "4", "S-T, solution", "MT04"},
      {d3sq, "2", "4", "S-T, sharp", "MT04"},
      {d3sq, "9/4", "18/5", "sharp", "Le14"},
      {d3sq, "(18-5e)/(8-5e)", "18/5 - e", "sharp, some e > 0", "Le14"},
      {d3sq, "3", "3", "conjectured", "conjectured"},
      {d3pr, "2", "> 18/5", "open endpoint", "MT04"},
      {d3pr, "> 8/5", "4", "open endpoint", "MT04"},
      {d3pr, "2", "18/5", "", "LL10"},
      {d3pr, "8/5", "4", "sharp", "LL10"},
      {d3pr, "2", d3_prime_endpoint, "open endpoint", "LL13"},
      {d3pr, "2", "3", "conjectured", "conjectured"},
      {d3np, "2", "18/5 - e", "some e > 0", "LL13"},
      {d3np, "2", "3", "conjectured", "conjectured"},
  };
}

std::vector<TableRow> high_dimension_rows() {
  const std::string even = "d >= 4 even";
  const std::string osq = "d >= 5 odd, -1 a square";
  const std::string d1 = "d = 4l+1, -1 not a square";
  const std::string d3 = "d = 4l+3, -1 not a square";
  return {
      {even, "2", "(2d+2)/(d-1)", "S-T", "MT04"},
      {even, "2", "> 2d^2/(d^2-2d+2)", "open endpoint", "IK09"},
      {even, "> 4d/(3d-2)", "4", "open endpoint", "IK09"},
      {even, "2", "2d^2/(d^2-2d+2)", "", "LL10"},
      {even, "4d/(3d-2)", "4", "sharp", "LL10"},
      {even, "2", "> (6d+8)/(3d-2)", "open endpoint", "bootstrap"},
      {even, "2d^2/(d^2-d+2)", "2d/(d-1)", "conjectured", "conjectured"},
      {even, "2", "(2d+4)/d", "conjectured best r at p=2", "conjectured"},
      {osq, "2", "(2d+2)/(d-1)", "S-T, sharp", "MT04"},
      {osq, "(2d+2)/(d-1)", "(2d+2)/(d-1) - e_d", "some e_d > 0", "Le14"},
      {osq, "2d/(d-1)", "2d/(d-1)", "conjectured", "conjectured"},
      {d1, "2", "(2d+2)/(d-1)", "S-T, sharp", "MT04"},
      {d1, "2d/(d-1)", "2d/(d-1)", "conjectured", "conjectured"},
      {d3, "2", "(2d+2)/(d-1)", "S-T", "MT04"},
      {d3, "2", "> 2d^2/(d^2-2d+2)", "open endpoint", "IK09"},
      {d3, "> 4d/(3d-2)", "4", "open endpoint", "IK09"},
      {d3, "2", "2d^2/(d^2-2d+2)", "", "LL10"},
      {d3, "4d/(3d-2)", "4", "", "LL10"},
      {d3, "2", "> (6d+10)/(3d-1)", "open endpoint", "bootstrap"},
      {d3, "(2d^2+2d)/(d^2+3)", "2d/(d-1)", "conjectured", "conjectured"},
      {d3, "2", "(2d+6)/(d+1)", "conjectured best r at p=2", "conjectured"},
  };
}

struct ProfileSetting {
  std::string setting;
  int d = 0;
  bool minus_one_square = false;
  bool prime_field = true;
};

std::vector<ProfileSetting> profile_settings() {
  std::vector<ProfileSetting> out;
  for (int d = 2; d <= 11; ++d) {
    if (d % 2 == 0) {
      out.push_back({"d=" + std::to_string(d), d, false, true});
      continue;
    }
    out.push_back({"d=" + std::to_string(d) + ", -1 a square", d, true, true});
    if (d == 3) {
      out.push_back({"d=3, -1 not a square, q prime", d, false, true});
      out.push_back({"d=3, -1 not a square, q non-prime", d, false, false});
    } else {
      out.push_back(
          {"d=" + std::to_string(d) + ", -1 not a square", d, false, true});
    }
  }
  return out;
}

CheckReport check_table_consistency() {
  long long bad = 0;
  auto expect = [&bad](bool ok) {
    if (!ok) ++bad;
  };
  for (int d : {4, 6, 8, 10}) {
    const auto prof = exponent_profile(d, false, true);
    expect(prof.cls == FieldClass::EvenD);
    expect(prof.stein_tomas_r == Rat{2 * d + 2, d - 1});
    expect(prof.conjectured_r == Rat{2 * d + 4, d});
    expect(prof.corner_inv_p == Rat{d * d - d + 2, 2 * d * d});
    expect(prof.corner_inv_r == Rat{d - 1, 2 * d});
    if (d == 4) {
      expect(prof.best_known_r == Rat{16, 5} && !prof.best_known_open &&
             prof.best_known_source == "LL10");
    } else {
      expect(prof.best_known_r == Rat{6 * d + 8, 3 * d - 2} &&
             prof.best_known_open && prof.best_known_source == "bootstrap");
      expect(Rat{6 * d + 8, 3 * d - 2} < Rat{2 * d * d, d * d - 2 * d + 2});
    }
  }
  for (int d : {7, 11}) {
    const auto prof = exponent_profile(d, false, true);
    expect(prof.cls == FieldClass::D3Mod4MinusNonSquare);
    expect(prof.conjectured_r == Rat{2 * d + 6, d + 1});
    expect(prof.corner_inv_p == Rat{d * d + 3, 2 * d * d + 2 * d});
    expect(prof.corner_inv_r == Rat{d - 1, 2 * d});
    expect(prof.best_known_r == Rat{6 * d + 10, 3 * d - 1} &&
           prof.best_known_open && prof.best_known_source == "bootstrap");
    expect(Rat{6 * d + 10, 3 * d - 1} < Rat{2 * d * d, d * d - 2 * d + 2});
  }
  for (int d : {5, 9}) {
    for (bool sq : {true, false}) {
      const auto prof = exponent_profile(d, sq, true);
      expect(prof.best_known_r == prof.stein_tomas_r && prof.stein_tomas_sharp &&
             prof.solved);
      expect(prof.conjectured_r == Rat{2 * d + 2, d - 1});
      expect(prof.corner_inv_p == Rat{d - 1, 2 * d});
      expect(prof.corner_inv_r == Rat{d - 1, 2 * d});
    }
  }
  {
    const auto prof = exponent_profile(2, false, true);
    expect(prof.best_known_r == Rat{4} && prof.solved &&
           prof.best_known_source == "MT04");
    expect(prof.conjectured_r == Rat{4});
  }
  {
    const auto sq = exponent_profile(3, true, true);
    expect(sq.best_known_r == sq.stein_tomas_r && sq.stein_tomas_sharp &&
           sq.solved);
    const auto pr = exponent_profile(3, false, true);
    expect(pr.best_known_r == Rat{745, 207} &&
           pr.best_known_r == Rat{18, 5} - Rat{1, 1035} && pr.best_known_open &&
           pr.best_known_source == "LL13");
    expect(pr.conjectured_r == Rat{3});
    const auto np = exponent_profile(3, false, false);
    expect(np.best_known_r == Rat{18, 5} && np.best_known_open &&
           np.best_known_source == "LL13");
    expect(np.conjectured_r == Rat{3});
  }
  return make_check_report("table_consistency", "d=2..11",
                           static_cast<double>(bad), 0.0, bad == 0);
}

}  // namespace

RunReport cmd_report(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<CheckReport> cases;
  run_check(cases, "table_consistency", "d=2..11",
            [] { return check_table_consistency(); });

  json payload = payload_frame(config);
  auto rows_json = [](const std::vector<TableRow>& rows) {
    json arr = json::array();
    for (const auto& row : rows) {
      json r;
      r["setting"] = row.setting;
      r["p"] = row.p;
      r["r"] = row.r;
      r["status"] = row.status;
      r["source"] = row.source;
      arr.push_back(r);
    }
    return arr;
  };
  payload["tables"]["low"] = rows_json(low_dimension_rows());
  payload["tables"]["high"] = rows_json(high_dimension_rows());
  json profiles = json::array();
  for (const auto& setting : profile_settings()) {
    json p = to_json(
        exponent_profile(setting.d, setting.minus_one_square, setting.prime_field));
    p["setting"] = setting.setting;
    profiles.push_back(p);
  }
  payload["profiles"] = profiles;
  return seal_report(config, std::move(payload), cases, start);
}

RunReport run_command(const ExperimentConfig& config) {
  if (config.name == "verify") return cmd_verify(config);
  if (config.name == "scan") return cmd_scan(config);
  if (config.name == "witness") return cmd_witness(config);
  if (config.name == "energy") return cmd_energy(config);
  if (config.name == "report") return cmd_report(config);
  throw std::invalid_argument("unknown command: " + config.name);
}

json strip_timing(json payload) {
  payload.erase("timing");
  return payload;
}

std::string default_format(const std::string& command) {
  if (command == "scan") return "csv";
  if (command == "report") return "markdown";
  return "json";
}

// ---------------------------------------------------------------------------
// rendering

namespace {

std::string cases_csv(const json& payload) {
  std::string out = "check,params,lhs,rhs,ratio,pass\n";
  for (const auto& c : payload.at("cases")) {
    out += csv_escape(c.at("check").get<std::string>()) + ',';
    out += csv_escape(c.at("params").get<std::string>()) + ',';
    out += fmt17(c.at("lhs").get<double>()) + ',';
    out += fmt17(c.at("rhs").get<double>()) + ',';
    out += fmt17(c.at("ratio").get<double>()) + ',';
    out += c.at("pass").get<bool>() ? "1" : "0";
    out += '\n';
  }
  return out;
}

std::string cases_markdown(const json& payload, const std::string& command) {
  std::string out = "# " + command + "\n\n";
  out += md_row({"check", "params", "lhs", "rhs", "ratio", "pass"}) + "\n";
  out += md_sep(6) + "\n";
  for (const auto& c : payload.at("cases")) {
    out += md_row({c.at("check").get<std::string>(),
                   c.at("params").get<std::string>(),
                   fmt6(c.at("lhs").get<double>()),
                   fmt6(c.at("rhs").get<double>()),
                   fmt6(c.at("ratio").get<double>()),
                   c.at("pass").get<bool>() ? "yes" : "no"}) +
           "\n";
  }
  return out;
}

std::string scan_csv(const json& payload) {
  std::string out = norm_estimate_csv_header() + "\n";
  for (const auto& scan : payload.at("scans"))
    for (const auto& est : scan.at("estimates")) {
      out += std::to_string(est.at("d").get<int>()) + ',';
      out += std::to_string(est.at("q").get<int>()) + ',';
      out += std::to_string(est.at("p_num").get<long long>()) + ',';
      out += std::to_string(est.at("p_den").get<long long>()) + ',';
      out += std::to_string(est.at("r_num").get<long long>()) + ',';
      out += std::to_string(est.at("r_den").get<long long>()) + ',';
      out += fmt17(est.at("value").get<double>()) + ',';
      out += est.at("method").get<std::string>() + ',';
      out += std::to_string(est.at("restarts").get<int>()) + ',';
      out += std::to_string(est.at("iterations").get<int>()) + ',';
      out += est.at("converged").get<bool>() ? "1" : "0";
      out += ',' + std::to_string(est.at("seed").get<std::uint64_t>());
      out += '\n';
    }
  out += "\nd,p,r,slope,intercept,residual\n";
  for (const auto& scan : payload.at("scans")) {
    out += std::to_string(scan.at("d").get<int>()) + ',';
    out += csv_escape(scan.at("p").get<std::string>()) + ',';
    out += csv_escape(scan.at("r").get<std::string>()) + ',';
    out += fmt17(scan.at("slope").get<double>()) + ',';
    out += fmt17(scan.at("intercept").get<double>()) + ',';
    out += fmt17(scan.at("residual").get<double>());
    out += '\n';
  }
  return out;
}

std::string scan_markdown(const json& payload) {
  std::string out = "# scan\n\n";
  out += md_row({"d", "p", "r", "slope", "intercept", "residual"}) + "\n";
  out += md_sep(6) + "\n";
  for (const auto& scan : payload.at("scans"))
    out += md_row({std::to_string(scan.at("d").get<int>()),
                   scan.at("p").get<std::string>(),
                   scan.at("r").get<std::string>(),
                   fmt6(scan.at("slope").get<double>()),
                   fmt6(scan.at("intercept").get<double>()),
                   fmt6(scan.at("residual").get<double>())}) +
           "\n";
  out += "\n## estimates\n\n";
  out += md_row({"d", "q", "p", "r", "value", "method", "iterations",
                 "converged"}) +
         "\n";
  out += md_sep(8) + "\n";
  for (const auto& scan : payload.at("scans"))
    for (const auto& est : scan.at("estimates"))
      out += md_row({std::to_string(est.at("d").get<int>()),
                     std::to_string(est.at("q").get<int>()),
                     est.at("p").get<std::string>(),
                     est.at("r").get<std::string>(),
                     fmt6(est.at("value").get<double>()),
                     est.at("method").get<std::string>(),
                     std::to_string(est.at("iterations").get<int>()),
                     est.at("converged").get<bool>() ? "yes" : "no"}) +
             "\n";
  return out;
}

std::string witness_csv(const json& payload) {
  std::string out = "d,q,k,class,exponent,actual,predicted\n";
  for (const auto& pt : payload.at("witness_points")) {
    out += std::to_string(pt.at("d").get<int>()) + ',';
    out += std::to_string(pt.at("q").get<int>()) + ',';
    out += std::to_string(pt.at("k").get<int>()) + ',';
    out += csv_escape(pt.at("class").get<std::string>()) + ',';
    out += csv_escape(pt.at("exponent").get<std::string>()) + ',';
    out += fmt17(pt.at("actual").get<double>()) + ',';
    out += fmt17(pt.at("predicted").get<double>());
    out += '\n';
  }
  out += "\nd,slope,predicted_slope,intercept,residual\n";
  for (const auto& sj : payload.at("slopes")) {
    out += std::to_string(sj.at("d").get<int>()) + ',';
    out += fmt17(sj.at("slope").get<double>()) + ',';
    out += fmt17(sj.at("predicted_slope").get<double>()) + ',';
    out += fmt17(sj.at("intercept").get<double>()) + ',';
    out += fmt17(sj.at("residual").get<double>());
    out += '\n';
  }
  return out;
}

std::string energy_csv(const json& payload) {
  std::string out = "d,q,size,energy,cube,mixed,corollary,regime,in_window\n";
  for (const auto& c : payload.at("cases")) {
    const auto& e = c.at("energy");
    out += std::to_string(e.at("d").get<int>()) + ',';
    out += std::to_string(e.at("q").get<int>()) + ',';
    out += std::to_string(e.at("size").get<long long>()) + ',';
    out += std::to_string(e.at("energy").get<long long>()) + ',';
    out += fmt17(e.at("bounds").at("cube").get<double>()) + ',';
    out += fmt17(e.at("bounds").at("mixed").get<double>()) + ',';
    const auto& cor = e.at("bounds").at("corollary");
    out += (cor.is_null() ? std::string() : fmt17(cor.get<double>())) + ',';
    out += e.at("regime").get<std::string>() + ',';
    out += e.at("in_window").get<bool>() ? "1" : "0";
    out += '\n';
  }
  return out;
}

std::string report_markdown(const json& payload) {
  std::string out = "# Extension exponents for paraboloids\n\n";
  auto table = [&out](const json& rows) {
    out += md_row({"setting", "p", "r", "status", "source"}) + "\n";
    out += md_sep(5) + "\n";
    for (const auto& row : rows)
      out += md_row({row.at("setting").get<std::string>(),
                     row.at("p").get<std::string>(),
                     row.at("r").get<std::string>(),
                     row.at("status").get<std::string>(),
                     row.at("source").get<std::string>()}) +
             "\n";
  };
  out += "## Low dimensions\n\n";
  table(payload.at("tables").at("low"));
  out += "\n## Higher dimensions\n\n";
  table(payload.at("tables").at("high"));
  out += "\n## Profiles by dimension\n\n";
  out += md_row({"setting", "class", "1/p corner", "1/r corner",
                 "conjectured r", "classical r", "best known r", "open",
                 "solved", "source"}) +
         "\n";
  out += md_sep(10) + "\n";
  for (const auto& p : payload.at("profiles"))
    out += md_row({p.at("setting").get<std::string>(),
                   p.at("class").get<std::string>(),
                   p.at("corner_inv_p").get<std::string>(),
                   p.at("corner_inv_r").get<std::string>(),
                   p.at("conjectured_r").get<std::string>(),
                   p.at("stein_tomas_r").get<std::string>(),
                   p.at("best_known_r").get<std::string>(),
                   p.at("best_known_open").get<bool>() ? "yes" : "no",
                   p.at("solved").get<bool>() ? "yes" : "no",
                   p.at("best_known_source").get<std::string>()}) +
           "\n";
  return out;
}

std::string report_csv(const json& payload) {
  std::string out = "table,setting,p,r,status,source\n";
  auto rows = [&out](const char* name, const json& arr) {
    for (const auto& row : arr) {
      out += std::string(name) + ',';
      out += csv_escape(row.at("setting").get<std::string>()) + ',';
      out += csv_escape(row.at("p").get<std::string>()) + ',';
      out += csv_escape(row.at("r").get<std::string>()) + ',';
      out += csv_escape(row.at("status").get<std::string>()) + ',';
      out += csv_escape(row.at("source").get<std::string>());
      out += '\n';
    }
  };
  rows("low", payload.at("tables").at("low"));
  rows("high", payload.at("tables").at("high"));
  out += "\nsetting,class,corner_inv_p,corner_inv_r,conjectured_r,"
         "stein_tomas_r,best_known_r,open,solved,source\n";
  for (const auto& p : payload.at("profiles")) {
    out += csv_escape(p.at("setting").get<std::string>()) + ',';
    out += csv_escape(p.at("class").get<std::string>()) + ',';
    out += csv_escape(p.at("corner_inv_p").get<std::string>()) + ',';
    out += csv_escape(p.at("corner_inv_r").get<std::string>()) + ',';
    out += csv_escape(p.at("conjectured_r").get<std::string>()) + ',';
    out += csv_escape(p.at("stein_tomas_r").get<std::string>()) + ',';
    out += csv_escape(p.at("best_known_r").get<std::string>()) + ',';
    out += p.at("best_known_open").get<bool>() ? "1," : "0,";
    out += p.at("solved").get<bool>() ? "1," : "0,";
    out += csv_escape(p.at("best_known_source").get<std::string>());
    out += '\n';
  }
  return out;
}

}  // namespace

std::string render_output(const RunReport& report, const std::string& format) {
  const std::string fmt = format.empty() ? default_format(report.command) : format;
  if (fmt == "json") return report.payload.dump(2) + "\n";
  if (fmt == "csv") {
    if (report.command == "scan") return scan_csv(report.payload);
    if (report.command == "witness") return witness_csv(report.payload);
    if (report.command == "energy") return energy_csv(report.payload);
    if (report.command == "report") return report_csv(report.payload);
    return cases_csv(report.payload);
  }
  if (fmt == "markdown") {
    if (report.command == "scan") return scan_markdown(report.payload);
    if (report.command == "report") return report_markdown(report.payload);
    return cases_markdown(report.payload, report.command);
  }
  throw std::invalid_argument("unknown format: " + fmt);
}

// ---------------------------------------------------------------------------
// CLI

int cli_main(int argc, char** argv) {
  CLI::App app{"paraboloid extension experiment driver"};
  app.require_subcommand(1);

  std::string config_path, out_flag, format_flag;
  std::uint64_t seed_flag = 0;
  long long cap_flag = 0;
  int jobs_flag = 1;

  const char* names[] = {"verify", "scan", "witness", "energy", "report"};
  const char* blurbs[] = {
      "run every exact-identity suite across the (d, q) grid",
      "fit norm growth against the field size",
      "compare subspace-witness ratios with the predicted exponent",
      "search energy extremizers and test the bounds",
      "regenerate the exponent tables",
  };
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--config", config_path, "INI config file");
    sub->add_option("--seed", seed_flag, "override the seed");
    sub->add_option("--out", out_flag, "write the rendered output here");
    sub->add_option("--format", format_flag, "csv, json, or markdown");
    sub->add_option("--jobs", jobs_flag, "worker count (currently serial)");
    sub->add_option("--grid-cap", cap_flag, "maximum grid point count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    ExperimentConfig config;
    if (sub->count("--config")) {
      std::ifstream in(config_path);
      if (!in)
        throw std::invalid_argument("cannot open config: " + config_path);
      std::stringstream buffer;
      buffer << in.rdbuf();
      config = parse_config(buffer.str());
      if (config.name != name)
        throw std::invalid_argument("config section '" + config.name +
                                    "' does not match subcommand '" + name +
                                    "'");
    } else {
      config = default_config(name);
    }
    if (sub->count("--seed")) config.seed = seed_flag;
    if (sub->count("--out")) config.out = out_flag;
    if (sub->count("--format")) config.format = format_flag;
    if (sub->count("--jobs")) config.jobs = jobs_flag;
    if (config.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (sub->count("--grid-cap")) set_grid_cap(cap_flag);

    const RunReport report = run_command(config);
    const std::string text = render_output(report, config.format);
    if (config.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(config.out);
      if (!out)
        throw std::invalid_argument("cannot open output: " + config.out);
      out << text;
    }
    std::fprintf(stderr, "%s: %s (%.2f s)\n", name.c_str(),
                 report.all_pass ? "pass" : "FAIL", report.wall_seconds);
    return report.all_pass ? 0 : 1;
  } catch (const consistency_error& e) {
    std::fprintf(stderr, "check failed: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace ffext
