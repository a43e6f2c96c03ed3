#include "ffext/serialize.hpp"

#include <cstdio>
#include <stdexcept>

namespace ffext {
namespace {

json field_block(const FieldPtr& ctx) {
  json j;
  j["q"] = ctx->q();
  j["p"] = ctx->p();
  j["n"] = ctx->n();
  j["modulus"] = ctx->modulus();
  return j;
}

json values_block(const std::vector<cplx>& values) {
  json arr = json::array();
  for (const auto& v : values) arr.push_back({v.real(), v.imag()});
  return arr;
}

std::vector<cplx> values_from(const json& arr) {
  std::vector<cplx> out;
  out.reserve(arr.size());
  for (const auto& e : arr)
    out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return out;
}

FieldPtr field_from(const json& j) {
  return FieldContext::make(j.at("p").get<int>(), j.at("n").get<int>(),
                            j.at("modulus").get<std::vector<int>>());
}

}  // namespace

json to_json(const GridFunction& g) {
  json j = field_block(g.ctx);
  j["d"] = g.d;
  j["measure"] =
      g.measure == Measure::Counting ? "counting" : "normalized";
  j["values"] = values_block(g.values);
  return j;
}

GridFunction grid_function_from_json(const json& j) {
  const auto measure_name = j.at("measure").get<std::string>();
  Measure measure;
  if (measure_name == "counting") {
    measure = Measure::Counting;
  } else if (measure_name == "normalized") {
    measure = Measure::Normalized;
  } else {
    throw std::invalid_argument("unknown measure: " + measure_name);
  }
  auto g = make_grid_function(field_from(j), j.at("d").get<int>(), measure);
  auto values = values_from(j.at("values"));
  if (values.size() != g.values.size())
    throw std::invalid_argument("value count does not match the grid");
  g.values = std::move(values);
  return g;
}

json to_json(const SurfaceFunction& f) {
  json j = field_block(f.geom->ctx);
  j["d"] = f.geom->d;
  j["surface"] = true;
  j["values"] = values_block(f.values);
  return j;
}

SurfaceFunction surface_function_from_json(const json& j) {
  if (!j.value("surface", false))
    throw std::invalid_argument("missing surface marker");
  auto geom = build_paraboloid(field_from(j), j.at("d").get<int>());
  auto f = make_surface_function(geom);
  auto values = values_from(j.at("values"));
  if (values.size() != f.values.size())
    throw std::invalid_argument("value count does not match the surface");
  f.values = std::move(values);
  return f;
}

json to_json(const EnergyReport& rep) {
  json j;
  j["d"] = rep.d;
  j["q"] = rep.q;
  j["size"] = rep.size;
  j["energy"] = rep.energy;
  j["bounds"]["cube"] = rep.cube_bound;
  j["bounds"]["mixed"] = rep.mixed_bound;
  if (rep.corollary_applicable)
    j["bounds"]["corollary"] = rep.corollary_bound;
  else
    j["bounds"]["corollary"] = nullptr;
  j["ratios"]["cube"] = rep.ratio_cube;
  j["ratios"]["mixed"] = rep.ratio_mixed;
  if (rep.corollary_applicable)
    j["ratios"]["corollary"] = rep.ratio_corollary;
  else
    j["ratios"]["corollary"] = nullptr;
  j["regime"] = regime_name(rep.regime);
  j["in_window"] = rep.in_window;
  j["corollary_applicable"] = rep.corollary_applicable;
  return j;
}

json to_json(const CheckReport& rep) {
  json j;
  j["check"] = rep.check;
  j["params"] = rep.params;
  j["lhs"] = rep.lhs;
  j["rhs"] = rep.rhs;
  j["ratio"] = rep.ratio;
  j["pass"] = rep.pass;
  return j;
}

json to_json(const SlopeReport& rep) {
  json j;
  json pts = json::array();
  for (const auto& pt : rep.points) pts.push_back({json(pt.q), json(pt.value)});
  j["points"] = pts;
  j["slope"] = rep.slope;
  j["intercept"] = rep.intercept;
  j["residual"] = rep.residual;
  return j;
}

std::string method_name(NormMethod method) {
  switch (method) {
    case NormMethod::Exact22: return "exact22";
    case NormMethod::Ascent: return "ascent";
    case NormMethod::IndicatorSweep: return "sweep";
    case NormMethod::ConstantFunction: return "constant";
  }
  throw std::logic_error("unknown method");
}

std::string regime_name(EnergyRegime regime) {
  switch (regime) {
    case EnergyRegime::None: return "none";
    case EnergyRegime::EvenD: return "even_d";
    case EnergyRegime::D3Mod4NonSquare: return "d3mod4_nonsquare";
  }
  throw std::logic_error("unknown regime");
}

std::string field_class_name(FieldClass cls) {
  switch (cls) {
    case FieldClass::EvenD: return "even_d";
    case FieldClass::D3Mod4MinusNonSquare: return "d3mod4_minus_nonsquare";
    case FieldClass::D1Mod4: return "d1mod4";
    case FieldClass::OddDMinusSquare: return "odd_d_minus_square";
  }
  throw std::logic_error("unknown field class");
}

std::string norm_estimate_csv_header() {
  return "d,q,p_num,p_den,r_num,r_den,value,method,restarts,iterations,"
         "converged,seed";
}

std::string to_csv_row(const NormEstimate& est) {
  char value_buf[32];
  std::snprintf(value_buf, sizeof(value_buf), "%.17g", est.value);
  std::string row;
  row += std::to_string(est.d) + ',' + std::to_string(est.q) + ',';
  row += std::to_string(est.p.num()) + ',' + std::to_string(est.p.den()) + ',';
  row += std::to_string(est.r.num()) + ',' + std::to_string(est.r.den()) + ',';
  row += value_buf;
  row += ',' + method_name(est.method) + ',' + std::to_string(est.restarts) +
         ',' + std::to_string(est.iterations) + ',' +
         (est.converged ? "1" : "0") + ',' + std::to_string(est.seed);
  return row;
}

json to_json(const NormEstimate& est, bool add_witness) {
  json j;
  j["d"] = est.d;
  j["q"] = est.q;
  j["p"] = est.p.str();
  j["r"] = est.r.str();
  j["p_num"] = est.p.num();
  j["p_den"] = est.p.den();
  j["r_num"] = est.r.num();
  j["r_den"] = est.r.den();
  j["value"] = est.value;
  j["method"] = method_name(est.method);
  j["restarts"] = est.restarts;
  j["iterations"] = est.iterations;
  j["converged"] = est.converged;
  j["dual_gap"] = est.dual_gap;
  j["seed"] = est.seed;
  if (add_witness)
    j["witness"] = est.witness.geom ? to_json(est.witness) : json(nullptr);
  return j;
}

json to_json(const ExponentProfile& prof) {
  json j;
  j["d"] = prof.d;
  j["class"] = field_class_name(prof.cls);
  j["corner_inv_p"] = to_string(prof.corner_inv_p);
  j["corner_inv_r"] = to_string(prof.corner_inv_r);
  j["conjectured_r"] = to_string(prof.conjectured_r);
  j["stein_tomas_r"] = to_string(prof.stein_tomas_r);
  j["best_known_r"] = to_string(prof.best_known_r);
  j["best_known_open"] = prof.best_known_open;
  j["stein_tomas_sharp"] = prof.stein_tomas_sharp;
  j["solved"] = prof.solved;
  j["best_known_source"] = prof.best_known_source;
  return j;
}

}  // namespace ffext
