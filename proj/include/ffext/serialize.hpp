#pragma once

#include <string>

#include <json.hpp>

#include "ffext/energy.hpp"
#include "ffext/machinery.hpp"
#include "ffext/norms.hpp"
#include "ffext/transform.hpp"

namespace ffext {

using json = nlohmann::ordered_json;

// {q, p, n, modulus, d, measure, values: [[re, im], ...]}
json to_json(const GridFunction& g);
GridFunction grid_function_from_json(const json& j);

// Same shape with "surface": true; values indexed by the base point.
json to_json(const SurfaceFunction& f);
SurfaceFunction surface_function_from_json(const json& j);

// {d, q, size, energy, bounds: {cube, mixed, corollary}, ratios, regime,
//  in_window, corollary_applicable}; corollary entries are null when the
// regime does not apply.
json to_json(const EnergyReport& rep);

// {check, params, lhs, rhs, ratio, pass}
json to_json(const CheckReport& rep);

// {points: [[q, value], ...], slope, intercept, residual}
json to_json(const SlopeReport& rep);

std::string method_name(NormMethod method);
std::string regime_name(EnergyRegime regime);
std::string field_class_name(FieldClass cls);

// d,q,p_num,p_den,r_num,r_den,value,method,restarts,iterations,converged,seed
std::string norm_estimate_csv_header();
std::string to_csv_row(const NormEstimate& est);

// Everything but the witness (add_witness pulls it in for interchange).
json to_json(const NormEstimate& est, bool add_witness = false);

json to_json(const ExponentProfile& prof);

}  // namespace ffext
