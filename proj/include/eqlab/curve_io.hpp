#pragma once

#include "eqlab/curve.hpp"

#include <json.hpp>

#include <string>

namespace eqlab {

// {"kind":"ellipse","a":2.0,"b":1.5}
// {"kind":"polar_fourier","c0":1.0,"cos":[...],"sin":[...]}
// {"kind":"spline","points":[[x,y],...]}
SmoothCurve curve_from_json(const nlohmann::json& j);
nlohmann::json curve_to_json(const SmoothCurve& curve);

// Preset names: "ellipse:a,b", "fig4", "fig6", "circle:R"; anything else is
// read as a JSON document (inline if it starts with '{', else a file path).
SmoothCurve parse_shape(const std::string& spec);

// Seven-fold perturbed circle with seven stable and seven unstable points
// about its centroid.
PolarFourier fig4_shape();
// Four-fold perturbed circle, two stable and two unstable points plus
// a pair created by the fourth harmonic.
PolarFourier fig6_shape();

}  // namespace eqlab
