#pragma once

#include <nlohmann/json.hpp>

#include "parisi/criteria.hpp"
#include "parisi/gamma.hpp"
#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"
#include "parisi/optimizer.hpp"
#include "parisi/spherical.hpp"

namespace parisi {

using nlohmann::json;

/// {"2": 0.64, "4": 0.05}. Throws Error{ParseError} on malformed keys or
/// values and the Mixture::validate errors otherwise.
Mixture mixture_from_json(const json& j);
json to_json(const Mixture& mix);

/// {"atoms":[{"q","mass"}], "density":[{"a","b","values"}]}; density optional.
GeneralMeasure measure_from_json(const json& j);
/// Either the atom form above (no density) or {"k","m","q"}.
RSBMeasure rsb_from_json(const json& j);

json to_json(const RSBMeasure& mu);
json to_json(const GeneralMeasure& mu);
json to_json(const GammaReport& r);
json to_json(const Certificate& c);
json to_json(const AdaptiveResult& r);
json to_json(const SphericalReport& r, bool with_curves = false);
json to_json(const StructureReport& r);
json to_json(const CriteriaReport& r);
json to_json(const MomentBound& b);

}  // namespace parisi
