#include "parisi/json_io.hpp"

#include <charconv>
#include <string>

#include "parisi/error.hpp"

namespace parisi {
namespace {

double number(const json& j, const char* field) {
  if (!j.is_number()) throw Error(ErrorCode::ParseError, std::string("field '") + field + "' must be a number");
  return j.get<double>();
}

const json& member(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) {
    throw Error(ErrorCode::ParseError, std::string("missing field '") + field + "'");
  }
  return j.at(field);
}

std::vector<double> numbers(const json& j, const char* field) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string("field '") + field + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, field));
  return out;
}

std::vector<Atom> atoms_from(const json& j) {
  const auto& arr = member(j, "atoms");
  if (!arr.is_array()) throw Error(ErrorCode::ParseError, "field 'atoms' must be an array");
  std::vector<Atom> atoms;
  for (const auto& a : arr) atoms.push_back({number(member(a, "q"), "q"), number(member(a, "mass"), "mass")});
  return atoms;
}

json atoms_json(const std::vector<Atom>& atoms) {
  json arr = json::array();
  for (const auto& a : atoms) arr.push_back({{"q", a.q}, {"mass", a.mass}});
  return arr;
}

}  // namespace

Mixture mixture_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "mixture must be an object keyed by p");
  std::map<int, double> raw;
  for (const auto& [key, value] : j.items()) {
    int p = 0;
    const auto* end = key.data() + key.size();
    const auto [ptr, ec] = std::from_chars(key.data(), end, p);
    if (ec != std::errc() || ptr != end) {
      throw Error(ErrorCode::ParseError, "mixture key '" + key + "' is not an integer");
    }
    raw[p] = number(value, key.c_str());
  }
  return Mixture::validate(raw);
}

json to_json(const Mixture& mix) {
  json j = json::object();
  for (const auto& [p, c] : mix.coeffs()) j[std::to_string(p)] = c;
  return j;
}

GeneralMeasure measure_from_json(const json& j) {
  std::vector<DensitySegment> segs;
  if (j.is_object() && j.contains("density")) {
    const auto& arr = j.at("density");
    if (!arr.is_array()) throw Error(ErrorCode::ParseError, "field 'density' must be an array");
    for (const auto& s : arr) {
      segs.push_back({number(member(s, "a"), "a"), number(member(s, "b"), "b"), numbers(member(s, "values"), "values")});
    }
  }
  return GeneralMeasure::make(atoms_from(j), std::move(segs));
}

RSBMeasure rsb_from_json(const json& j) {
  if (j.is_object() && j.contains("k")) {
    const auto& k = j.at("k");
    if (!k.is_number_integer()) throw Error(ErrorCode::ParseError, "field 'k' must be an integer");
    return RSBMeasure::make(k.get<int>(), numbers(member(j, "m"), "m"), numbers(member(j, "q"), "q"));
  }
  if (j.is_object() && j.contains("density") && !j.at("density").empty()) {
    throw Error(ErrorCode::ParseError, "an atomic measure is required here");
  }
  return RSBMeasure::from_atoms(atoms_from(j));
}

json to_json(const RSBMeasure& mu) {
  return {{"atoms", atoms_json(mu.support())}, {"k", mu.k()}, {"m", mu.m()}, {"q", mu.q()}};
}

json to_json(const GeneralMeasure& mu) {
  json dens = json::array();
  for (const auto& s : mu.segments()) dens.push_back({{"a", s.a}, {"b", s.b}, {"values", s.values}});
  return {{"atoms", atoms_json(mu.atoms())}, {"density", dens}};
}

json to_json(const GammaReport& r) {
  return {{"u", r.u_samples},
          {"gamma", r.gamma},
          {"gamma_prime", r.gamma_prime},
          {"gamma_pp_right", r.gamma_pp_right},
          {"gamma_pp_left", r.gamma_pp_left},
          {"mass", r.mass}};
}

json to_json(const Certificate& c) {
  return {{"support", atoms_json(c.support_estimate)},
          {"gamma_at_support", c.gamma_at_support},
          {"gamma_prime_at_support", c.gamma_prime_at_support},
          {"gamma_residual", c.gamma_residual},
          {"gamma_prime_max", c.gamma_prime_max},
          {"origin_in_support", c.origin_in_support},
          {"origin_mass", c.origin_mass},
          {"moment_bound_lhs", c.moment_bound_lhs},
          {"moment_bound_rhs", c.moment_bound_rhs},
          {"verdict", std::string(to_string(c.verdict))}};
}

json to_json(const AdaptiveResult& r) {
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back({{"k", t.k}, {"value", t.value}});
  return {{"measure", to_json(r.measure)},
          {"value", r.value},
          {"trace", trace},
          {"budget_exhausted", r.budget_exhausted}};
}

json to_json(const SphericalReport& r, bool with_curves) {
  json s = json::array();
  for (const auto& iv : r.S_intervals) s.push_back({iv.a, iv.b});
  json j = {{"S_intervals", s},
            {"max_f", r.max_f},
            {"mass_on_S", r.mass_on_S},
            {"q_M", r.q_M},
            {"verdict", r.verdict}};
  if (with_curves) {
    j["q"] = r.q_grid;
    j["x"] = r.x_curve;
    j["F"] = r.F_curve;
    j["f"] = r.f_curve;
  }
  return j;
}

json to_json(const StructureReport& r) {
  return {{"origin_in_support", r.origin_in_support},
          {"xi2_at_origin", r.xi2_at_origin},
          {"gap_above_origin", r.gap_above_origin ? json(*r.gap_above_origin) : json(nullptr)},
          {"origin_accumulates", r.origin_accumulates},
          {"interior_atoms", atoms_json(r.interior_atoms)},
          {"max_interior_atom_mass", r.max_interior_atom_mass}};
}

json to_json(const CriteriaReport& r) {
  return {{"q_hat_gap", r.q_hat_gap ? json(*r.q_hat_gap) : json(nullptr)},
          {"thm3_satisfied", r.thm3_satisfied},
          {"thm3_margin", r.thm3_margin},
          {"thm4_satisfied", r.thm4_satisfied},
          {"thm4_margin", r.thm4_margin},
          {"thm4_lhs", r.thm4_lhs},
          {"beta2", r.beta2},
          {"notes", r.notes}};
}

json to_json(const MomentBound& b) {
  return {{"lhs", b.lhs}, {"rhs", b.rhs}, {"satisfied", b.satisfied}};
}

}  // namespace parisi
