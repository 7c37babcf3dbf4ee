#include "parisi_cli/cli.hpp"

#include <unistd.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "parisi/criteria.hpp"
#include "parisi/functional.hpp"
#include "parisi/gamma.hpp"
#include "parisi/json_io.hpp"
#include "parisi/optimizer.hpp"
#include "parisi/spherical.hpp"

namespace parisi::cli {
namespace {

constexpr std::array<std::pair<Command, std::string_view>, 5> kCommands{{
    {Command::Solve, "solve"},
    {Command::Gamma, "gamma"},
    {Command::SphericalSolve, "spherical-solve"},
    {Command::Check, "check"},
    {Command::Export, "export"},
}};

const std::set<std::string> kKnownKeys{"model", "command", "mixture", "measure",  "p",   "t",       "beta_sq",
                                       "two_plus_p", "grid", "u",       "seed",     "max_k", "tol", "out",
                                       "csv",   "pde_dump", "max_evals"};

[[noreturn]] void parse_fail(const std::string& field, const std::string& msg) {
  throw ConfigError(ErrorCode::ParseError, ErrorCode::ParseError, field,
                    field.empty() ? msg : "field '" + field + "': " + msg);
}

[[noreturn]] void invalid(const std::string& field, ErrorCode cause, const std::string& msg) {
  throw ConfigError(ErrorCode::ValidationError, cause, field, "field '" + field + "': " + msg);
}

double get_number(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number()) parse_fail(field, "expected a number");
  return j.get<double>();
}

std::int64_t get_integer(const nlohmann::json& j, const std::string& field) {
  if (!j.is_number_integer()) parse_fail(field, "expected an integer");
  return j.get<std::int64_t>();
}

std::string get_string(const nlohmann::json& j, const std::string& field) {
  if (!j.is_string()) parse_fail(field, "expected a string");
  return j.get<std::string>();
}

// Library parse errors stay parse errors; anything else is a validation failure.
template <class F>
auto guarded(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) parse_fail(field, e.what());
    invalid(field, e.code(), e.what());  // what() already names the code
  }
}

void check_writable(const std::filesystem::path& p, const std::string& field) {
  if (p.empty()) return;
  auto dir = p.parent_path();
  if (dir.empty()) dir = ".";
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec) || ::access(dir.c_str(), W_OK) != 0) {
    invalid(field, ErrorCode::IoError, "directory of '" + p.string() + "' is not writable");
  }
  if (std::filesystem::exists(p, ec) && ::access(p.c_str(), W_OK) != 0) {
    invalid(field, ErrorCode::IoError, "'" + p.string() + "' is not writable");
  }
}

std::string fmt(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

std::string x_curve_csv(const PiecewiseCdf& pc) {
  std::string out = "q,x_q\n";
  for (int i = 0; i <= 1000; ++i) {
    const double q = i / 1000.0;
    out += fmt(q) + "," + fmt(pc.eval(q)) + "\n";
  }
  return out;
}

std::string spherical_csv(const SphericalReport& r) {
  std::string out = "q,x_q,F,f\n";
  for (std::size_t i = 0; i < r.q_grid.size(); ++i) {
    out += fmt(r.q_grid[i]) + "," + fmt(r.x_curve[i]) + "," + fmt(r.F_curve[i]) + "," + fmt(r.f_curve[i]) + "\n";
  }
  return out;
}

std::string gamma_csv(const GammaReport& r) {
  std::string out = "u,gamma,gamma_prime,gamma_pp_right,gamma_pp_left\n";
  for (std::size_t i = 0; i < r.u_samples.size(); ++i) {
    out += fmt(r.u_samples[i]) + "," + fmt(r.gamma[i]) + "," + fmt(r.gamma_prime[i]) + "," +
           fmt(r.gamma_pp_right[i]) + "," + fmt(r.gamma_pp_left[i]) + "\n";
  }
  return out;
}

GridParams grid_for(const RunConfig& cfg, const Mixture& mix) {
  return cfg.grid.any() ? cfg.grid.apply(mix) : GridParams::defaults(mix);
}

// Two-term 2 + p mixtures are solved in closed form when no measure is given.
std::optional<TwoPlusP> two_plus_p_of(const Mixture& mix) {
  const auto& c = mix.coeffs();
  if (c.size() != 2 || c.begin()->first != 2 || c.rbegin()->first < 4) return std::nullopt;
  const double c2 = c.begin()->second, cp = c.rbegin()->second;
  if (!(c2 > 0.0 && cp > 0.0)) return std::nullopt;
  return TwoPlusP{c2 + cp, cp / (c2 + cp), c.rbegin()->first};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + p.string() + "' for writing");
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "failed writing '" + p.string() + "'");
}

}  // namespace

std::string_view to_string(Model m) noexcept { return m == Model::Ising ? "ising" : "spherical"; }

std::string_view to_string(Command c) noexcept {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "unknown";
}

std::optional<Command> command_from_string(std::string_view s) noexcept {
  for (const auto& [cmd, name] : kCommands) {
    if (name == s) return cmd;
  }
  return std::nullopt;
}

GridParams GridOverrides::apply(const Mixture& mix) const {
  GridParams g = GridParams::defaults(mix);
  if (x_max) g.x_max = *x_max;
  if (n_x) g.n_x = *n_x;
  if (n_u) g.n_u = *n_u;
  if (quad_order) g.quad_order = *quad_order;
  return g;
}

nlohmann::json load_config_json(std::string_view path_or_json) {
  std::string text;
  const auto first = path_or_json.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && path_or_json[first] == '{') {
    text = std::string(path_or_json);
  } else {
    std::ifstream f{std::string(path_or_json)};
    if (!f) parse_fail("", "cannot read config file '" + std::string(path_or_json) + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail("", e.what());
  }
}

RunConfig parse_config(std::string_view path_or_json, std::optional<Command> command_override) {
  return parse_config_json(load_config_json(path_or_json), command_override);
}

RunConfig parse_config_text(std::string_view json_text, std::optional<Command> command_override) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail("", e.what());
  }
  return parse_config_json(j, command_override);
}

RunConfig parse_config_json(const nlohmann::json& j, std::optional<Command> command_override) {
  if (!j.is_object()) parse_fail("", "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnownKeys.contains(key)) parse_fail(key, "unknown field");
  }
  RunConfig cfg;

  if (command_override) {
    cfg.command = *command_override;
  } else if (j.contains("command")) {
    const auto name = get_string(j["command"], "command");
    const auto cmd = command_from_string(name);
    if (!cmd) parse_fail("command", "unknown command '" + name + "'");
    cfg.command = *cmd;
  } else {
    parse_fail("command", "missing");
  }

  cfg.model = cfg.command == Command::SphericalSolve ? Model::Spherical : Model::Ising;
  if (j.contains("model")) {
    const auto name = get_string(j["model"], "model");
    if (name == "ising") {
      cfg.model = Model::Ising;
    } else if (name == "spherical") {
      cfg.model = Model::Spherical;
    } else {
      parse_fail("model", "expected 'ising' or 'spherical'");
    }
  }
  const bool spherical_cmd = cfg.command == Command::SphericalSolve;
  if (spherical_cmd && cfg.model != Model::Spherical) {
    invalid("model", ErrorCode::InvalidArgument, "spherical-solve needs the spherical model");
  }
  if ((cfg.command == Command::Solve || cfg.command == Command::Gamma) && cfg.model != Model::Ising) {
    invalid("model", ErrorCode::InvalidArgument, std::string(to_string(cfg.command)) + " needs the ising model");
  }

  const nlohmann::json* tpp = j.contains("two_plus_p") ? &j["two_plus_p"] : &j;
  if (tpp != &j && !tpp->is_object()) parse_fail("two_plus_p", "expected an object");
  if (tpp->contains("p") || tpp->contains("t") || tpp->contains("beta_sq")) {
    for (const char* k : {"p", "t", "beta_sq"}) {
      if (!tpp->contains(k)) parse_fail(k, "missing (p, t and beta_sq go together)");
    }
    TwoPlusP v;
    v.p = static_cast<int>(get_integer((*tpp)["p"], "p"));
    v.t = get_number((*tpp)["t"], "t");
    v.beta_sq = get_number((*tpp)["beta_sq"], "beta_sq");
    if (!spherical_cmd) invalid("p", ErrorCode::InvalidArgument, "p, t, beta_sq only apply to spherical-solve");
    if (v.p < 4) invalid("p", ErrorCode::InvalidArgument, "p must be >= 4");
    if (!(v.t > 0.0 && v.t < 1.0)) invalid("t", ErrorCode::InvalidArgument, "t must lie in (0, 1)");
    if (!(v.beta_sq > 0.0)) invalid("beta_sq", ErrorCode::InvalidArgument, "beta_sq must be positive");
    cfg.two_plus_p = v;
  }

  if (j.contains("mixture")) {
    cfg.mixture = guarded("mixture", [&] { return mixture_from_json(j["mixture"]); });
  } else if (!cfg.two_plus_p) {
    parse_fail("mixture", "missing");
  }

  if (j.contains("measure")) {
    if (cfg.model == Model::Spherical) {
      cfg.spherical_measure = guarded("measure", [&] { return measure_from_json(j["measure"]); });
    } else {
      cfg.measure = guarded("measure", [&] { return rsb_from_json(j["measure"]); });
    }
  }
  if (cfg.command == Command::Export && !cfg.measure && !cfg.spherical_measure) {
    parse_fail("measure", "missing (export needs a measure)");
  }
  if (cfg.two_plus_p && (cfg.mixture || cfg.spherical_measure)) {
    invalid("mixture", ErrorCode::InvalidArgument, "give either p, t, beta_sq or a mixture");
  }
  if (spherical_cmd && !cfg.two_plus_p) {
    if (!cfg.spherical_measure) {
      cfg.two_plus_p = two_plus_p_of(*cfg.mixture);
      if (!cfg.two_plus_p) {
        invalid("measure", ErrorCode::InvalidArgument,
                "spherical-solve needs a measure unless the mixture has the form c2 u^2 + cp u^p, p >= 4");
      }
      cfg.mixture.reset();
    }
  }

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (!g.is_object()) parse_fail("grid", "expected an object");
    for (const auto& [key, value] : g.items()) {
      if (key == "x_max") {
        cfg.grid.x_max = get_number(value, "grid.x_max");
      } else if (key == "n_x") {
        cfg.grid.n_x = static_cast<int>(get_integer(value, "grid.n_x"));
      } else if (key == "n_u") {
        cfg.grid.n_u = static_cast<int>(get_integer(value, "grid.n_u"));
      } else if (key == "quad_order") {
        cfg.grid.quad_order = static_cast<int>(get_integer(value, "grid.quad_order"));
      } else {
        parse_fail("grid." + key, "unknown field");
      }
    }
    if (cfg.mixture) {
      guarded("grid", [&] {
        cfg.grid.apply(*cfg.mixture).validate(*cfg.mixture);
        return 0;
      });
    }
  }

  if (j.contains("u")) {
    const auto& u = j["u"];
    if (!u.is_array() || u.empty()) parse_fail("u", "expected a non-empty array");
    for (const auto& v : u) {
      const double x = get_number(v, "u");
      if (x < 0.0 || x > 1.0) invalid("u", ErrorCode::RangeViolation, "samples must lie in [0, 1]");
      cfg.u_samples.push_back(x);
    }
  } else {
    for (int i = 0; i <= 100; ++i) cfg.u_samples.push_back(i / 100.0);
  }

  if (j.contains("seed")) {
    const auto s = get_integer(j["seed"], "seed");
    if (s < 0) invalid("seed", ErrorCode::RangeViolation, "seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (j.contains("max_k")) {
    const auto k = get_integer(j["max_k"], "max_k");
    if (k < 0 || k > 8) invalid("max_k", ErrorCode::RangeViolation, "max_k must lie in [0, 8]");
    cfg.max_k = static_cast<int>(k);
  }
  if (j.contains("max_evals")) {
    const auto n = get_integer(j["max_evals"], "max_evals");
    if (n < 1 || n > 100000000) invalid("max_evals", ErrorCode::RangeViolation, "max_evals must lie in [1, 1e8]");
    cfg.max_evals = static_cast<int>(n);
  }
  if (j.contains("tol")) {
    cfg.tol = get_number(j["tol"], "tol");
    if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) invalid("tol", ErrorCode::RangeViolation, "tol must lie in (0, 1)");
  }
  if (j.contains("out")) cfg.out_path = get_string(j["out"], "out");
  if (j.contains("csv")) cfg.csv_path = get_string(j["csv"], "csv");
  if (j.contains("pde_dump")) cfg.pde_dump_path = get_string(j["pde_dump"], "pde_dump");
  check_writable(cfg.out_path, "out");
  check_writable(cfg.csv_path, "csv");
  check_writable(cfg.pde_dump_path, "pde_dump");
  return cfg;
}

std::string render_result(const RunConfig& cfg, std::string* csv, bool* budget_exhausted) {
  nlohmann::json out;
  out["command"] = std::string(to_string(cfg.command));
  out["model"] = std::string(to_string(cfg.model));
  std::string table;
  bool budget = false;

  switch (cfg.command) {
    case Command::Solve: {
      const Mixture& mix = *cfg.mixture;
      OptimizerOptions opts;
      opts.seed = cfg.seed;
      opts.max_k = cfg.max_k;
      opts.max_evals = cfg.max_evals;
      if (cfg.grid.any()) opts.grid = cfg.grid.apply(mix);
      const auto r = minimize_adaptive(mix, opts);
      const auto cert = certify(mix, r.measure, cfg.tol);
      out["mixture"] = to_json(mix);
      out.update(to_json(r));
      out["free_energy"] = free_energy(r.value);
      out["certificate"] = to_json(cert);
      out["seed"] = cfg.seed;
      budget = r.budget_exhausted;
      table = x_curve_csv(PiecewiseCdf(r.measure));
      break;
    }
    case Command::Gamma: {
      const Mixture& mix = *cfg.mixture;
      const RSBMeasure mu = cfg.measure.value_or(RSBMeasure::dirac(0.0));
      const auto rep = gamma_report(mix, mu, cfg.u_samples);
      out["mixture"] = to_json(mix);
      out["measure"] = to_json(mu);
      out["gamma"] = to_json(rep);
      table = gamma_csv(rep);
      break;
    }
    case Command::SphericalSolve: {
      std::optional<Mixture> mix = cfg.mixture;
      std::optional<GeneralMeasure> mu = cfg.spherical_measure;
      if (cfg.two_plus_p) {
        const auto& v = *cfg.two_plus_p;
        auto sol = solve_two_plus_p(v.beta_sq, v.t, v.p);
        out["two_plus_p"] = {{"beta_sq", v.beta_sq}, {"t", v.t}, {"p", v.p}, {"applicable", sol.applicable}};
        mix = sol.mixture;
        mu = sol.measure;
      }
      const auto rep = spherical_certify(*mix, *mu, cfg.tol);
      out["mixture"] = to_json(*mix);
      out["measure"] = to_json(*mu);
      out["value"] = cs_value(*mix, *mu);
      out.update(to_json(rep));
      out["structure"] = to_json(spherical_structure_checks(*mix, *mu));
      table = spherical_csv(rep);
      break;
    }
    case Command::Check: {
      const Mixture& mix = *cfg.mixture;
      out["mixture"] = to_json(mix);
      if (cfg.model == Model::Ising) {
        out["criteria"] = to_json(check_rsb_criteria(mix));
        out["criteria"]["thm3_margin_quad"] = thm3_margin_quad(mix);
        out["criteria"]["thm4_lhs_quad"] = thm4_lhs_quad(mix);
        if (cfg.measure) {
          out["measure"] = to_json(*cfg.measure);
          out["certificate"] = to_json(certify(mix, *cfg.measure, cfg.tol));
          out["moment_bound"] = to_json(moment_bound_check(mix, *cfg.measure));
          table = x_curve_csv(PiecewiseCdf(*cfg.measure));
        }
      } else if (cfg.spherical_measure) {
        const auto rep = spherical_certify(mix, *cfg.spherical_measure, cfg.tol);
        out["measure"] = to_json(*cfg.spherical_measure);
        out["certificate"] = to_json(rep);
        out["structure"] = to_json(spherical_structure_checks(mix, *cfg.spherical_measure));
        table = spherical_csv(rep);
      }
      break;
    }
    case Command::Export: {
      const Mixture& mix = *cfg.mixture;
      if (cfg.model == Model::Ising) {
        const auto sol = solve_pde(mix, *cfg.measure, grid_for(cfg, mix));
        const double value = parisi_value(sol);
        out["mixture"] = to_json(mix);
        out["measure"] = to_json(*cfg.measure);
        out["value"] = value;
        out["free_energy"] = free_energy(value);
        if (!cfg.pde_dump_path.empty()) {
          write_pde_solution(sol, cfg.pde_dump_path);
          out["pde_dump"] = cfg.pde_dump_path.string();
        }
        table = x_curve_csv(PiecewiseCdf(*cfg.measure));
      } else {
        const auto rep = f_F_curves(mix, *cfg.spherical_measure, [] {
          std::vector<double> g;
          for (int i = 0; i <= 1000; ++i) g.push_back(kSphericalQ1 * i / 1000.0);
          return g;
        }());
        out["mixture"] = to_json(mix);
        out["measure"] = to_json(*cfg.spherical_measure);
        out["value"] = cs_value(mix, *cfg.spherical_measure);
        table = spherical_csv(rep);
      }
      break;
    }
  }
  if (csv) *csv = std::move(table);
  if (budget_exhausted) *budget_exhausted = budget;
  return out.dump(2) + "\n";
}

int execute(const RunConfig& cfg) {
  try {
    std::string csv;
    bool budget = false;
    const std::string doc = render_result(cfg, &csv, &budget);
    if (cfg.out_path.empty()) {
      std::cout << doc;
    } else {
      write_file(cfg.out_path, doc);
    }
    if (!cfg.csv_path.empty()) {
      if (csv.empty()) throw Error(ErrorCode::InvalidArgument, "this command has no CSV output without a measure");
      write_file(cfg.csv_path, csv);
    }
    if (budget) {
      std::cerr << "parisi: evaluation budget exhausted before convergence\n";
      return kExitBudget;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "parisi: " << e.what() << "\n";
    return kExitParse;
  } catch (const Error& e) {
    std::cerr << "parisi: " << e.what() << "\n";
    return e.code() == ErrorCode::CapacityError ? kExitBudget : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "parisi: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace parisi::cli
