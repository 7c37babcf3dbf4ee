#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "parisi/error.hpp"
#include "parisi/measure.hpp"
#include "parisi/mixture.hpp"
#include "parisi/parisi_pde.hpp"

namespace parisi::cli {

enum class Model { Ising, Spherical };
enum class Command { Solve, Gamma, SphericalSolve, Check, Export };

std::string_view to_string(Model m) noexcept;
std::string_view to_string(Command c) noexcept;
std::optional<Command> command_from_string(std::string_view s) noexcept;

/// Raised by parse_config. code() is ParseError or ValidationError; cause()
/// carries the underlying library code for validation failures.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, ErrorCode cause, std::string field, const std::string& what)
      : Error(code, what), cause_(cause), field_(std::move(field)) {}

  ErrorCode cause() const noexcept { return cause_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode cause_;
  std::string field_;
};

struct GridOverrides {
  std::optional<double> x_max;
  std::optional<int> n_x;
  std::optional<int> n_u;
  std::optional<int> quad_order;

  bool any() const noexcept { return x_max || n_x || n_u || quad_order; }
  GridParams apply(const Mixture& mix) const;
};

struct TwoPlusP {
  double beta_sq = 0.0;
  double t = 0.0;
  int p = 0;
};

struct RunConfig {
  Model model = Model::Ising;
  Command command = Command::Solve;
  std::optional<Mixture> mixture;
  /// Atomic candidate for gamma / check / export on the Ising side.
  std::optional<RSBMeasure> measure;
  /// Candidate for the spherical commands; may carry a density.
  std::optional<GeneralMeasure> spherical_measure;
  std::optional<TwoPlusP> two_plus_p;
  GridOverrides grid;
  std::vector<double> u_samples;
  std::uint64_t seed = 0;
  int max_k = 8;
  /// Objective evaluations per Nelder-Mead start.
  int max_evals = 4000;
  double tol = 1e-3;
  std::filesystem::path out_path;
  std::filesystem::path csv_path;
  std::filesystem::path pde_dump_path;
};

/// Accepts a file path or an inline JSON object (anything starting with '{').
/// command_override replaces (or supplies) the "command" field.
RunConfig parse_config(std::string_view path_or_json, std::optional<Command> command_override = std::nullopt);
RunConfig parse_config_text(std::string_view json_text, std::optional<Command> command_override = std::nullopt);
RunConfig parse_config_json(const nlohmann::json& j, std::optional<Command> command_override = std::nullopt);

/// Reads the raw document behind parse_config; throws ConfigError{ParseError}.
nlohmann::json load_config_json(std::string_view path_or_json);

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitBudget = 4;

/// Runs the command, writes the JSON result (to out_path, or stdout when
/// empty) and the CSV when csv_path is set. Returns an exit code; library
/// errors are reported on stderr and mapped to kExitNumeric.
int execute(const RunConfig& cfg);

/// The JSON document execute would write, without touching the filesystem.
std::string render_result(const RunConfig& cfg, std::string* csv = nullptr, bool* budget_exhausted = nullptr);

}  // namespace parisi::cli
