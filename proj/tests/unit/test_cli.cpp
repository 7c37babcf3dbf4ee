#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "parisi/json_io.hpp"
#include "parisi_cli/cli.hpp"

using namespace parisi;
using namespace parisi::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("parisi_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(PARISI_BIN) + " " + args + " 2>" + (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ErrorCode parse_code(const std::string& text, ErrorCode* cause = nullptr, std::string* field = nullptr) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    if (cause) *cause = e.cause();
    if (field) *field = e.field();
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorCode::InvalidArgument;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(Cli, ParsesMinimalConfig) {
  const auto cfg = parse_config_text(R"({"model":"ising","mixture":{"2":0.64},"command":"solve"})");
  EXPECT_EQ(cfg.model, Model::Ising);
  EXPECT_EQ(cfg.command, Command::Solve);
  ASSERT_TRUE(cfg.mixture.has_value());
  EXPECT_EQ(cfg.mixture->coefficient(2), 0.64);
  EXPECT_EQ(cfg.max_k, 8);
  EXPECT_EQ(cfg.tol, 1e-3);
  EXPECT_EQ(cfg.u_samples.size(), 101u);
  EXPECT_TRUE(cfg.out_path.empty());
}

TEST(Cli, ParseErrors) {
  std::string field;
  EXPECT_EQ(parse_code(R"({"model":"ising","command":"solve"})", nullptr, &field), ErrorCode::ParseError);
  EXPECT_EQ(field, "mixture");
  ErrorCode cause{};
  EXPECT_EQ(parse_code(R"({"command":"solve","mixture":{"2":-1}})", &cause), ErrorCode::ValidationError);
  EXPECT_EQ(cause, ErrorCode::NegativeCoefficient);
  EXPECT_EQ(parse_code(R"({"command":"solve","mixture":{"2":0.5)"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"mixture":{"2":0.5}})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"command":"fly","mixture":{"2":0.5}})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"command":"solve","mixture":{"2":0.5},"colour":1})"), ErrorCode::ParseError);
  EXPECT_EQ(parse_code(R"({"command":"solve","mixture":{"2":0.5},"max_k":9})", &cause), ErrorCode::ValidationError);
  EXPECT_EQ(cause, ErrorCode::RangeViolation);
  EXPECT_EQ(parse_code(R"({"command":"gamma","mixture":{"2":0.5},"grid":{"n_x":100}})", &cause),
            ErrorCode::ValidationError);
  EXPECT_EQ(cause, ErrorCode::GridTooSmall);
  EXPECT_EQ(parse_code(R"({"command":"solve","model":"spherical","mixture":{"2":0.5}})"),
            ErrorCode::ValidationError);
  EXPECT_EQ(parse_code(R"({"command":"solve","mixture":{"2":0.5},"out":"/nonexistent/dir/x.json"})"),
            ErrorCode::ValidationError);
}

TEST(Cli, CommandNames) {
  for (auto c : {Command::Solve, Command::Gamma, Command::SphericalSolve, Command::Check, Command::Export}) {
    EXPECT_EQ(command_from_string(to_string(c)), c);
  }
  EXPECT_EQ(to_string(Command::SphericalSolve), "spherical-solve");
  EXPECT_FALSE(command_from_string("solver").has_value());
}

TEST(Cli, SolveReplicaSymmetric) {
  std::string csv;
  const auto j = json::parse(render_result(parse_config_text(R"({"command":"solve","mixture":{"2":0.36}})"), &csv));
  const auto mu = rsb_from_json(j.at("measure"));
  EXPECT_LE(metric_d(mu, RSBMeasure::dirac(0.0)), 1e-3);
  EXPECT_NEAR(j.at("value").get<double>(), 0.18, 1e-6);
  EXPECT_EQ(j.at("certificate").at("verdict"), "ConsistentMinimizer");
  EXPECT_EQ(first_line(csv), "q,x_q");
}

TEST(Cli, SphericalTwoPlusP) {
  std::string csv;
  const auto j = json::parse(
      render_result(parse_config_text(R"({"command":"spherical-solve","p":4,"t":0.05,"beta_sq":1.0})"), &csv));
  EXPECT_NEAR(j.at("q_M").get<double>(), 0.2836, 5e-4);
  EXPECT_GE(j.at("mass_on_S").get<double>(), 0.999);
  EXPECT_EQ(first_line(csv), "q,x_q,F,f");
}

TEST(Cli, CheckPureThree) {
  const auto j = json::parse(render_result(parse_config_text(R"({"command":"check","mixture":{"3":21904}})")));
  EXPECT_TRUE(j.at("criteria").at("thm3_satisfied").get<bool>());
  EXPECT_GT(j.at("criteria").at("thm3_margin").get<double>(), 0.0);
}

TEST(Cli, GammaCsvHeader) {
  std::string csv;
  render_result(parse_config_text(R"({"command":"gamma","mixture":{"2":0.64},"u":[0.0,0.5,1.0]})"), &csv);
  EXPECT_EQ(first_line(csv), "u,gamma,gamma_prime,gamma_pp_right,gamma_pp_left");
  int rows = 0;
  for (char c : csv) rows += c == '\n';
  EXPECT_EQ(rows, 4);
}

TEST(Cli, BinaryExitCodes) {
  const auto bad = write("bad.json", R"({"mixture": {"2": 0.5)");
  EXPECT_EQ(run("solve --config " + bad.string()), kExitParse);
  const auto neg = write("neg.json", R"({"mixture": {"2": -1}})");
  EXPECT_EQ(run("solve --config " + neg.string()), kExitParse);
  EXPECT_NE(slurp(scratch() / "stderr.txt").find("NegativeCoefficient"), std::string::npos);
  EXPECT_EQ(run("solve"), kExitParse);
  const auto tail = write("tail.json", R"({"model":"spherical","mixture":{"2":0.5},"measure":{"atoms":[{"q":1.0,"mass":1}]}})");
  EXPECT_EQ(run("spherical-solve --config " + tail.string() + " >/dev/null"), kExitNumeric);
  const auto tight = write("tight.json", R"({"mixture":{"2":0.64},"max_evals":3,"max_k":0})");
  const auto out = scratch() / "tight_out.json";
  EXPECT_EQ(run("solve --config " + tight.string() + " --out " + out.string()), kExitBudget);
  EXPECT_TRUE(json::parse(slurp(out)).at("budget_exhausted").get<bool>());
}

TEST(Cli, BinaryDeterministicWithFiles) {
  const auto cfg = write("sk.json", R"({"mixture": {"2": 0.36}})");
  const auto a = scratch() / "a.json", b = scratch() / "b.json", c = scratch() / "c.csv";
  ASSERT_EQ(run("solve --config " + cfg.string() + " --seed 7 --out " + a.string() + " --csv " + c.string()),
            kExitOk);
  ASSERT_EQ(run("solve --config " + cfg.string() + " --seed 7 --out " + b.string()), kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(json::parse(slurp(a)).at("seed"), 7);
  EXPECT_EQ(first_line(slurp(c)), "q,x_q");
}

TEST(Cli, ExportWritesCurves) {
  const auto j = json::parse(render_result(parse_config_text(
      R"({"command":"export","model":"spherical","mixture":{"2":0.25},"measure":{"atoms":[{"q":0,"mass":1}]}})")));
  EXPECT_NEAR(j.at("value").get<double>(), 0.125, 1e-12);
}
