#include <gtest/gtest.h>

#include "parisi/error.hpp"
#include "parisi/json_io.hpp"

using namespace parisi;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(JsonIo, MixtureRoundTrip) {
  const auto mix = mixture_from_json(json::parse(R"({"2": 0.64, "4": 0.05})"));
  EXPECT_EQ(mix.coefficient(2), 0.64);
  EXPECT_EQ(mix.coefficient(4), 0.05);
  const auto back = mixture_from_json(to_json(mix));
  EXPECT_EQ(back.eval(0.7), mix.eval(0.7));
}

TEST(JsonIo, MixtureErrors) {
  EXPECT_EQ(code_of([] { mixture_from_json(json::parse(R"({"two": 0.5})")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { mixture_from_json(json::parse(R"({"2": "x"})")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { mixture_from_json(json::parse("[1, 2]")); }), ErrorCode::ParseError);
  EXPECT_NE(code_of([] { mixture_from_json(json::parse(R"({"2": -0.5})")); }), ErrorCode::ParseError);
}

TEST(JsonIo, RsbBothForms) {
  const auto a = rsb_from_json(json::parse(R"({"k": 1, "m": [0, 0.4, 1], "q": [0, 0.1, 0.5, 1]})"));
  const auto b = rsb_from_json(json::parse(R"({"atoms": [{"q": 0.1, "mass": 0.4}, {"q": 0.5, "mass": 0.6}]})"));
  EXPECT_EQ(metric_d(a, b), 0.0);
  const auto round = rsb_from_json(to_json(a));
  EXPECT_EQ(round.k(), a.k());
  EXPECT_EQ(round.m(), a.m());
  EXPECT_EQ(round.q(), a.q());
  const auto j = to_json(RSBMeasure::dirac(0.0));
  EXPECT_EQ(j.at("k"), 0);
  EXPECT_EQ(j.at("m"), json::parse("[0, 1]"));
  EXPECT_EQ(j.at("q"), json::parse("[0, 0, 1]"));
}

TEST(JsonIo, GeneralMeasureRoundTrip) {
  const auto mu = GeneralMeasure::make({{0.5, 0.5}}, {{0.0, 0.5, {1.0, 1.0}}});
  const auto back = measure_from_json(to_json(mu));
  EXPECT_EQ(metric_d(mu, back), 0.0);
  EXPECT_EQ(code_of([] { rsb_from_json(json::parse(R"({"atoms": [{"q": 0.5, "mass": 0.5}],
      "density": [{"a": 0, "b": 0.5, "values": [1, 1]}]})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { measure_from_json(json::parse(R"({"atoms": [{"q": 0.5}]})")); }), ErrorCode::ParseError);
}

TEST(JsonIo, ReportShapes) {
  const auto c = certify(Mixture::pure(2, 0.64), RSBMeasure::dirac(0.0));
  const auto j = to_json(c);
  EXPECT_EQ(j.at("verdict"), "ViolatesGammaSlope");
  EXPECT_TRUE(j.at("origin_in_support").get<bool>());

  CriteriaReport r = check_rsb_criteria(Mixture::pure(2, 0.64));
  const auto jr = to_json(r);
  EXPECT_TRUE(jr.at("q_hat_gap").is_null());
  EXPECT_TRUE(jr.at("thm4_satisfied").get<bool>());

  SphericalReport s;
  s.q_grid = {0.0};
  EXPECT_FALSE(to_json(s).contains("f"));
  EXPECT_TRUE(to_json(s, true).contains("f"));
}
