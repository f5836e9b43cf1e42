#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>

#include "addspec/growth.hpp"

using namespace addspec;

namespace {

template <typename F>
std::optional<ErrorCode> thrown_code(F&& fn) {
  try {
    fn();
  } catch (const AsError& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("closed-form evaluation") {
  CHECK(GrowthFunction::power(2, 3).eval(2) == doctest::Approx(16.0));
  CHECK(GrowthFunction::power(1, 2).eval(3) == doctest::Approx(9.0));
  CHECK(GrowthFunction::exponential(2).eval(10) == doctest::Approx(1024.0));
  CHECK(GrowthFunction::exp_sqrt(2).eval(4) == doctest::Approx(std::exp(4.0)));
}

TEST_CASE("log evaluation agrees with log of evaluation") {
  for (const GrowthFunction& f :
       {GrowthFunction::power(0.5, 2), GrowthFunction::exponential(3),
        GrowthFunction::exp_sqrt(1.5)}) {
    for (double x : {1.0, 2.5, 10.0, 123.0})
      CHECK(f.eval_log(x) == doctest::Approx(std::log(f.eval(x))).epsilon(1e-12));
  }
}

TEST_CASE("log evaluation survives overflowing values") {
  GrowthFunction f = GrowthFunction::exponential(2);
  CHECK(f.eval_log(5000.0) == doctest::Approx(5000.0 * std::log(2.0)));
}

TEST_CASE("inverse round-trips") {
  for (const GrowthFunction& f :
       {GrowthFunction::power(2, 2), GrowthFunction::exponential(2),
        GrowthFunction::exp_sqrt(0.7)}) {
    for (double x : {1.0, 3.0, 17.5, 400.0})
      CHECK(f.inverse(f.eval(x)) == doctest::Approx(x).epsilon(1e-9));
  }
  CHECK(GrowthFunction::power(1, 2).inverse(9) == doctest::Approx(3.0));
}

TEST_CASE("constructor rejects non-growth parameters") {
  CHECK(thrown_code([] { GrowthFunction::power(0, 2); }) == ErrorCode::invalid_argument);
  CHECK(thrown_code([] { GrowthFunction::power(1, -1); }) == ErrorCode::invalid_argument);
  CHECK(thrown_code([] { GrowthFunction::exponential(1); }) == ErrorCode::invalid_argument);
  CHECK(thrown_code([] { GrowthFunction::exp_sqrt(0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("evaluation outside the domain is a domain error") {
  GrowthFunction f = GrowthFunction::power(1, 2);
  CHECK(thrown_code([&] { f.eval(0.5); }) == ErrorCode::domain);
  CHECK(thrown_code([&] { f.eval(std::nan("")); }) == ErrorCode::domain);
}

TEST_CASE("interpolation hits knots exactly and dominates the base") {
  GrowthFunction g = GrowthFunction::power(1, 2);
  GrowthFunction f = interpolate_above(g, {{1, 2.0}, {2, 5.0}, {3, 10.0}});
  CHECK(f.eval(1) == doctest::Approx(2.0));
  CHECK(f.eval(2) == doctest::Approx(5.0));
  CHECK(f.eval(3) == doctest::Approx(10.0));
  // between knots: max of the lifted base and the chord
  CHECK(f.eval(1.5) == doctest::Approx(3.5));
  CHECK(f.eval(2.5) == doctest::Approx(7.5));
  for (double x = 1.0; x <= 3.0; x += 0.125) CHECK(f.eval(x) >= g.eval(x));
  CHECK(f.domain_start() == doctest::Approx(1.0));
  CHECK(f.domain_end() == doctest::Approx(3.0));
}

TEST_CASE("interpolation inverse uses bisection") {
  GrowthFunction f = interpolate_above(GrowthFunction::power(1, 2),
                                       {{1, 2.0}, {2, 5.0}, {3, 10.0}});
  CHECK(f.inverse(7.5) == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(f.inverse(2.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(thrown_code([&] { f.inverse(1.0); }) == ErrorCode::range);
  CHECK(thrown_code([&] { f.inverse(11.0); }) == ErrorCode::range);
  CHECK(thrown_code([&] { f.eval(3.5); }) == ErrorCode::domain);
}

TEST_CASE("interpolation rejects knots at or below the base") {
  GrowthFunction g = GrowthFunction::power(1, 2);
  CHECK(thrown_code([&] { interpolate_above(g, {{2, 4.0}}); }) == ErrorCode::hypothesis);
  CHECK(thrown_code([&] { interpolate_above(g, {{1, 2.0}, {1, 3.0}}); }) ==
        ErrorCode::hypothesis);
  CHECK(thrown_code([&] { interpolate_above(g, {}); }) == ErrorCode::invalid_argument);
}

TEST_CASE("shorthand and JSON parsing produce the same functions") {
  GrowthFunction a = GrowthFunction::parse("power:2:2");
  GrowthFunction b = GrowthFunction::parse(R"({"kind":"power","alpha":2,"h":2})");
  CHECK(a.eval(5) == doctest::Approx(b.eval(5)));
  CHECK(GrowthFunction::parse("exp:3").eval(4) == doctest::Approx(81.0));
  CHECK(GrowthFunction::parse("expsqrt:1.5").eval(4) == doctest::Approx(std::exp(3.0)));
  CHECK(thrown_code([] { GrowthFunction::parse("power:2"); }) == ErrorCode::invalid_argument);
  CHECK(thrown_code([] { GrowthFunction::parse("nope:1"); }) == ErrorCode::invalid_argument);
  CHECK(thrown_code([] { GrowthFunction::parse("{oddly broken"); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("JSON serialization round-trips every kind") {
  GrowthFunction interp = interpolate_above(GrowthFunction::power(1, 2),
                                            {{1, 2.0}, {2, 5.0}, {3, 10.0}});
  for (const GrowthFunction& f :
       {GrowthFunction::power(0.25, 3), GrowthFunction::exponential(2.5),
        GrowthFunction::exp_sqrt(1.25), interp}) {
    GrowthFunction back = GrowthFunction::from_json(f.to_json());
    CHECK(back.kind() == f.kind());
    for (double x : {1.0, 1.5, 2.0, 2.75})
      CHECK(back.eval(x) == doctest::Approx(f.eval(x)).epsilon(1e-12));
  }
}

TEST_CASE("polynomials are asymptotically stable") {
  StabilityVerdict v = probe_stability(GrowthFunction::power(3, 2), 1.0, 1e6, 0.01);
  CHECK(v.stable);
  CHECK(v.tail_sup_ratio < 1.01);
  CHECK(!v.trend.empty());
  CHECK(v.trend.back().first == doctest::Approx(1e6));
}

TEST_CASE("exponentials are not asymptotically stable") {
  StabilityVerdict v = probe_stability(GrowthFunction::exponential(std::exp(1.0)), 1.0,
                                       1e6, 0.01);
  CHECK(!v.stable);
  CHECK(v.sup_ratio == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
  CHECK(v.tail_sup_ratio == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
}

TEST_CASE("stretched exponentials flatten out") {
  StabilityVerdict v = probe_stability(GrowthFunction::exp_sqrt(1.0), 1.0, 1e6, 0.01);
  CHECK(v.stable);
  CHECK(v.tail_sup_ratio > 1.0);
  CHECK(v.tail_sup_ratio < 1.001);
}

TEST_CASE("stability verdict serializes its grid") {
  StabilityVerdict v = probe_stability(GrowthFunction::power(1, 1), 2.0, 1e4, 0.05);
  Json j = v.to_json();
  CHECK(j["delta"] == 2.0);
  CHECK(j["stable"] == true);
  CHECK(j["trend"].is_array());
  CHECK(j["trend"].size() == v.trend.size());
}
