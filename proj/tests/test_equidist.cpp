#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <mpfr.h>

#include "addspec/equidist.hpp"

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

// reference classification: u and v share a primitive base iff log u / log v
// is rational; exponents decide between the perfect-power and general case
struct RefRelation {
  int kind;  // 0 perfect power, 1 rational log, 2 irrational
  std::uint64_t r = 0, s = 0;
};

std::uint64_t primitive_base(std::uint64_t n, std::uint64_t& exponent) {
  for (std::uint64_t w = 2; w * w <= n; ++w) {
    std::uint64_t p = w, e = 1;
    while (p < n && p <= n / w) {
      p *= w;
      ++e;
    }
    if (p == n) {
      exponent = e;
      return w;
    }
  }
  exponent = 1;
  return n;
}

RefRelation ref_relation(std::uint64_t u, std::uint64_t v) {
  std::uint64_t a = 0, b = 0;
  std::uint64_t wu = primitive_base(u, a);
  std::uint64_t wv = primitive_base(v, b);
  if (wu != wv) return {2};
  std::uint64_t g = std::gcd(a, b);
  std::uint64_t r = a / g, s = b / g;
  if (s == 1) return {0, r, 1};
  return {1, r, s};
}

}  // namespace

TEST_CASE("power brackets on hand-checked exponents") {
  PowerBracket b = bracket_power(3, 2, 1);
  CHECK(b.floor_n == 1);
  CHECK(bracket_power(3, 2, 12).floor_n == 19);  // 2^19 <= 3^12 = 531441 < 2^20
  CHECK(bracket_power(5, 2, 10).floor_n == 23);
  CHECK(bracket_power(10, 3, 4).floor_n == 8);   // 3^8 = 6561 <= 10^4 < 3^9
  CHECK(bracket_power(4, 2, 7).floor_n == 14);   // exact landing: 4^7 = 2^14
}

TEST_CASE("domain guards on degenerate inputs") {
  CHECK(thrown_code([] { bracket_power(2, 2, 3); }) == ErrorCode::domain);
  CHECK(thrown_code([] { bracket_power(2, 3, 3); }) == ErrorCode::domain);
  CHECK(thrown_code([] { bracket_power(3, 1, 3); }) == ErrorCode::domain);
  CHECK(thrown_code([] { bracket_power(3, 2, 0); }) == ErrorCode::domain);
  CHECK(thrown_code([] { fracpart_compare(1, 3, 2, 2, 2); }) == ErrorCode::domain);
  CHECK(thrown_code([] { fracpart_compare(0, 3, 2, 1, 2); }) == ErrorCode::domain);
  CHECK(thrown_code([] { power_relation(8, 8); }) == ErrorCode::domain);
  CHECK(thrown_code([] { impossibility_scan(2, 3, 10); }) == ErrorCode::domain);
}

TEST_CASE("fractional part comparisons decided by integer signs") {
  // <log_4 8> = 1/2 exactly
  CHECK(fracpart_compare(1, 8, 4, 1, 2) == Ordering::equal);
  // <log_2 3> = 0.58496...
  CHECK(fracpart_compare(1, 3, 2, 1, 2) == Ordering::greater);
  CHECK(fracpart_compare(1, 3, 2, 3, 4) == Ordering::less);
  CHECK(fracpart_compare(1, 3, 2, 0, 1) == Ordering::greater);
  // <2 log_2 3> = 0.169925...
  CHECK(fracpart_compare(2, 3, 2, 1, 4) == Ordering::less);
}

TEST_CASE("brackets and comparisons agree with 256-bit float reference") {
  mpfr_t lu, lv, x, frac, diff;
  mpfr_inits2(256, lu, lv, x, frac, diff, (mpfr_ptr)nullptr);
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<std::uint64_t> pick_v(2, 49), pick_k(1, 200),
      pick_q(2, 8);
  int checked_floor = 0, checked_cmp = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::uint64_t v = pick_v(rng);
    std::uint64_t u =
        std::uniform_int_distribution<std::uint64_t>(v + 1, 50)(rng);
    std::uint64_t k = pick_k(rng);
    mpfr_set_ui(lu, u, MPFR_RNDN);
    mpfr_log(lu, lu, MPFR_RNDN);
    mpfr_set_ui(lv, v, MPFR_RNDN);
    mpfr_log(lv, lv, MPFR_RNDN);
    mpfr_div(x, lu, lv, MPFR_RNDN);
    mpfr_mul_ui(x, x, k, MPFR_RNDN);
    mpfr_floor(frac, x);
    std::uint64_t floor_ref = mpfr_get_ui(frac, MPFR_RNDN);
    mpfr_sub(frac, x, frac, MPFR_RNDN);
    // skip asserts within 1e-50 of the boundary, where 256 bits cannot decide
    double f = mpfr_get_d(frac, MPFR_RNDN);
    if (f > 1e-50 && f < 1.0 - 1e-50) {
      CHECK(bracket_power(u, v, k).floor_n == floor_ref);
      ++checked_floor;
    }
    std::uint64_t q = pick_q(rng);
    std::uint64_t p = std::uniform_int_distribution<std::uint64_t>(1, q - 1)(rng);
    mpfr_set_ui(diff, p, MPFR_RNDN);
    mpfr_div_ui(diff, diff, q, MPFR_RNDN);
    mpfr_sub(diff, frac, diff, MPFR_RNDN);
    double d = mpfr_get_d(diff, MPFR_RNDN);
    if (std::abs(d) > 1e-50) {
      Ordering expect = d < 0 ? Ordering::less : Ordering::greater;
      CHECK(fracpart_compare(k, u, v, p, q) == expect);
      ++checked_cmp;
    }
  }
  CHECK(checked_floor > 1900);
  CHECK(checked_cmp > 1900);
  mpfr_clears(lu, lv, x, frac, diff, (mpfr_ptr)nullptr);
}

TEST_CASE("power relations on pinned pairs") {
  PowerRelation a = power_relation(8, 2);
  CHECK(a.kind == PowerRelation::Kind::perfect_power);
  CHECK(a.r == 3);
  PowerRelation b = power_relation(8, 4);
  CHECK(b.kind == PowerRelation::Kind::rational_log);
  CHECK(b.r == 3);
  CHECK(b.s == 2);
  PowerRelation c = power_relation(32, 8);
  CHECK(c.kind == PowerRelation::Kind::rational_log);
  CHECK(c.r == 5);
  CHECK(c.s == 3);
  CHECK(power_relation(6, 2).kind == PowerRelation::Kind::irrational);
  PowerRelation d = power_relation(125, 25);
  CHECK(d.kind == PowerRelation::Kind::rational_log);
  CHECK(d.r == 3);
  CHECK(d.s == 2);
}

TEST_CASE("power relations agree with factorization up to 40") {
  for (std::uint64_t v = 2; v <= 39; ++v)
    for (std::uint64_t u = v + 1; u <= 40; ++u) {
      RefRelation ref = ref_relation(u, v);
      PowerRelation got = power_relation(u, v);
      CHECK(static_cast<int>(got.kind) == ref.kind);
      if (ref.kind == 0) CHECK(got.r == ref.r);
      if (ref.kind == 1) {
        CHECK(got.r == ref.r);
        CHECK(got.s == ref.s);
      }
    }
}

TEST_CASE("middle-zone scan of log_2 3") {
  ScanReport r = impossibility_scan(3, 2, 20);
  CHECK(r.u == 3);
  CHECK(r.v == 2);
  CHECK(r.K == 20);
  CHECK(r.hits_middle == 10);
  REQUIRE(r.first_violation.has_value());
  CHECK(*r.first_violation == 1);
  CHECK(r.gap_k == 12);
  CHECK(r.gap_n == 19);
  CHECK(r.gap_num == 7153);
  CHECK(r.gap_den == 531441);  // |2^19/3^12 - 1| = 7153/531441
  CHECK(r.min_relative_gap == doctest::Approx(7153.0 / 531441.0).epsilon(1e-12));
  CHECK(r.epsilon_star == doctest::Approx(0.15910358474628547).epsilon(1e-15));
}

TEST_CASE("epsilon star is capped strictly below one half") {
  ScanReport r = impossibility_scan(19, 17, 5);
  CHECK(r.epsilon_star < 0.5);
  CHECK(r.epsilon_star > 0.499999);
}

TEST_CASE("first violation can sit deep in the window") {
  ScanReport r = impossibility_scan(9, 8, 10);
  REQUIRE(r.first_violation.has_value());
  CHECK(*r.first_violation == 5);  // <k log_8 9> crawls up by 0.0566 per step
  ScanReport none = impossibility_scan(9, 8, 4);
  CHECK(!none.first_violation.has_value());
  CHECK(none.hits_middle == 0);
}

TEST_CASE("scan trace reports every k with its bracket and zone") {
  std::vector<std::uint64_t> ks, floors;
  std::vector<std::string> zones;
  impossibility_scan(3, 2, 5, [&](std::uint64_t k, std::uint64_t n, std::string_view z) {
    ks.push_back(k);
    floors.push_back(n);
    zones.emplace_back(z);
  });
  REQUIRE(ks.size() == 5);
  for (std::uint64_t k = 1; k <= 5; ++k) {
    CHECK(ks[k - 1] == k);
    CHECK(floors[k - 1] == bracket_power(3, 2, k).floor_n);
    CHECK((zones[k - 1] == "low" || zones[k - 1] == "middle" || zones[k - 1] == "high"));
  }
  CHECK(zones[0] == "middle");  // <log_2 3> = 0.585
  CHECK(zones[1] == "low");     // <2 log_2 3> = 0.170
}

TEST_CASE("scans refuse multiplicatively dependent pairs") {
  CHECK(thrown_code([] { impossibility_scan(8, 2, 10); }) == ErrorCode::hypothesis);
  CHECK(thrown_code([] { impossibility_scan(8, 4, 10); }) == ErrorCode::hypothesis);
  CHECK(thrown_code([] { impossibility_scan(3, 2, 0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("rational pairs carry an exact residue-class witness") {
  RationalWitness w = rational_case_witness(8, 4, 3, 2, 10);
  CHECK(w.ell == 1);
  CHECK(w.distance_num == 1);
  CHECK(w.distance_den == 2);
  CHECK(w.min_distance == doctest::Approx(0.5));
  CHECK(w.checked == 5);  // k = 1, 3, 5, 7, 9

  RationalWitness x = rational_case_witness(32, 8, 5, 3, 10);
  CHECK(x.ell == 2);  // 2 * 5 = 10 = 1 (mod 3)
  CHECK(x.distance_den == 3);
  CHECK(x.min_distance == doctest::Approx(1.0 / 3.0));
  CHECK(x.checked == 3);  // k = 2, 5, 8
}

TEST_CASE("witnesses reject mismatched exponents") {
  CHECK(thrown_code([] { rational_case_witness(8, 4, 2, 3, 10); }) ==
        ErrorCode::hypothesis);
  CHECK(thrown_code([] { rational_case_witness(6, 2, 3, 2, 10); }) ==
        ErrorCode::hypothesis);
  CHECK(thrown_code([] { rational_case_witness(8, 2, 3, 1, 10); }) ==
        ErrorCode::hypothesis);
}

TEST_CASE("exact power comparisons respect the bit cap") {
  std::uint64_t saved = power_bits_cap();
  set_power_bits_cap(64);
  CHECK(thrown_code([] { bracket_power(3, 2, 100); }) == ErrorCode::capacity);
  set_power_bits_cap(saved);
  CHECK(bracket_power(3, 2, 100).floor_n == 158);
  CHECK(thrown_code([] { set_power_bits_cap(32); }) == ErrorCode::invalid_argument);
}
