#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include <gmpxx.h>

#include "addspec/errors.hpp"

namespace addspec {

enum class Ordering { less, equal, greater };

// Size guard for exact power comparisons, in bits (default 1e8).
std::uint64_t power_bits_cap();
void set_power_bits_cap(std::uint64_t bits);

// Exact bracketing of u^k between powers of v: v^floor_n <= u^k < v^(floor_n+1),
// i.e. floor_n = [k log_v u].  Seeded from floating logs, corrected by exact
// big-integer comparisons.
struct PowerBracket {
  std::uint64_t u = 0, v = 0, k = 0;
  std::uint64_t floor_n = 0;

  Json to_json() const;
};

PowerBracket bracket_power(std::uint64_t u, std::uint64_t v, std::uint64_t k);

// Compares <k log_v u> with p/q exactly, via the sign of u^(kq) - v^(nq+p).
Ordering fracpart_compare(std::uint64_t k, std::uint64_t u, std::uint64_t v,
                          std::uint64_t p, std::uint64_t q);

struct PowerRelation {
  enum class Kind { perfect_power, rational_log, irrational };
  Kind kind = Kind::irrational;
  // perfect_power: u = v^r.  rational_log: u^s = v^r, gcd(r,s) = 1, s > 1.
  std::uint64_t r = 0, s = 0;

  Json to_json() const;
};

PowerRelation power_relation(std::uint64_t u, std::uint64_t v);

// Middle-zone statistics of <k log_v u> for k = 1..K, every membership decided
// by exact power comparison.  first_violation is the least k landing in
// [1/4, 3/4] — the zone the approximation argument needs to stay out of.
struct ScanReport {
  std::uint64_t u = 0, v = 0, K = 0;
  std::uint64_t hits_middle = 0;
  std::optional<std::uint64_t> first_violation;
  double epsilon_star = 0;      // largest usable epsilon, capped below 1/2
  double min_relative_gap = 0;  // min over k <= K of |v^n/u^k - 1|
  std::uint64_t gap_k = 0, gap_n = 0;
  mpz_class gap_num, gap_den;   // the minimum gap as an exact reduced fraction

  Json to_json() const;
};

using TraceSink =
    std::function<void(std::uint64_t k, std::uint64_t floor_n, std::string_view zone)>;

ScanReport impossibility_scan(std::uint64_t u, std::uint64_t v, std::uint64_t K,
                              const TraceSink& trace = {});

// The residue-class obstruction when log u/log v = r/s: for k = ell (mod s),
// k log_v u sits exactly 1/s above an integer, so v^n/u^k is bounded away
// from 1 along the whole class.
struct RationalWitness {
  std::uint64_t u = 0, v = 0, r = 0, s = 0;
  std::uint64_t ell = 0;        // 1 <= ell < s, ell*r = 1 (mod s)
  std::uint64_t distance_num = 1, distance_den = 1;  // exactly 1/s
  double min_distance = 0;
  std::uint64_t checked = 0;    // class members verified in the window

  Json to_json() const;
};

RationalWitness rational_case_witness(std::uint64_t u, std::uint64_t v, std::uint64_t r,
                                      std::uint64_t s, std::uint64_t K);

}  // namespace addspec
