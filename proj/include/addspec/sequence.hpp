#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "addspec/growth.hpp"

namespace addspec {

// Finite prefix a_1..a_N of a sequence of nonnegative integers (arbitrary
// precision).  Immutable after construction; the sorted-distinct cache makes
// counting queries O(log N) and concurrent reads safe.
class SequencePrefix {
 public:
  explicit SequencePrefix(std::vector<mpz_class> values);

  std::size_t size() const { return values_.size(); }
  // 1-based, matching a_n subscripts.
  const mpz_class& at(std::size_t n) const;
  const std::vector<mpz_class>& values() const { return values_; }
  bool strictly_increasing() const { return strictly_increasing_; }
  const std::vector<mpz_class>& sorted_distinct() const { return sorted_distinct_; }

  // Number of distinct values in [y, x].
  mpz_class counting(const mpz_class& y, const mpz_class& x) const;

  static SequencePrefix from_text(std::string_view text);
  static SequencePrefix from_json(const Json& j);
  static SequencePrefix from_file(const std::string& path);
  std::string to_text() const;
  Json to_json() const;  // array of decimal strings

 private:
  std::vector<mpz_class> values_;
  std::vector<mpz_class> sorted_distinct_;
  bool strictly_increasing_ = true;
};

// Index permutation, applied as (rearranged)_n = a_{sigma(n)}.
class PermutationSpec {
 public:
  enum class Kind { explicit_map, swap_rule, power_swap };

  static PermutationSpec explicit_map(std::vector<std::uint64_t> images);
  static PermutationSpec swap_rule(std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs);
  // Swaps 2^(2k-1) <-> 2^(2k); the window must contain both halves of every
  // pair it touches, i.e. the largest power of 2 <= N has even exponent.
  static PermutationSpec power_swap();

  Kind kind() const { return kind_; }
  // Throws hypothesis errors when the map is not a bijection of {1..N}.
  void validate(std::uint64_t N) const;
  std::uint64_t apply(std::uint64_t n) const;

  Json to_json() const;
  static PermutationSpec from_json(const Json& j);

 private:
  PermutationSpec() = default;
  Kind kind_ = Kind::power_swap;
  std::vector<std::uint64_t> images_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs_;
};

SequencePrefix rearrange(const SequencePrefix& a, const PermutationSpec& sigma);

// Finite-scale reading of a_n ~ f(n): threshold_index is the smallest N0 with
// |a_n/f(n) - 1| <= epsilon for all n in [N0, N] (N+1 if even a_N violates);
// sup_deviation is measured on [max(N0, N/2), N], so holds means the whole
// second half of the window conforms.
struct AsymptoticVerdict {
  double epsilon = 0;
  std::uint64_t threshold_index = 0;
  std::uint64_t window_end = 0;
  double sup_deviation = 0;
  bool holds = false;
  // Cluster means of tail ratios, reported when the verdict fails; recovers
  // the distinct limit points a bad rearrangement produces.
  std::vector<double> limit_points;

  Json to_json() const;
};

AsymptoticVerdict asymptotic_verdict(const SequencePrefix& a, const GrowthFunction& f,
                                     double epsilon);

// Ratio a_n/f(n) used everywhere a verdict is computed.
double growth_ratio(const mpz_class& value, const GrowthFunction& f, double n);

// Stable sort returning the sorted prefix and the permutation sigma with
// sorted_n = a_{sigma(n)}.
std::pair<SequencePrefix, PermutationSpec> sort_rearrangement(const SequencePrefix& a);

// min/max of C(0,x)/(x+1) over a geometric grid spanning [x_max/2, x_max].
struct DensityEstimate {
  double lower = 0;
  double upper = 0;
  mpz_class x_max;

  Json to_json() const;
};

DensityEstimate density_estimate(const SequencePrefix& c, const mpz_class& x_max);

}  // namespace addspec
