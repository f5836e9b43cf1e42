#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "addspec/sequence.hpp"

namespace addspec {

// Ordered view of an infinite (or bounded) set of nonnegative integers,
// queried by the greedy selection.
class IntegerSetView {
 public:
  virtual ~IntegerSetView() = default;
  // Smallest member >= v, if any.
  virtual std::optional<mpz_class> next_geq(const mpz_class& v) const = 0;
  // |C intersect [y, x]| for 0 <= y <= x.
  virtual mpz_class count(const mpz_class& y, const mpz_class& x) const = 0;
};

// Explicit finite set (values deduplicated and sorted).
class ExplicitIntegerSet : public IntegerSetView {
 public:
  explicit ExplicitIntegerSet(std::vector<mpz_class> values);
  explicit ExplicitIntegerSet(const SequencePrefix& seq);
  std::optional<mpz_class> next_geq(const mpz_class& v) const override;
  mpz_class count(const mpz_class& y, const mpz_class& x) const override;

 private:
  std::vector<mpz_class> values_;
};

// N_0 minus a sorted excluded set.
class ComplementIntegerSet : public IntegerSetView {
 public:
  explicit ComplementIntegerSet(std::vector<mpz_class> excluded);
  explicit ComplementIntegerSet(const SequencePrefix& excluded_seq);
  std::optional<mpz_class> next_geq(const mpz_class& v) const override;
  mpz_class count(const mpz_class& y, const mpz_class& x) const override;

 private:
  std::vector<mpz_class> excluded_;
};

// Tier thresholds: tier t starts at index thresholds[t-1]; strictly
// increasing, at most one new tier per index.  Tier t >= 1 of index n caps the
// selection interval at [(1-1/t) g(n), (1+1/t) g(n)]; indices before the
// first threshold carry tier 0 and are unconstrained.
struct SelectionSchedule {
  std::vector<std::uint64_t> thresholds;

  std::uint64_t tier_of(std::uint64_t n) const;
  Json to_json() const;
};

SelectionSchedule build_schedule(const IntegerSetView& c, const GrowthFunction& g,
                                 std::uint64_t N);

struct SelectionResult {
  SequencePrefix values;
  SelectionSchedule schedule;
  double density_lower = 0;  // measured density of C on the working tail
};

// Greedy filler selection: for each n, the smallest unused element of C inside
// the tier interval around g(n).  Preconditions: C dense (>= 0.9 on the
// working range); errors report the exhausted interval.
SelectionResult select_from_complement(const IntegerSetView& c, const GrowthFunction& g,
                                       std::uint64_t N);
SelectionResult select_from_complement(const SequencePrefix& c, const GrowthFunction& g,
                                       std::uint64_t N);

// Embedding positions n_k = floor(g^{-1}(f(k))), k = 1..K.  Preconditions
// (checked on the integer grid): g <= f on [1, K] and consecutive schedule
// gaps >= 1; output must be strictly increasing.
std::vector<std::uint64_t> index_schedule(const GrowthFunction& f, const GrowthFunction& g,
                                          std::uint64_t K);

struct SupersequenceConfig {
  double seed_epsilon = 0.1;     // required sup deviation of A against f
  double verdict_epsilon = 0.05; // reported verdict of B against g
  double stability_delta = 1.0;
  double stability_grid_max = 1e6;
  double stability_tolerance = 0.01;
  // Administrative switch for negative experiments: run the construction even
  // when the hypotheses fail.
  bool skip_hypothesis_checks = false;
};

struct SupersequenceResult {
  SequencePrefix b;
  std::vector<std::uint64_t> embedding;  // position of a_k in b, 1-based
  std::uint64_t filler_count = 0;
  AsymptoticVerdict verdict;

  Json to_json() const;
};

// Theorem-style merge: embeds a prefix of A at schedule positions, fills the
// rest greedily from the complement of A, re-sorts, and reports the verdict of
// the result against g.
SupersequenceResult build_supersequence(const SequencePrefix& a, const GrowthFunction& f,
                                        const GrowthFunction& g, std::uint64_t N,
                                        const SupersequenceConfig& cfg = {});

struct AdversarialResult {
  GrowthFunction f;
  SequencePrefix a;
  double witness = 0;      // min over k, n of |f(k)/g(n) - 1|
  double margin_half = 0;  // min g(m_k + 1/2)/g(m_k)
  double margin_step = 0;  // min g(m_k + 1)/g(m_k + 1/2)

  Json to_json() const;
};

// Builds f through the half-step values g(m_k + 1/2) so that no integer n has
// g(n) near f(k); requires both half-step growth ratios >= 1 + gamma and unit
// spacing between consecutive knot values.
AdversarialResult adversarial_construction(const GrowthFunction& g,
                                           const std::vector<std::uint64_t>& m,
                                           double gamma = 0.05);

}  // namespace addspec
