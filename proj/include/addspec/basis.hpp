#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "addspec/supersequence.hpp"

namespace addspec {

// Dense bit-vector over [0, size); backing store for sumset computations.
class Bitmap {
 public:
  Bitmap() = default;
  explicit Bitmap(std::uint64_t nbits);

  std::uint64_t size() const { return nbits_; }
  bool test(std::uint64_t i) const;
  void set(std::uint64_t i);
  std::uint64_t popcount() const;
  // this |= (src << shift), truncated to [0, size); sizes must match.
  void or_shifted(const Bitmap& src, std::uint64_t shift);
  // Same, but only destination words [w_lo, w_hi) are written (thread chunk).
  void or_shifted_words(const Bitmap& src, std::uint64_t shift, std::size_t w_lo,
                        std::size_t w_hi);
  // Subset test: every bit of *this is set in other.
  bool implies(const Bitmap& other) const;
  // Raw export, bit i = byte i/8, bit i%8.
  std::vector<std::uint8_t> to_le_bytes() const;

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::size_t word_count() const { return words_.size(); }

 private:
  void mask_tail();

  std::uint64_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

// Memory guard for sumset bit-vectors, in bits (default 2^30).
std::uint64_t bitmap_capacity();
void set_bitmap_capacity(std::uint64_t bits);

// h-fold sumset of A intersected with [0, x_max], as a bit-vector of length
// x_max+1.  Values of A above x_max are ignored.  Shift-OR accumulation,
// O(h * |A| * x_max / 64); rounds optionally parallelize over word blocks.
Bitmap iterated_sumset(const SequencePrefix& a, unsigned h, std::uint64_t x_max,
                       unsigned threads = 1);

// Coverage of [0, x_max] by the h-fold sumset.  n0_window is the least m with
// [m, x_max] fully covered (absent when x_max itself is missing); the window
// verdict requires that covered tail to span at least half the range.
struct CoverageReport {
  unsigned h = 1;
  std::uint64_t x_max = 0;
  std::vector<std::uint64_t> missing;  // first missing_limit gaps
  std::uint64_t missing_total = 0;
  std::optional<std::uint64_t> largest_missing;
  std::optional<std::uint64_t> n0_window;
  bool is_window_basis = false;

  Json to_json() const;
};

CoverageReport coverage_from_bitmap(const Bitmap& bits, unsigned h,
                                    std::size_t missing_limit = 1000);
CoverageReport verify_basis(const SequencePrefix& a, unsigned h, std::uint64_t x_max,
                            unsigned threads = 1, std::size_t missing_limit = 1000);

// Exact check, on a geometric grid of x in [n0, x_max], of
//   x - n0 < C(A(0,x)+h-1, h) <= (A(0,x)+h-1)^h / h!
// (big-integer arithmetic throughout).  True for every genuine window basis.
bool check_counting_inequality(const SequencePrefix& a, unsigned h,
                               const CoverageReport& report);

// Tail-window mean of a_n/n^h, the 1/h! ceiling, and both exact inequality
// checks (the counting bound above and a_n - n0 < (n+h-1)^h / h!).
struct EigenvalueReport {
  unsigned h = 1;
  double alpha_hat = 0;
  double bound = 0;  // 1/h!
  bool ineq1_ok = false;
  bool ineq2_ok = false;

  Json to_json() const;
};

EigenvalueReport eigenvalue_report(const SequencePrefix& a, unsigned h,
                                   const CoverageReport& report);

// Seed for the dilution pipeline: {round(alpha * k^h)} unioned with the
// initial segment [0, pad], truncated to `count` values.
SequencePrefix synthetic_eigen_seed(double alpha, unsigned h, std::size_t count,
                                    std::uint64_t pad);

struct DilutionResult {
  unsigned h = 1;
  double alpha = 0;
  double beta = 0;
  SupersequenceResult built;
  CoverageReport seed_coverage;
  CoverageReport super_coverage;
  bool containment_ok = false;        // sumset(A) subset of sumset(B), bitwise
  double embedding_ratio_mean = 0;    // tail mean of n_k/k

  Json to_json() const;
};

// Builds B = supersequence of A tracking beta*x^h from alpha*x^h, then
// compares the h-fold sumsets of A and B on [0, x_max].
DilutionResult dilute_eigenvalue(const SequencePrefix& a, unsigned h, double alpha,
                                 double beta, std::uint64_t n, std::uint64_t x_max,
                                 const SupersequenceConfig& cfg = {}, unsigned threads = 1);

struct SpectrumSample {
  double alpha = 0;
  double beta = 0;
  bool ok = false;  // dilution ran, verdict holds, containment exact
  double sup_deviation = 0;
  bool containment_ok = false;
  std::string failure;  // error message when the run aborted

  Json to_json() const;
};

// Downward-closure evidence: for each alpha, success at beta must imply
// success at every smaller tested beta.
struct SpectrumReport {
  unsigned h = 1;
  double ceiling = 0;  // 1/h!
  std::vector<SpectrumSample> samples;
  bool downward_closed = true;

  Json to_json() const;
};

SpectrumReport spectrum_interval_report(unsigned h, std::vector<SpectrumSample> samples);
SpectrumReport run_spectrum_grid(unsigned h, const std::vector<double>& alphas,
                                 unsigned betas_per_alpha, std::uint64_t n,
                                 std::uint64_t x_max, std::uint64_t pad,
                                 const SupersequenceConfig& cfg = {}, unsigned threads = 1);

}  // namespace addspec
