#include "addspec/basis.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <set>
#include <thread>

namespace addspec {

namespace {

void require(bool ok, ErrorCode code, const std::string& msg, Json detail = {}) {
  if (!ok) throw AsError(code, msg, std::move(detail));
}

std::atomic<std::uint64_t> g_bitmap_capacity{std::uint64_t(1) << 30};

}  // namespace

std::uint64_t bitmap_capacity() { return g_bitmap_capacity.load(); }

void set_bitmap_capacity(std::uint64_t bits) {
  require(bits >= 64, ErrorCode::invalid_argument, "capacity below one word");
  g_bitmap_capacity.store(bits);
}

Bitmap::Bitmap(std::uint64_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

bool Bitmap::test(std::uint64_t i) const {
  require(i < nbits_, ErrorCode::invalid_argument, "bit index out of range");
  return (words_[i >> 6] >> (i & 63)) & 1;
}

void Bitmap::set(std::uint64_t i) {
  require(i < nbits_, ErrorCode::invalid_argument, "bit index out of range");
  words_[i >> 6] |= std::uint64_t(1) << (i & 63);
}

std::uint64_t Bitmap::popcount() const {
  std::uint64_t total = 0;
  for (std::uint64_t w : words_) total += std::popcount(w);
  return total;
}

void Bitmap::mask_tail() {
  if (nbits_ & 63) words_.back() &= (std::uint64_t(1) << (nbits_ & 63)) - 1;
}

void Bitmap::or_shifted(const Bitmap& src, std::uint64_t shift) {
  or_shifted_words(src, shift, 0, words_.size());
}

void Bitmap::or_shifted_words(const Bitmap& src, std::uint64_t shift, std::size_t w_lo,
                              std::size_t w_hi) {
  require(src.nbits_ == nbits_, ErrorCode::invalid_argument, "bitmap size mismatch");
  if (shift >= nbits_) return;
  const std::size_t ws = shift >> 6;
  const unsigned bs = shift & 63;
  const auto& sw = src.words_;
  std::size_t j = std::max(w_lo, ws);
  if (bs == 0) {
    for (; j < w_hi; ++j) words_[j] |= sw[j - ws];
  } else {
    for (; j < w_hi; ++j) {
      std::uint64_t v = sw[j - ws] << bs;
      if (j > ws) v |= sw[j - ws - 1] >> (64 - bs);
      words_[j] |= v;
    }
  }
  if (w_hi == words_.size()) mask_tail();
}

bool Bitmap::implies(const Bitmap& other) const {
  require(other.nbits_ == nbits_, ErrorCode::invalid_argument, "bitmap size mismatch");
  for (std::size_t j = 0; j < words_.size(); ++j)
    if (words_[j] & ~other.words_[j]) return false;
  return true;
}

std::vector<std::uint8_t> Bitmap::to_le_bytes() const {
  std::vector<std::uint8_t> out((nbits_ + 7) / 8, 0);
  for (std::size_t b = 0; b < out.size(); ++b)
    out[b] = static_cast<std::uint8_t>(words_[b >> 3] >> ((b & 7) * 8));
  return out;
}

namespace {

void accumulate_round(Bitmap& dst, const Bitmap& src, const std::vector<std::uint64_t>& elems,
                      unsigned threads) {
  const std::size_t W = dst.word_count();
  unsigned T = std::max(1u, threads);
  T = std::min<unsigned>(T, std::max(1u, std::thread::hardware_concurrency()));
  if (T <= 1 || W < 4096) {
    for (std::uint64_t e : elems) dst.or_shifted(src, e);
    return;
  }
  T = std::min<std::size_t>(T, W);
  std::vector<std::thread> pool;
  pool.reserve(T);
  for (unsigned t = 0; t < T; ++t) {
    std::size_t lo = W * t / T, hi = W * (t + 1) / T;
    pool.emplace_back([&, lo, hi] {
      for (std::uint64_t e : elems) dst.or_shifted_words(src, e, lo, hi);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

Bitmap iterated_sumset(const SequencePrefix& a, unsigned h, std::uint64_t x_max,
                       unsigned threads) {
  require(h >= 1, ErrorCode::invalid_argument, "h must be >= 1");
  require(x_max >= 1, ErrorCode::invalid_argument, "x_max must be >= 1");
  const std::uint64_t nbits = x_max + 1;
  require(nbits <= bitmap_capacity(), ErrorCode::capacity, "bit-vector exceeds capacity",
          Json{{"requested_bits", nbits}, {"capacity_bits", bitmap_capacity()}});

  std::vector<std::uint64_t> elems;
  for (const mpz_class& v : a.sorted_distinct()) {
    if (v > x_max) break;
    elems.push_back(v.get_ui());
  }

  Bitmap base(nbits);
  for (std::uint64_t e : elems) base.set(e);
  Bitmap cur = base;
  for (unsigned round = 2; round <= h; ++round) {
    Bitmap next(nbits);
    accumulate_round(next, cur, elems, threads);
    cur = std::move(next);
  }
  return cur;
}

CoverageReport coverage_from_bitmap(const Bitmap& bits, unsigned h,
                                    std::size_t missing_limit) {
  require(bits.size() >= 1, ErrorCode::invalid_argument, "empty bitmap");
  CoverageReport r;
  r.h = h;
  r.x_max = bits.size() - 1;

  const auto& words = bits.words();
  std::uint64_t largest = 0;
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    const std::uint64_t base = std::uint64_t(wi) << 6;
    const unsigned lim = static_cast<unsigned>(std::min<std::uint64_t>(64, bits.size() - base));
    const std::uint64_t w = words[wi];
    if (lim == 64 && w == ~std::uint64_t(0)) continue;
    for (unsigned b = 0; b < lim; ++b) {
      if ((w >> b) & 1) continue;
      std::uint64_t i = base + b;
      ++r.missing_total;
      largest = i;
      if (r.missing.size() < missing_limit) r.missing.push_back(i);
    }
  }

  if (r.missing_total == 0) {
    r.n0_window = 0;
  } else {
    r.largest_missing = largest;
    if (largest < r.x_max) r.n0_window = largest + 1;
  }
  r.is_window_basis =
      r.n0_window.has_value() && 2 * (r.x_max - *r.n0_window) >= r.x_max;
  return r;
}

CoverageReport verify_basis(const SequencePrefix& a, unsigned h, std::uint64_t x_max,
                            unsigned threads, std::size_t missing_limit) {
  return coverage_from_bitmap(iterated_sumset(a, h, x_max, threads), h, missing_limit);
}

bool check_counting_inequality(const SequencePrefix& a, unsigned h,
                               const CoverageReport& report) {
  require(report.is_window_basis, ErrorCode::hypothesis,
          "coverage report is not a window basis");
  const std::uint64_t n0 = *report.n0_window;
  const std::uint64_t X = report.x_max;
  mpz_class fac;
  mpz_fac_ui(fac.get_mpz_t(), h);

  std::uint64_t x = n0;
  for (;;) {
    const unsigned long cnt = a.counting(0, x).get_ui();
    mpz_class binom, pow;
    mpz_bin_uiui(binom.get_mpz_t(), cnt + h - 1, h);
    if (mpz_cmp_ui(binom.get_mpz_t(), x - n0) <= 0) return false;
    mpz_ui_pow_ui(pow.get_mpz_t(), cnt + h - 1, h);
    if (binom * fac > pow) return false;
    if (x == X) break;
    x = std::max(x + 1, static_cast<std::uint64_t>(static_cast<double>(x) * 1.05));
    if (x > X) x = X;
  }
  return true;
}

EigenvalueReport eigenvalue_report(const SequencePrefix& a, unsigned h,
                                   const CoverageReport& report) {
  require(report.is_window_basis, ErrorCode::hypothesis,
          "coverage report is not a window basis");
  require(a.strictly_increasing(), ErrorCode::hypothesis,
          "sequence must be strictly increasing");
  EigenvalueReport r;
  r.h = h;

  const std::size_t M = a.size();
  const std::size_t lo = std::max<std::size_t>(1, M / 2);
  double sum = 0;
  for (std::size_t n = lo; n <= M; ++n) {
    mpz_class pow;
    mpz_ui_pow_ui(pow.get_mpz_t(), n, h);
    mpq_class q(a.at(n), pow);
    q.canonicalize();
    sum += q.get_d();
  }
  r.alpha_hat = sum / static_cast<double>(M - lo + 1);

  double fac_d = 1;
  for (unsigned i = 2; i <= h; ++i) fac_d *= i;
  r.bound = 1.0 / fac_d;

  r.ineq1_ok = check_counting_inequality(a, h, report);

  mpz_class fac;
  mpz_fac_ui(fac.get_mpz_t(), h);
  const mpz_class n0(static_cast<unsigned long>(*report.n0_window));
  r.ineq2_ok = true;
  for (std::size_t n = 1; n <= M; ++n) {
    if (a.at(n) > report.x_max) break;
    mpz_class pow;
    mpz_ui_pow_ui(pow.get_mpz_t(), n + h - 1, h);
    if ((a.at(n) - n0) * fac >= pow) {
      r.ineq2_ok = false;
      break;
    }
  }
  return r;
}

SequencePrefix synthetic_eigen_seed(double alpha, unsigned h, std::size_t count,
                                    std::uint64_t pad) {
  require(alpha > 0, ErrorCode::invalid_argument, "alpha must be > 0");
  require(h >= 1, ErrorCode::invalid_argument, "h must be >= 1");
  require(count >= 1, ErrorCode::invalid_argument, "count must be >= 1");
  require(pad < (std::uint64_t(1) << 24), ErrorCode::capacity, "pad segment too large");

  std::set<mpz_class> vals;
  for (std::uint64_t v = 0; v <= pad && vals.size() < count; ++v)
    vals.insert(mpz_class(static_cast<unsigned long>(v)));
  for (std::uint64_t k = 1; vals.size() < count; ++k) {
    double p = alpha;
    for (unsigned i = 0; i < h; ++i) p *= static_cast<double>(k);
    require(p < 9e18, ErrorCode::capacity, "seed value exceeds 64-bit range",
            Json{{"k", k}});
    vals.insert(mpz_class(static_cast<unsigned long>(std::llround(p))));
    require(k < (std::uint64_t(1) << 30), ErrorCode::internal, "seed generation stuck");
  }
  return SequencePrefix(std::vector<mpz_class>(vals.begin(), vals.end()));
}

DilutionResult dilute_eigenvalue(const SequencePrefix& a, unsigned h, double alpha,
                                 double beta, std::uint64_t n, std::uint64_t x_max,
                                 const SupersequenceConfig& cfg, unsigned threads) {
  require(h >= 1, ErrorCode::invalid_argument, "h must be >= 1");
  require(alpha > 0, ErrorCode::invalid_argument, "alpha must be > 0");
  require(beta > 0 && beta < alpha, ErrorCode::hypothesis, "need 0 < beta < alpha",
          Json{{"alpha", alpha}, {"beta", beta}});

  GrowthFunction f = GrowthFunction::power(alpha, static_cast<double>(h));
  GrowthFunction g = GrowthFunction::power(beta, static_cast<double>(h));
  SupersequenceResult built = build_supersequence(a, f, g, n, cfg);

  Bitmap bm_a = iterated_sumset(a, h, x_max, threads);
  Bitmap bm_b = iterated_sumset(built.b, h, x_max, threads);
  bool containment = bm_a.implies(bm_b);
  CoverageReport cov_a = coverage_from_bitmap(bm_a, h);
  CoverageReport cov_b = coverage_from_bitmap(bm_b, h);

  const std::size_t K = built.embedding.size();
  const std::size_t lo = std::max<std::size_t>(1, K / 2);
  double sum = 0;
  for (std::size_t k = lo; k <= K; ++k)
    sum += static_cast<double>(built.embedding[k - 1]) / static_cast<double>(k);
  double mean = K ? sum / static_cast<double>(K - lo + 1) : 0;

  return DilutionResult{h,
                        alpha,
                        beta,
                        std::move(built),
                        std::move(cov_a),
                        std::move(cov_b),
                        containment,
                        mean};
}

SpectrumReport spectrum_interval_report(unsigned h, std::vector<SpectrumSample> samples) {
  require(h >= 1, ErrorCode::invalid_argument, "h must be >= 1");
  SpectrumReport r;
  r.h = h;
  double fac = 1;
  for (unsigned i = 2; i <= h; ++i) fac *= i;
  r.ceiling = 1.0 / fac;
  r.samples = std::move(samples);
  for (const auto& hi : r.samples) {
    if (!hi.ok) continue;
    for (const auto& lo : r.samples) {
      if (lo.alpha == hi.alpha && lo.beta < hi.beta && !lo.ok) r.downward_closed = false;
    }
  }
  return r;
}

SpectrumReport run_spectrum_grid(unsigned h, const std::vector<double>& alphas,
                                 unsigned betas_per_alpha, std::uint64_t n,
                                 std::uint64_t x_max, std::uint64_t pad,
                                 const SupersequenceConfig& cfg, unsigned threads) {
  require(!alphas.empty(), ErrorCode::invalid_argument, "need at least one alpha");
  require(betas_per_alpha >= 1, ErrorCode::invalid_argument, "need at least one beta");
  std::vector<SpectrumSample> samples;
  for (double alpha : alphas) {
    SequencePrefix seed = synthetic_eigen_seed(alpha, h, n, pad);
    for (unsigned i = 1; i <= betas_per_alpha; ++i) {
      double beta = alpha * i / (betas_per_alpha + 1);
      SpectrumSample s;
      s.alpha = alpha;
      s.beta = beta;
      try {
        DilutionResult d = dilute_eigenvalue(seed, h, alpha, beta, n, x_max, cfg, threads);
        s.sup_deviation = d.built.verdict.sup_deviation;
        s.containment_ok = d.containment_ok;
        s.ok = d.built.verdict.holds && d.containment_ok;
      } catch (const AsError& e) {
        s.failure = e.what();
      }
      samples.push_back(std::move(s));
    }
  }
  return spectrum_interval_report(h, std::move(samples));
}

Json CoverageReport::to_json() const {
  Json miss = Json::array();
  for (std::uint64_t v : missing) miss.push_back(v);
  Json j{{"h", h},
         {"x_max", x_max},
         {"missing", std::move(miss)},
         {"missing_total", missing_total}};
  j["largest_missing"] = largest_missing ? Json(*largest_missing) : Json(nullptr);
  j["n0_window"] = n0_window ? Json(*n0_window) : Json(nullptr);
  j["is_window_basis"] = is_window_basis;
  return j;
}

Json EigenvalueReport::to_json() const {
  return Json{{"h", h},
              {"alpha_hat", alpha_hat},
              {"bound", bound},
              {"ineq1_ok", ineq1_ok},
              {"ineq2_ok", ineq2_ok}};
}

Json DilutionResult::to_json() const {
  return Json{{"h", h},
              {"alpha", alpha},
              {"beta", beta},
              {"supersequence", built.to_json()},
              {"seed_coverage", seed_coverage.to_json()},
              {"super_coverage", super_coverage.to_json()},
              {"containment_ok", containment_ok},
              {"embedding_ratio_mean", embedding_ratio_mean}};
}

Json SpectrumSample::to_json() const {
  Json j{{"alpha", alpha},
         {"beta", beta},
         {"ok", ok},
         {"sup_deviation", sup_deviation},
         {"containment_ok", containment_ok}};
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

Json SpectrumReport::to_json() const {
  Json arr = Json::array();
  for (const auto& s : samples) arr.push_back(s.to_json());
  return Json{{"h", h},
              {"ceiling", ceiling},
              {"downward_closed", downward_closed},
              {"samples", std::move(arr)}};
}

}  // namespace addspec
