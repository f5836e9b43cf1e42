#include "addspec/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace addspec {

namespace {

void require(bool ok, ErrorCode code, const std::string& msg, Json detail = {}) {
  if (!ok) throw AsError(code, msg, std::move(detail));
}

bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::uint64_t n) {
  int e = 0;
  while (n > 1) { n >>= 1; ++e; }
  return e;
}

}  // namespace

SequencePrefix::SequencePrefix(std::vector<mpz_class> values) : values_(std::move(values)) {
  require(!values_.empty(), ErrorCode::invalid_argument, "sequence must be nonempty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    require(values_[i] >= 0, ErrorCode::invalid_argument, "sequence values must be >= 0",
            Json{{"index", i + 1}});
    if (i > 0 && values_[i] <= values_[i - 1]) strictly_increasing_ = false;
  }
  sorted_distinct_ = values_;
  std::sort(sorted_distinct_.begin(), sorted_distinct_.end());
  sorted_distinct_.erase(std::unique(sorted_distinct_.begin(), sorted_distinct_.end()),
                         sorted_distinct_.end());
}

const mpz_class& SequencePrefix::at(std::size_t n) const {
  require(n >= 1 && n <= values_.size(), ErrorCode::invalid_argument, "index out of range",
          Json{{"n", n}, {"size", values_.size()}});
  return values_[n - 1];
}

mpz_class SequencePrefix::counting(const mpz_class& y, const mpz_class& x) const {
  require(y >= 0 && y <= x, ErrorCode::invalid_argument, "need 0 <= y <= x");
  auto lo = std::lower_bound(sorted_distinct_.begin(), sorted_distinct_.end(), y);
  auto hi = std::upper_bound(sorted_distinct_.begin(), sorted_distinct_.end(), x);
  return mpz_class(static_cast<unsigned long>(hi - lo));
}

SequencePrefix SequencePrefix::from_text(std::string_view text) {
  std::vector<mpz_class> vals;
  std::string tok;
  std::stringstream ss{std::string(text)};
  while (ss >> tok) {
    mpz_class v;
    require(mpz_set_str(v.get_mpz_t(), tok.c_str(), 10) == 0 && v >= 0,
            ErrorCode::invalid_argument, "bad sequence token: " + tok);
    vals.push_back(std::move(v));
  }
  return SequencePrefix(std::move(vals));
}

SequencePrefix SequencePrefix::from_json(const Json& j) {
  require(j.is_array(), ErrorCode::invalid_argument, "sequence JSON must be an array");
  std::vector<mpz_class> vals;
  vals.reserve(j.size());
  for (const auto& e : j) {
    if (e.is_string()) {
      mpz_class v;
      require(mpz_set_str(v.get_mpz_t(), e.get<std::string>().c_str(), 10) == 0 && v >= 0,
              ErrorCode::invalid_argument, "bad decimal string: " + e.get<std::string>());
      vals.push_back(std::move(v));
    } else if (e.is_number_unsigned()) {
      vals.push_back(mpz_class(static_cast<unsigned long>(e.get<std::uint64_t>())));
    } else {
      throw AsError(ErrorCode::invalid_argument,
                    "sequence entries must be decimal strings or nonnegative integers");
    }
  }
  return SequencePrefix(std::move(vals));
}

SequencePrefix SequencePrefix::from_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::invalid_argument, "cannot open sequence file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  std::size_t b = text.find_first_not_of(" \t\r\n");
  require(b != std::string::npos, ErrorCode::invalid_argument, "empty sequence file: " + path);
  if (text[b] == '[') {
    Json j = Json::parse(text, nullptr, false);
    require(!j.is_discarded(), ErrorCode::invalid_argument, "malformed sequence JSON in " + path);
    return from_json(j);
  }
  return from_text(text);
}

std::string SequencePrefix::to_text() const {
  std::string out;
  for (const mpz_class& v : values_) {
    out += v.get_str();
    out += '\n';
  }
  return out;
}

Json SequencePrefix::to_json() const {
  Json arr = Json::array();
  for (const mpz_class& v : values_) arr.push_back(v.get_str());
  return arr;
}

PermutationSpec PermutationSpec::explicit_map(std::vector<std::uint64_t> images) {
  PermutationSpec p;
  p.kind_ = Kind::explicit_map;
  p.images_ = std::move(images);
  return p;
}

PermutationSpec PermutationSpec::swap_rule(
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs) {
  PermutationSpec p;
  p.kind_ = Kind::swap_rule;
  p.pairs_ = std::move(pairs);
  return p;
}

PermutationSpec PermutationSpec::power_swap() {
  PermutationSpec p;
  p.kind_ = Kind::power_swap;
  return p;
}

void PermutationSpec::validate(std::uint64_t N) const {
  require(N >= 1, ErrorCode::invalid_argument, "window must be nonempty");
  switch (kind_) {
    case Kind::explicit_map: {
      require(images_.size() == N, ErrorCode::hypothesis,
              "explicit permutation must cover the window exactly",
              Json{{"map_size", images_.size()}, {"N", N}});
      std::vector<bool> seen(N + 1, false);
      for (std::uint64_t img : images_) {
        require(img >= 1 && img <= N && !seen[img], ErrorCode::hypothesis,
                "explicit map is not a bijection of {1..N}", Json{{"image", img}});
        seen[img] = true;
      }
      return;
    }
    case Kind::swap_rule: {
      std::vector<std::uint64_t> touched;
      for (const auto& [i, j] : pairs_) {
        require(i >= 1 && i <= N && j >= 1 && j <= N && i != j, ErrorCode::hypothesis,
                "swap pair outside window", Json{{"i", i}, {"j", j}, {"N", N}});
        touched.push_back(i);
        touched.push_back(j);
      }
      std::sort(touched.begin(), touched.end());
      require(std::adjacent_find(touched.begin(), touched.end()) == touched.end(),
              ErrorCode::hypothesis, "swap pairs must be disjoint");
      return;
    }
    case Kind::power_swap: {
      // Each affected pair (2^(2k-1), 2^(2k)) must lie inside {1..N}.
      for (std::uint64_t lo = 2; lo <= N; lo <<= 2) {
        std::uint64_t hi = lo << 1;
        require(hi <= N, ErrorCode::hypothesis,
                "power-swap pair leaves the window; largest power of 2 in {1..N} "
                "must have even exponent",
                Json{{"pair_low", lo}, {"pair_high", hi}, {"N", N}});
      }
      return;
    }
  }
}

std::uint64_t PermutationSpec::apply(std::uint64_t n) const {
  switch (kind_) {
    case Kind::explicit_map:
      require(n >= 1 && n <= images_.size(), ErrorCode::invalid_argument, "index out of range");
      return images_[n - 1];
    case Kind::swap_rule:
      for (const auto& [i, j] : pairs_) {
        if (n == i) return j;
        if (n == j) return i;
      }
      return n;
    case Kind::power_swap: {
      if (n < 2 || !is_pow2(n)) return n;
      int e = log2_exact(n);
      return (e % 2 == 1) ? n << 1 : n >> 1;
    }
  }
  throw AsError(ErrorCode::internal, "unreachable permutation kind");
}

Json PermutationSpec::to_json() const {
  switch (kind_) {
    case Kind::explicit_map: {
      Json m = Json::array();
      for (std::uint64_t v : images_) m.push_back(v);
      return Json{{"kind", "explicit"}, {"map", std::move(m)}};
    }
    case Kind::swap_rule: {
      Json ps = Json::array();
      for (const auto& [i, j] : pairs_) ps.push_back(Json::array({i, j}));
      return Json{{"kind", "swaps"}, {"pairs", std::move(ps)}};
    }
    case Kind::power_swap:
      return Json{{"kind", "powerswap"}};
  }
  throw AsError(ErrorCode::internal, "unreachable permutation kind");
}

PermutationSpec PermutationSpec::from_json(const Json& j) {
  require(j.is_object() && j.contains("kind"), ErrorCode::invalid_argument,
          "permutation JSON needs a \"kind\"");
  std::string kind = j["kind"].get<std::string>();
  if (kind == "explicit") {
    require(j.contains("map") && j["map"].is_array(), ErrorCode::invalid_argument,
            "explicit permutation needs a map array");
    std::vector<std::uint64_t> images;
    for (const auto& e : j["map"]) images.push_back(e.get<std::uint64_t>());
    return explicit_map(std::move(images));
  }
  if (kind == "swaps") {
    require(j.contains("pairs") && j["pairs"].is_array(), ErrorCode::invalid_argument,
            "swap permutation needs a pairs array");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    for (const auto& e : j["pairs"]) {
      require(e.is_array() && e.size() == 2, ErrorCode::invalid_argument,
              "each pair must be [i, j]");
      pairs.emplace_back(e[0].get<std::uint64_t>(), e[1].get<std::uint64_t>());
    }
    return swap_rule(std::move(pairs));
  }
  if (kind == "powerswap") return power_swap();
  throw AsError(ErrorCode::invalid_argument, "unknown permutation kind: " + kind);
}

SequencePrefix rearrange(const SequencePrefix& a, const PermutationSpec& sigma) {
  std::uint64_t N = a.size();
  sigma.validate(N);
  std::vector<mpz_class> out;
  out.reserve(N);
  for (std::uint64_t n = 1; n <= N; ++n) out.push_back(a.at(sigma.apply(n)));
  return SequencePrefix(std::move(out));
}

double growth_ratio(const mpz_class& value, const GrowthFunction& f, double n) {
  if (value == 0) return 0.0;
  double fv = 0;
  bool direct = mpz_sizeinbase(value.get_mpz_t(), 2) <= 52;
  if (direct) {
    fv = f.eval(n);
    if (std::isfinite(fv) && fv > 0 && fv < 1e300) return mpz_get_d(value.get_mpz_t()) / fv;
  }
  long e2 = 0;
  double m = mpz_get_d_2exp(&e2, value.get_mpz_t());
  double log_value = std::log(m) + static_cast<double>(e2) * std::log(2.0);
  return std::exp(log_value - f.eval_log(n));
}

namespace {

// 1-D clustering of tail ratios: sort, split at clear gaps, report means.
std::vector<double> cluster_means(std::vector<double> ratios) {
  if (ratios.empty()) return {};
  std::sort(ratios.begin(), ratios.end());
  std::vector<double> means;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= ratios.size(); ++i) {
    bool split = i == ratios.size() ||
                 ratios[i] - ratios[i - 1] > std::max(0.15, 0.15 * std::fabs(ratios[i - 1]));
    if (split) {
      double sum = std::accumulate(ratios.begin() + start, ratios.begin() + i, 0.0);
      means.push_back(sum / static_cast<double>(i - start));
      start = i;
    }
  }
  return means;
}

}  // namespace

AsymptoticVerdict asymptotic_verdict(const SequencePrefix& a, const GrowthFunction& f,
                                     double epsilon) {
  require(epsilon > 0, ErrorCode::hypothesis, "epsilon must be > 0");
  std::uint64_t N = a.size();
  require(N >= 10, ErrorCode::hypothesis, "window too small (need N >= 10)",
          Json{{"N", N}});

  std::vector<double> dev(N + 1, 0.0);
  for (std::uint64_t n = 1; n <= N; ++n) {
    dev[n] = std::fabs(growth_ratio(a.at(n), f, static_cast<double>(n)) - 1.0);
  }

  std::uint64_t last_violation = 0;
  for (std::uint64_t n = N; n >= 1; --n) {
    if (dev[n] > epsilon) { last_violation = n; break; }
  }

  AsymptoticVerdict v;
  v.epsilon = epsilon;
  v.window_end = N;
  v.threshold_index = last_violation + 1;  // N+1 when a_N itself violates

  std::uint64_t half = N / 2;
  std::uint64_t lo = v.threshold_index <= N ? std::max(v.threshold_index, half) : half;
  lo = std::max<std::uint64_t>(lo, 1);
  for (std::uint64_t n = lo; n <= N; ++n) v.sup_deviation = std::max(v.sup_deviation, dev[n]);
  v.holds = v.sup_deviation <= epsilon;

  if (!v.holds) {
    std::vector<double> tail;
    for (std::uint64_t n = std::max<std::uint64_t>(1, N / 4); n <= N; ++n) {
      tail.push_back(growth_ratio(a.at(n), f, static_cast<double>(n)));
    }
    v.limit_points = cluster_means(std::move(tail));
  }
  return v;
}

Json AsymptoticVerdict::to_json() const {
  Json j{{"epsilon", epsilon},
         {"threshold_index", threshold_index},
         {"window_end", window_end},
         {"sup_deviation", sup_deviation},
         {"holds", holds}};
  if (!limit_points.empty()) j["limit_points"] = limit_points;
  return j;
}

std::pair<SequencePrefix, PermutationSpec> sort_rearrangement(const SequencePrefix& a) {
  std::uint64_t N = a.size();
  std::vector<std::uint64_t> idx(N);
  std::iota(idx.begin(), idx.end(), 1);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint64_t i, std::uint64_t j) { return a.at(i) < a.at(j); });
  std::vector<mpz_class> sorted;
  sorted.reserve(N);
  for (std::uint64_t i : idx) sorted.push_back(a.at(i));
  return {SequencePrefix(std::move(sorted)), PermutationSpec::explicit_map(std::move(idx))};
}

DensityEstimate density_estimate(const SequencePrefix& c, const mpz_class& x_max) {
  require(c.strictly_increasing(), ErrorCode::hypothesis,
          "density estimate needs a strictly increasing sequence");
  require(x_max >= 2, ErrorCode::invalid_argument, "x_max must be >= 2");

  DensityEstimate d;
  d.x_max = x_max;
  d.lower = 2.0;
  d.upper = -1.0;
  mpz_class half = x_max / 2;
  // Geometric grid (ratio ~1.05) across [x_max/2, x_max], endpoints included.
  mpz_class x = half;
  while (true) {
    mpz_class avail = x + 1;
    mpq_class ratio(c.counting(0, x), avail);
    ratio.canonicalize();
    double r = ratio.get_d();
    d.lower = std::min(d.lower, r);
    d.upper = std::max(d.upper, r);
    if (x >= x_max) break;
    mpz_class next = x + x / 20 + 1;
    x = next < x_max ? next : x_max;
  }
  return d;
}

Json DensityEstimate::to_json() const {
  return Json{{"lower", lower}, {"upper", upper}, {"x_max", x_max.get_str()}};
}

}  // namespace addspec
