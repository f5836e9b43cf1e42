#include "addspec/supersequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace addspec {

namespace {

void require(bool ok, ErrorCode code, const std::string& msg, Json detail = {}) {
  if (!ok) throw AsError(code, msg, std::move(detail));
}

mpz_class mpz_from_double_floor(double v) {
  if (v <= 0) return 0;
  mpz_class z;
  mpz_set_d(z.get_mpz_t(), std::floor(v));
  return z;
}

mpz_class mpz_from_double_ceil(double v) {
  if (v <= 0) return 0;
  mpz_class z;
  mpz_set_d(z.get_mpz_t(), std::ceil(v));
  return z;
}

}  // namespace

ExplicitIntegerSet::ExplicitIntegerSet(std::vector<mpz_class> values)
    : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  if (!values_.empty())
    require(values_.front() >= 0, ErrorCode::invalid_argument, "set values must be >= 0");
}

ExplicitIntegerSet::ExplicitIntegerSet(const SequencePrefix& seq)
    : ExplicitIntegerSet(seq.sorted_distinct()) {}

std::optional<mpz_class> ExplicitIntegerSet::next_geq(const mpz_class& v) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), v);
  if (it == values_.end()) return std::nullopt;
  return *it;
}

mpz_class ExplicitIntegerSet::count(const mpz_class& y, const mpz_class& x) const {
  if (y > x) return 0;
  auto lo = std::lower_bound(values_.begin(), values_.end(), y);
  auto hi = std::upper_bound(values_.begin(), values_.end(), x);
  return mpz_class(static_cast<unsigned long>(hi - lo));
}

ComplementIntegerSet::ComplementIntegerSet(std::vector<mpz_class> excluded)
    : excluded_(std::move(excluded)) {
  std::sort(excluded_.begin(), excluded_.end());
  excluded_.erase(std::unique(excluded_.begin(), excluded_.end()), excluded_.end());
}

ComplementIntegerSet::ComplementIntegerSet(const SequencePrefix& excluded_seq)
    : ComplementIntegerSet(excluded_seq.sorted_distinct()) {}

std::optional<mpz_class> ComplementIntegerSet::next_geq(const mpz_class& v) const {
  mpz_class y = v < 0 ? mpz_class(0) : v;
  auto it = std::lower_bound(excluded_.begin(), excluded_.end(), y);
  while (it != excluded_.end() && *it == y) {
    ++y;
    ++it;
  }
  return y;
}

mpz_class ComplementIntegerSet::count(const mpz_class& y, const mpz_class& x) const {
  if (y > x) return 0;
  auto lo = std::lower_bound(excluded_.begin(), excluded_.end(), y);
  auto hi = std::upper_bound(excluded_.begin(), excluded_.end(), x);
  mpz_class total = x - y + 1;
  return total - static_cast<unsigned long>(hi - lo);
}

std::uint64_t SelectionSchedule::tier_of(std::uint64_t n) const {
  // tier = number of thresholds <= n; 0 before the first threshold
  auto it = std::upper_bound(thresholds.begin(), thresholds.end(), n);
  return static_cast<std::uint64_t>(it - thresholds.begin());
}

Json SelectionSchedule::to_json() const {
  Json th = Json::array();
  for (std::uint64_t v : thresholds) th.push_back(v);
  return Json{{"thresholds", std::move(th)}};
}

namespace {

// Tier t+1 may start at n when g(n)/n clears t+1 and the tier interval holds
// at least g(n)/(t+1) elements of C.
bool tier_condition(const IntegerSetView& c, const GrowthFunction& g, std::uint64_t n,
                    std::uint64_t t) {
  double gn = g.eval(static_cast<double>(n));
  if (!(gn > static_cast<double>(t) * static_cast<double>(n))) return false;
  double tt = static_cast<double>(t);
  mpz_class lo = mpz_from_double_ceil((1.0 - 1.0 / tt) * gn);
  mpz_class hi = mpz_from_double_floor((1.0 + 1.0 / tt) * gn);
  if (hi < lo) return false;
  return c.count(lo, hi) >= mpz_from_double_ceil(gn / tt);
}

}  // namespace

SelectionSchedule build_schedule(const IntegerSetView& c, const GrowthFunction& g,
                                 std::uint64_t N) {
  require(N >= 1, ErrorCode::invalid_argument, "N must be >= 1");
  SelectionSchedule s;
  std::uint64_t t = 1;
  for (std::uint64_t n = 1; n <= N; ++n) {
    if (s.thresholds.empty()) {
      if (tier_condition(c, g, n, 1)) s.thresholds.push_back(n);  // N_1
      continue;
    }
    if (tier_condition(c, g, n, t + 1)) {
      s.thresholds.push_back(n);
      ++t;
    }
  }
  return s;
}

SelectionResult select_from_complement(const IntegerSetView& c, const GrowthFunction& g,
                                       std::uint64_t N) {
  require(N >= 1, ErrorCode::invalid_argument, "N must be >= 1");
  SelectionSchedule schedule = build_schedule(c, g, N);

  // Density gate on the working tail [V/2, V], V = top of the last interval.
  std::uint64_t t_last = schedule.tier_of(N);
  double g_top = g.eval(static_cast<double>(N));
  double widen = t_last == 0 ? 2.0 : 1.0 + 1.0 / static_cast<double>(t_last);
  mpz_class v_top = mpz_from_double_ceil(widen * g_top);
  if (v_top < 16) v_top = 16;
  mpz_class v_half = v_top / 2;
  mpz_class avail = v_top - v_half + 1;
  mpq_class density(c.count(v_half, v_top), avail);
  density.canonicalize();
  double density_lower = density.get_d();
  require(density_lower >= 0.9, ErrorCode::hypothesis,
          "complement density too low on the working range",
          Json{{"density", density_lower}, {"window_lo", v_half.get_str()},
               {"window_hi", v_top.get_str()}});

  std::vector<mpz_class> picks;
  picks.reserve(N);
  mpz_class cursor = 0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    std::uint64_t t = schedule.tier_of(n);
    if (t == 0) {
      // Before the first threshold no interval constrains the choice.
      std::optional<mpz_class> pick = c.next_geq(cursor);
      require(pick.has_value(), ErrorCode::hypothesis, "selection interval exhausted",
              Json{{"n", n}, {"t", 0}});
      cursor = *pick + 1;
      picks.push_back(std::move(*pick));
      continue;
    }
    double tt = static_cast<double>(t);
    double gn = g.eval(static_cast<double>(n));
    mpz_class lo = mpz_from_double_ceil((1.0 - 1.0 / tt) * gn);
    mpz_class hi = mpz_from_double_floor((1.0 + 1.0 / tt) * gn);
    Json interval{{"n", n}, {"t", t}, {"lo", lo.get_str()}, {"hi", hi.get_str()}};
    require(hi >= lo, ErrorCode::hypothesis, "empty tier interval", interval);
    mpz_class from = std::max(lo, cursor);
    std::optional<mpz_class> pick = c.next_geq(from);
    require(pick.has_value() && *pick <= hi, ErrorCode::hypothesis,
            "selection interval exhausted", interval);
    cursor = *pick + 1;
    picks.push_back(std::move(*pick));
  }
  return SelectionResult{SequencePrefix(std::move(picks)), std::move(schedule), density_lower};
}

SelectionResult select_from_complement(const SequencePrefix& c, const GrowthFunction& g,
                                       std::uint64_t N) {
  ExplicitIntegerSet view(c);
  return select_from_complement(view, g, N);
}

std::vector<std::uint64_t> index_schedule(const GrowthFunction& f, const GrowthFunction& g,
                                          std::uint64_t K) {
  require(K >= 1, ErrorCode::invalid_argument, "K must be >= 1");
  std::vector<double> t(K + 2, 0.0);
  for (std::uint64_t x = 1; x <= K + 1; ++x) {
    bool last = x == K + 1;
    double fx;
    try {
      fx = f.eval(static_cast<double>(x));
    } catch (const AsError&) {
      if (last) { t[x] = t[x - 1] + 1; continue; }  // spacing check stops at K
      throw;
    }
    if (!last) {
      double gx = g.eval(static_cast<double>(x));
      require(gx <= fx * (1 + 1e-12), ErrorCode::hypothesis,
              "need g <= f on the schedule window",
              Json{{"x", x}, {"g", gx}, {"f", fx}});
    }
    t[x] = g.inverse(fx);
    require(std::isfinite(t[x]) && t[x] < 9.2e18, ErrorCode::capacity,
            "schedule index out of integer range", Json{{"x", x}});
    if (x > 1) {
      require(t[x] - t[x - 1] >= 1.0 - 1e-9, ErrorCode::hypothesis,
              "schedule spacing below 1", Json{{"x", x - 1}, {"spacing", t[x] - t[x - 1]}});
    }
  }
  std::vector<std::uint64_t> n(K);
  for (std::uint64_t k = 1; k <= K; ++k) {
    double rounded = std::nearbyint(t[k]);
    double v = std::fabs(t[k] - rounded) < 1e-9 ? rounded : std::floor(t[k]);
    n[k - 1] = static_cast<std::uint64_t>(v);
    if (k > 1)
      require(n[k - 1] > n[k - 2], ErrorCode::hypothesis, "schedule output not strictly increasing",
              Json{{"k", k}});
  }
  return n;
}

SupersequenceResult build_supersequence(const SequencePrefix& a, const GrowthFunction& f,
                                        const GrowthFunction& g, std::uint64_t N,
                                        const SupersequenceConfig& cfg) {
  require(N >= 10, ErrorCode::invalid_argument, "N must be >= 10");
  require(a.strictly_increasing(), ErrorCode::hypothesis, "A must be strictly increasing");

  if (!cfg.skip_hypothesis_checks) {
    StabilityVerdict st = probe_stability(g, cfg.stability_delta, cfg.stability_grid_max,
                                          cfg.stability_tolerance);
    require(st.stable, ErrorCode::hypothesis, "g is not asymptotically stable",
            Json{{"sup_ratio", st.sup_ratio}, {"tail_sup_ratio", st.tail_sup_ratio},
                 {"tolerance", st.tolerance}});

    // Superlinearity: g(x)/x nondecreasing and growing across [1, N].
    double first_ratio = 0, prev_ratio = 0;
    bool first = true;
    for (double x = std::max(1.0, g.domain_start());; x *= 1.3) {
      if (x > static_cast<double>(N)) x = static_cast<double>(N);
      double r = g.eval_log(x) - std::log(x);
      if (first) { first_ratio = r; first = false; }
      else
        require(r >= prev_ratio - 1e-9, ErrorCode::hypothesis, "g(x)/x must be nondecreasing",
                Json{{"x", x}});
      prev_ratio = r;
      if (x >= static_cast<double>(N)) break;
    }
    require(prev_ratio > first_ratio + std::log(1.1), ErrorCode::hypothesis,
            "g must be superlinear on the window",
            Json{{"start_ratio", std::exp(first_ratio)}, {"end_ratio", std::exp(prev_ratio)}});

    AsymptoticVerdict seed = asymptotic_verdict(a, f, cfg.seed_epsilon);
    require(seed.holds, ErrorCode::hypothesis, "A does not track f within epsilon",
            Json{{"verdict", seed.to_json()}});
  }

  std::vector<std::uint64_t> schedule = index_schedule(f, g, a.size());
  std::uint64_t k_used = 0;
  while (k_used < schedule.size() && schedule[k_used] <= N) ++k_used;
  require(k_used >= 1, ErrorCode::hypothesis, "no schedule position lands inside the window",
          Json{{"first_position", schedule.empty() ? 0 : schedule[0]}, {"N", N}});

  const auto& excluded = a.sorted_distinct();
  ComplementIntegerSet complement(excluded);
  SelectionResult sel = select_from_complement(complement, g, N);

  std::vector<mpz_class> merged;
  merged.reserve(N);
  std::uint64_t next_k = 0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    if (next_k < k_used && schedule[next_k] == n) {
      merged.push_back(a.at(next_k + 1));
      ++next_k;
    } else {
      const mpz_class& c = sel.values.at(n);
      require(!std::binary_search(excluded.begin(), excluded.end(), c), ErrorCode::internal,
              "complement selection collided with A", Json{{"value", c.get_str()}});
      merged.push_back(c);
    }
  }

  std::sort(merged.begin(), merged.end());
  for (std::size_t i = 1; i < merged.size(); ++i) {
    require(merged[i] != merged[i - 1], ErrorCode::internal, "duplicate value after merge",
            Json{{"value", merged[i].get_str()}});
  }

  SupersequenceResult res{SequencePrefix(std::move(merged)), {}, 0, {}};
  res.filler_count = N - k_used;
  res.embedding.reserve(k_used);
  const auto& sorted = res.b.values();
  for (std::uint64_t k = 1; k <= k_used; ++k) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), a.at(k));
    require(it != sorted.end() && *it == a.at(k), ErrorCode::internal, "embedding lost in sort");
    res.embedding.push_back(static_cast<std::uint64_t>(it - sorted.begin()) + 1);
  }
  res.verdict = asymptotic_verdict(res.b, g, cfg.verdict_epsilon);
  return res;
}

Json SupersequenceResult::to_json() const {
  Json emb = Json::array();
  for (std::uint64_t e : embedding) emb.push_back(e);
  return Json{{"B", b.to_json()},
              {"embedding", std::move(emb)},
              {"filler_count", filler_count},
              {"verdict", verdict.to_json()}};
}

AdversarialResult adversarial_construction(const GrowthFunction& g,
                                           const std::vector<std::uint64_t>& m,
                                           double gamma) {
  require(!m.empty(), ErrorCode::invalid_argument, "need at least one index");
  require(gamma > 0, ErrorCode::invalid_argument, "gamma must be > 0");
  for (std::size_t i = 0; i < m.size(); ++i) {
    require(m[i] >= 1 && (i == 0 || m[i] > m[i - 1]), ErrorCode::invalid_argument,
            "m must be strictly increasing and >= 1", Json{{"index", i + 1}});
  }

  double margin_half = std::numeric_limits<double>::infinity();
  double margin_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.size(); ++i) {
    double mk = static_cast<double>(m[i]);
    double r_half = std::exp(g.eval_log(mk + 0.5) - g.eval_log(mk));
    double r_step = std::exp(g.eval_log(mk + 1.0) - g.eval_log(mk + 0.5));
    require(r_half >= 1 + gamma && r_step >= 1 + gamma, ErrorCode::hypothesis,
            "half-step growth margin too small",
            Json{{"k", i + 1}, {"m_k", m[i]}, {"half_ratio", r_half},
                 {"step_ratio", r_step}, {"required", 1 + gamma}});
    margin_half = std::min(margin_half, r_half);
    margin_step = std::min(margin_step, r_step);
  }

  std::vector<GrowthFunction::Knot> knots;
  knots.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    double lambda = g.eval(static_cast<double>(m[i]) + 0.5);
    require(std::isfinite(lambda), ErrorCode::capacity, "knot value overflows double range",
            Json{{"k", i + 1}});
    if (i > 0) {
      require(lambda - knots.back().lambda >= 1.0, ErrorCode::hypothesis,
              "consecutive knot values must be spaced by at least 1",
              Json{{"k", i + 1}, {"spacing", lambda - knots.back().lambda}});
    }
    knots.push_back({static_cast<std::int64_t>(i + 1), lambda});
  }

  AdversarialResult res{interpolate_above(g, knots), SequencePrefix({mpz_class(0)}), 0,
                        margin_half, margin_step};

  std::vector<mpz_class> avals;
  avals.reserve(m.size());
  for (const auto& kn : knots) {
    mpz_class v;
    mpz_set_d(v.get_mpz_t(), std::floor(kn.lambda));
    avals.push_back(std::move(v));
  }
  res.a = SequencePrefix(std::move(avals));

  double witness = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.size(); ++i) {
    double fk_log = res.f.eval_log(static_cast<double>(i + 1));
    double t = g.inverse(res.f.eval(static_cast<double>(i + 1)));
    double n0 = std::max(std::floor(t), std::max(1.0, g.domain_start()));
    for (double n : {n0, n0 + 1}) {
      double gap = std::fabs(std::exp(fk_log - g.eval_log(n)) - 1.0);
      witness = std::min(witness, gap);
    }
  }
  res.witness = witness;
  require(witness > 0, ErrorCode::internal, "witness collapsed to zero");
  return res;
}

Json AdversarialResult::to_json() const {
  return Json{{"f", f.to_json()},
              {"A", a.to_json()},
              {"witness", witness},
              {"margin_half", margin_half},
              {"margin_step", margin_step}};
}

}  // namespace addspec
