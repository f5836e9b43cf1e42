#include "addspec/equidist.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

namespace addspec {

namespace {

void require(bool ok, ErrorCode code, const std::string& msg, Json detail = {}) {
  if (!ok) throw AsError(code, msg, std::move(detail));
}

void require_pair(std::uint64_t u, std::uint64_t v) {
  require(v >= 2 && u > v, ErrorCode::domain, "need u > v >= 2",
          Json{{"u", u}, {"v", v}});
}

std::atomic<std::uint64_t> g_power_bits_cap{100000000};

void check_bits(double bits) {
  require(bits <= static_cast<double>(g_power_bits_cap.load()), ErrorCode::capacity,
          "power comparison exceeds the bit cap",
          Json{{"bits", bits}, {"cap", g_power_bits_cap.load()}});
}

double log2_mpz(const mpz_class& z) {
  signed long e;
  double d = mpz_get_d_2exp(&e, z.get_mpz_t());
  return static_cast<double>(e) + std::log2(d);
}

mpz_class ui_pow(std::uint64_t base, std::uint64_t exp) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

// Least a with w^a = t, if any.
std::optional<std::uint64_t> log_exact(std::uint64_t t, const mpz_class& w) {
  mpz_class p = w;
  std::uint64_t a = 1;
  while (p < t) {
    p *= w;
    ++a;
  }
  if (p == t) return a;
  return std::nullopt;
}

}  // namespace

std::uint64_t power_bits_cap() { return g_power_bits_cap.load(); }

void set_power_bits_cap(std::uint64_t bits) {
  require(bits >= 64, ErrorCode::invalid_argument, "cap below one word");
  g_power_bits_cap.store(bits);
}

PowerBracket bracket_power(std::uint64_t u, std::uint64_t v, std::uint64_t k) {
  require_pair(u, v);
  require(k >= 1, ErrorCode::domain, "k must be >= 1");
  check_bits(static_cast<double>(k) * std::log2(static_cast<double>(u)) + 64);

  mpz_class U = ui_pow(u, k);
  double seed = static_cast<double>(k) * std::log(static_cast<double>(u)) /
                std::log(static_cast<double>(v));
  std::uint64_t n = seed < 1 ? 0 : static_cast<std::uint64_t>(seed);
  mpz_class V = ui_pow(v, n);
  while (V > U) {
    mpz_divexact_ui(V.get_mpz_t(), V.get_mpz_t(), v);
    --n;
  }
  for (;;) {
    mpz_class next = V * v;
    if (next > U) break;
    V = std::move(next);
    ++n;
  }
  return PowerBracket{u, v, k, n};
}

Ordering fracpart_compare(std::uint64_t k, std::uint64_t u, std::uint64_t v,
                          std::uint64_t p, std::uint64_t q) {
  require_pair(u, v);
  require(k >= 1, ErrorCode::domain, "k must be >= 1");
  require(q >= 1 && p < q, ErrorCode::domain, "need 0 <= p < q",
          Json{{"p", p}, {"q", q}});
  check_bits(static_cast<double>(k) * static_cast<double>(q) *
                 std::log2(static_cast<double>(u)) +
             64);

  std::uint64_t n = bracket_power(u, v, k).floor_n;
  mpz_class lhs = ui_pow(u, k * q);
  mpz_class rhs = ui_pow(v, n * q + p);
  int c = cmp(lhs, rhs);
  if (c < 0) return Ordering::less;
  if (c > 0) return Ordering::greater;
  return Ordering::equal;
}

PowerRelation power_relation(std::uint64_t u, std::uint64_t v) {
  require_pair(u, v);

  // u = v^r?
  if (auto r = log_exact(u, mpz_class(static_cast<unsigned long>(v))))
    return PowerRelation{PowerRelation::Kind::perfect_power, *r, 1};

  // u^s = v^r with s > 1 forces u and v to be powers of a common base w;
  // in particular v = w^b for some b >= 2, so exact roots of v find it.
  std::uint64_t b_max = static_cast<std::uint64_t>(std::log2(static_cast<double>(v))) + 1;
  for (std::uint64_t b = 2; b <= b_max; ++b) {
    mpz_class w;
    int exact = mpz_root(w.get_mpz_t(), mpz_class(static_cast<unsigned long>(v)).get_mpz_t(),
                         static_cast<unsigned long>(b));
    if (!exact || w < 2) continue;
    if (auto a = log_exact(u, w)) {
      std::uint64_t g = std::gcd(*a, b);
      std::uint64_t r = *a / g, s = b / g;
      if (s > 1) return PowerRelation{PowerRelation::Kind::rational_log, r, s};
    }
  }
  return PowerRelation{PowerRelation::Kind::irrational, 0, 0};
}

ScanReport impossibility_scan(std::uint64_t u, std::uint64_t v, std::uint64_t K,
                              const TraceSink& trace) {
  require_pair(u, v);
  require(K >= 1, ErrorCode::invalid_argument, "K must be >= 1");
  PowerRelation rel = power_relation(u, v);
  require(rel.kind == PowerRelation::Kind::irrational, ErrorCode::hypothesis,
          "log u/log v is not irrational; use the dichotomy path", rel.to_json());
  check_bits(4.0 * static_cast<double>(K) * std::log2(static_cast<double>(u)) + 128);

  // Invariant: P = u^(4k), Q = v^(4n) with n = [k log_v u].  The quarter
  // thresholds become exact comparisons against Q*v and Q*v^3.
  mpz_class P(1), Q(1), t;
  const mpz_class u4 = ui_pow(u, 4);
  const mpz_class v4 = ui_pow(v, 4);
  const mpz_class v3 = ui_pow(v, 3);
  std::uint64_t n = 0;

  ScanReport rep;
  rep.u = u;
  rep.v = v;
  rep.K = K;
  rep.epsilon_star =
      std::min(1.0 - std::pow(static_cast<double>(v), -0.25),
               std::nextafter(0.5, 0.0));

  const double log2v = std::log2(static_cast<double>(v));
  double best_gap = std::numeric_limits<double>::infinity();
  std::uint64_t best_k = 1, best_m = 0;

  for (std::uint64_t k = 1; k <= K; ++k) {
    P *= u4;
    for (;;) {
      t = Q * v4;
      if (t > P) break;
      mpz_swap(Q.get_mpz_t(), t.get_mpz_t());
      ++n;
    }

    t = Q * v;  // v^(4n+1)
    std::string_view zone;
    if (P < t) {
      zone = "low";
    } else {
      t = Q * v3;  // v^(4n+3)
      zone = P > t ? "high" : "middle";
    }
    if (zone == "middle") {
      ++rep.hits_middle;
      if (!rep.first_violation) rep.first_violation = k;
    }
    if (trace) trace(k, n, zone);

    const double lp = log2_mpz(P) / 4, lq = log2_mpz(Q) / 4;
    const double gap_below = 1.0 - std::exp2(lq - lp);          // 1 - v^n/u^k
    const double gap_above = std::exp2(lq + log2v - lp) - 1.0;  // v^(n+1)/u^k - 1
    const double g = std::min(gap_below, gap_above);
    if (g < best_gap) {
      best_gap = g;
      best_k = k;
      best_m = gap_below <= gap_above ? n : n + 1;
    }
  }

  mpz_class U = ui_pow(u, best_k);
  mpz_class num = abs(ui_pow(v, best_m) - U);
  mpq_class ratio(num, U);
  ratio.canonicalize();
  rep.min_relative_gap = ratio.get_d();
  rep.gap_k = best_k;
  rep.gap_n = best_m;
  rep.gap_num = ratio.get_num();
  rep.gap_den = ratio.get_den();
  return rep;
}

RationalWitness rational_case_witness(std::uint64_t u, std::uint64_t v, std::uint64_t r,
                                      std::uint64_t s, std::uint64_t K) {
  require_pair(u, v);
  require(s >= 2, ErrorCode::hypothesis, "rational case needs s >= 2",
          Json{{"s", s}});
  PowerRelation rel = power_relation(u, v);
  require(rel.kind == PowerRelation::Kind::rational_log && rel.r == r && rel.s == s,
          ErrorCode::hypothesis, "pair does not satisfy u^s = v^r with the given r, s",
          rel.to_json());

  RationalWitness w;
  w.u = u;
  w.v = v;
  w.r = r;
  w.s = s;
  for (std::uint64_t ell = 1; ell < s; ++ell) {
    if ((ell * r) % s == 1) {
      w.ell = ell;
      break;
    }
  }
  require(w.ell >= 1, ErrorCode::internal, "no inverse of r mod s despite gcd(r,s)=1");

  w.distance_num = 1;
  w.distance_den = s;
  w.min_distance = 1.0 / static_cast<double>(s);

  // Along k = ell (mod s), k*r/s sits exactly 1/s above an integer.
  std::uint64_t exact_checks = 0;
  for (std::uint64_t k = w.ell; k <= K; k += s) {
    require((k * r) % s == 1, ErrorCode::internal, "residue class drifted");
    ++w.checked;
    double bits = static_cast<double>(k) * static_cast<double>(s) *
                  std::log2(static_cast<double>(u));
    if (exact_checks < 3 && bits + 64 < static_cast<double>(power_bits_cap())) {
      require(fracpart_compare(k, u, v, 1, s) == Ordering::equal, ErrorCode::internal,
              "fractional part is not exactly 1/s on the witness class",
              Json{{"k", k}});
      ++exact_checks;
    }
  }
  return w;
}

Json PowerBracket::to_json() const {
  return Json{{"u", u}, {"v", v}, {"k", k}, {"floor_n", floor_n}};
}

Json PowerRelation::to_json() const {
  switch (kind) {
    case Kind::perfect_power:
      return Json{{"kind", "perfect_power"}, {"r", r}};
    case Kind::rational_log:
      return Json{{"kind", "rational_log"}, {"r", r}, {"s", s}};
    default:
      return Json{{"kind", "irrational"}};
  }
}

Json ScanReport::to_json() const {
  Json j{{"u", u}, {"v", v}, {"K", K}, {"hits_middle", hits_middle}};
  j["first_violation"] = first_violation ? Json(*first_violation) : Json(nullptr);
  j["epsilon_star"] = epsilon_star;
  j["min_relative_gap"] = min_relative_gap;
  j["gap_k"] = gap_k;
  j["gap_n"] = gap_n;
  j["gap_num"] = gap_num.get_str();
  j["gap_den"] = gap_den.get_str();
  return j;
}

Json RationalWitness::to_json() const {
  return Json{{"u", u},
              {"v", v},
              {"r", r},
              {"s", s},
              {"ell", ell},
              {"distance_num", distance_num},
              {"distance_den", distance_den},
              {"min_distance", min_distance},
              {"checked", checked}};
}

}  // namespace addspec
