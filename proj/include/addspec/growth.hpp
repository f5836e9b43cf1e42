#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "addspec/errors.hpp"

namespace addspec {

using Json = nlohmann::ordered_json;

// Increasing growth function on [domain_start, domain_end).  Four kinds:
//   power        alpha * x^h          (alpha > 0, h > 0)
//   exponential  b^x                  (b > 1)
//   exp_sqrt     e^(c * sqrt(x))      (c > 0)
//   interpolated piecewise dominating lift of a base function through knots
// Immutable value type; safe to share across threads.
class GrowthFunction {
 public:
  enum class Kind { power, exponential, exp_sqrt, interpolated };

  struct Knot {
    std::int64_t k;
    double lambda;
  };

  static GrowthFunction power(double alpha, double h, double domain_start = 1.0);
  static GrowthFunction exponential(double base, double domain_start = 1.0);
  static GrowthFunction exp_sqrt(double rate, double domain_start = 1.0);

  Kind kind() const { return kind_; }
  double domain_start() const { return domain_start_; }
  // +inf except for interpolated functions, which live on [first knot, last knot].
  double domain_end() const;

  double eval(double x) const;
  // log f(x), usable where f itself overflows double range.
  double eval_log(double x) const;
  // Exact formulas for the closed forms; bisection (rel. precision 1e-12,
  // 200 iteration cap) for interpolated.
  double inverse(double y) const;

  const std::vector<Knot>& knots() const { return knots_; }
  const GrowthFunction& base() const;

  Json to_json() const;
  static GrowthFunction from_json(const Json& j);
  // Accepts the JSON form or the shorthand "power:alpha:h" / "exp:b" / "expsqrt:c".
  static GrowthFunction parse(std::string_view text);
  std::string describe() const;

  friend GrowthFunction interpolate_above(const GrowthFunction& g,
                                          const std::vector<Knot>& knots);

 private:
  GrowthFunction() = default;
  std::size_t segment_of(double x) const;

  Kind kind_ = Kind::power;
  double a_ = 1.0;  // alpha / base / rate
  double b_ = 1.0;  // h (power only)
  double domain_start_ = 1.0;
  std::shared_ptr<const GrowthFunction> base_;  // interpolated only
  std::vector<Knot> knots_;
  std::vector<double> seg_mu_;  // per-interval lift, knots_.size()-1 entries
};

// Piecewise function f >= g with f(k_i) = lambda_i exactly: on each [k, k+1]
// f = max(g + mu, chord), mu = min(lambda_k - g(k), lambda_{k+1} - g(k+1)).
GrowthFunction interpolate_above(const GrowthFunction& g,
                                 const std::vector<GrowthFunction::Knot>& knots);

// Finite-scale probe of f(x + delta) ~ f(x): geometric grid (ratio 1.05) from
// domain_start up to grid_max; stable iff the ratio stays within 1 + tolerance
// on the tail window [grid_max/2, grid_max].
struct StabilityVerdict {
  double delta = 0;
  double grid_max = 0;
  double tolerance = 0;
  double sup_ratio = 0;       // max over the whole grid
  double tail_sup_ratio = 0;  // max over the tail window
  bool stable = false;
  std::vector<std::pair<double, double>> trend;  // (x, f(x+delta)/f(x))

  Json to_json() const;
};

StabilityVerdict probe_stability(const GrowthFunction& f, double delta,
                                 double grid_max = 1e6, double tolerance = 0.01);

}  // namespace addspec
