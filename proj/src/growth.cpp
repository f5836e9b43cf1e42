#include "addspec/growth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace addspec {

namespace {

void require(bool ok, ErrorCode code, const std::string& msg, Json detail = {}) {
  if (!ok) throw AsError(code, msg, std::move(detail));
}

double finite(double v, const char* what) {
  require(std::isfinite(v), ErrorCode::invalid_argument,
          std::string(what) + " must be finite");
  return v;
}

}  // namespace

GrowthFunction GrowthFunction::power(double alpha, double h, double domain_start) {
  require(finite(alpha, "alpha") > 0, ErrorCode::invalid_argument, "alpha must be > 0");
  require(finite(h, "h") > 0, ErrorCode::invalid_argument, "h must be > 0");
  GrowthFunction g;
  g.kind_ = Kind::power;
  g.a_ = alpha;
  g.b_ = h;
  g.domain_start_ = finite(domain_start, "domain_start");
  return g;
}

GrowthFunction GrowthFunction::exponential(double base, double domain_start) {
  require(finite(base, "base") > 1, ErrorCode::invalid_argument, "base must be > 1");
  GrowthFunction g;
  g.kind_ = Kind::exponential;
  g.a_ = base;
  g.domain_start_ = finite(domain_start, "domain_start");
  return g;
}

GrowthFunction GrowthFunction::exp_sqrt(double rate, double domain_start) {
  require(finite(rate, "c") > 0, ErrorCode::invalid_argument, "c must be > 0");
  require(domain_start >= 0, ErrorCode::invalid_argument, "domain_start must be >= 0");
  GrowthFunction g;
  g.kind_ = Kind::exp_sqrt;
  g.a_ = rate;
  g.domain_start_ = finite(domain_start, "domain_start");
  return g;
}

double GrowthFunction::domain_end() const {
  if (kind_ == Kind::interpolated) return static_cast<double>(knots_.back().k);
  return std::numeric_limits<double>::infinity();
}

const GrowthFunction& GrowthFunction::base() const {
  require(base_ != nullptr, ErrorCode::invalid_argument, "not an interpolated function");
  return *base_;
}

std::size_t GrowthFunction::segment_of(double x) const {
  // index i with knots[i].k <= x <= knots[i+1].k (clamped for the last knot)
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const Knot& kn) { return v < static_cast<double>(kn.k); });
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  if (i > 0) --i;
  if (i + 1 >= knots_.size()) i = knots_.size() >= 2 ? knots_.size() - 2 : 0;
  return i;
}

double GrowthFunction::eval(double x) const {
  require(std::isfinite(x), ErrorCode::domain, "x must be finite");
  require(x >= domain_start_ - 1e-12, ErrorCode::domain,
          "x below domain start", Json{{"x", x}, {"domain_start", domain_start_}});
  switch (kind_) {
    case Kind::power:
      return a_ * std::pow(x, b_);
    case Kind::exponential:
      return std::pow(a_, x);
    case Kind::exp_sqrt:
      return std::exp(a_ * std::sqrt(x));
    case Kind::interpolated: {
      require(x <= domain_end() + 1e-12, ErrorCode::domain,
              "x beyond last knot", Json{{"x", x}, {"domain_end", domain_end()}});
      if (knots_.size() == 1) return knots_.front().lambda;
      std::size_t i = segment_of(x);
      const Knot& lo = knots_[i];
      const Knot& hi = knots_[i + 1];
      double span = static_cast<double>(hi.k - lo.k);
      double chord = lo.lambda + (hi.lambda - lo.lambda) * (x - static_cast<double>(lo.k)) / span;
      double lifted = base_->eval(x) + seg_mu_[i];
      return std::max(lifted, chord);
    }
  }
  throw AsError(ErrorCode::internal, "unreachable growth kind");
}

double GrowthFunction::eval_log(double x) const {
  switch (kind_) {
    case Kind::power:
      require(x >= domain_start_ - 1e-12, ErrorCode::domain, "x below domain start");
      return std::log(a_) + b_ * std::log(x);
    case Kind::exponential:
      require(x >= domain_start_ - 1e-12, ErrorCode::domain, "x below domain start");
      return x * std::log(a_);
    case Kind::exp_sqrt:
      require(x >= domain_start_ - 1e-12, ErrorCode::domain, "x below domain start");
      return a_ * std::sqrt(x);
    case Kind::interpolated:
      return std::log(eval(x));
  }
  throw AsError(ErrorCode::internal, "unreachable growth kind");
}

double GrowthFunction::inverse(double y) const {
  require(std::isfinite(y) && y > 0, ErrorCode::range, "y must be finite and > 0");
  switch (kind_) {
    case Kind::power:
      return std::pow(y / a_, 1.0 / b_);
    case Kind::exponential:
      return std::log(y) / std::log(a_);
    case Kind::exp_sqrt: {
      double t = std::log(y) / a_;
      require(t >= 0, ErrorCode::range, "y below range of exp_sqrt");
      return t * t;
    }
    case Kind::interpolated: {
      double lo = domain_start();
      double hi = domain_end();
      double flo = eval(lo);
      double fhi = eval(hi);
      require(y >= flo - 1e-9 * std::max(1.0, std::fabs(flo)), ErrorCode::range,
              "y below range", Json{{"y", y}, {"min", flo}});
      require(y <= fhi + 1e-9 * std::max(1.0, std::fabs(fhi)), ErrorCode::range,
              "y beyond range", Json{{"y", y}, {"max", fhi}});
      if (y <= flo) return lo;
      if (y >= fhi) return hi;
      for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (eval(mid) < y) lo = mid; else hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(hi))) return 0.5 * (lo + hi);
      }
      throw AsError(ErrorCode::nonconvergence, "bisection exceeded 200 iterations",
                    Json{{"y", y}, {"lo", lo}, {"hi", hi}});
    }
  }
  throw AsError(ErrorCode::internal, "unreachable growth kind");
}

GrowthFunction interpolate_above(const GrowthFunction& g,
                                 const std::vector<GrowthFunction::Knot>& knots) {
  require(!knots.empty(), ErrorCode::invalid_argument, "need at least one knot");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    double gk = g.eval(static_cast<double>(knots[i].k));
    require(knots[i].lambda > gk, ErrorCode::hypothesis,
            "knot value must exceed the base function",
            Json{{"k", knots[i].k}, {"lambda", knots[i].lambda}, {"g_k", gk}});
    if (i > 0) {
      require(knots[i].k > knots[i - 1].k && knots[i].lambda > knots[i - 1].lambda,
              ErrorCode::hypothesis, "knots must be strictly increasing in both coordinates",
              Json{{"index", i}});
    }
  }
  GrowthFunction f;
  f.kind_ = GrowthFunction::Kind::interpolated;
  f.domain_start_ = static_cast<double>(knots.front().k);
  f.base_ = std::make_shared<GrowthFunction>(g);
  f.knots_ = knots;
  f.seg_mu_.reserve(knots.size() > 0 ? knots.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    double gap_lo = knots[i].lambda - g.eval(static_cast<double>(knots[i].k));
    double gap_hi = knots[i + 1].lambda - g.eval(static_cast<double>(knots[i + 1].k));
    f.seg_mu_.push_back(std::min(gap_lo, gap_hi));
  }
  return f;
}

StabilityVerdict probe_stability(const GrowthFunction& f, double delta,
                                 double grid_max, double tolerance) {
  require(std::isfinite(delta) && delta > 0, ErrorCode::hypothesis, "delta must be > 0");
  require(tolerance > 0, ErrorCode::hypothesis, "tolerance must be > 0");
  double x0 = f.domain_start();
  double effective_max = std::min(grid_max, f.domain_end() - delta);
  require(effective_max >= 10 * delta && effective_max > x0, ErrorCode::hypothesis,
          "grid_max must be >= 10*delta and inside the domain",
          Json{{"grid_max", grid_max}, {"effective_max", effective_max}, {"delta", delta}});

  StabilityVerdict v;
  v.delta = delta;
  v.grid_max = effective_max;
  v.tolerance = tolerance;

  std::vector<double> xs;
  for (double x = std::max(x0, 1e-9); x < effective_max; x *= 1.05) xs.push_back(x);
  xs.push_back(effective_max);

  double tail_lo = effective_max / 2;
  for (double x : xs) {
    double r = std::exp(std::max(0.0, f.eval_log(x + delta) - f.eval_log(x)));
    v.trend.emplace_back(x, r);
    v.sup_ratio = std::max(v.sup_ratio, r);
    if (x >= tail_lo) v.tail_sup_ratio = std::max(v.tail_sup_ratio, r);
  }
  v.stable = v.tail_sup_ratio <= 1.0 + tolerance;
  return v;
}

Json StabilityVerdict::to_json() const {
  Json t = Json::array();
  for (const auto& [x, r] : trend) t.push_back(Json::array({x, r}));
  return Json{{"delta", delta},
              {"grid_max", grid_max},
              {"tolerance", tolerance},
              {"sup_ratio", sup_ratio},
              {"tail_sup_ratio", tail_sup_ratio},
              {"stable", stable},
              {"trend", std::move(t)}};
}

Json GrowthFunction::to_json() const {
  switch (kind_) {
    case Kind::power: {
      Json j{{"kind", "power"}, {"alpha", a_}, {"h", b_}};
      if (domain_start_ != 1.0) j["domain_start"] = domain_start_;
      return j;
    }
    case Kind::exponential: {
      Json j{{"kind", "exp"}, {"base", a_}};
      if (domain_start_ != 1.0) j["domain_start"] = domain_start_;
      return j;
    }
    case Kind::exp_sqrt: {
      Json j{{"kind", "expsqrt"}, {"c", a_}};
      if (domain_start_ != 1.0) j["domain_start"] = domain_start_;
      return j;
    }
    case Kind::interpolated: {
      Json ks = Json::array();
      for (const Knot& kn : knots_) ks.push_back(Json::array({kn.k, kn.lambda}));
      return Json{{"kind", "interp"}, {"base", base_->to_json()}, {"knots", std::move(ks)}};
    }
  }
  throw AsError(ErrorCode::internal, "unreachable growth kind");
}

GrowthFunction GrowthFunction::from_json(const Json& j) {
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(),
          ErrorCode::invalid_argument, "growth JSON needs a \"kind\" string");
  std::string kind = j["kind"].get<std::string>();
  double ds = j.value("domain_start", 1.0);
  if (kind == "power") {
    require(j.contains("alpha") && j.contains("h"), ErrorCode::invalid_argument,
            "power needs alpha and h");
    return power(j["alpha"].get<double>(), j["h"].get<double>(), ds);
  }
  if (kind == "exp") {
    require(j.contains("base"), ErrorCode::invalid_argument, "exp needs base");
    return exponential(j["base"].get<double>(), ds);
  }
  if (kind == "expsqrt") {
    require(j.contains("c"), ErrorCode::invalid_argument, "expsqrt needs c");
    return exp_sqrt(j["c"].get<double>(), ds);
  }
  if (kind == "interp") {
    require(j.contains("base") && j.contains("knots") && j["knots"].is_array(),
            ErrorCode::invalid_argument, "interp needs base and knots");
    GrowthFunction base = from_json(j["base"]);
    std::vector<Knot> knots;
    for (const auto& e : j["knots"]) {
      require(e.is_array() && e.size() == 2, ErrorCode::invalid_argument,
              "each knot must be [k, lambda]");
      knots.push_back(Knot{e[0].get<std::int64_t>(), e[1].get<double>()});
    }
    return interpolate_above(base, knots);
  }
  throw AsError(ErrorCode::invalid_argument, "unknown growth kind: " + kind);
}

GrowthFunction GrowthFunction::parse(std::string_view text) {
  std::size_t b = text.find_first_not_of(" \t\r\n");
  require(b != std::string_view::npos, ErrorCode::invalid_argument, "empty growth spec");
  if (text[b] == '{') {
    Json j = Json::parse(text, nullptr, false);
    require(!j.is_discarded(), ErrorCode::invalid_argument, "malformed growth JSON");
    return from_json(j);
  }
  std::string s(text.substr(b));
  while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\r')) s.pop_back();
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  auto num = [](const std::string& t) {
    try {
      std::size_t pos = 0;
      double v = std::stod(t, &pos);
      if (pos != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw AsError(ErrorCode::invalid_argument, "bad number in growth shorthand: " + t);
    }
  };
  if (parts.size() == 3 && parts[0] == "power") return power(num(parts[1]), num(parts[2]));
  if (parts.size() == 2 && parts[0] == "exp") return exponential(num(parts[1]));
  if (parts.size() == 2 && parts[0] == "expsqrt") return exp_sqrt(num(parts[1]));
  throw AsError(ErrorCode::invalid_argument,
                "unrecognized growth spec (want JSON, power:a:h, exp:b, or expsqrt:c): " + s);
}

std::string GrowthFunction::describe() const {
  char buf[96];
  switch (kind_) {
    case Kind::power:
      std::snprintf(buf, sizeof buf, "power(%g, %g)", a_, b_);
      return buf;
    case Kind::exponential:
      std::snprintf(buf, sizeof buf, "exp(%g)", a_);
      return buf;
    case Kind::exp_sqrt:
      std::snprintf(buf, sizeof buf, "expsqrt(%g)", a_);
      return buf;
    case Kind::interpolated:
      std::snprintf(buf, sizeof buf, "interp(%zu knots over %s)", knots_.size(),
                    base_->describe().c_str());
      return buf;
  }
  return "?";
}

}  // namespace addspec
