#include "vsamem/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "vsamem/error.hpp"
#include "vsamem/theory/diffusion.hpp"
#include "vsamem/theory/information.hpp"

namespace vsamem {

const char* to_string(Objective o) {
  switch (o) {
    case Objective::total_info: return "total-info";
    case Objective::usable_info: return "usable-info";
    case Objective::usable_horizon: return "usable-horizon";
    case Objective::storage_ratio: return "storage-ratio";
  }
  return "?";
}

Objective parse_objective(const std::string& name) {
  for (auto o : {Objective::total_info, Objective::usable_info, Objective::usable_horizon,
                 Objective::storage_ratio})
    if (name == to_string(o)) return o;
  fail(ErrorKind::ConfigError, "unknown objective '" + name + "'");
}

const char* to_string(FreeParameter p) {
  switch (p) {
    case FreeParameter::lambda: return "lambda";
    case FreeParameter::kappa: return "kappa";
    case FreeParameter::gamma: return "gamma";
    case FreeParameter::tau: return "tau";
    case FreeParameter::length: return "length";
    case FreeParameter::alphabet: return "alphabet";
    case FreeParameter::neurons: return "neurons";
  }
  return "?";
}

FreeParameter parse_free_parameter(const std::string& name) {
  for (auto p : {FreeParameter::lambda, FreeParameter::kappa, FreeParameter::gamma,
                 FreeParameter::tau, FreeParameter::length, FreeParameter::alphabet,
                 FreeParameter::neurons})
    if (name == to_string(p)) return p;
  fail(ErrorKind::ConfigError, "unknown free parameter '" + name + "'");
}

bool is_integer_parameter(FreeParameter p) {
  return p == FreeParameter::kappa || p == FreeParameter::length || p == FreeParameter::alphabet;
}

void OptimizationProblem::validate() const {
  require(lower < upper, ErrorKind::InvalidSpec, "search bounds must satisfy lower < upper");
  require(tolerance > 0, ErrorKind::InvalidSpec, "tolerance must be > 0");
  require(coarse_points >= 5 && dense_points >= coarse_points, ErrorKind::InvalidSpec,
          "grid sizes too small");
  if (parameter == FreeParameter::lambda)
    require(lower > 0 && upper <= 1, ErrorKind::InvalidSpec, "lambda bounds must lie in (0, 1]");
  else
    require(lower > 0, ErrorKind::InvalidSpec, "search bounds must be positive");
  if (objective == Objective::usable_info || objective == Objective::usable_horizon)
    require(analog && r_star > 0, ErrorKind::UnsupportedQuery,
            "usable objectives need an analog task and r* > 0");
  if (objective == Objective::storage_ratio)
    require(!analog, ErrorKind::UnsupportedQuery, "storage ratio applies to symbolic buffers");
}

theory::TheoryQuery with_parameter(const OptimizationProblem& problem, double x) {
  theory::TheoryQuery q = problem.query;
  switch (problem.parameter) {
    case FreeParameter::lambda: q.lambda = x; break;
    case FreeParameter::kappa: q.activation.kappa = std::round(x); break;
    case FreeParameter::gamma: q.activation.gamma = x; break;
    case FreeParameter::tau:
      require(q.activation.kind == Nonlinearity::linear, ErrorKind::UnsupportedQuery,
              "free tau applies to linear networks");
      q.lambda = theory::lambda_for_time_constant(x);
      break;
    case FreeParameter::length: q.length = std::round(x); break;
    case FreeParameter::alphabet: q.alphabet = std::round(x); break;
    case FreeParameter::neurons: q.neurons = x; break;
  }
  return q;
}

namespace {

double analog_total(const theory::TheoryQuery& q) {
  if (!q.buffer() && q.lambda == 1.0) return theory::info_total_analog_reset(q);
  return theory::info_total_analog_buffer(q);
}

}  // namespace

double evaluate_objective(const OptimizationProblem& problem, double x,
                          const theory::AccuracyCurve* curve) {
  const theory::TheoryQuery q = with_parameter(problem, x);
  switch (problem.objective) {
    case Objective::total_info:
      return problem.analog ? analog_total(q) : theory::info_total_symbolic(q, curve);
    case Objective::usable_info: return theory::usable_info(q, problem.r_star);
    case Objective::usable_horizon: return theory::usable_horizon(q, problem.r_star);
    case Objective::storage_ratio: return storage_ratio(q);
  }
  return 0.0;
}

double storage_ratio(const theory::TheoryQuery& q) {
  require(q.activation.kind == Nonlinearity::clipped && q.buffer(), ErrorKind::UnsupportedQuery,
          "storage ratio needs a clipped buffer");
  const double bits = q.neurons * std::log2(2.0 * q.activation.kappa + 1.0);
  return theory::info_total_symbolic(q) / bits;
}

namespace {

// Search scale: u = log(1 − λ) for λ (decreasing in λ), log x otherwise.
struct Scale {
  bool lambda;
  double to_u(double x) const { return lambda ? std::log1p(-x) : std::log(x); }
  double to_x(double u) const { return lambda ? -std::expm1(u) : std::exp(u); }
};

class Search {
 public:
  explicit Search(const OptimizationProblem& p) : p_(p) {
    // Long symbolic buffers read many lookbacks; tabulate the accuracy once.
    if (!p.analog && p.objective == Objective::total_info && p.query.buffer() &&
        p.parameter != FreeParameter::alphabet &&
        p.query.activation.kind == Nonlinearity::linear)
      curve_.emplace(p.query.alphabet);
  }

  double eval(double x) {
    const double v = evaluate_objective(p_, x, curve_ ? &*curve_ : nullptr);
    require(std::isfinite(v), ErrorKind::NumericalFailure,
            std::string("objective is not finite at ") + to_string(p_.parameter) + "=" +
                std::to_string(x));
    trace.push_back({x, v});
    return v;
  }

  std::vector<TracePoint> trace;

 private:
  const OptimizationProblem& p_;
  std::optional<theory::AccuracyCurve> curve_;
};

// True when the values, ordered by parameter, rise again after falling below
// the running maximum by more than the slack.
bool non_unimodal(const std::vector<TracePoint>& grid, double slack) {
  const auto best = std::max_element(grid.begin(), grid.end(),
                                     [](auto& a, auto& b) { return a.value < b.value; });
  auto rises = [&](auto first, auto last) {
    double low = first->value;
    for (auto it = first; it != last; ++it) {
      if (it->value > low + slack) return true;
      low = std::min(low, it->value);
    }
    return false;
  };
  // Walking outward from the maximum the values must not increase.
  std::vector<TracePoint> left(grid.begin(), best + 1);
  std::reverse(left.begin(), left.end());
  return rises(left.begin(), left.end()) || rises(best, grid.end());
}

void finish(OptimizationResult& r, std::vector<TracePoint> trace) {
  r.trace = std::move(trace);
  std::stable_sort(r.trace.begin(), r.trace.end(),
                   [](auto& a, auto& b) { return a.parameter < b.parameter; });
  for (const auto& t : r.trace)
    if (t.value > r.value || (t.value == r.value && t.parameter < r.argmax)) {
      r.value = t.value;
      r.argmax = t.parameter;
    }
}

OptimizationResult integer_scan(const OptimizationProblem& p) {
  const long lo = static_cast<long>(std::ceil(p.lower));
  const long hi = static_cast<long>(std::floor(p.upper));
  require(lo <= hi, ErrorKind::InvalidSpec, "integer bounds contain no value");
  require(hi - lo <= 1'000'000, ErrorKind::InvalidSpec, "integer scan range too large");
  Search s(p);
  for (long x = lo; x <= hi; ++x) s.eval(static_cast<double>(x));
  OptimizationResult r;
  r.value = -std::numeric_limits<double>::infinity();
  finish(r, std::move(s.trace));
  return r;
}

// Golden-section maximization on [a, b] in u.
void golden(Search& s, const Scale& scale, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = s.eval(scale.to_x(c)), fd = s.eval(scale.to_x(d));
  while (std::abs(b - a) > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = s.eval(scale.to_x(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = s.eval(scale.to_x(d));
    }
  }
}

OptimizationResult continuous(const OptimizationProblem& p) {
  const Scale scale{p.parameter == FreeParameter::lambda};
  Search s(p);
  // The exact endpoints are always evaluated; λ = 1 itself lies off the log scale.
  s.eval(p.lower);
  s.eval(p.upper);
  const double hi_x = scale.lambda ? std::min(p.upper, 1.0 - 1e-12) : p.upper;
  double ua = scale.to_u(p.lower), ub = scale.to_u(hi_x);
  if (ua > ub) std::swap(ua, ub);

  auto grid = [&](int n) {
    std::vector<TracePoint> pts;
    for (int i = 0; i < n; ++i) {
      const double u = ua + (ub - ua) * i / (n - 1);
      pts.push_back({u, s.eval(scale.to_x(u))});
    }
    return pts;
  };

  OptimizationResult r;
  std::vector<TracePoint> pts = grid(p.coarse_points);
  const double vmax = std::max_element(pts.begin(), pts.end(), [](auto& a, auto& b) {
                        return a.value < b.value;
                      })->value;
  if (non_unimodal(pts, 5.0 * p.tolerance * std::max(std::abs(vmax), 1.0))) {
    warn(std::string("objective is not unimodal in ") + to_string(p.parameter) +
         "; using a dense grid");
    r.fallback = true;
    pts = grid(p.dense_points);
  }
  const auto best = std::max_element(pts.begin(), pts.end(), [](auto& a, auto& b) {
    return a.value < b.value;
  }) - pts.begin();
  const double a = pts[std::max<long>(best - 1, 0)].parameter;
  const double b = pts[std::min<long>(best + 1, pts.size() - 1)].parameter;
  golden(s, scale, a, b, p.tolerance);

  if (p.parameter == FreeParameter::tau && p.analog &&
      (p.objective == Objective::usable_info || p.objective == Objective::usable_horizon)) {
    const double seed = theory::tau_opt(p.query, p.r_star);
    if (seed > p.lower && seed < p.upper) s.eval(seed);
  }
  r.value = -std::numeric_limits<double>::infinity();
  finish(r, std::move(s.trace));
  return r;
}

}  // namespace

OptimizationResult optimize(const OptimizationProblem& problem) {
  problem.validate();
  return is_integer_parameter(problem.parameter) ? integer_scan(problem) : continuous(problem);
}

void OptimizationResult::write_csv(std::ostream& out) const {
  out << "parameter,value\n";
  char line[96];
  for (const auto& t : trace) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", t.parameter, t.value);
    out << line;
  }
}

}  // namespace vsamem
