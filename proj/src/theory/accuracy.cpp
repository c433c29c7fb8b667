#include "vsamem/theory/accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vsamem/error.hpp"
#include "vsamem/theory/special.hpp"

namespace vsamem::theory {

double p_corr_gaussian(double shift, double scale, double D, double lower, Grid grid) {
  require(D >= 1.0, ErrorKind::DomainError, "alphabet size must be >= 1");
  require(grid.points >= 2 && grid.span > 0.0, ErrorKind::DomainError, "bad grid");
  const double lo = std::max(lower, -grid.span);
  const double hi = grid.span;
  if (lo >= hi) return 0.0;
  const double width = (hi - lo) / grid.points;
  const double dm1 = D - 1.0;
  double sum = 0.0;
  double cdf_prev = normal_cdf(lo);
  for (int i = 0; i < grid.points; ++i) {
    const double right = lo + (i + 1) * width;
    const double cdf = normal_cdf(right);
    const double mass = cdf - cdf_prev;
    cdf_prev = cdf;
    if (dm1 == 0.0) {
      sum += mass;
      continue;
    }
    const double mid = right - 0.5 * width;
    sum += mass * std::exp(dm1 * log_normal_cdf(scale * mid + shift));
  }
  // Mass above the grid: the hit is far above every distractor.
  sum += (1.0 - normal_cdf(hi)) * std::exp(dm1 * log_normal_cdf(scale * hi + shift));
  return std::clamp(sum, 0.0, 1.0);
}

double p_corr_numeric(double s, double D, Grid grid) {
  return p_corr_gaussian(s, 1.0, D, -std::numeric_limits<double>::infinity(), grid);
}

DetectionAccuracy p_corr_detection(double s, double D, double theta, double p_s,
                                   Grid grid) {
  require(p_s > 0.0 && p_s <= 1.0, ErrorKind::DomainError, "p_s must lie in (0, 1]");
  DetectionAccuracy out;
  if (std::isinf(theta) && theta < 0) {
    out.hit = p_corr_numeric(s, D, grid);
    out.rejection = 0.0;
  } else {
    out.hit = p_corr_gaussian(s, 1.0, D, (theta - 1.0) * s, grid);
    out.rejection = std::exp(D * log_normal_cdf(theta * s));
  }
  out.accuracy = p_s * out.hit + (1.0 - p_s) * out.rejection;
  return out;
}

double chang_alpha(double beta) {
  return std::sqrt(2.0 * std::numbers::e / std::numbers::pi * std::sqrt(beta - 1.0) / beta);
}

double p_corr_approx(double s, double D, Approximation method) {
  require(s >= 0.0 && D >= 1.0, ErrorKind::DomainError, "need s >= 0 and D >= 1");
  const double dm1 = D - 1.0;
  switch (method) {
    case Approximation::fa:
      return std::exp(dm1 * log_normal_cdf(s / std::numbers::sqrt2));
    case Approximation::fa_cr:
      return std::exp(dm1 * std::log1p(-0.5 * std::exp(-s * s / 4.0)));
    case Approximation::fa_cr_lee:
      return std::clamp(1.0 - 0.5 * dm1 * std::exp(-s * s / 4.0), 0.0, 1.0);
    case Approximation::chang:
      return std::clamp(
          1.0 - 0.5 * dm1 * chang_alpha() * std::exp(-kChangBeta * s * s / 4.0), 0.0, 1.0);
  }
  return 0.0;
}

double chang_law_log(double log_d_minus_1, double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::DomainError, "epsilon must lie in (0, 1)");
  return 4.0 / kChangBeta *
         (log_d_minus_1 - std::log(2.0 * eps) + std::log(chang_alpha()));
}

double sensitivity_law(double D, double eps, SensitivityLaw law) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::DomainError, "epsilon must lie in (0, 1)");
  require(D > 1.0, ErrorKind::DomainError, "sensitivity laws need D > 1");
  switch (law) {
    case SensitivityLaw::cr_lee: return 4.0 * (std::log(D - 1.0) - std::log(2.0 * eps));
    case SensitivityLaw::chang: return chang_law_log(std::log(D - 1.0), eps);
    case SensitivityLaw::plate: return 8.0 * std::log(D / eps);
  }
  return 0.0;
}

double info_item_symbolic(double p, double D) {
  require(D >= 1.0, ErrorKind::DomainError, "alphabet size must be >= 1");
  require(p >= 1.0 / D - 1e-6 && p <= 1.0 + 1e-12, ErrorKind::DomainError,
          "p_corr below chance level");
  if (D == 1.0) return 0.0;
  p = std::clamp(p, 1.0 / D, 1.0);
  double bits = 0.0;
  if (p > 0.0) bits += p * std::log2(p * D);
  if (p < 1.0) bits += (1.0 - p) * std::log2((1.0 - p) * D / (D - 1.0));
  return std::max(bits, 0.0);
}

AccuracyCurve::AccuracyCurve(double D, double ds, Grid grid) : d_(D), ds_(ds) {
  require(ds > 0.0, ErrorKind::DomainError, "table spacing must be positive");
  // Beyond √(2 ln D) + 10 the accuracy is 1 to double precision.
  s_max_ = std::sqrt(2.0 * std::log(std::max(D, 2.0))) + 10.0;
  const int n = static_cast<int>(std::ceil(s_max_ / ds)) + 1;
  table_.resize(n);
  for (int i = 0; i < n; ++i) table_[i] = p_corr_numeric(i * ds, D, grid);
}

double AccuracyCurve::operator()(double s) const {
  if (s <= 0.0) return table_.front();
  const double u = s / ds_;
  const auto i = static_cast<std::size_t>(u);
  if (i + 1 >= table_.size()) return table_.back();
  const double t = u - static_cast<double>(i);
  // Catmull-Rom through the neighbouring samples.
  const double p0 = table_[i > 0 ? i - 1 : 0], p1 = table_[i], p2 = table_[i + 1];
  const double p3 = table_[i + 2 < table_.size() ? i + 2 : i + 1];
  return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}

}  // namespace vsamem::theory
