#include "vsamem/theory/special.hpp"

#include <cmath>
#include <numbers>

#include "vsamem/error.hpp"

namespace vsamem::theory {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_normal_cdf(double x) {
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
  if (x > -30.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  // Mills ratio expansion: Φ(x) = φ(x)/|x| · (1 − 1/x² + 3/x⁴ − 15/x⁶ + …).
  const double z = 1.0 / (x * x);
  const double series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z)));
  return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(-x) +
         std::log(series);
}

namespace {
double dilog_series(double x) {
  double sum = 0.0, p = x;
  for (int k = 1; k < 200; ++k) {
    const double term = p / (double(k) * k);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    p *= x;
  }
  return sum;
}
}  // namespace

double dilog(double x) {
  constexpr double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
  require(x <= 1.0, ErrorKind::DomainError, "dilog defined here for x <= 1");
  if (x == 1.0) return pi2_6;
  if (x == 0.0) return 0.0;
  if (x < -1.0) {
    const double l = std::log(-x);
    return -pi2_6 - 0.5 * l * l - dilog(1.0 / x);
  }
  if (x < 0.0) {
    const double l = std::log1p(-x);
    return -dilog_series(x / (x - 1.0)) - 0.5 * l * l;
  }
  if (x <= 0.5) return dilog_series(x);
  return pi2_6 - std::log(x) * std::log1p(-x) - dilog_series(1.0 - x);
}

}  // namespace vsamem::theory
