#include "vsamem/theory/comparisons.hpp"

#include <cmath>

#include "vsamem/error.hpp"
#include "vsamem/theory/accuracy.hpp"
#include "vsamem/theory/special.hpp"

namespace vsamem::theory {

double plate_all_correct(double s, double D, double M, double theta) {
  require(M >= 1 && M <= D, ErrorKind::DomainError,
          "the threshold rule needs 1 <= M <= D");
  return std::exp(M * log_normal_cdf((1.0 - theta) * s) +
                  (D - M) * log_normal_cdf(theta * s));
}

double our_all_correct(double s, double D, double M, double theta) {
  require(M >= 1, ErrorKind::DomainError, "need M >= 1");
  const double lower = std::isinf(theta) && theta < 0
                           ? -std::numeric_limits<double>::infinity()
                           : (theta - 1.0) * s;
  const double p = p_corr_gaussian(s, 1.0, D, lower);
  return std::pow(p, M);
}

AnnealedCurve white_annealed_curve(double neurons, double lambda, double noise_var,
                                   long max_lookback) {
  require(lambda > 0.0 && lambda < 1.0, ErrorKind::DomainError,
          "annealed curve needs lambda in (0, 1)");
  require(neurons >= 1 && noise_var >= 0.0 && max_lookback >= 0, ErrorKind::DomainError,
          "bad annealed-curve parameters");
  const double l2 = lambda * lambda;
  auto excess = [&](double q) {
    double sum = 0.0, w = q;
    for (long k = 0; k < 100'000'000; ++k) {
      const double term = w / (1.0 + w);
      sum += term;
      if (term < 1e-17 * sum) break;
      w *= l2;
    }
    return sum / neurons + noise_var * q / (1.0 + l2) - 1.0;
  };
  double lo = std::log(1e-12), hi = std::log(1e12);
  require(excess(std::exp(lo)) < 0.0 && excess(std::exp(hi)) > 0.0,
          ErrorKind::NumericalFailure, "annealed fixed point not bracketed in [1e-12, 1e12]");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (excess(std::exp(mid)) < 0.0 ? lo : hi) = mid;
  }
  AnnealedCurve out;
  out.q = std::exp(0.5 * (lo + hi));
  double w = out.q;
  for (long k = 0; k <= max_lookback; ++k) {
    out.m.push_back(w / (1.0 + w));
    w *= l2;
  }
  return out;
}

}  // namespace vsamem::theory
