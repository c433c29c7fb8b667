#include "vsamem/theory/information.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vsamem/error.hpp"
#include "vsamem/theory/diffusion.hpp"
#include "vsamem/theory/sensitivity.hpp"
#include "vsamem/theory/special.hpp"

namespace vsamem::theory {

namespace {
// Buffers stop once the squared sensitivity falls below this fraction of K = 0.
constexpr double kTailFraction = 1e-6;
constexpr long kMaxBufferLookback = 50'000'000;
}  // namespace

SymbolicProfile symbolic_profile(const TheoryQuery& q, const AccuracyCurve* curve,
                                 long max_lookback) {
  q.validate();
  SymbolicProfile out;
  auto accuracy = [&](double s) {
    return curve ? (*curve)(s) : p_corr_numeric(s, q.alphabet);
  };
  auto add = [&](double s, double p) {
    p = std::max(p, 1.0 / q.alphabet);
    out.s.push_back(s);
    out.p_corr.push_back(p);
    out.info.push_back(info_item_symbolic(p, q.alphabet));
    out.total += out.info.back();
  };
  long limit = q.buffer() ? kMaxBufferLookback : static_cast<long>(q.length) - 1;
  if (max_lookback >= 0) limit = std::min(limit, max_lookback);

  if (q.activation.kind == Nonlinearity::linear) {
    if (!q.buffer() && q.lambda == 1.0 && q.flip_prob == 0.0 && max_lookback < 0) {
      // Every lookback is statistically identical; weight one evaluation by M.
      const double s = sensitivity(q, 0);
      const double p = std::max(accuracy(s), 1.0 / q.alphabet);
      out.s.assign(1, s);
      out.p_corr.assign(1, p);
      out.info.assign(1, info_item_symbolic(p, q.alphabet));
      out.total = q.length * out.info[0];
      return out;
    }
    const double s0 = sensitivity(q, 0);
    for (long k = 0; k <= limit; ++k) {
      const double s = sensitivity(q, static_cast<double>(k));
      if (q.buffer() && s * s < kTailFraction * s0 * s0) break;
      add(s, accuracy(s));
    }
    return out;
  }

  if (!q.buffer()) {
    const auto res = q.activation.kind == Nonlinearity::clipped ? diffusion_clipped(q, limit)
                                                                : diffusion_tanh(q, limit);
    for (const auto& pt : res.points) add(pt.s, pt.p_corr);
    return out;
  }
  // Buffer: walk lookbacks until the signal has faded.
  DiffusionChain chain(q.activation, q.p_symbol);
  std::vector<double> p =
      q.activation.kind == Nonlinearity::clipped ? chain.uniform() : chain.equilibrium();
  chain.skew(p);
  double s0 = -1.0;
  for (long k = 0; k <= limit; ++k) {
    if (k > 0) chain.diffuse(p);
    const auto pt = diffusion_point(chain, p, q.neurons, q.alphabet);
    if (s0 < 0) s0 = pt.s;
    if (pt.s * pt.s < kTailFraction * s0 * s0) break;
    add(pt.s, pt.p_corr);
  }
  return out;
}

double info_total_symbolic(const TheoryQuery& q, const AccuracyCurve* curve) {
  return symbolic_profile(q, curve).total;
}

double info_analog(double r) {
  require(r >= 0.0, ErrorKind::DomainError, "SNR must be >= 0");
  return 0.5 * std::log2(1.0 + r);
}

double noise_factor(const TheoryQuery& q) {
  return 1.0 / (1.0 + q.noise_var / (q.alphabet * q.moments.var));
}

double snr_reset(const TheoryQuery& q) {
  q.validate();
  require(!q.buffer(), ErrorKind::DomainError, "reset SNR needs finite M");
  const double md = q.length * q.alphabet;
  const double denom = md - 1.0 + q.length * q.noise_var / q.moments.var;
  return denom <= 0.0 ? kInfinite : q.neurons / denom;
}

double info_total_analog_reset(const TheoryQuery& q) {
  return q.length * q.alphabet * info_analog(snr_reset(q));
}

double capacity_at_snr(double r) {
  require(r > 0.0, ErrorKind::DomainError, "SNR must be positive");
  return std::log1p(r) / (2.0 * r * std::numbers::ln2);
}

double capacity_bound_analog(const TheoryQuery& q) {
  return noise_factor(q) / (2.0 * std::numbers::ln2);
}

double snr_scale(const TheoryQuery& q) {
  q.validate();
  require(q.lambda < 1.0 || !q.buffer(), ErrorKind::DomainError,
          "buffer mode needs lambda < 1");
  const double g = decay_sum(q.lambda, q.length);
  return q.neurons / (q.alphabet * g) * noise_factor(q);
}

double snr_analog(const TheoryQuery& q, double K) {
  return std::pow(q.lambda, 2.0 * K) * snr_scale(q);
}

double log_qpochhammer_neg(double b, double qq, double M) {
  require(b >= 0.0 && qq > 0.0 && qq <= 1.0, ErrorKind::DomainError,
          "q-Pochhammer needs b >= 0 and q in (0, 1]");
  require(qq < 1.0 || !std::isinf(M), ErrorKind::DomainError,
          "infinite product needs q < 1");
  double sum = 0.0, term = b;
  for (double k = 0; k < M; k += 1.0) {
    const double inc = std::log1p(term);
    sum += inc;
    if (inc < 1e-15 * sum) break;
    term *= qq;
  }
  return sum;
}

double log_qpochhammer_asymptotic(double a, double qq) {
  require(a < 1.0 && qq > 0.0 && qq < 1.0, ErrorKind::DomainError,
          "asymptotic q-Pochhammer needs a < 1 and q in (0, 1)");
  const double tau = -2.0 / std::log(qq);
  return 0.5 * std::log1p(-a) - 0.5 * tau * dilog(a) - a / (1.0 - a) / (6.0 * tau);
}

double info_total_analog_buffer(const TheoryQuery& q) {
  require(q.lambda < 1.0, ErrorKind::DomainError, "analog buffer capacity needs lambda < 1");
  const double b = snr_scale(q);
  return 0.5 * q.alphabet * log_qpochhammer_neg(b, q.lambda * q.lambda, q.length) /
         std::numbers::ln2;
}

double info_total_analog_buffer_direct(const TheoryQuery& q) {
  require(q.lambda < 1.0, ErrorKind::DomainError, "analog buffer capacity needs lambda < 1");
  const double b = snr_scale(q);
  double total = 0.0;
  for (double k = 0; k < q.length; k += 1.0) {
    const double r = std::pow(q.lambda, 2.0 * k) * b;
    const double inc = 0.5 * q.alphabet * std::log2(1.0 + r);
    total += inc;
    if (inc < 1e-16 * total) break;
  }
  return total;
}

double tau_opt(const TheoryQuery& q, double r_star) {
  require(r_star > 0.0, ErrorKind::DomainError, "target SNR must be positive");
  return 2.0 * q.neurons * noise_factor(q) / (std::numbers::e * q.alphabet * r_star);
}

double usable_horizon(const TheoryQuery& q, double r_star) {
  require(r_star > 0.0, ErrorKind::DomainError, "target SNR must be positive");
  const double b = snr_scale(q);
  if (b < r_star) return 0.0;
  if (q.lambda == 1.0) return q.length;
  // r(K) = b λ^{2K} = r*  ⇔  K = ln(b/r*) / (−2 ln λ).
  return std::min(std::log(b / r_star) / (-2.0 * std::log(q.lambda)), q.length);
}

double usable_count(const TheoryQuery& q, double r_star) {
  if (snr_scale(q) < r_star) return 0.0;
  return std::min(std::floor(usable_horizon(q, r_star)) + 1.0, q.length);
}

double usable_info(const TheoryQuery& q, double r_star) {
  const double count = usable_count(q, r_star);
  const double b = snr_scale(q);
  return 0.5 * q.alphabet * log_qpochhammer_neg(b, q.lambda * q.lambda, count) /
         std::numbers::ln2;
}

double usable_capacity_limit(const TheoryQuery& q) {
  return (1.0 - std::exp(-1.0)) * noise_factor(q) / (2.0 * std::numbers::ln2);
}

double chang_capacity_estimate(double log_d) {
  require(log_d > 0.0, ErrorKind::DomainError, "need D > 1");
  const double log_dm1 = log_d + std::log(-std::expm1(-log_d));
  double best = 0.0;
  // ε on a log grid from 1e-15 to 0.5.
  for (int i = 0; i <= 4000; ++i) {
    const double eps = std::exp(std::log(1e-15) + i * (std::log(0.5) - std::log(1e-15)) / 4000);
    const double s2 = chang_law_log(log_dm1, eps);
    if (s2 <= 0.0) continue;
    best = std::max(best, (1.0 - eps) * log_d / std::numbers::ln2 / s2);
  }
  return best;
}

}  // namespace vsamem::theory
