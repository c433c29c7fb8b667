#include "vsamem/theory/sensitivity.hpp"

#include <cmath>

#include "vsamem/error.hpp"

namespace vsamem::theory {

void TheoryQuery::validate() const {
  require(neurons >= 1 && alphabet >= 1, ErrorKind::DomainError, "need N >= 1, D >= 1");
  require(length >= 1, ErrorKind::DomainError, "need M >= 1");
  require(lambda > 0.0 && lambda <= 1.0, ErrorKind::DomainError, "lambda must lie in (0, 1]");
  require(noise_var >= 0.0 && retrieval_noise_var >= 0.0, ErrorKind::DomainError,
          "noise variances must be >= 0");
  require(p_symbol > 0.0 && p_symbol <= 1.0, ErrorKind::DomainError,
          "p_symbol must lie in (0, 1]");
  require(flip_prob >= 0.0 && flip_prob < 0.5, ErrorKind::DomainError,
          "flip probability must lie in [0, 0.5)");
  require(moments.var > 0.0 && moments.var_sq >= 0.0, ErrorKind::DomainError,
          "code variances must be positive");
  activation.validate();
}

double rho_from_snr(double r) {
  require(r >= 0.0, ErrorKind::DomainError, "SNR must be >= 0");
  return std::isinf(r) ? 1.0 : std::sqrt(r / (r + 1.0));
}

double snr_from_rho(double rho) {
  require(rho >= 0.0 && rho <= 1.0, ErrorKind::DomainError, "rho must lie in [0, 1]");
  return rho * rho / (1.0 - rho * rho);
}

double decay_sum(double lambda, double length) {
  if (std::isinf(length)) {
    require(lambda < 1.0, ErrorKind::UnsupportedQuery,
            "a linear buffer with lambda = 1 has unbounded crosstalk");
    return 1.0 / (1.0 - lambda * lambda);
  }
  if (lambda == 1.0) return length;
  const double l2 = lambda * lambda;
  return -std::expm1(length * std::log(l2)) / (1.0 - l2);
}

namespace {

void check_linear(const TheoryQuery& q, double K) {
  q.validate();
  require(q.activation.kind == Nonlinearity::linear, ErrorKind::UnsupportedQuery,
          "closed-form sensitivity covers linear networks; use the diffusion analysis");
  require(q.moments.mean == 0.0, ErrorKind::UnsupportedQuery,
          "nonzero-mean codebooks are not covered by the theory");
  require(K >= 0 && (q.buffer() || K < q.length), ErrorKind::DomainError,
          "lookback must satisfy 0 <= K < M");
  if (q.flip_prob > 0.0) {
    require(q.lambda == 1.0 && !q.buffer(), ErrorKind::UnsupportedQuery,
            "the bit-flip law covers unitary reset memories only");
    require(q.noise_var == 0.0 && q.retrieval_noise_var == 0.0, ErrorKind::UnsupportedQuery,
            "bit flips combined with Gaussian noise are not covered");
  }
}

}  // namespace

double sensitivity(const TheoryQuery& q, double K) {
  check_linear(q, K);
  const double v = q.moments.var;
  const double g = decay_sum(q.lambda, q.length);
  if (q.flip_prob > 0.0) {
    const double f = 1.0 - 2.0 * q.flip_prob;
    return std::sqrt(q.neurons * f * f / (q.length * q.p_symbol + 2.0 * q.flip_prob));
  }
  const double denom = q.p_symbol * g + q.noise_var / v * g + q.retrieval_noise_var / v;
  return std::pow(q.lambda, K) * std::sqrt(q.neurons / denom);
}

GaussianReadout readout_statistics(const TheoryQuery& q, double K) {
  check_linear(q, K);
  const double v = q.moments.var;
  const double g = decay_sum(q.lambda, q.length);
  const double wk = std::pow(q.lambda, 2.0 * K);
  const double others = q.p_symbol * (g - wk);
  const double noise = q.noise_var / v * g + q.retrieval_noise_var / v;
  double dist_var = others + wk + noise;
  double hit_var = others + wk * q.moments.self_ratio + noise;
  double signal = std::pow(q.lambda, K);
  if (q.flip_prob > 0.0) {
    const double f = 1.0 - 2.0 * q.flip_prob;
    signal *= f;
    hit_var += 4.0 * q.flip_prob * (1.0 - q.flip_prob);
  }
  GaussianReadout out;
  out.shift = signal * std::sqrt(q.neurons / dist_var);
  out.scale = std::sqrt(hit_var / dist_var);
  return out;
}

double p_corr_general(const TheoryQuery& q, double K, Grid grid) {
  const auto st = readout_statistics(q, K);
  return p_corr_gaussian(st.shift, st.scale, q.alphabet,
                         -std::numeric_limits<double>::infinity(), grid);
}

TheoryResult evaluate(const TheoryQuery& q, double K) {
  TheoryResult r;
  r.s = sensitivity(q, K);
  r.p_corr = p_corr_numeric(r.s, q.alphabet);
  r.r = r.s * r.s;
  r.rho = rho_from_snr(r.r);
  r.info_item = info_item_symbolic(std::max(r.p_corr, 1.0 / q.alphabet), q.alphabet);
  r.eps = 1.0 - r.p_corr;
  return r;
}

}  // namespace vsamem::theory
