#include "vsamem/theory/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "vsamem/error.hpp"
#include "vsamem/theory/accuracy.hpp"

namespace vsamem::theory {

DiffusionChain::DiffusionChain(const Activation& act, double p_symbol, int tanh_bins)
    : p_symbol_(p_symbol) {
  act.validate();
  require(p_symbol > 0.0 && p_symbol <= 1.0, ErrorKind::DomainError,
          "p_symbol must lie in (0, 1]");
  auto locate = [this](double t) {
    const double width = z_[1] - z_[0];
    double u = (t - z_.front()) / width;
    const int last = static_cast<int>(z_.size()) - 1;
    u = std::clamp(u, 0.0, static_cast<double>(last));
    int lo = std::min(static_cast<int>(u), last - 1);
    return Move{lo, 1.0 - (u - lo)};
  };
  switch (act.kind) {
    case Nonlinearity::linear:
      fail(ErrorKind::UnsupportedQuery, "diffusion analysis needs a saturating nonlinearity");
    case Nonlinearity::clipped: {
      const double k = std::round(act.kappa);
      require(std::abs(k - act.kappa) < 1e-12 && k >= 1, ErrorKind::DomainError,
              "clipped diffusion needs an integer kappa >= 1");
      const int kappa = static_cast<int>(k);
      for (int j = -kappa; j <= kappa; ++j) z_.push_back(j);
      break;
    }
    case Nonlinearity::tanh: {
      require(tanh_bins >= 50, ErrorKind::DomainError,
              "tanh diffusion resolution too coarse: need n >= 50 (bin width <= z_max/50)");
      const double zmax = act.gamma;
      const double width = zmax / tanh_bins;
      for (int j = 0; j <= 2 * tanh_bins; ++j) z_.push_back(-zmax + j * width);
      break;
    }
  }
  const std::size_t n = z_.size();
  up_.resize(n);
  down_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    up_[j] = locate(act(z_[j] + 1.0));
    down_[j] = locate(act(z_[j] - 1.0));
  }
  scratch_.resize(n);
}

void DiffusionChain::push(const std::vector<double>& q, const std::vector<Move>& moves,
                          double weight, std::vector<double>& out) const {
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double m = weight * q[j];
    if (m == 0.0) continue;
    const Move& mv = moves[j];
    out[mv.lo] += m * mv.w_lo;
    out[mv.lo + 1] += m * (1.0 - mv.w_lo);
  }
}

namespace {
void normalize(std::vector<double>& q) {
  double total = 0.0;
  for (double v : q) total += v;
  for (double& v : q) v /= total;
}
}  // namespace

void DiffusionChain::diffuse(std::vector<double>& q) const {
  auto& out = scratch_;
  for (std::size_t j = 0; j < q.size(); ++j) out[j] = (1.0 - p_symbol_) * q[j];
  push(q, up_, 0.5 * p_symbol_, out);
  push(q, down_, 0.5 * p_symbol_, out);
  q.swap(out);
  normalize(q);
}

void DiffusionChain::skew(std::vector<double>& q) const {
  auto& out = scratch_;
  std::fill(out.begin(), out.end(), 0.0);
  push(q, up_, 1.0, out);
  q.swap(out);
  normalize(q);
}

std::vector<double> DiffusionChain::delta() const {
  std::vector<double> q(z_.size(), 0.0);
  q[zero_index()] = 1.0;
  return q;
}

std::vector<double> DiffusionChain::uniform() const {
  return std::vector<double>(z_.size(), 1.0 / static_cast<double>(z_.size()));
}

std::vector<double> DiffusionChain::equilibrium(double tol, long max_steps) const {
  std::vector<double> q = delta(), prev;
  for (long step = 0; step < max_steps; ++step) {
    prev = q;
    diffuse(q);
    // Two steps compare against a fixed point, not a period-two orbit.
    diffuse(q);
    double change = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) change += std::abs(q[j] - prev[j]);
    if (change < tol) return q;
  }
  fail(ErrorKind::NumericalFailure, "diffusion equilibrium did not converge");
}

double DiffusionChain::mean(const std::vector<double>& q) const {
  double m = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) m += z_[j] * q[j];
  return m;
}

double DiffusionChain::second_moment(const std::vector<double>& q) const {
  double m = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) m += z_[j] * z_[j] * q[j];
  return m;
}

DiffusionPoint diffusion_point(const DiffusionChain& chain, const std::vector<double>& q,
                               double neurons, double alphabet) {
  DiffusionPoint p;
  p.mean = chain.mean(q);
  const double m2 = chain.second_moment(q);
  p.hit_var = std::max(m2 - p.mean * p.mean, 0.0);
  p.dist_var = m2;
  if (m2 <= 0.0) {
    p.s = 0.0;
    p.p_corr = 1.0 / alphabet;
    return p;
  }
  p.s = std::sqrt(neurons) * p.mean / std::sqrt(m2);
  p.p_corr = p_corr_gaussian(p.s, std::sqrt(p.hit_var / m2), alphabet);
  return p;
}

namespace {

void check_diffusion_query(const TheoryQuery& q) {
  q.validate();
  require(q.noise_var == 0.0 && q.retrieval_noise_var == 0.0 && q.flip_prob == 0.0,
          ErrorKind::UnsupportedQuery, "diffusion analysis covers noise-free networks");
  require(q.lambda == 1.0, ErrorKind::UnsupportedQuery,
          "diffusion analysis covers lambda = 1 with a saturating nonlinearity");
  require(q.moments.var_sq == 0.0 && std::abs(q.moments.mean_sq - 1.0) < 1e-12,
          ErrorKind::UnsupportedQuery, "diffusion analysis assumes bipolar codes");
}

DiffusionResult run(const TheoryQuery& q, const DiffusionChain& chain,
                    const std::vector<double>& start_eq, long max_lookback, bool keep_trace) {
  DiffusionResult res;
  if (q.buffer()) {
    std::vector<double> p = start_eq;
    chain.skew(p);
    for (long k = 0; k <= max_lookback; ++k) {
      if (k > 0) chain.diffuse(p);
      res.points.push_back(diffusion_point(chain, p, q.neurons, q.alphabet));
      if (keep_trace) res.trace.push_back(p);
    }
    return res;
  }
  const long m = static_cast<long>(q.length);
  const long kmax = std::min(max_lookback, m - 1);
  // pre[j]: state distribution after j unrelated steps from reset.
  std::vector<std::vector<double>> pre;
  pre.push_back(chain.delta());
  for (long j = 1; j < m; ++j) {
    pre.push_back(pre.back());
    chain.diffuse(pre.back());
  }
  for (long k = 0; k <= kmax; ++k) {
    std::vector<double> p = pre[m - k - 1];
    chain.skew(p);
    for (long t = 0; t < k; ++t) chain.diffuse(p);
    res.points.push_back(diffusion_point(chain, p, q.neurons, q.alphabet));
    if (keep_trace) res.trace.push_back(p);
  }
  return res;
}

}  // namespace

DiffusionResult diffusion_clipped(const TheoryQuery& q, long max_lookback, bool keep_trace) {
  check_diffusion_query(q);
  require(q.activation.kind == Nonlinearity::clipped, ErrorKind::UnsupportedQuery,
          "diffusion_clipped needs a clipped activation");
  DiffusionChain chain(q.activation, q.p_symbol);
  return run(q, chain, chain.uniform(), max_lookback, keep_trace);
}

DiffusionResult diffusion_tanh(const TheoryQuery& q, long max_lookback, int n,
                               bool keep_trace) {
  check_diffusion_query(q);
  require(q.activation.kind == Nonlinearity::tanh, ErrorKind::UnsupportedQuery,
          "diffusion_tanh needs a tanh activation");
  DiffusionChain chain(q.activation, q.p_symbol, n);
  std::vector<double> eq;
  if (q.buffer()) eq = chain.equilibrium();
  return run(q, chain, eq, max_lookback, keep_trace);
}

DiffusionResult diffusion_first_item(const TheoryQuery& q, long max_length, int n,
                                     bool keep_trace) {
  check_diffusion_query(q);
  DiffusionChain chain(q.activation, q.p_symbol, n);
  DiffusionResult res;
  std::vector<double> p = chain.delta();
  chain.skew(p);
  for (long m = 1; m <= max_length; ++m) {
    if (m > 1) chain.diffuse(p);
    res.points.push_back(diffusion_point(chain, p, q.neurons, q.alphabet));
    if (keep_trace) res.trace.push_back(p);
  }
  return res;
}

double equilibrium_variance(const Activation& act, int n) {
  if (act.kind == Nonlinearity::clipped) {
    DiffusionChain chain(act);
    return chain.second_moment(chain.uniform());
  }
  DiffusionChain chain(act, 1.0, n);
  return chain.second_moment(chain.equilibrium());
}

double time_constant_lambda(double lambda) {
  require(lambda > 0.0 && lambda <= 1.0, ErrorKind::DomainError, "lambda must lie in (0, 1]");
  if (lambda == 1.0) return kInfinite;
  return -1.0 / std::log(lambda);
}

double time_constant_clipped(double kappa) {
  require(kappa * (kappa + 1.0) > 3.0, ErrorKind::DomainError,
          "kappa too small for a finite time constant");
  return -2.0 / std::log1p(-3.0 / (kappa * (kappa + 1.0)));
}

double time_constant_tanh(double gamma, int n) {
  const double v = equilibrium_variance(Activation::tanh(gamma), n);
  require(v > 1.0, ErrorKind::DomainError, "tanh equilibrium variance must exceed 1");
  return -2.0 / std::log1p(-1.0 / v);
}

double time_constant(const Activation& act, double lambda, int n) {
  switch (act.kind) {
    case Nonlinearity::linear: return time_constant_lambda(lambda);
    case Nonlinearity::clipped: return time_constant_clipped(act.kappa);
    case Nonlinearity::tanh: return time_constant_tanh(act.gamma, n);
  }
  return kInfinite;
}

double lambda_for_time_constant(double tau) {
  require(tau > 0.0, ErrorKind::DomainError, "time constant must be positive");
  return std::isinf(tau) ? 1.0 : std::exp(-1.0 / tau);
}

}  // namespace vsamem::theory
