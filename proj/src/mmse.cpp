#include "vsamem/mmse.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "vsamem/error.hpp"

namespace vsamem {

namespace {

constexpr double kResidualTol = 1e-8;

void check_lookbacks(const TaskSpec& task, const std::vector<long>& lookbacks) {
  require(!lookbacks.empty(), ErrorKind::InvalidSpec, "MMSE needs at least one lookback");
  for (long k : lookbacks) {
    require(k >= 0, ErrorKind::InvalidSpec, "lookbacks must be >= 0");
    if (!task.buffer())
      require(k < task.length, ErrorKind::InvalidSpec, "lookback must be below M");
  }
}

// Writes the D×B target block for one step's inputs.
void targets(const TaskSpec& task, const std::vector<int>& symbols, const Eigen::MatrixXd& analog,
             Eigen::Ref<Eigen::MatrixXd> out) {
  if (task.kind == TaskSpec::Kind::analog) {
    out = analog;
    return;
  }
  out.setZero();
  for (std::size_t b = 0; b < symbols.size(); ++b)
    if (symbols[b] >= 0) out(symbols[b], static_cast<Eigen::Index>(b)) = 1.0;
}

}  // namespace

Moments estimate_moments(const NetworkConfig& cfg, const TaskSpec& task,
                         const std::vector<long>& lookbacks, const MmseOptions& options) {
  cfg.validate();
  check_lookbacks(task, lookbacks);
  require(options.training >= 1 && options.batch >= 1, ErrorKind::InvalidSpec,
          "MMSE training needs R >= 1");
  require(cfg.neurons() <= options.max_neurons, ErrorKind::InvalidSpec,
          "N exceeds the MMSE size guard");
  const int n = cfg.neurons(), d = cfg.alphabet();
  const long kmax = *std::max_element(lookbacks.begin(), lookbacks.end());

  Moments m;
  m.c = Eigen::MatrixXd::Zero(n, n);
  for (long k : lookbacks) m.a[k] = Eigen::MatrixXd::Zero(n, d);

  long burn = 0, per_stream = 1, stride = 1, length = 0;
  if (task.buffer()) {
    require(options.snapshots >= 1 && options.stride >= 1, ErrorKind::InvalidSpec,
            "buffer training needs snapshots >= 1 and stride >= 1");
    burn = std::max(options.burn_in >= 0 ? options.burn_in : default_burn_in(cfg), kmax + 1);
    per_stream = options.snapshots;
    stride = options.stride;
  } else {
    length = static_cast<long>(task.length);
    require(length >= 1 && task.length == static_cast<double>(length), ErrorKind::InvalidSpec,
            "reset training needs an integer length M >= 1");
  }
  const long streams = (options.training + per_stream - 1) / per_stream;
  const long history = kmax + 1;

  std::vector<int> symbols;
  Eigen::MatrixXd analog;
  for (long first = 0, batch = 0; first < streams; first += options.batch, ++batch) {
    const int cols = static_cast<int>(std::min<long>(options.batch, streams - first));
    Rng rng = make_rng(options.seed, static_cast<std::uint64_t>(batch));
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, cols);
    std::vector<Eigen::MatrixXd> past(history, Eigen::MatrixXd::Zero(d, cols));
    symbols.assign(cols, -1);
    analog = Eigen::MatrixXd::Zero(d, cols);
    long t = 0;
    auto step = [&] {
      draw_inputs(task, d, rng, symbols, analog);
      if (task.kind == TaskSpec::Kind::symbolic)
        advance_symbols(x, symbols, cfg, rng);
      else
        advance_analog(x, analog, cfg, rng);
      ++t;
      targets(task, symbols, analog, past[t % history]);
    };
    auto accumulate = [&] {
      m.c.selfadjointView<Eigen::Lower>().rankUpdate(x);
      for (long k : lookbacks) m.a[k].noalias() += x * past[(t - k) % history].transpose();
      m.samples += cols;
    };
    if (task.buffer()) {
      for (long s = 0; s < burn; ++s) step();
      for (long snap = 0; snap < per_stream; ++snap) {
        if (snap > 0)
          for (long s = 0; s < stride; ++s) step();
        accumulate();
      }
    } else {
      for (long s = 0; s < length; ++s) step();
      accumulate();
    }
  }
  m.c = m.c.selfadjointView<Eigen::Lower>();
  m.c /= static_cast<double>(m.samples);
  for (auto& [k, a] : m.a) a /= static_cast<double>(m.samples);
  return m;
}

double solve_ridge(const Eigen::MatrixXd& c, double ridge,
                   const std::map<long, Eigen::MatrixXd>& a,
                   std::map<long, Eigen::MatrixXd>& v, std::map<long, double>& residual) {
  const long n = c.rows();
  const double scale = c.trace() / static_cast<double>(n);
  double eps = std::max(ridge, 0.0);
  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::MatrixXd reg = c;
    reg.diagonal().array() += eps;
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      v.clear();
      residual.clear();
      for (const auto& [k, ak] : a) {
        Eigen::MatrixXd vk = llt.solve(ak);
        const double norm = ak.norm();
        const double res = norm > 0 ? (reg * vk - ak).norm() / norm : (reg * vk).norm();
        if (!std::isfinite(res) || res > kResidualTol) {
          ok = false;
          break;
        }
        v[k] = std::move(vk);
        residual[k] = res;
      }
    }
    if (ok) return eps;
    if (attempt == 0) {
      const double grown = std::max(10.0 * eps, 1e-10 * scale);
      warn("MMSE covariance solve failed; retrying with ridge " + std::to_string(grown));
      eps = grown;
    }
  }
  fail(ErrorKind::NumericalFailure, "MMSE covariance is not positive definite after ridge retry");
}

std::map<long, ReadoutMatrix> mmse_fit_empirical(const NetworkConfig& cfg, const TaskSpec& task,
                                                 const std::vector<long>& lookbacks,
                                                 const MmseOptions& options) {
  const Moments m = estimate_moments(cfg, task, lookbacks, options);
  const double ridge =
      options.ridge >= 0 ? options.ridge : 1e-6 * m.c.trace() / static_cast<double>(cfg.neurons());
  std::map<long, Eigen::MatrixXd> v;
  std::map<long, double> residual;
  const double used = solve_ridge(m.c, ridge, m.a, v, residual);
  std::map<long, ReadoutMatrix> out;
  for (long k : lookbacks) {
    ReadoutMatrix r;
    r.kind = ReadoutKind::mmse_empirical;
    r.lookback = k;
    r.lambda = cfg.lambda;
    r.normalization = cfg.codebook->normalization();
    r.ridge = used;
    r.training = m.samples;
    r.residual = residual.at(k);
    r.v = std::move(v.at(k));
    out[k] = std::move(r);
  }
  return out;
}

double input_second_moment(const TaskSpec& task, int alphabet) {
  return task.kind == TaskSpec::Kind::symbolic ? task.p_symbol / alphabet : task.input_var;
}

Eigen::MatrixXd direct_covariance(const NetworkConfig& cfg, const TaskSpec& task) {
  cfg.validate();
  require(cfg.activation.kind == Nonlinearity::linear, ErrorKind::UnsupportedQuery,
          "direct MMSE covariance needs linear neurons");
  const int n = cfg.neurons();
  const double lambda = cfg.lambda, l2 = lambda * lambda;
  const double sa2 = input_second_moment(task, cfg.alphabet());
  const auto& w = *cfg.recurrence;

  long terms;
  double weight = 1.0, noise;
  if (task.buffer()) {
    require(lambda < 1.0, ErrorKind::UnsupportedQuery, "buffer covariance needs lambda < 1");
    noise = cfg.noise_var / (1.0 - l2);
    const auto cycle = w.cycle_length();
    if (cycle && *cycle <= 64L * n) {
      // W^L = I: the infinite sum folds onto one cycle.
      terms = *cycle;
      weight = 1.0 / (1.0 - std::pow(l2, static_cast<double>(terms)));
    } else {
      terms = static_cast<long>(std::ceil(std::log(1e-17) / std::log(l2))) + 1;
    }
  } else {
    terms = static_cast<long>(task.length);
    require(terms >= 1 && task.length == static_cast<double>(terms), ErrorKind::InvalidSpec,
            "reset covariance needs an integer length M >= 1");
    noise = lambda == 1.0 ? terms * cfg.noise_var
                          : cfg.noise_var * (1.0 - std::pow(l2, double(terms))) / (1.0 - l2);
  }

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd y = cfg.codebook->data();
  double g = sa2 * weight;
  for (long k = 0; k < terms; ++k) {
    c.selfadjointView<Eigen::Lower>().rankUpdate(y, g);
    w.rotate(y, 1);
    g *= l2;
  }
  c = c.selfadjointView<Eigen::Lower>();
  c.diagonal().array() += noise;
  return c;
}

std::map<long, ReadoutMatrix> mmse_direct(const NetworkConfig& cfg, const TaskSpec& task,
                                          const std::vector<long>& lookbacks, double ridge) {
  check_lookbacks(task, lookbacks);
  const int n = cfg.neurons();
  if (cfg.noise_var == 0.0 && ridge <= 0.0) {
    const double span = task.buffer() ? std::numeric_limits<double>::infinity()
                                      : task.length * cfg.alphabet();
    require(span >= n, ErrorKind::InvalidSpec,
            "noise-free direct MMSE has a singular covariance; set an explicit ridge > 0");
  }
  const Eigen::MatrixXd c = direct_covariance(cfg, task);
  const double sa2 = input_second_moment(task, cfg.alphabet());
  std::map<long, Eigen::MatrixXd> a;
  for (long k : lookbacks) {
    Eigen::MatrixXd ak = cfg.codebook->data() * (sa2 * std::pow(cfg.lambda, double(k)));
    cfg.recurrence->rotate(ak, k);
    a[k] = std::move(ak);
  }
  std::map<long, Eigen::MatrixXd> v;
  std::map<long, double> residual;
  const double used = solve_ridge(c, std::max(ridge, 0.0), a, v, residual);
  std::map<long, ReadoutMatrix> out;
  for (long k : lookbacks) {
    ReadoutMatrix r;
    r.kind = ReadoutKind::mmse_direct;
    r.lookback = k;
    r.lambda = cfg.lambda;
    r.normalization = cfg.codebook->normalization();
    r.ridge = used;
    r.residual = residual.at(k);
    r.v = std::move(v.at(k));
    out[k] = std::move(r);
  }
  return out;
}

}  // namespace vsamem
