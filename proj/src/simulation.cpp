#include "vsamem/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "vsamem/error.hpp"
#include "vsamem/theory/diffusion.hpp"

namespace vsamem {

NetworkConfig NetworkRecipe::instantiate(std::uint64_t seed) const {
  CodebookSpec spec{family, neurons, alphabet, sparseness, derive_seed(seed, 1)};
  NetworkConfig cfg;
  cfg.codebook = std::make_shared<const Codebook>(Codebook::generate(spec));
  cfg.recurrence = std::make_shared<const RecurrentOperator>(
      make_recurrent(recurrence, neurons, 1.0, derive_seed(seed, 2)));
  cfg.lambda = lambda;
  cfg.activation = activation;
  cfg.noise_var = noise_var;
  cfg.p_symbol = p_symbol;
  cfg.step_budget = step_budget;
  cfg.validate();
  return cfg;
}

void draw_inputs(const TaskSpec& task, int alphabet, Rng& rng, std::vector<int>& symbols,
                 Eigen::MatrixXd& analog) {
  if (task.kind == TaskSpec::Kind::symbolic) {
    std::uniform_int_distribution<int> pick(0, alphabet - 1);
    std::bernoulli_distribution present(task.p_symbol);
    for (auto& s : symbols) s = (task.p_symbol >= 1.0 || present(rng)) ? pick(rng) : -1;
  } else {
    std::normal_distribution<double> g(0.0, std::sqrt(task.input_var));
    for (Eigen::Index c = 0; c < analog.cols(); ++c)
      for (Eigen::Index d = 0; d < analog.rows(); ++d) analog(d, c) = g(rng);
  }
}

long default_burn_in(const NetworkConfig& cfg) {
  const double tau = theory::time_constant(cfg.activation, cfg.lambda);
  require(!std::isinf(tau), ErrorKind::InvalidSpec,
          "buffer simulation needs lambda < 1 or a saturating nonlinearity");
  return static_cast<long>(std::ceil(10.0 * tau)) + 1;
}

std::vector<std::pair<long, long>> SimulationPlan::all_lookbacks(long length,
                                                                 const std::vector<long>& ks) {
  std::vector<std::pair<long, long>> out;
  for (long k : ks) out.emplace_back(length, k);
  return out;
}

std::vector<std::pair<long, long>> SimulationPlan::first_item(const std::vector<long>& lengths) {
  std::vector<std::pair<long, long>> out;
  for (long m : lengths) out.emplace_back(m, m - 1);
  return out;
}

double SymbolicTally::std_error() const {
  if (trials == 0) return 0.0;
  const double p = accuracy();
  return std::sqrt(std::max(p * (1.0 - p), 0.25 / trials) / trials);
}

double AnalogTally::correlation_sq() const {
  if (signal <= 0 || estimate <= 0) return 0.0;
  return cross * cross / (signal * estimate);
}

double AnalogTally::snr_stderr() const {
  if (count == 0 || error <= 0) return 0.0;
  return snr() * std::sqrt(2.0 / count);
}

namespace {

struct ReadSlot {
  long step;
  long lookback;
  std::size_t index;  // into the tally vector
};

/// Runs `work(batch)` for every batch on `threads` workers; results are kept
/// per batch so reduction order does not depend on the worker count.
template <class Result, class Work>
std::vector<Result> run_batches(long n_batches, int threads, Work work) {
  std::vector<Result> results(n_batches);
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (long b; (b = next.fetch_add(1)) < n_batches;) {
      try {
        results[b] = work(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n_batches;
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(n_batches)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

/// Ring buffer of the inputs of the last `depth` steps for B columns.
class History {
 public:
  History(const TaskSpec& task, int alphabet, int columns, long depth)
      : task_(task), d_(alphabet), b_(columns), depth_(depth) {
    symbols_.assign(static_cast<std::size_t>(depth) * columns, -1);
    if (task.kind == TaskSpec::Kind::analog)
      analog_.assign(depth, Eigen::MatrixXd::Zero(alphabet, columns));
    step_symbols_.resize(columns);
    step_analog_ = Eigen::MatrixXd::Zero(alphabet, columns);
  }

  // Draws the inputs of step t and stores them.
  void draw(long t, Rng& rng) {
    draw_inputs(task_, d_, rng, step_symbols_, step_analog_);
    if (task_.kind == TaskSpec::Kind::symbolic)
      std::copy(step_symbols_.begin(), step_symbols_.end(),
                symbols_.begin() + (t % depth_) * b_);
    else
      analog_[t % depth_] = step_analog_;
  }

  const std::vector<int>& last_symbols() const { return step_symbols_; }
  const Eigen::MatrixXd& last_analog() const { return step_analog_; }
  int columns() const { return b_; }
  int symbol_at(long step, int column) const {
    return symbols_[(step % depth_) * b_ + column];
  }
  const Eigen::MatrixXd& analog_at(long step) const { return analog_[step % depth_]; }

 private:
  const TaskSpec& task_;
  int d_, b_;
  long depth_;
  std::vector<int> symbols_;
  std::vector<Eigen::MatrixXd> analog_;
  std::vector<int> step_symbols_;
  Eigen::MatrixXd step_analog_;
};

/// Shared state of one batch of B columns.
class BatchRunner {
 public:
  BatchRunner(const SimulationPlan& plan, const NetworkConfig& cfg, int columns,
              long history, Rng& rng)
      : plan_(plan), cfg_(cfg), rng_(rng), history_(plan.task, cfg.alphabet(), columns, history) {
    x_ = Eigen::MatrixXd::Zero(cfg.neurons(), columns);
  }

  void step() {
    ++t_;
    history_.draw(t_, rng_);
    if (plan_.task.kind == TaskSpec::Kind::symbolic)
      advance_symbols(x_, history_.last_symbols(), cfg_, rng_);
    else
      advance_analog(x_, history_.last_analog(), cfg_, rng_);
  }

  long time() const { return t_; }
  const History& history() const { return history_; }

  /// Readouts for ascending lookbacks at the current step; `emit(K, H)` gets
  /// the D×B readout matrix (λ-compensated for analog naive readout).
  template <class Emit>
  void read(const std::vector<long>& ks, Emit emit) {
    const auto& phi = cfg_.codebook->data();
    const double c = cfg_.codebook->normalization();
    Eigen::MatrixXd y = x_;
    if (plan_.retrieval_noise_var > 0.0) {
      std::normal_distribution<double> g(0.0, std::sqrt(plan_.retrieval_noise_var));
      for (Eigen::Index j = 0; j < y.cols(); ++j)
        for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) += g(rng_);
    }
    if (plan_.readouts) {
      for (long k : ks) {
        const auto it = plan_.readouts->find(k);
        require(it != plan_.readouts->end(), ErrorKind::InvalidSpec,
                "no readout matrix for lookback " + std::to_string(k));
        require(it->second.v.rows() == y.rows(), ErrorKind::DimensionMismatch,
                "readout matrix and network differ in N");
        Eigen::MatrixXd h = it->second.v.transpose() * y;
        emit(k, h);
      }
      return;
    }
    long rotated = 0;
    for (long k : ks) {
      cfg_.recurrence->rotate(y, -(k - rotated));
      rotated = k;
      Eigen::MatrixXd h = phi.transpose() * y / c;
      if (plan_.flip_prob > 0.0) apply_flips(h, y, phi, c);
      if (plan_.task.kind == TaskSpec::Kind::analog && cfg_.lambda != 1.0)
        h /= std::pow(cfg_.lambda, static_cast<double>(k));
      emit(k, h);
    }
  }

 private:
  // Sign flips of the readout codebook entries, one fresh pattern per readout.
  void apply_flips(Eigen::MatrixXd& h, const Eigen::MatrixXd& y, const Eigen::MatrixXd& phi,
                   double c) {
    std::geometric_distribution<long> gap(plan_.flip_prob);
    const long n = phi.rows(), total = phi.rows() * phi.cols();
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      for (long idx = gap(rng_); idx < total; idx += 1 + gap(rng_)) {
        const long i = idx % n, d = idx / n;
        h(d, j) -= 2.0 * phi(i, d) * y(i, j) / c;
      }
    }
  }

  const SimulationPlan& plan_;
  const NetworkConfig& cfg_;
  Rng& rng_;
  History history_;
  long t_ = 0;
  Eigen::MatrixXd x_;
};

/// Readout kernels T_j = Φᵀ W^j Φ / c, j = 0..M−1, of one dense network.
/// A linear noise-free reset memory then reads
/// h(m, K) = Σ_i λ^i T_{i−K} a(m − i) with T_{−j} = T_jᵀ.
struct Gram {
  std::vector<Eigen::MatrixXd> t;
};

std::shared_ptr<const Gram> make_gram(const NetworkConfig& cfg, long length) {
  auto g = std::make_shared<Gram>();
  const double c = cfg.codebook->normalization();
  const Eigen::MatrixXd& phi = cfg.codebook->data();
  Eigen::MatrixXd y = phi;
  g->t.reserve(length);
  for (long j = 0; j < length; ++j) {
    g->t.push_back(phi.transpose() * y / c);
    if (j + 1 < length) cfg.recurrence->rotate(y, 1);
  }
  return g;
}

Eigen::MatrixXd gram_readout(const Gram& g, const History& hist, const TaskSpec& task,
                             double lambda, long m, long k) {
  const long d = g.t.front().rows();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, hist.columns());
  double w = 1.0;
  for (long i = 0; i < m; ++i, w *= lambda) {
    const long j = i - k;
    const Eigen::MatrixXd& tj = g.t[std::abs(j)];
    if (task.kind == TaskSpec::Kind::symbolic) {
      for (int col = 0; col < hist.columns(); ++col) {
        const int a = hist.symbol_at(m - i, col);
        if (a < 0) continue;
        if (j >= 0) h.col(col) += w * tj.col(a);
        else h.col(col) += w * tj.row(a).transpose();
      }
    } else if (j >= 0) {
      h.noalias() += w * tj * hist.analog_at(m - i);
    } else {
      h.noalias() += w * tj.transpose() * hist.analog_at(m - i);
    }
  }
  if (task.kind == TaskSpec::Kind::analog && lambda != 1.0)
    h /= std::pow(lambda, static_cast<double>(k));
  return h;
}

/// Networks shared by consecutive batches, with their readout kernels.
class NetworkCache {
 public:
  struct Entry {
    NetworkConfig cfg;
    std::shared_ptr<const Gram> gram;
  };

  explicit NetworkCache(std::size_t capacity) : capacity_(capacity) {}

  template <class Make>
  std::shared_ptr<const Entry> get(long group, Make make) {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& [g, e] : entries_)
      if (g == group) return e;
    auto e = std::make_shared<const Entry>(make());
    entries_.emplace_back(group, e);
    if (entries_.size() > capacity_) entries_.erase(entries_.begin());
    return e;
  }

 private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::vector<std::pair<long, std::shared_ptr<const Entry>>> entries_;
};

void validate_plan(const SimulationPlan& plan) {
  require(plan.sequences >= 0 && plan.batch >= 1 && plan.batches_per_network >= 1,
          ErrorKind::InvalidSpec, "bad batch layout");
  require(plan.flip_prob >= 0.0 && plan.flip_prob < 0.5, ErrorKind::InvalidSpec,
          "flip probability must lie in [0, 0.5)");
  require(plan.retrieval_noise_var >= 0.0, ErrorKind::InvalidSpec,
          "retrieval noise variance must be >= 0");
  if (plan.task.buffer()) {
    require(!plan.lookbacks.empty() && plan.snapshots >= 1 && plan.stride >= 1,
            ErrorKind::InvalidSpec, "buffer simulation needs lookbacks and snapshots");
    for (long k : plan.lookbacks)
      require(k >= 0, ErrorKind::InvalidSpec, "lookbacks must be >= 0");
  } else {
    const long m = static_cast<long>(plan.task.length);
    require(m >= 1 && plan.task.length == static_cast<double>(m), ErrorKind::InvalidSpec,
            "reset simulation needs an integer length M >= 1");
    for (const auto& [step, k] : plan.reads)
      require(step >= 1 && step <= m && k >= 0 && k < step, ErrorKind::InvalidSpec,
              "read point needs 0 <= K < m <= M");
  }
}

// Slots grouped by step with ascending lookbacks.
std::map<long, std::vector<ReadSlot>> group_reads(const SimulationPlan& plan) {
  std::map<long, std::vector<ReadSlot>> by_step;
  if (plan.task.buffer()) {
    for (std::size_t i = 0; i < plan.lookbacks.size(); ++i)
      by_step[0].push_back({0, plan.lookbacks[i], i});
  } else {
    for (std::size_t i = 0; i < plan.reads.size(); ++i)
      by_step[plan.reads[i].first].push_back({plan.reads[i].first, plan.reads[i].second, i});
  }
  for (auto& [step, slots] : by_step)
    std::stable_sort(slots.begin(), slots.end(),
                     [](const ReadSlot& a, const ReadSlot& b) { return a.lookback < b.lookback; });
  return by_step;
}

template <class Tally, class Record>
std::vector<Tally> simulate(const SimulationPlan& plan, Record record) {
  validate_plan(plan);
  const auto by_step = group_reads(plan);
  const std::size_t n_slots = plan.task.buffer() ? plan.lookbacks.size() : plan.reads.size();
  const long n_batches = (plan.sequences + plan.batch - 1) / plan.batch;

  auto init = [&] {
    std::vector<Tally> t(n_slots);
    for (const auto& [step, slots] : by_step)
      for (const auto& s : slots) {
        t[s.index].step = s.step;
        t[s.index].lookback = s.lookback;
        if constexpr (std::is_same_v<Tally, SymbolicTally>) {
          const auto nt = plan.thresholds.size();
          t[s.index].present.assign(nt, 0);
          t[s.index].hits.assign(nt, 0);
          t[s.index].absent.assign(nt, 0);
          t[s.index].rejections.assign(nt, 0);
        }
      }
    return t;
  };

  // Dense linear noise-free reset memories read through precomputed kernels
  // when a network serves more columns than it has symbols.
  const bool gram_path = plan.kernel_readout && !plan.task.buffer() && !plan.readouts && plan.flip_prob == 0.0 &&
                         plan.retrieval_noise_var == 0.0 && [&] {
                           const NetworkConfig* fixed = plan.network ? &*plan.network : nullptr;
                           const auto act = fixed ? fixed->activation : plan.net.activation;
                           const double noise = fixed ? fixed->noise_var : plan.net.noise_var;
                           const int d = fixed ? fixed->alphabet() : plan.net.alphabet;
                           const bool dense = fixed ? fixed->recurrence->storage() ==
                                                          RecurrentOperator::Storage::dense
                                                    : plan.net.recurrence == RecurrenceKind::haar;
                           const long cols = fixed ? plan.sequences
                                                   : long(plan.batch) * plan.batches_per_network;
                           return dense && act.kind == Nonlinearity::linear && noise == 0.0 &&
                                  cols > d;
                         }();
  NetworkCache cache(static_cast<std::size_t>(std::max(2, plan.threads + 1)));
  auto network_for = [&](long b) {
    const long group = plan.network ? 0 : b / plan.batches_per_network;
    return cache.get(group, [&] {
      NetworkCache::Entry e{plan.network ? *plan.network
                                         : plan.net.instantiate(derive_seed(
                                               plan.seed ^ 0x6e6574776f726bULL, group)),
                            nullptr};
      e.cfg.validate();
      if (gram_path) e.gram = make_gram(e.cfg, static_cast<long>(plan.task.length));
      return e;
    });
  };

  auto work = [&](long b) {
    std::vector<Tally> tallies = init();
    const int cols = static_cast<int>(std::min<long>(plan.batch, plan.sequences - b * plan.batch));
    const auto entry = network_for(b);
    const NetworkConfig& cfg = entry->cfg;
    Rng rng = make_rng(plan.seed, static_cast<std::uint64_t>(b));
    if (entry->gram) {
      const long m = static_cast<long>(plan.task.length);
      History hist(plan.task, cfg.alphabet(), cols, m + 1);
      for (long t = 1; t <= m; ++t) {
        hist.draw(t, rng);
        const auto it = by_step.find(t);
        if (it == by_step.end()) continue;
        for (const auto& slot : it->second)
          record(tallies[slot.index], hist, t - slot.lookback,
                 gram_readout(*entry->gram, hist, plan.task, cfg.lambda, t, slot.lookback));
      }
      return tallies;
    }
    if (plan.task.buffer()) {
      const long kmax = *std::max_element(plan.lookbacks.begin(), plan.lookbacks.end());
      BatchRunner runner(plan, cfg, cols, kmax + 1, rng);
      const long burn = plan.burn_in >= 0 ? plan.burn_in : default_burn_in(cfg);
      for (long t = 0; t < std::max(burn, kmax + 1); ++t) runner.step();
      std::vector<long> ks;
      for (const auto& s : by_step.at(0)) ks.push_back(s.lookback);
      for (long snap = 0; snap < plan.snapshots; ++snap) {
        if (snap > 0)
          for (long t = 0; t < plan.stride; ++t) runner.step();
        std::size_t i = 0;
        const auto& slots = by_step.at(0);
        runner.read(ks, [&](long k, const Eigen::MatrixXd& h) {
          record(tallies[slots[i++].index], runner.history(), runner.time() - k, h);
        });
      }
    } else {
      const long m = static_cast<long>(plan.task.length);
      BatchRunner runner(plan, cfg, cols, m + 1, rng);
      for (long t = 1; t <= m; ++t) {
        runner.step();
        const auto it = by_step.find(t);
        if (it == by_step.end()) continue;
        std::vector<long> ks;
        for (const auto& s : it->second) ks.push_back(s.lookback);
        std::size_t i = 0;
        runner.read(ks, [&](long k, const Eigen::MatrixXd& h) {
          record(tallies[it->second[i++].index], runner.history(), t - k, h);
        });
      }
    }
    return tallies;
  };

  const auto parts = run_batches<std::vector<Tally>>(n_batches, plan.threads, work);
  std::vector<Tally> total = init();
  for (const auto& part : parts)
    for (std::size_t i = 0; i < n_slots; ++i) {
      if constexpr (std::is_same_v<Tally, SymbolicTally>) {
        total[i].trials += part[i].trials;
        total[i].correct += part[i].correct;
        for (std::size_t j = 0; j < plan.thresholds.size(); ++j) {
          total[i].present[j] += part[i].present[j];
          total[i].hits[j] += part[i].hits[j];
          total[i].absent[j] += part[i].absent[j];
          total[i].rejections[j] += part[i].rejections[j];
        }
      } else {
        total[i].count += part[i].count;
        total[i].signal += part[i].signal;
        total[i].error += part[i].error;
        total[i].cross += part[i].cross;
        total[i].estimate += part[i].estimate;
      }
    }
  return total;
}

}  // namespace

std::vector<SymbolicTally> simulate_symbolic(const SimulationPlan& plan) {
  require(plan.task.kind == TaskSpec::Kind::symbolic, ErrorKind::InvalidSpec,
          "simulate_symbolic needs a symbolic task");
  const auto& th = plan.thresholds;
  return simulate<SymbolicTally>(
      plan, [&](SymbolicTally& t, const History& r, long item_step, const Eigen::MatrixXd& h) {
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
          const int target = r.symbol_at(item_step, static_cast<int>(j));
          Eigen::Index best;
          const double top = h.col(j).maxCoeff(&best);  // first maximum: lowest index
          if (target >= 0) {
            ++t.trials;
            if (best == target) ++t.correct;
          }
          for (std::size_t i = 0; i < th.size(); ++i) {
            if (target >= 0) {
              ++t.present[i];
              if (best == target && top >= th[i]) ++t.hits[i];
            } else {
              ++t.absent[i];
              if (top < th[i]) ++t.rejections[i];
            }
          }
        }
      });
}

std::vector<AnalogTally> simulate_analog(const SimulationPlan& plan) {
  require(plan.task.kind == TaskSpec::Kind::analog, ErrorKind::InvalidSpec,
          "simulate_analog needs an analog task");
  require(plan.thresholds.empty() && plan.flip_prob == 0.0, ErrorKind::InvalidSpec,
          "detection and bit flips apply to symbolic tasks only");
  return simulate<AnalogTally>(
      plan, [&](AnalogTally& t, const History& r, long item_step, const Eigen::MatrixXd& h) {
        const Eigen::MatrixXd& a = r.analog_at(item_step);
        t.count += a.size();
        t.signal += a.squaredNorm();
        t.error += (h - a).squaredNorm();
        t.cross += (h.array() * a.array()).sum();
        t.estimate += h.squaredNorm();
      });
}

}  // namespace vsamem
