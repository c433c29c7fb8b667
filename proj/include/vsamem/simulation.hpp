#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "vsamem/network.hpp"
#include "vsamem/readout.hpp"

namespace vsamem {

/// Recipe for drawing a random network; each draw uses its own seed.
struct NetworkRecipe {
  CodeFamily family = CodeFamily::hdc;
  int neurons = 1000;
  int alphabet = 27;
  double sparseness = 0.0;
  RecurrenceKind recurrence = RecurrenceKind::permutation;
  double lambda = 1.0;
  Activation activation;
  double noise_var = 0.0;
  double p_symbol = 1.0;
  long step_budget = 1'000'000;

  NetworkConfig instantiate(std::uint64_t seed) const;
};

/// Input statistics of a memory task.
struct TaskSpec {
  enum class Kind { symbolic, analog };
  Kind kind = Kind::symbolic;
  double length = 100;     // M, or infinity for a buffer
  double p_symbol = 1.0;   // symbolic: probability a step carries a symbol
  double input_var = 1.0;  // analog: variance of each input coefficient

  bool buffer() const { return length == std::numeric_limits<double>::infinity(); }
};

/// Fills one step of inputs for B columns: symbols[b] (−1 = empty) for
/// symbolic tasks, analog.col(b) for analog tasks.
void draw_inputs(const TaskSpec& task, int alphabet, Rng& rng, std::vector<int>& symbols,
                 Eigen::MatrixXd& analog);

/// Burn-in steps that bring a buffer to within e^{-10} of equilibrium.
long default_burn_in(const NetworkConfig& cfg);

struct SimulationPlan {
  NetworkRecipe net;
  TaskSpec task;
  // Reset memories: (step m, lookback K) pairs read after step m, 1 <= m <= M.
  std::vector<std::pair<long, long>> reads;
  // Buffers: lookbacks read at each snapshot.
  std::vector<long> lookbacks;
  long burn_in = -1;  // buffers; −1 selects default_burn_in
  long stride = 1;    // buffers: steps between snapshots
  long snapshots = 1; // buffers: snapshots per stream
  long sequences = 1000;  // reset: sequences; buffer: streams
  int batch = 16;         // columns advanced together
  int batches_per_network = 1;
  std::optional<NetworkConfig> network;  // fixed network instead of the recipe
  // Readout: vsa-naive unless matrices are supplied per lookback.
  std::shared_ptr<const std::map<long, ReadoutMatrix>> readouts;
  double retrieval_noise_var = 0.0;
  double flip_prob = 0.0;                 // readout codebook sign flips
  std::vector<double> thresholds;         // detection thresholds θ
  std::uint64_t seed = 0;
  int threads = 1;
  // Dense linear noise-free reset memories may read through precomputed
  // Φᵀ W^j Φ kernels instead of advancing the state; results are identical.
  bool kernel_readout = true;

  static std::vector<std::pair<long, long>> all_lookbacks(long length,
                                                          const std::vector<long>& ks);
  static std::vector<std::pair<long, long>> first_item(const std::vector<long>& lengths);
};

struct SymbolicTally {
  long step = 0;
  long lookback = 0;
  long trials = 0;  // readouts of present items
  long correct = 0;
  // Per detection threshold.
  std::vector<long> present, hits, absent, rejections;

  double accuracy() const { return trials ? double(correct) / trials : 0.0; }
  double std_error() const;
};

struct AnalogTally {
  long step = 0;
  long lookback = 0;
  long count = 0;        // scalar coefficients read
  double signal = 0.0;   // Σ a²
  double error = 0.0;    // Σ (â − a)²
  double cross = 0.0;    // Σ a·â
  double estimate = 0.0; // Σ â²
  double snr() const { return error > 0 ? signal / error : std::numeric_limits<double>::infinity(); }
  /// Delta-method standard error assuming Gaussian errors.
  double snr_stderr() const;
  /// Squared correlation between stored and decoded values (zero-mean inputs).
  double correlation_sq() const;
};

std::vector<SymbolicTally> simulate_symbolic(const SimulationPlan& plan);
std::vector<AnalogTally> simulate_analog(const SimulationPlan& plan);

}  // namespace vsamem
