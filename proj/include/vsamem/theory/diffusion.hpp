#pragma once

#include <vector>

#include "vsamem/theory/query.hpp"

namespace vsamem::theory {

/// Discretized single-neuron state space of a saturating network driven by
/// ±1 increments. Clipped networks use the integer states −κ..κ; tanh
/// networks use 2n+1 equal bins on [−γ, γ] with mass split linearly between
/// the two bins adjacent to f(z + y).
class DiffusionChain {
 public:
  DiffusionChain(const Activation& activation, double p_symbol = 1.0, int tanh_bins = 400);

  const std::vector<double>& states() const { return z_; }
  std::size_t size() const { return z_.size(); }
  std::size_t zero_index() const { return z_.size() / 2; }

  /// One step of an unrelated input (or an empty step with prob 1 − p_s).
  void diffuse(std::vector<double>& q) const;
  /// The step storing the item of interest, in its own sign frame.
  void skew(std::vector<double>& q) const;
  std::vector<double> delta() const;
  std::vector<double> uniform() const;
  /// Iterates diffuse() from the zero state until the L1 change < tol.
  std::vector<double> equilibrium(double tol = 1e-13, long max_steps = 50'000'000) const;

  double mean(const std::vector<double>& q) const;
  double second_moment(const std::vector<double>& q) const;

 private:
  struct Move {
    int lo;
    double w_lo;  // remaining 1 − w_lo goes to lo + 1
  };
  void push(const std::vector<double>& q, const std::vector<Move>& moves, double weight,
            std::vector<double>& out) const;

  std::vector<double> z_;
  std::vector<Move> up_, down_;
  double p_symbol_ = 1.0;
  mutable std::vector<double> scratch_;
};

struct DiffusionPoint {
  double mean = 0.0;      // hit readout mean per component
  double hit_var = 0.0;   // hit readout variance per component
  double dist_var = 0.0;  // distractor readout variance per component
  double s = 0.0;         // √N · mean / sqrt(dist_var)
  double p_corr = 0.0;    // unequal-variance integral
};

struct DiffusionResult {
  std::vector<DiffusionPoint> points;     // indexed by K (or by M − 1 for first-item sweeps)
  std::vector<std::vector<double>> trace; // q after each recorded step when requested
};

DiffusionPoint diffusion_point(const DiffusionChain& chain, const std::vector<double>& q,
                               double neurons, double alphabet);

/// All lookbacks K = 0..max_lookback of a clipped network (reset if q.length
/// is finite, else buffer from the exact uniform equilibrium).
DiffusionResult diffusion_clipped(const TheoryQuery& q, long max_lookback, bool keep_trace = false);
/// Same for γ·tanh(x/γ) with 2n+1 bins; buffers start from the iterated equilibrium.
DiffusionResult diffusion_tanh(const TheoryQuery& q, long max_lookback, int n = 400,
                               bool keep_trace = false);
/// Readout of the first stored item while the sequence grows: points[m−1]
/// is M = K + 1 = m.
DiffusionResult diffusion_first_item(const TheoryQuery& q, long max_length, int n = 400,
                                     bool keep_trace = false);

/// Per-component equilibrium variance of a saturating buffer.
double equilibrium_variance(const Activation& activation, int n = 400);

double time_constant_lambda(double lambda);
double time_constant_clipped(double kappa);
double time_constant_tanh(double gamma, int n = 400);
/// Dispatch on the activation; λ is used for linear networks.
double time_constant(const Activation& activation, double lambda, int n = 400);
/// Inverse of τ = −1/ln λ.
double lambda_for_time_constant(double tau);

}  // namespace vsamem::theory
