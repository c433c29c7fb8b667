#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "vsamem/network.hpp"
#include "vsamem/readout.hpp"
#include "vsamem/simulation.hpp"

namespace vsamem {

struct MmseOptions {
  long training = 5000;      // R: state samples
  double ridge = -1.0;       // ε; negative selects 1e-6·tr(C)/N
  long burn_in = -1;         // buffers; −1 selects default_burn_in
  long stride = 1;           // buffers: steps between samples of one stream
  long snapshots = 1;        // buffers: samples per stream
  int batch = 64;
  std::uint64_t seed = 0;
  int max_neurons = 4096;
};

/// Raw second moments C = ⟨x xᵀ⟩ and A(K) = ⟨x a(K)ᵀ⟩ over synthetic inputs.
/// Symbolic targets are one-hot (zero for an empty step).
struct Moments {
  Eigen::MatrixXd c;
  std::map<long, Eigen::MatrixXd> a;
  long samples = 0;
};

Moments estimate_moments(const NetworkConfig& cfg, const TaskSpec& task,
                         const std::vector<long>& lookbacks, const MmseOptions& options);

/// V(K) = (C + εI)⁻¹ A(K) from synthetic training sequences.
std::map<long, ReadoutMatrix> mmse_fit_empirical(const NetworkConfig& cfg, const TaskSpec& task,
                                                 const std::vector<long>& lookbacks,
                                                 const MmseOptions& options);

/// Second moment of an input coefficient: p_s/D (symbolic) or the input variance.
double input_second_moment(const TaskSpec& task, int alphabet);

/// Expected state covariance of a linear network. Reset: σ_a² Σ_{k<M} λ^{2k} W^kΦΦᵀW^{−k}
/// plus the accumulated noise. Buffer: the stationary sum, in closed cycle form for
/// permutations.
Eigen::MatrixXd direct_covariance(const NetworkConfig& cfg, const TaskSpec& task);

/// V(K) = C̃⁻¹ σ_a² λ^K W^K Φ. With σ_η = 0 an explicit ridge is required
/// whenever C̃ is rank-deficient by construction (MD < N).
std::map<long, ReadoutMatrix> mmse_direct(const NetworkConfig& cfg, const TaskSpec& task,
                                          const std::vector<long>& lookbacks,
                                          double ridge = -1.0);

/// Solves (C + εI)V = A by Cholesky; on failure or residual above 1e-8 the
/// ridge grows once before giving up. Returns the ridge used.
double solve_ridge(const Eigen::MatrixXd& c, double ridge,
                   const std::map<long, Eigen::MatrixXd>& a,
                   std::map<long, Eigen::MatrixXd>& v, std::map<long, double>& residual);

}  // namespace vsamem
