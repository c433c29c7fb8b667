#pragma once

#include <limits>

#include "vsamem/codebook.hpp"
#include "vsamem/network.hpp"

namespace vsamem::theory {

inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

/// Parameters of a theory evaluation. Lookbacks K are zero-based: K = 0 is
/// the most recently stored item. M = ∞ denotes a memory buffer.
struct TheoryQuery {
  double neurons = 1000;  // N
  double alphabet = 27;   // D
  double length = 100;    // M, or kInfinite
  double lambda = 1.0;
  Activation activation;
  double noise_var = 0.0;            // encoding noise σ_η² per step
  double retrieval_noise_var = 0.0;  // noise added once at readout
  double p_symbol = 1.0;             // p_s
  double flip_prob = 0.0;            // readout codebook bit flips p_f
  CodeMoments moments = analytic_moments(CodeFamily::hdc, 2, 0.0);

  bool buffer() const { return length == kInfinite; }
  void validate() const;
};

struct TheoryResult {
  double s = 0.0;
  double p_corr = 0.0;
  double r = 0.0;    // SNR; s² for symbolic readout
  double rho = 0.0;  // sqrt(r/(r+1))
  double info_item = 0.0;
  double eps = 0.0;  // 1 − p_corr
};

double rho_from_snr(double r);
double snr_from_rho(double rho);

}  // namespace vsamem::theory
