#pragma once

#include <vector>

#include "vsamem/theory/accuracy.hpp"
#include "vsamem/theory/query.hpp"

namespace vsamem::theory {

/// Per-lookback sensitivity and accuracy of a symbolic memory, K = 0, 1, ….
/// Linear networks use the closed forms; clipped and tanh networks use the
/// diffusion analysis. Buffers are truncated once s(K)² < 1e-6·s(0)².
struct SymbolicProfile {
  std::vector<double> s;
  std::vector<double> p_corr;
  std::vector<double> info;  // bits per item
  double total = 0.0;        // bits
};
SymbolicProfile symbolic_profile(const TheoryQuery& q, const AccuracyCurve* curve = nullptr,
                                 long max_lookback = -1);

/// Σ_K I_item(K) in bits.
double info_total_symbolic(const TheoryQuery& q, const AccuracyCurve* curve = nullptr);

/// ½ log₂(1 + r).
double info_analog(double r);

/// Noise factor 1/(1 + σ_η²/(D V_Φ)).
double noise_factor(const TheoryQuery& q);

/// Per-coefficient SNR of a linear unitary reset memory with Gaussian inputs,
/// N / (MD − 1 + M σ_η²/V_Φ).
double snr_reset(const TheoryQuery& q);
/// MD/2 · log₂(1 + r) with r from snr_reset, in bits.
double info_total_analog_reset(const TheoryQuery& q);
/// Capacity for r → 0 in bits per neuron.
double capacity_bound_analog(const TheoryQuery& q);
/// Capacity per neuron as a function of r for σ_η = 0: log₂(1+r)/(2r).
double capacity_at_snr(double r);

/// SNR of a contracting analog memory at lookback K (finite M or buffer).
double snr_analog(const TheoryQuery& q, double K);
/// b with r(K) = b·q^K, q = λ².
double snr_scale(const TheoryQuery& q);

/// log (−b; q)_M = Σ_{K<M} log(1 + b q^K); M may be infinite.
double log_qpochhammer_neg(double b, double q, double M);
/// Large-τ expansion of log (a; q)_∞ with τ = −2/log q.
double log_qpochhammer_asymptotic(double a, double q);

/// D/2 · log₂ (−b; q)_M in bits.
double info_total_analog_buffer(const TheoryQuery& q);
/// Same quantity summed term by term from snr_analog.
double info_total_analog_buffer_direct(const TheoryQuery& q);

/// Analytic optimal time constant for target SNR r*.
double tau_opt(const TheoryQuery& q, double r_star);
/// Bits recalled with SNR ≥ r*.
double usable_info(const TheoryQuery& q, double r_star);
/// Continuous solution K* of r(K*) = r* (M for a λ = 1 reset memory).
double usable_horizon(const TheoryQuery& q, double r_star);
/// Number of lookbacks recalled with SNR ≥ r*.
double usable_count(const TheoryQuery& q, double r_star);
/// Closed form of the r* → 0 usable capacity, bits per neuron.
double usable_capacity_limit(const TheoryQuery& q);

/// Capacity per neuron implied by the Chang high-fidelity law, maximized over
/// the error rate: max_ε (1−ε) log₂ D / s²(D, ε). log_d is ln D.
double chang_capacity_estimate(double log_d);

}  // namespace vsamem::theory
