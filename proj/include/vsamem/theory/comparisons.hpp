#pragma once

#include <vector>

namespace vsamem::theory {

/// Threshold rule of the classic superposition-capacity estimate: every one of
/// the M stored tokens above θ and every one of the other D − M below it.
/// θ is in signal units. Requires M ≤ D.
double plate_all_correct(double s, double D, double M, double theta);
/// [∫_{(θ−1)s}^{∞} φ(h) Φ(h + s)^{D−1} dh]^M; θ = −∞ gives p_corr^M.
double our_all_correct(double s, double D, double M, double theta);

/// Annealed memory curve m(K) = λ^{2K}q/(1 + λ^{2K}q), K = 0..max_lookback,
/// with q from the self-consistency condition solved by bisection in log q.
struct AnnealedCurve {
  double q = 0.0;
  std::vector<double> m;
};
AnnealedCurve white_annealed_curve(double neurons, double lambda, double noise_var,
                                   long max_lookback);

}  // namespace vsamem::theory
