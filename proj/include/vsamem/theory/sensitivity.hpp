#pragma once

#include "vsamem/theory/accuracy.hpp"
#include "vsamem/theory/query.hpp"

namespace vsamem::theory {

/// Σ_{k<M} λ^{2k}, or 1/(1−λ²) for a buffer.
double decay_sum(double lambda, double length);

/// Distractor-referenced sensitivity s(K) of a linear network.
double sensitivity(const TheoryQuery& q, double K);

/// Shift and hit/distractor scale ratio of the unequal-variance integral for
/// a linear network, including the self term of the retrieved item.
struct GaussianReadout {
  double shift = 0.0;
  double scale = 1.0;
};
GaussianReadout readout_statistics(const TheoryQuery& q, double K);

/// Accuracy from the unequal-variance integral.
double p_corr_general(const TheoryQuery& q, double K, Grid grid = {});

/// s, p_corr (equal-variance integral), SNR, ρ and item information at K.
TheoryResult evaluate(const TheoryQuery& q, double K);

}  // namespace vsamem::theory
