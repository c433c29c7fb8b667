#pragma once

#include <vector>

namespace vsamem::theory {

/// Distribution of how many of the other D − 1 random bipolar code vectors
/// coincide with the stored one.
struct CollisionStats {
  double alphabet = 0;    // D
  double neurons = 0;     // N
  double q = 0;           // pair-collision probability 2^{−N}
  bool poisson = false;   // Poisson((D−1)q) used instead of the binomial
  std::vector<double> p;  // p[C], truncated once the tail is below 1e-17
};

CollisionStats collision_distribution(double neurons, double alphabet);
/// Σ_C p_C / (C + 1): a tie among C + 1 identical vectors is broken uniformly.
double collision_accuracy(double neurons, double alphabet);
double collision_accuracy(const CollisionStats& stats);
/// Σ_C p_C log₂(p_C D / (C + 1)) in bits.
double collision_info(double neurons, double alphabet);

}  // namespace vsamem::theory
