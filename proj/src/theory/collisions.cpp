#include "vsamem/theory/collisions.hpp"

#include <cmath>

#include "vsamem/error.hpp"

namespace vsamem::theory {

namespace {
constexpr double kPoissonAbove = 1e6;
}

CollisionStats collision_distribution(double neurons, double alphabet) {
  require(neurons >= 1 && alphabet >= 1, ErrorKind::DomainError, "need N >= 1 and D >= 1");
  require(alphabet <= std::exp2(neurons), ErrorKind::DomainError,
          "D cannot exceed the 2^N distinct bipolar vectors");
  CollisionStats st;
  st.alphabet = alphabet;
  st.neurons = neurons;
  st.q = std::exp2(-neurons);
  const double n = alphabet - 1.0;  // other vectors
  st.poisson = alphabet > kPoissonAbove;
  const double mean = n * st.q;
  const double log1mq = std::log1p(-st.q);
  double cum = 0.0;
  for (double c = 0; c <= n; c += 1.0) {
    double lp;
    if (st.poisson) {
      lp = c * std::log(mean) - mean - std::lgamma(c + 1.0);
      if (mean == 0.0) lp = c == 0 ? 0.0 : -INFINITY;
    } else {
      lp = std::lgamma(n + 1.0) - std::lgamma(c + 1.0) - std::lgamma(n - c + 1.0) +
           c * std::log(st.q) + (n - c) * log1mq;
    }
    const double p = std::exp(lp);
    st.p.push_back(p);
    cum += p;
    if (c > mean && 1.0 - cum < 1e-17) break;
    if (c > mean + 50.0 * std::sqrt(mean + 1.0)) break;
  }
  return st;
}

double collision_accuracy(const CollisionStats& st) {
  double acc = 0.0;
  for (std::size_t c = 0; c < st.p.size(); ++c) acc += st.p[c] / (c + 1.0);
  return acc;
}

double collision_accuracy(double neurons, double alphabet) {
  return collision_accuracy(collision_distribution(neurons, alphabet));
}

double collision_info(double neurons, double alphabet) {
  const auto st = collision_distribution(neurons, alphabet);
  double bits = 0.0;
  for (std::size_t c = 0; c < st.p.size(); ++c) {
    const double p = st.p[c];
    if (p <= 0.0) continue;
    bits += p * (std::log2(p) + std::log2(alphabet) - std::log2(c + 1.0));
  }
  return bits;
}

}  // namespace vsamem::theory
