#pragma once

namespace vsamem::theory {

double normal_pdf(double x);
double normal_cdf(double x);
/// log Φ(x), accurate in both tails.
double log_normal_cdf(double x);
/// Real dilogarithm Li₂(x) for x ≤ 1.
double dilog(double x);

}  // namespace vsamem::theory
