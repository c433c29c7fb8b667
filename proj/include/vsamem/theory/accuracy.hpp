#pragma once

#include <limits>
#include <vector>

namespace vsamem::theory {

/// Integration grid in units of the hit standard deviation.
struct Grid {
  int points = 2000;
  double span = 8.0;
};

/// P(hit beats D−1 distractors) = ∫ φ(h) Φ(h + s)^{D−1} dh.
double p_corr_numeric(double s, double D, Grid grid = {});

/// ∫_{lower}^{∞} φ(u) Φ(scale·u + shift)^{D−1} du: hit ~ N(μ_h, σ_h²),
/// distractors ~ N(μ_d, σ_d²), shift = (μ_h − μ_d)/σ_d, scale = σ_h/σ_d.
double p_corr_gaussian(double shift, double scale, double D,
                       double lower = -std::numeric_limits<double>::infinity(),
                       Grid grid = {});

struct DetectionAccuracy {
  double accuracy = 0.0;
  double hit = 0.0;        // correct symbol and above threshold
  double rejection = 0.0;  // every channel below threshold on an empty step
};

/// θ is in signal units (hit mean 1, distractor mean 0).
DetectionAccuracy p_corr_detection(double s, double D, double theta, double p_s,
                                   Grid grid = {});

enum class Approximation { fa, fa_cr, fa_cr_lee, chang };
enum class SensitivityLaw { cr_lee, chang, plate };

inline constexpr double kChangBeta = 1.08;
double chang_alpha(double beta = kChangBeta);

double p_corr_approx(double s, double D, Approximation method);
/// Squared sensitivity needed for error rate ε.
double sensitivity_law(double D, double eps, SensitivityLaw law);
/// Same as sensitivity_law(Chang) with ln D supplied directly, for D beyond double range.
double chang_law_log(double log_d_minus_1, double eps);

/// KL divergence of the retrieval outcome from chance, in bits.
double info_item_symbolic(double p_corr, double D);

/// p_corr_numeric tabulated over s for one D, with cubic interpolation.
class AccuracyCurve {
 public:
  explicit AccuracyCurve(double D, double ds = 0.005, Grid grid = {});
  double operator()(double s) const;
  double alphabet() const { return d_; }

 private:
  double d_, ds_, s_max_;
  std::vector<double> table_;
};

}  // namespace vsamem::theory
