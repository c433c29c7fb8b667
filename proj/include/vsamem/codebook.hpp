#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace vsamem {

enum class CodeFamily { hdc, hrr, fhrr, mbat };

const char* to_string(CodeFamily family);
CodeFamily parse_code_family(const std::string& name);

struct CodebookSpec {
  CodeFamily family = CodeFamily::hdc;
  int neurons = 0;   // N
  int alphabet = 0;  // D
  double sparseness = 0.0;  // sf: probability an entry (FHRR: a phasor pair) is zeroed
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-component moments of the code distribution p_Φ(x).
struct CodeMoments {
  double mean = 0.0;
  double mean_sq = 0.0;  // E(x²)
  double var = 0.0;      // V(x)
  double var_sq = 0.0;   // V(x²)
  // Variance of the self term Φ_dᵀΦ_d relative to one crosstalk term. Equals
  // V(x²)/V(x)² for real families; FHRR counts per phasor pair.
  double self_ratio = 0.0;
};

CodeMoments analytic_moments(CodeFamily family, int neurons, double sparseness);

class Codebook {
 public:
  static Codebook generate(const CodebookSpec& spec);
  /// Wraps an arbitrary N×D matrix; moments are taken as given.
  static Codebook from_matrix(Eigen::MatrixXd data, CodeFamily family,
                              const CodeMoments& moments);

  const Eigen::MatrixXd& data() const { return data_; }
  int neurons() const { return static_cast<int>(data_.rows()); }
  int alphabet() const { return static_cast<int>(data_.cols()); }
  CodeFamily family() const { return spec_.family; }
  const CodebookSpec& spec() const { return spec_; }
  const CodeMoments& moments() const { return moments_; }
  /// c = N·E(x²), the readout normalization giving unit signal mean.
  double normalization() const { return neurons() * moments_.mean_sq; }
  auto column(int d) const { return data_.col(d); }

  void write_csv(std::ostream& out) const;
  static Codebook read_csv(std::istream& in);

 private:
  CodebookSpec spec_;
  CodeMoments moments_;
  Eigen::MatrixXd data_;
};

}  // namespace vsamem
