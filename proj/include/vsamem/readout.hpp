#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "vsamem/codebook.hpp"
#include "vsamem/recurrent.hpp"

namespace vsamem {

/// h_d(K) = c⁻¹ Φ_dᵀ W^{−K} x with c = N·E_Φ(x²). K = 0 reads the newest item.
Eigen::VectorXd vsa_linear_readout(const Eigen::VectorXd& x, const Codebook& codebook,
                                   const RecurrentOperator& w, long K);

/// Argmax; ties go to the lowest index.
int classify_wta(std::span<const double> h);
int classify_wta(const Eigen::VectorXd& h);

struct DetectionParams {
  double theta = 0.5;  // signal units: hit mean 1
  double p_symbol = 1.0;
  void validate() const;
};

struct Detection {
  bool rejected = false;
  int symbol = -1;
};

Detection detect(const Eigen::VectorXd& h, const DetectionParams& params);

enum class ReadoutKind { vsa_naive, mmse_empirical, mmse_direct };
const char* to_string(ReadoutKind kind);
ReadoutKind parse_readout_kind(const std::string& name);

/// Decoding transform for one lookback: â = Vᵀx (times λ^{−K} for vsa-naive
/// analog readout).
struct ReadoutMatrix {
  ReadoutKind kind = ReadoutKind::vsa_naive;
  long lookback = 0;
  double lambda = 1.0;
  double normalization = 1.0;  // c
  double ridge = 0.0;
  long training = 0;           // R for mmse-empirical
  double residual = 0.0;       // ‖(C+εI)V − A‖/‖A‖ for MMSE kinds
  Eigen::MatrixXd v;           // N×D

  void write_csv(std::ostream& out) const;
};

/// V(K) = c⁻¹ W^K Φ.
ReadoutMatrix naive_readout_matrix(const Codebook& codebook, const RecurrentOperator& w,
                                   double lambda, long K);

/// λ-compensated linear estimate of the analog input at lookback K.
Eigen::VectorXd analog_readout(const Eigen::VectorXd& x, const ReadoutMatrix& readout,
                               double floor = 1e-12);

}  // namespace vsamem
