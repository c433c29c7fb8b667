#pragma once

#include <span>

#include <Eigen/Dense>

#include "vsamem/codebook.hpp"
#include "vsamem/recurrent.hpp"

namespace vsamem {

enum class BindMode { hadamard, elementwise_complex, circular_convolution };

/// Binds two hypervectors. elementwise_complex treats both as [real; imag]
/// phasor layouts; circular_convolution is the real cyclic convolution.
Eigen::VectorXd bind(const Eigen::VectorXd& u, const Eigen::VectorXd& v, BindMode mode);

/// (u ⊛ v)_i = Σ_j u_j v_{(i-j) mod N}, computed by FFT.
Eigen::VectorXd circular_convolution(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Real dot product; for FHRR this equals Re⟨u, v⟩ of the complex pairs.
double similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                  CodeFamily family = CodeFamily::hdc);

/// ρ^{L-1}(Φ_{t1}) ⊙ ρ^{L-2}(Φ_{t2}) ⊙ … ⊙ Φ_{tL}.
Eigen::VectorXd encode_ngram(std::span<const int> tokens, const Codebook& codebook,
                             const RecurrentOperator& rho);

}  // namespace vsamem
