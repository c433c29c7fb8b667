#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "vsamem/codebook.hpp"
#include "vsamem/recurrent.hpp"
#include "vsamem/rng.hpp"

namespace vsamem {

enum class Nonlinearity { linear, clipped, tanh };

const char* to_string(Nonlinearity kind);
Nonlinearity parse_nonlinearity(const std::string& name);

/// Neuron transfer function f. κ and γ are in component units; a threshold
/// of κ* codebook standard deviations corresponds to κ = κ*·sqrt(V_Φ).
struct Activation {
  Nonlinearity kind = Nonlinearity::linear;
  double kappa = 0.0;
  double gamma = 0.0;

  static Activation linear() { return {}; }
  static Activation clipped(double kappa) { return {Nonlinearity::clipped, kappa, 0.0}; }
  static Activation tanh(double gamma) { return {Nonlinearity::tanh, 0.0, gamma}; }

  double operator()(double x) const;
  void apply(Eigen::Ref<Eigen::MatrixXd> x) const;
  void validate() const;
};

struct NetworkConfig {
  std::shared_ptr<const Codebook> codebook;
  std::shared_ptr<const RecurrentOperator> recurrence;  // orthogonal part W
  double lambda = 1.0;
  Activation activation;
  double noise_var = 0.0;  // σ_η² per component per step
  double p_symbol = 1.0;   // p_s for sparse symbol streams
  long step_budget = 1'000'000;  // λ=1 linear streams warn beyond this

  int neurons() const { return codebook ? codebook->neurons() : 0; }
  int alphabet() const { return codebook ? codebook->alphabet() : 0; }
  void validate() const;
};

struct Symbol {
  int index = 0;
};
struct Empty {};
struct Analog {
  Eigen::VectorXd values;
};
using InputEvent = std::variant<Symbol, Empty, Analog>;

struct MemoryState {
  Eigen::VectorXd x;
  long steps = 0;
  bool overflow_warned = false;
  bool coverage_warned = false;
};

MemoryState fresh_state(const NetworkConfig& cfg);
void reset(MemoryState& state);

/// x ← f(λWx + Φa + η).
void encode_step(MemoryState& state, const InputEvent& event, const NetworkConfig& cfg,
                 Rng& rng);
MemoryState encode_sequence(std::span<const InputEvent> events, const NetworkConfig& cfg,
                            Rng& rng);

enum class StreamStatus { ok, overflow };

/// Buffer-mode update: the same step as encode_step with divergence checks.
StreamStatus stream(MemoryState& state, const InputEvent& event, const NetworkConfig& cfg,
                    Rng& rng);

/// Batched update of independent states stored as columns. symbols[b] < 0
/// means an Empty event for column b. Noise is drawn column-major.
void advance_symbols(Eigen::Ref<Eigen::MatrixXd> states, std::span<const int> symbols,
                     const NetworkConfig& cfg, Rng& rng);
/// Batched analog update; inputs is D×B.
void advance_analog(Eigen::Ref<Eigen::MatrixXd> states, const Eigen::MatrixXd& inputs,
                    const NetworkConfig& cfg, Rng& rng);

/// Line format: `S <index>` | `E` | `A <v1> ... <vD>`; '#' starts a comment.
std::vector<InputEvent> read_events(std::istream& in, int alphabet);
void write_events(std::ostream& out, std::span<const InputEvent> events);

}  // namespace vsamem
