#include "vsamem/network.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "vsamem/error.hpp"

namespace vsamem {

const char* to_string(Nonlinearity kind) {
  switch (kind) {
    case Nonlinearity::linear: return "linear";
    case Nonlinearity::clipped: return "clipped";
    case Nonlinearity::tanh: return "tanh";
  }
  return "?";
}

Nonlinearity parse_nonlinearity(const std::string& name) {
  if (name == "linear") return Nonlinearity::linear;
  if (name == "clipped") return Nonlinearity::clipped;
  if (name == "tanh") return Nonlinearity::tanh;
  fail(ErrorKind::InvalidSpec, "unknown nonlinearity '" + name + "'");
}

double Activation::operator()(double x) const {
  switch (kind) {
    case Nonlinearity::linear: return x;
    case Nonlinearity::clipped: return x > kappa ? kappa : (x < -kappa ? -kappa : x);
    case Nonlinearity::tanh: return gamma * std::tanh(x / gamma);
  }
  return x;
}

void Activation::apply(Eigen::Ref<Eigen::MatrixXd> x) const {
  switch (kind) {
    case Nonlinearity::linear: return;
    case Nonlinearity::clipped: x = x.cwiseMax(-kappa).cwiseMin(kappa); return;
    case Nonlinearity::tanh: {
      // γ·tanh(x/γ) = γ·(1 − 2/(e^{2x/γ} + 1)), vectorized.
      const double g = gamma;
      x = g * (1.0 - 2.0 / ((x.array() * (2.0 / g)).exp() + 1.0));
      return;
    }
  }
}

void Activation::validate() const {
  if (kind == Nonlinearity::clipped)
    require(kappa > 0.0, ErrorKind::InvalidSpec, "clipped activation needs kappa > 0");
  if (kind == Nonlinearity::tanh)
    require(gamma > 0.0, ErrorKind::InvalidSpec, "tanh activation needs gamma > 0");
}

void NetworkConfig::validate() const {
  require(codebook != nullptr, ErrorKind::InvalidSpec, "network has no codebook");
  require(recurrence != nullptr, ErrorKind::InvalidSpec, "network has no recurrence");
  require(recurrence->neurons() == codebook->neurons(), ErrorKind::DimensionMismatch,
          "recurrence and codebook differ in N");
  require(lambda > 0.0 && lambda <= 1.0, ErrorKind::InvalidSpec,
          "lambda must lie in (0, 1]");
  require(noise_var >= 0.0, ErrorKind::InvalidSpec, "noise variance must be >= 0");
  require(p_symbol > 0.0 && p_symbol <= 1.0, ErrorKind::InvalidSpec,
          "p_symbol must lie in (0, 1]");
  activation.validate();
}

namespace {

void recur(Eigen::Ref<Eigen::MatrixXd> states, const NetworkConfig& cfg) {
  cfg.recurrence->rotate(states, 1);
  if (cfg.lambda != 1.0) states *= cfg.lambda;
}

void finish(Eigen::Ref<Eigen::MatrixXd> states, const NetworkConfig& cfg, Rng& rng) {
  if (cfg.noise_var > 0.0) {
    std::normal_distribution<double> g(0.0, std::sqrt(cfg.noise_var));
    for (Eigen::Index c = 0; c < states.cols(); ++c)
      for (Eigen::Index i = 0; i < states.rows(); ++i) states(i, c) += g(rng);
  }
  cfg.activation.apply(states);
}

}  // namespace

void advance_symbols(Eigen::Ref<Eigen::MatrixXd> states, std::span<const int> symbols,
                     const NetworkConfig& cfg, Rng& rng) {
  require(static_cast<Eigen::Index>(symbols.size()) == states.cols(),
          ErrorKind::DimensionMismatch, "one symbol per state column expected");
  recur(states, cfg);
  const auto& phi = cfg.codebook->data();
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    const int s = symbols[c];
    if (s < 0) continue;
    require(s < cfg.alphabet(), ErrorKind::DimensionMismatch, "symbol index out of range");
    states.col(c) += phi.col(s);
  }
  finish(states, cfg, rng);
}

void advance_analog(Eigen::Ref<Eigen::MatrixXd> states, const Eigen::MatrixXd& inputs,
                    const NetworkConfig& cfg, Rng& rng) {
  require(inputs.rows() == cfg.alphabet() && inputs.cols() == states.cols(),
          ErrorKind::DimensionMismatch, "analog input block must be D x B");
  recur(states, cfg);
  states.noalias() += cfg.codebook->data() * inputs;
  finish(states, cfg, rng);
}

MemoryState fresh_state(const NetworkConfig& cfg) {
  cfg.validate();
  MemoryState s;
  s.x = Eigen::VectorXd::Zero(cfg.neurons());
  return s;
}

void reset(MemoryState& state) {
  state.x.setZero();
  state.steps = 0;
  state.overflow_warned = false;
  state.coverage_warned = false;
}

void encode_step(MemoryState& state, const InputEvent& event, const NetworkConfig& cfg,
                 Rng& rng) {
  require(state.x.size() == cfg.neurons(), ErrorKind::DimensionMismatch,
          "state and network differ in N");
  if (const auto* a = std::get_if<Analog>(&event)) {
    require(a->values.size() == cfg.alphabet(), ErrorKind::DimensionMismatch,
            "analog event has the wrong length");
    advance_analog(state.x, a->values, cfg, rng);
  } else {
    const int s = std::holds_alternative<Symbol>(event) ? std::get<Symbol>(event).index : -1;
    require(s < cfg.alphabet() && (s >= 0 || std::holds_alternative<Empty>(event)),
            ErrorKind::DimensionMismatch, "symbol index out of range");
    advance_symbols(state.x, std::span<const int>(&s, 1), cfg, rng);
  }
  ++state.steps;
}

MemoryState encode_sequence(std::span<const InputEvent> events, const NetworkConfig& cfg,
                            Rng& rng) {
  MemoryState s = fresh_state(cfg);
  for (const auto& e : events) encode_step(s, e, cfg, rng);
  return s;
}

StreamStatus stream(MemoryState& state, const InputEvent& event, const NetworkConfig& cfg,
                    Rng& rng) {
  if (!state.coverage_warned && std::holds_alternative<Analog>(event) &&
      cfg.activation.kind != Nonlinearity::linear) {
    warn("analog input with a nonlinear network is outside theory coverage");
    state.coverage_warned = true;
  }
  encode_step(state, event, cfg, rng);
  const bool unbounded = cfg.lambda == 1.0 && cfg.activation.kind == Nonlinearity::linear;
  if (unbounded && state.steps > cfg.step_budget) {
    if (!state.overflow_warned) {
      warn("linear lambda=1 stream exceeded its step budget of " +
           std::to_string(cfg.step_budget) + " steps; state norm grows without bound");
      state.overflow_warned = true;
    }
    return StreamStatus::overflow;
  }
  return StreamStatus::ok;
}

std::vector<InputEvent> read_events(std::istream& in, int alphabet) {
  std::vector<InputEvent> events;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    const std::string where = "event line " + std::to_string(lineno);
    if (tag == "E") {
      events.emplace_back(Empty{});
    } else if (tag == "S") {
      int idx = -1;
      require(static_cast<bool>(ls >> idx) && idx >= 0 && idx < alphabet,
              ErrorKind::DimensionMismatch, where + ": symbol index out of range");
      events.emplace_back(Symbol{idx});
    } else if (tag == "A") {
      std::vector<double> v;
      double x;
      while (ls >> x) v.push_back(x);
      require(static_cast<int>(v.size()) == alphabet, ErrorKind::DimensionMismatch,
              where + ": analog event needs " + std::to_string(alphabet) + " values");
      events.emplace_back(Analog{Eigen::Map<Eigen::VectorXd>(v.data(), alphabet)});
    } else {
      fail(ErrorKind::InvalidSpec, where + ": unknown event tag '" + tag + "'");
    }
  }
  return events;
}

void write_events(std::ostream& out, std::span<const InputEvent> events) {
  char buf[64];
  for (const auto& e : events) {
    if (std::holds_alternative<Empty>(e)) {
      out << "E\n";
    } else if (const auto* s = std::get_if<Symbol>(&e)) {
      out << "S " << s->index << '\n';
    } else {
      out << 'A';
      for (double v : std::get<Analog>(e).values) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        out << buf;
      }
      out << '\n';
    }
  }
}

}  // namespace vsamem
