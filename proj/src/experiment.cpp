#include "vsamem/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "vsamem/error.hpp"
#include "vsamem/mmse.hpp"
#include "vsamem/ngram.hpp"
#include "vsamem/theory/accuracy.hpp"
#include "vsamem/theory/diffusion.hpp"
#include "vsamem/theory/information.hpp"
#include "vsamem/theory/sensitivity.hpp"

#ifndef VSAMEM_VERSION
#define VSAMEM_VERSION "unknown"
#endif

namespace vsamem {

using nlohmann::json;

const char* build_version() { return VSAMEM_VERSION; }

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::theory: return "theory";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::optimize: return "optimize";
    case ExperimentKind::mmse: return "mmse";
    case ExperimentKind::ngram: return "ngram";
    case ExperimentKind::compare: return "compare";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::simulate, ExperimentKind::theory, ExperimentKind::sweep,
                 ExperimentKind::optimize, ExperimentKind::mmse, ExperimentKind::ngram,
                 ExperimentKind::compare})
    if (name == to_string(k)) return k;
  fail(ErrorKind::ConfigError, "unknown experiment '" + name + "'");
}

// ---------------------------------------------------------------- parsing

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
  fail(ErrorKind::ConfigError, "config key '" + key + "': " + what);
}

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) bad_key(key, what);
}

/// One JSON object; remembers which keys were read so leftovers can be reported.
class Section {
 public:
  Section(const json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ && !j_->is_object()) bad_key(path_, "expected an object");
  }

  std::string key(const std::string& name) const {
    return path_.empty() ? name : path_ + "." + name;
  }

  const json* find(const std::string& name) {
    seen_.push_back(name);
    if (!j_) return nullptr;
    const auto it = j_->find(name);
    return it == j_->end() ? nullptr : &*it;
  }

  Section child(const std::string& name) { return Section(find(name), key(name)); }

  void get(const std::string& name, double& out) {
    if (const json* v = find(name)) {
      check(v->is_number(), key(name), "expected a number");
      out = v->get<double>();
      check(std::isfinite(out), key(name), "must be finite");
    }
  }

  template <class Int>
    requires std::is_integral_v<Int>
  void get(const std::string& name, Int& out) {
    if (const json* v = find(name)) {
      if (v->is_number_unsigned()) {
        const auto u = v->get<std::uint64_t>();
        check(u <= static_cast<std::uint64_t>(std::numeric_limits<Int>::max()), key(name),
              "out of range");
        out = static_cast<Int>(u);
      } else if (v->is_number_integer()) {
        const auto i = v->get<std::int64_t>();
        check(std::is_signed_v<Int> && i >= static_cast<std::int64_t>(std::numeric_limits<Int>::min()) &&
                  i <= static_cast<std::int64_t>(std::numeric_limits<Int>::max()),
              key(name), "out of range");
        out = static_cast<Int>(i);
      } else if (v->is_number_float()) {
        const double d = v->get<double>();
        check(d == std::floor(d) && std::abs(d) < 9e15, key(name), "expected an integer");
        check(std::is_signed_v<Int> || d >= 0, key(name), "out of range");
        out = static_cast<Int>(d);
      } else {
        bad_key(key(name), "expected an integer");
      }
    }
  }

  void get(const std::string& name, std::string& out) {
    if (const json* v = find(name)) {
      check(v->is_string(), key(name), "expected a string");
      out = v->get<std::string>();
    }
  }

  template <class T>
  void get(const std::string& name, std::vector<T>& out) {
    if (const json* v = find(name)) {
      check(v->is_array(), key(name), "expected an array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& item = (*v)[i];
        const std::string where = key(name) + "[" + std::to_string(i) + "]";
        check(item.is_number(), where, "expected a number");
        const double d = item.get<double>();
        if constexpr (std::is_integral_v<T>)
          check(d == std::floor(d) && std::abs(d) < 9e15, where, "expected an integer");
        out.push_back(static_cast<T>(d));
      }
    }
  }

  template <class E, class Parse>
  void get_enum(const std::string& name, E& out, Parse parse) {
    std::string s;
    get(name, s);
    if (!s.empty() || find_present(name)) {
      try {
        out = parse(s);
      } catch (const Error& e) {
        bad_key(key(name), e.what());
      }
    }
  }

  /// Rejects keys that were never read.
  void finish() const {
    if (!j_) return;
    for (const auto& [k, v] : j_->items())
      if (std::find(seen_.begin(), seen_.end(), k) == seen_.end())
        bad_key(key(k), "unknown key");
  }

 private:
  bool find_present(const std::string& name) const {
    return j_ && j_->contains(name);
  }

  const json* j_;
  std::string path_;
  std::vector<std::string> seen_;
};

void parse_length(Section& s, const std::string& name, double& out) {
  if (const json* v = s.find(name)) {
    if (v->is_string()) {
      check(v->get<std::string>() == "inf", s.key(name), "expected a number or \"inf\"");
      out = theory::kInfinite;
    } else {
      check(v->is_number(), s.key(name), "expected a number or \"inf\"");
      out = v->get<double>();
    }
  }
}

void validate(const ExperimentConfig& c) {
  const auto& n = c.network;
  check(n.neurons >= 1, "network.neurons", "must be >= 1");
  check(n.alphabet >= 1, "network.alphabet", "must be >= 1");
  check(n.sparseness >= 0 && n.sparseness < 1, "network.sparseness", "must lie in [0, 1)");
  check(n.lambda > 0 && n.lambda <= 1, "network.lambda", "must lie in (0, 1]");
  check(n.noise_var >= 0, "network.noise_var", "must be >= 0");
  check(n.step_budget >= 1, "network.step_budget", "must be >= 1");
  if (n.activation.kind == Nonlinearity::clipped)
    check(n.activation.kappa >= 1 && n.activation.kappa == std::floor(n.activation.kappa),
          "network.kappa", "must be an integer >= 1 for clipped neurons");
  if (n.activation.kind == Nonlinearity::tanh)
    check(n.activation.gamma > 0, "network.gamma", "must be > 0 for tanh neurons");
  if (n.family == CodeFamily::fhrr || n.recurrence == RecurrenceKind::phasor ||
      n.recurrence == RecurrenceKind::circulant_paired)
    check(n.neurons % 2 == 0, "network.neurons", "must be even for phasor layouts");

  const auto& t = c.task;
  check(t.buffer() || (t.length >= 1 && t.length == std::floor(t.length)), "task.length",
        "must be an integer >= 1 or \"inf\"");
  check(t.p_symbol > 0 && t.p_symbol <= 1, "task.p_symbol", "must lie in (0, 1]");
  check(t.input_var > 0, "task.input_var", "must be > 0");

  const auto& r = c.readout;
  for (long k : r.lookbacks) {
    check(k >= 0, "readout.lookbacks", "must be >= 0");
    check(t.buffer() || k < t.length, "readout.lookbacks", "must be below task.length");
  }
  check(r.retrieval_noise_var >= 0, "readout.retrieval_noise_var", "must be >= 0");
  check(r.flip_prob >= 0 && r.flip_prob < 0.5, "readout.flip_prob", "must lie in [0, 0.5)");
  check(r.training >= 1, "readout.training", "must be >= 1");
  check(r.kind == ReadoutKind::vsa_naive || n.neurons <= 4096, "readout.kind",
        "MMSE readout needs network.neurons <= 4096");

  check(c.buffer.stride >= 1, "buffer.stride", "must be >= 1");
  check(c.buffer.snapshots >= 1, "buffer.snapshots", "must be >= 1");
  check(c.trials >= 0, "trials", "must be >= 0");
  check(c.batch >= 1, "batch", "must be >= 1");
  check(c.batches_per_network >= 1, "batches_per_network", "must be >= 1");
  check(!c.output.empty(), "output", "must not be empty");

  if (!c.sweep.parameter.empty()) {
    check(!c.sweep.values.empty(), "sweep.values", "must not be empty");
    // Validate every point by applying it.
    for (double v : c.sweep.values) {
      const ExperimentConfig point = with_value(c, c.sweep.parameter, v);
      ExperimentConfig copy = point;
      copy.sweep = {};
      validate(copy);
    }
  }
  const auto& o = c.optimize;
  check(o.lower < o.upper, "optimize.upper", "must exceed optimize.lower");
  check(o.tolerance > 0, "optimize.tolerance", "must be > 0");
  check(o.r_star > 0, "optimize.r_star", "must be > 0");

  check(c.ngram.n >= 1 && c.ngram.n <= 4, "ngram.n", "must lie in 1..4");
  check(c.ngram.chars >= 1, "ngram.chars", "must be >= 1");
  if (!c.ngram.text.empty())
    check(std::filesystem::exists(c.ngram.text), "ngram.text",
          "file does not exist: " + c.ngram.text);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Section root(&doc, "");
  root.get_enum("experiment", c.kind, parse_experiment_kind);

  Section net = root.child("network");
  net.get_enum("family", c.network.family, parse_code_family);
  net.get("neurons", c.network.neurons);
  net.get("alphabet", c.network.alphabet);
  net.get("sparseness", c.network.sparseness);
  net.get_enum("recurrence", c.network.recurrence, parse_recurrence_kind);
  net.get("lambda", c.network.lambda);
  net.get_enum("activation", c.network.activation.kind, parse_nonlinearity);
  net.get("kappa", c.network.activation.kappa);
  net.get("gamma", c.network.activation.gamma);
  net.get("noise_var", c.network.noise_var);
  net.get("step_budget", c.network.step_budget);
  net.finish();

  Section task = root.child("task");
  task.get_enum("kind", c.task.kind, [](const std::string& s) {
    if (s == "symbolic") return TaskSpec::Kind::symbolic;
    if (s == "analog") return TaskSpec::Kind::analog;
    fail(ErrorKind::ConfigError, "expected \"symbolic\" or \"analog\"");
  });
  parse_length(task, "length", c.task.length);
  task.get("p_symbol", c.task.p_symbol);
  task.get("input_var", c.task.input_var);
  task.finish();

  Section ro = root.child("readout");
  ro.get_enum("kind", c.readout.kind, parse_readout_kind);
  ro.get("lookbacks", c.readout.lookbacks);
  ro.get("thresholds", c.readout.thresholds);
  ro.get("retrieval_noise_var", c.readout.retrieval_noise_var);
  ro.get("flip_prob", c.readout.flip_prob);
  ro.get("ridge", c.readout.ridge);
  ro.get("training", c.readout.training);
  ro.finish();

  Section buf = root.child("buffer");
  buf.get("burn_in", c.buffer.burn_in);
  buf.get("stride", c.buffer.stride);
  buf.get("snapshots", c.buffer.snapshots);
  buf.finish();

  Section sw = root.child("sweep");
  sw.get("parameter", c.sweep.parameter);
  sw.get("values", c.sweep.values);
  sw.finish();

  Section opt = root.child("optimize");
  opt.get_enum("objective", c.optimize.objective, parse_objective);
  opt.get_enum("parameter", c.optimize.parameter, parse_free_parameter);
  opt.get("lower", c.optimize.lower);
  opt.get("upper", c.optimize.upper);
  opt.get("tolerance", c.optimize.tolerance);
  opt.get("r_star", c.optimize.r_star);
  opt.finish();

  Section ng = root.child("ngram");
  ng.get("text", c.ngram.text);
  ng.get("chars", c.ngram.chars);
  ng.get("n", c.ngram.n);
  ng.finish();

  root.get("trials", c.trials);
  root.get("batch", c.batch);
  root.get("batches_per_network", c.batches_per_network);
  root.get("seed", c.seed);
  root.get("output", c.output);
  root.finish();

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::ConfigError,
          "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.kind);
  j["network"] = {
      {"family", to_string(c.network.family)},
      {"neurons", c.network.neurons},
      {"alphabet", c.network.alphabet},
      {"sparseness", c.network.sparseness},
      {"recurrence", to_string(c.network.recurrence)},
      {"lambda", c.network.lambda},
      {"activation", to_string(c.network.activation.kind)},
      {"kappa", c.network.activation.kappa},
      {"gamma", c.network.activation.gamma},
      {"noise_var", c.network.noise_var},
      {"step_budget", c.network.step_budget},
  };
  j["task"] = {
      {"kind", c.task.kind == TaskSpec::Kind::symbolic ? "symbolic" : "analog"},
      {"p_symbol", c.task.p_symbol},
      {"input_var", c.task.input_var},
  };
  if (c.task.buffer()) j["task"]["length"] = "inf";
  else j["task"]["length"] = c.task.length;
  j["readout"] = {
      {"kind", to_string(c.readout.kind)},
      {"lookbacks", c.readout.lookbacks},
      {"thresholds", c.readout.thresholds},
      {"retrieval_noise_var", c.readout.retrieval_noise_var},
      {"flip_prob", c.readout.flip_prob},
      {"ridge", c.readout.ridge},
      {"training", c.readout.training},
  };
  j["buffer"] = {{"burn_in", c.buffer.burn_in},
                 {"stride", c.buffer.stride},
                 {"snapshots", c.buffer.snapshots}};
  j["sweep"] = {{"parameter", c.sweep.parameter}, {"values", c.sweep.values}};
  j["optimize"] = {
      {"objective", to_string(c.optimize.objective)},
      {"parameter", to_string(c.optimize.parameter)},
      {"lower", c.optimize.lower},
      {"upper", c.optimize.upper},
      {"tolerance", c.optimize.tolerance},
      {"r_star", c.optimize.r_star},
  };
  j["ngram"] = {{"text", c.ngram.text}, {"chars", c.ngram.chars}, {"n", c.ngram.n}};
  j["trials"] = c.trials;
  j["batch"] = c.batch;
  j["batches_per_network"] = c.batches_per_network;
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& config) {
  return to_json(config).dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("output");  // where results go does not change them
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig with_value(const ExperimentConfig& config, const std::string& parameter,
                            double value) {
  ExperimentConfig c = config;
  auto integer = [&](const char* key) {
    check(value == std::floor(value) && std::abs(value) < 2e9, std::string("sweep.values"),
          std::string("values for ") + key + " must be integers");
    return static_cast<int>(value);
  };
  if (parameter == "neurons") c.network.neurons = integer("neurons");
  else if (parameter == "alphabet") c.network.alphabet = integer("alphabet");
  else if (parameter == "sparseness") c.network.sparseness = value;
  else if (parameter == "lambda") c.network.lambda = value;
  else if (parameter == "kappa") c.network.activation.kappa = value;
  else if (parameter == "gamma") c.network.activation.gamma = value;
  else if (parameter == "noise_var") c.network.noise_var = value;
  else if (parameter == "length") c.task.length = value;
  else if (parameter == "p_symbol") c.task.p_symbol = value;
  else if (parameter == "input_var") c.task.input_var = value;
  else if (parameter == "retrieval_noise_var") c.readout.retrieval_noise_var = value;
  else if (parameter == "flip_prob") c.readout.flip_prob = value;
  else bad_key("sweep.parameter", "cannot sweep '" + parameter + "'");
  return c;
}

theory::TheoryQuery theory_query(const ExperimentConfig& c) {
  theory::TheoryQuery q;
  q.neurons = c.network.neurons;
  q.alphabet = c.network.alphabet;
  q.length = c.task.length;
  q.lambda = c.network.lambda;
  q.activation = c.network.activation;
  q.noise_var = c.network.noise_var;
  q.retrieval_noise_var = c.readout.retrieval_noise_var;
  q.p_symbol = c.task.kind == TaskSpec::Kind::symbolic ? c.task.p_symbol : 1.0;
  q.flip_prob = c.readout.flip_prob;
  q.moments = analytic_moments(c.network.family, c.network.neurons, c.network.sparseness);
  return q;
}

namespace {

// Up to `count` evenly spaced lookbacks in [0, last].
std::vector<long> spaced(long last, long count) {
  std::vector<long> out;
  if (last + 1 <= count) {
    for (long k = 0; k <= last; ++k) out.push_back(k);
    return out;
  }
  for (long i = 0; i < count; ++i) {
    const long k = static_cast<long>(std::llround(static_cast<double>(i) * last / (count - 1)));
    if (out.empty() || out.back() != k) out.push_back(k);
  }
  return out;
}

std::vector<long> lookbacks_for(const ExperimentConfig& c, long reset_count) {
  if (!c.readout.lookbacks.empty()) return c.readout.lookbacks;
  if (!c.task.buffer()) return spaced(static_cast<long>(c.task.length) - 1, reset_count);
  const double tau = theory::time_constant(c.network.activation, c.network.lambda);
  require(std::isfinite(tau), ErrorKind::ConfigError,
          "config key 'readout.lookbacks': required for a buffer without forgetting");
  return spaced(static_cast<long>(std::ceil(3.0 * tau)), 16);
}

NetworkConfig fixed_network(const ExperimentConfig& c) {
  NetworkRecipe r = c.network;
  r.p_symbol = c.task.p_symbol;
  return r.instantiate(derive_seed(c.seed, 0x6669786564));
}

MmseOptions mmse_options(const ExperimentConfig& c) {
  MmseOptions o;
  o.training = c.readout.training;
  o.ridge = c.readout.ridge;
  o.burn_in = c.buffer.burn_in;
  o.stride = c.buffer.stride;
  o.snapshots = c.buffer.snapshots;
  o.seed = derive_seed(c.seed, 0x747261696e);
  return o;
}

std::map<long, ReadoutMatrix> fit_readouts(const ExperimentConfig& c, const NetworkConfig& net,
                                           const std::vector<long>& ks) {
  if (c.readout.kind == ReadoutKind::mmse_empirical)
    return mmse_fit_empirical(net, c.task, ks, mmse_options(c));
  return mmse_direct(net, c.task, ks, c.readout.ridge);
}

}  // namespace

SimulationPlan simulation_plan(const ExperimentConfig& c, int threads) {
  SimulationPlan plan;
  plan.net = c.network;
  plan.net.p_symbol = c.task.p_symbol;
  plan.task = c.task;
  const std::vector<long> ks = lookbacks_for(c, c.task.length <= 64 ? 64 : 8);
  if (c.task.buffer()) plan.lookbacks = ks;
  else plan.reads = SimulationPlan::all_lookbacks(static_cast<long>(c.task.length), ks);
  plan.burn_in = c.buffer.burn_in;
  plan.stride = c.buffer.stride;
  plan.snapshots = c.buffer.snapshots;
  plan.sequences = c.trials;
  plan.batch = c.batch;
  plan.batches_per_network = c.batches_per_network;
  plan.retrieval_noise_var = c.readout.retrieval_noise_var;
  plan.flip_prob = c.readout.flip_prob;
  plan.thresholds = c.readout.thresholds;
  plan.seed = c.seed;
  plan.threads = threads;
  if (c.readout.kind != ReadoutKind::vsa_naive) {
    plan.network = fixed_network(c);
    plan.readouts = std::make_shared<const std::map<long, ReadoutMatrix>>(
        fit_readouts(c, *plan.network, ks));
  }
  return plan;
}

// ---------------------------------------------------------------- tables

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void ResultTable::add_row(std::vector<std::string> row) {
  require(row.size() == columns.size(), ErrorKind::DimensionMismatch,
          "row width differs from the header");
  rows.push_back(std::move(row));
}

void ResultTable::write_csv(std::ostream& out, const ExperimentConfig& config) const {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(config)));
  out << "# vsamem " << build_version() << "\n";
  out << "# experiment=" << to_string(config.kind) << "\n";
  out << "# seed=" << config.seed << "\n";
  out << "# config_hash=" << hash << "\n";
  for (const auto& [k, v] : meta) out << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

namespace {

using F = std::string (*)(double);
const F num = format_number;
std::string num_l(long v) { return std::to_string(v); }

// --------------------------------------------------------------- experiments

double theory_analog_snr(const theory::TheoryQuery& q, long k) {
  require(q.activation.kind == Nonlinearity::linear, ErrorKind::UnsupportedQuery,
          "analog theory needs linear neurons");
  if (!q.buffer() && q.lambda == 1.0) return theory::snr_reset(q);
  return theory::snr_analog(q, static_cast<double>(k));
}

/// Accuracy of a symbolic readout at lookback k from the theory module.
std::vector<double> theory_accuracy(const theory::TheoryQuery& q, const std::vector<long>& ks) {
  std::vector<double> out;
  if (q.activation.kind == Nonlinearity::linear) {
    for (long k : ks) out.push_back(theory::p_corr_general(q, static_cast<double>(k)));
    return out;
  }
  const long kmax = *std::max_element(ks.begin(), ks.end());
  const auto prof = theory::symbolic_profile(q, nullptr, kmax);
  for (long k : ks)
    out.push_back(k < static_cast<long>(prof.p_corr.size()) ? prof.p_corr[k]
                                                           : 1.0 / q.alphabet);
  return out;
}

ExperimentOutput run_simulate(const ExperimentConfig& c, int threads) {
  ExperimentOutput out;
  ResultTable t;
  t.name = "simulate";
  t.meta.push_back({"readout", to_string(c.readout.kind)});
  const SimulationPlan plan = simulation_plan(c, threads);
  if (c.task.kind == TaskSpec::Kind::symbolic) {
    t.columns = {"step", "lookback", "theta", "trials", "accuracy", "stderr", "hit_rate",
                 "rejection_rate"};
    if (c.trials > 0) {
      for (const auto& r : simulate_symbolic(plan)) {
        if (c.readout.thresholds.empty()) {
          t.add_row({num_l(r.step), num_l(r.lookback), "", num_l(r.trials), num(r.accuracy()),
                     num(r.std_error()), "", ""});
          continue;
        }
        for (std::size_t i = 0; i < c.readout.thresholds.size(); ++i) {
          const double hit = r.present[i] ? double(r.hits[i]) / r.present[i] : NAN;
          const double rej = r.absent[i] ? double(r.rejections[i]) / r.absent[i] : NAN;
          t.add_row({num_l(r.step), num_l(r.lookback), num(c.readout.thresholds[i]),
                     num_l(r.trials), num(r.accuracy()), num(r.std_error()), num(hit), num(rej)});
        }
      }
    }
  } else {
    t.columns = {"step", "lookback", "count", "snr", "snr_stderr"};
    if (c.trials > 0)
      for (const auto& r : simulate_analog(plan))
        t.add_row({num_l(r.step), num_l(r.lookback), num_l(r.count), num(r.snr()),
                   num(r.snr_stderr())});
  }
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentOutput run_theory(const ExperimentConfig& c) {
  ExperimentOutput out;
  ResultTable t;
  t.name = "theory";
  const theory::TheoryQuery q = theory_query(c);
  if (c.task.kind == TaskSpec::Kind::symbolic) {
    t.columns = {"lookback", "s", "p_corr", "info_item"};
    long max_k = -1;
    if (!c.readout.lookbacks.empty())
      max_k = *std::max_element(c.readout.lookbacks.begin(), c.readout.lookbacks.end());
    else if (!q.buffer())
      max_k = static_cast<long>(q.length) - 1;
    const auto prof = theory::symbolic_profile(q, nullptr, max_k);
    std::vector<long> ks = c.readout.lookbacks;
    if (ks.empty())
      for (long k = 0; k < static_cast<long>(prof.s.size()); ++k) ks.push_back(k);
    double total = 0.0;
    for (long k : ks) {
      if (k >= static_cast<long>(prof.s.size())) continue;
      t.add_row({num_l(k), num(prof.s[k]), num(prof.p_corr[k]), num(prof.info[k])});
    }
    total = theory::info_total_symbolic(q);
    t.meta.push_back({"info_total_bits", num(total)});
    t.meta.push_back({"info_per_neuron", num(total / q.neurons)});
  } else {
    t.columns = {"lookback", "snr", "info_item"};
    for (long k : lookbacks_for(c, 1 << 20)) {
      const double r = theory_analog_snr(q, k);
      t.add_row({num_l(k), num(r), num(q.alphabet * theory::info_analog(r))});
    }
    const double total = !q.buffer() && q.lambda == 1.0 ? theory::info_total_analog_reset(q)
                                                        : theory::info_total_analog_buffer(q);
    t.meta.push_back({"info_total_bits", num(total)});
    t.meta.push_back({"info_per_neuron", num(total / q.neurons)});
  }
  out.tables.push_back(std::move(t));
  return out;
}

std::vector<std::pair<std::string, ExperimentConfig>> sweep_points(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, ExperimentConfig>> pts;
  if (c.sweep.parameter.empty()) {
    pts.push_back({"", c});
  } else {
    for (double v : c.sweep.values) pts.push_back({num(v), with_value(c, c.sweep.parameter, v)});
  }
  return pts;
}

ExperimentOutput run_sweep(const ExperimentConfig& c) {
  ExperimentOutput out;
  ResultTable t;
  t.name = "sweep";
  t.columns = {"parameter", "value", "info_total", "info_per_neuron"};
  for (const auto& [label, pc] : sweep_points(c)) {
    const theory::TheoryQuery q = theory_query(pc);
    double total;
    if (pc.task.kind == TaskSpec::Kind::symbolic) total = theory::info_total_symbolic(q);
    else if (!q.buffer() && q.lambda == 1.0) total = theory::info_total_analog_reset(q);
    else total = theory::info_total_analog_buffer(q);
    t.add_row({c.sweep.parameter, label, num(total), num(total / q.neurons)});
  }
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentOutput run_compare(const ExperimentConfig& c, int threads) {
  ExperimentOutput out;
  ResultTable t;
  t.name = "compare";
  const bool symbolic = c.task.kind == TaskSpec::Kind::symbolic;
  t.columns = {"parameter", "value", "lookback", "trials", "simulation", "stderr", "theory", "z"};
  require(c.readout.kind == ReadoutKind::vsa_naive, ErrorKind::ConfigError,
          "config key 'readout.kind': compare runs the vsa-naive readout");
  for (const auto& [label, pc] : sweep_points(c)) {
    const SimulationPlan plan = simulation_plan(pc, threads);
    const theory::TheoryQuery q = theory_query(pc);
    const std::vector<long> ks = pc.task.buffer() ? plan.lookbacks : [&] {
      std::vector<long> v;
      for (const auto& r : plan.reads) v.push_back(r.second);
      return v;
    }();
    if (pc.trials == 0) continue;
    if (symbolic) {
      const auto sims = simulate_symbolic(plan);
      const auto th = theory_accuracy(q, ks);
      for (std::size_t i = 0; i < sims.size(); ++i) {
        const double se = sims[i].std_error();
        const double z = se > 0 ? (sims[i].accuracy() - th[i]) / se : 0.0;
        t.add_row({c.sweep.parameter, label, num_l(sims[i].lookback), num_l(sims[i].trials),
                   num(sims[i].accuracy()), num(se), num(th[i]), num(z)});
      }
    } else {
      const auto sims = simulate_analog(plan);
      for (const auto& s : sims) {
        const double th = theory_analog_snr(q, s.lookback);
        const double se = s.snr_stderr();
        const double z = se > 0 ? (s.snr() - th) / se : 0.0;
        t.add_row({c.sweep.parameter, label, num_l(s.lookback), num_l(s.count), num(s.snr()),
                   num(se), num(th), num(z)});
      }
    }
  }
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentOutput run_optimize(const ExperimentConfig& c) {
  OptimizationProblem p;
  p.objective = c.optimize.objective;
  p.parameter = c.optimize.parameter;
  p.query = theory_query(c);
  p.analog = c.task.kind == TaskSpec::Kind::analog;
  p.r_star = c.optimize.r_star;
  p.lower = c.optimize.lower;
  p.upper = c.optimize.upper;
  p.tolerance = c.optimize.tolerance;
  const OptimizationResult r = optimize(p);

  ExperimentOutput out;
  ResultTable trace;
  trace.name = "optimize_trace";
  trace.columns = {"parameter", "objective"};
  for (const auto& pt : r.trace) trace.add_row({num(pt.parameter), num(pt.value)});
  ResultTable best;
  best.name = "optimize";
  best.columns = {"objective", "parameter", "argmax", "value", "fallback"};
  best.add_row({to_string(p.objective), to_string(p.parameter), num(r.argmax), num(r.value),
                r.fallback ? "1" : "0"});
  out.tables.push_back(std::move(best));
  out.tables.push_back(std::move(trace));
  return out;
}

ExperimentOutput run_mmse(const ExperimentConfig& c, int threads) {
  require(c.readout.kind != ReadoutKind::vsa_naive, ErrorKind::ConfigError,
          "config key 'readout.kind': mmse experiments need an MMSE readout");
  ExperimentOutput out;
  const NetworkConfig net = fixed_network(c);
  const std::vector<long> ks = lookbacks_for(c, 64);
  auto readouts = std::make_shared<const std::map<long, ReadoutMatrix>>(fit_readouts(c, net, ks));

  SimulationPlan plan = simulation_plan([&] {
    ExperimentConfig naive = c;
    naive.readout.kind = ReadoutKind::vsa_naive;
    naive.readout.lookbacks = ks;
    return naive;
  }(), threads);
  plan.network = net;

  ResultTable t;
  t.name = "mmse";
  const bool symbolic = c.task.kind == TaskSpec::Kind::symbolic;
  t.columns = {"lookback", "readout", "ridge", "residual", "training",
               symbolic ? "accuracy" : "snr", "stderr"};
  std::vector<std::pair<std::string, std::shared_ptr<const std::map<long, ReadoutMatrix>>>> runs =
      {{"vsa-naive", nullptr}, {to_string(c.readout.kind), readouts}};
  for (const auto& [name, ro] : runs) {
    plan.readouts = ro;
    if (c.trials == 0) break;
    std::vector<std::pair<double, double>> metric;
    if (symbolic)
      for (const auto& r : simulate_symbolic(plan)) metric.push_back({r.accuracy(), r.std_error()});
    else
      for (const auto& r : simulate_analog(plan)) metric.push_back({r.snr(), r.snr_stderr()});
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const ReadoutMatrix* m = ro ? &ro->at(ks[i]) : nullptr;
      t.add_row({num_l(ks[i]), name, m ? num(m->ridge) : "", m ? num(m->residual) : "",
                 m ? num_l(m->training) : "", num(metric[i].first), num(metric[i].second)});
    }
  }
  out.tables.push_back(std::move(t));
  for (const auto& [k, m] : *readouts) {
    std::ostringstream ss;
    m.write_csv(ss);
    out.files["readout_K" + std::to_string(k) + ".csv"] = ss.str();
  }
  return out;
}

ExperimentOutput run_ngram(const ExperimentConfig& c) {
  const std::string text =
      c.ngram.text.empty() ? synthetic_text(c.ngram.chars, c.seed) : read_text_file(c.ngram.text);
  require(c.network.alphabet == kTextAlphabet, ErrorKind::ConfigError,
          "config key 'network.alphabet': the n-gram demo needs 27");
  require(c.network.family == CodeFamily::hdc, ErrorKind::ConfigError,
          "config key 'network.family': the n-gram demo uses hdc codes");
  const Codebook book = Codebook::generate(
      {c.network.family, c.network.neurons, c.network.alphabet, c.network.sparseness,
       derive_seed(c.seed, 0x6e6772616d)});
  const RecurrentOperator rho = RecurrentOperator::cyclic_shift(c.network.neurons);
  const NgramMemory mem = ingest_ngrams(text, c.ngram.n, book, rho);

  double sum_sq = 0.0;
  long distinct = 0;
  for (long n : mem.counts) {
    sum_sq += double(n) * n;
    distinct += n > 0;
  }
  ResultTable t;
  t.name = "ngram";
  t.columns = {"gram", "count", "estimate", "error", "predicted_var"};
  const double nn = c.network.neurons;
  double err_sq = 0.0, pred = 0.0;
  std::vector<int> gram(mem.n);
  for (std::size_t idx = 0; idx < mem.counts.size(); ++idx) {
    long rest = static_cast<long>(idx);
    std::string label(mem.n, ' ');
    for (int j = mem.n - 1; j >= 0; --j) {
      gram[j] = static_cast<int>(rest % kTextAlphabet);
      rest /= kTextAlphabet;
      label[j] = gram[j] == 26 ? '_' : static_cast<char>('a' + gram[j]);
    }
    const double count = static_cast<double>(mem.counts[idx]);
    const double est = ngram_count_estimate(mem, gram, book, rho);
    const double var = (sum_sq - count * count) / nn;
    err_sq += (est - count) * (est - count);
    pred += var;
    t.add_row({label, num(count), num(est), num(est - count), num(var)});
  }
  const double grams = static_cast<double>(mem.counts.size());
  t.meta.push_back({"text_chars", std::to_string(text.size())});
  t.meta.push_back({"ngrams", std::to_string(mem.total)});
  t.meta.push_back({"distinct", std::to_string(distinct)});
  t.meta.push_back({"measured_error_var", num(err_sq / grams)});
  t.meta.push_back({"predicted_error_var", num(pred / grams)});
  ExperimentOutput out;
  out.tables.push_back(std::move(t));
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config, int threads) {
  switch (config.kind) {
    case ExperimentKind::simulate: return run_simulate(config, threads);
    case ExperimentKind::theory: return run_theory(config);
    case ExperimentKind::sweep: return run_sweep(config);
    case ExperimentKind::optimize: return run_optimize(config);
    case ExperimentKind::mmse: return run_mmse(config, threads);
    case ExperimentKind::ngram: return run_ngram(config);
    case ExperimentKind::compare: return run_compare(config, threads);
  }
  fail(ErrorKind::ConfigError, "unknown experiment kind");
}

void write_output(const ExperimentOutput& output, const ExperimentConfig& config,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& t : output.tables) {
    std::ofstream f(dir / (t.name + ".csv"), std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::ConfigError,
            "cannot write " + (dir / (t.name + ".csv")).string());
    t.write_csv(f, config);
  }
  for (const auto& [name, content] : output.files) {
    std::ofstream f(dir / name, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::ConfigError, "cannot write " + (dir / name).string());
    f << content;
  }
}

}  // namespace vsamem
