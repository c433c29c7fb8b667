#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vsamem/optimizer.hpp"
#include "vsamem/readout.hpp"
#include "vsamem/simulation.hpp"
#include "vsamem/theory/query.hpp"

namespace vsamem {

const char* build_version();

enum class ExperimentKind { simulate, theory, sweep, optimize, mmse, ngram, compare };
const char* to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ReadoutSection {
  ReadoutKind kind = ReadoutKind::vsa_naive;
  std::vector<long> lookbacks;  // empty: defaults per experiment
  std::vector<double> thresholds;
  double retrieval_noise_var = 0.0;
  double flip_prob = 0.0;
  double ridge = -1.0;   // MMSE; negative selects the default
  long training = 5000;  // MMSE empirical samples
};

struct BufferSection {
  long burn_in = -1;
  long stride = 1;
  long snapshots = 1;
};

struct SweepSection {
  std::string parameter;  // empty: no sweep
  std::vector<double> values;
};

struct OptimizeSection {
  Objective objective = Objective::total_info;
  FreeParameter parameter = FreeParameter::lambda;
  double lower = 0.5;
  double upper = 1.0;
  double tolerance = 1e-4;
  double r_star = 1.0;
};

struct NgramSection {
  std::string text;  // file path; empty: synthetic text
  long chars = 100000;
  int n = 3;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  NetworkRecipe network;
  TaskSpec task;
  ReadoutSection readout;
  BufferSection buffer;
  SweepSection sweep;
  OptimizeSection optimize;
  NgramSection ngram;
  long trials = 10000;
  int batch = 16;
  int batches_per_network = 1;
  std::uint64_t seed = 0;
  std::string output = "out";
};

/// Parses a JSON document; missing keys take defaults. Unknown keys, type
/// mismatches and range violations raise ConfigError naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON with every field, sorted keys.
std::string serialize_config(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical serialization without the output path.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Copy with one network/task parameter replaced by a sweep value.
ExperimentConfig with_value(const ExperimentConfig& config, const std::string& parameter,
                            double value);

theory::TheoryQuery theory_query(const ExperimentConfig& config);
SimulationPlan simulation_plan(const ExperimentConfig& config, int threads);

/// Long-format table; cells are preformatted.
struct ResultTable {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> meta;

  void add_row(std::vector<std::string> row);
  void write_csv(std::ostream& out, const ExperimentConfig& config) const;
};

std::string format_number(double v);

struct ExperimentOutput {
  std::vector<ResultTable> tables;
  std::map<std::string, std::string> files;  // extra files, name → content
};

ExperimentOutput run_experiment(const ExperimentConfig& config, int threads = 1);
/// Writes tables as <dir>/<name>.csv plus the extra files.
void write_output(const ExperimentOutput& output, const ExperimentConfig& config,
                  const std::filesystem::path& dir);

}  // namespace vsamem
