// vsamem command line: runs one experiment from a JSON config and writes CSV.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "vsamem/error.hpp"
#include "vsamem/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(const vsamem::Error& e) {
  return e.kind() == vsamem::ErrorKind::NumericalFailure ? kExitNumerical : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory capacity experiments for recurrent hypervector networks"};
  app.set_version_flag("--version", vsamem::build_version());
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool echo = false;

  for (const char* name : {"simulate", "theory", "sweep", "optimize", "mmse", "ngram", "compare"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run a ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_flag("--echo-config", echo, "print the validated config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  try {
    vsamem::ExperimentConfig config = vsamem::load_config(config_path);
    config.kind = vsamem::parse_experiment_kind(kind);
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.output = out_dir;
    if (echo) {
      std::cout << vsamem::serialize_config(config) << "\n";
      return 0;
    }
    const auto output = vsamem::run_experiment(config, static_cast<int>(threads));
    vsamem::write_output(output, config, config.output);
    for (const auto& t : output.tables)
      std::cerr << "wrote " << config.output << "/" << t.name << ".csv (" << t.rows.size()
                << " rows)\n";
    return 0;
  } catch (const vsamem::Error& e) {
    std::cerr << "vsamem " << kind << ": " << vsamem::to_string(e.kind()) << ": " << e.what()
              << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "vsamem " << kind << ": " << e.what() << "\n";
    return 1;
  }
}
