#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "vsamem/error.hpp"
#include "vsamem/experiment.hpp"
#include "vsamem/ngram.hpp"
#include "vsamem/optimizer.hpp"
#include "vsamem/theory/information.hpp"
#include "vsamem/vsa.hpp"

using namespace vsamem;

namespace {

std::string csv(const ExperimentOutput& out, const ExperimentConfig& cfg) {
  std::ostringstream s;
  for (const auto& t : out.tables) t.write_csv(s, cfg);
  return s.str();
}

ExperimentConfig small_simulation() {
  return parse_config(R"({"experiment": "simulate",
    "network": {"neurons": 128, "alphabet": 8, "lambda": 0.95},
    "task": {"length": 20}, "trials": 64, "seed": 3})");
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("storage ratio peaks at a few bits per neuron") {
    OptimizationProblem p;
    p.objective = Objective::storage_ratio;
    p.parameter = FreeParameter::kappa;
    p.query.neurons = 1000;
    p.query.alphabet = 64;
    p.query.length = theory::kInfinite;
    p.query.activation = Activation::clipped(1.0);  // κ is the free parameter
    p.lower = 3;
    p.upper = 16;
    const auto r = optimize(p);
    const double bits = std::log2(2 * r.argmax + 1);
    CHECK(bits >= 4.0);
    CHECK(bits <= 6.0);
    CHECK(r.value >= 0.06);
    CHECK(r.value <= 0.10);
  }

  TEST_CASE("usable horizon optimum matches the closed form") {
    OptimizationProblem p;
    p.objective = Objective::usable_horizon;
    p.parameter = FreeParameter::tau;
    p.analog = true;
    p.query.neurons = 2000;
    p.query.alphabet = 10;
    p.query.length = theory::kInfinite;
    p.query.noise_var = 0.01;
    p.lower = 10;
    p.upper = 1e5;
    const auto r = optimize(p);
    CHECK(r.argmax == doctest::Approx(theory::tau_opt(p.query, 1.0)).epsilon(0.02));
  }

  TEST_CASE("invalid problems are rejected") {
    OptimizationProblem p;
    p.lower = 0.9;
    p.upper = 0.8;
    CHECK_THROWS_AS(optimize(p), Error);
    p = {};
    p.objective = Objective::storage_ratio;  // needs κ as the free parameter
    CHECK_THROWS_AS(optimize(p), Error);
  }

  TEST_CASE("names round trip") {
    for (auto o : {Objective::total_info, Objective::usable_info, Objective::usable_horizon,
                   Objective::storage_ratio})
      CHECK(parse_objective(to_string(o)) == o);
    CHECK(is_integer_parameter(FreeParameter::kappa));
    CHECK_FALSE(is_integer_parameter(FreeParameter::lambda));
  }
}

TEST_SUITE("expctl") {
  TEST_CASE("range errors name the key") {
    CHECK(config_error(R"({"network": {"lambda": 1.5}})").find("lambda") != std::string::npos);
    CHECK(config_error(R"({"network": {"neurons": 0}})").find("neurons") != std::string::npos);
  }

  TEST_CASE("unknown keys and type mismatches fail") {
    CHECK(config_error(R"({"netwrk": {}})").find("netwrk") != std::string::npos);
    CHECK(config_error(R"({"trials": "many"})").find("trials") != std::string::npos);
    CHECK_FALSE(config_error("{").empty());
  }

  TEST_CASE("serialization round trips") {
    const auto cfg = small_simulation();
    const auto text = serialize_config(cfg);
    CHECK(serialize_config(parse_config(text)) == text);
  }

  TEST_CASE("hash ignores the output path") {
    auto a = small_simulation();
    auto b = a;
    b.output = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 4;
    CHECK(config_hash(a) != config_hash(b));
  }

  TEST_CASE("zero trials is a dry run") {
    auto cfg = small_simulation();
    cfg.trials = 0;
    const auto out = run_experiment(cfg);
    REQUIRE_FALSE(out.tables.empty());
    CHECK(out.tables[0].rows.empty());
    CHECK_FALSE(out.tables[0].columns.empty());
  }

  TEST_CASE("outputs are byte identical across runs and thread counts") {
    const auto cfg = small_simulation();
    const auto one = csv(run_experiment(cfg, 1), cfg);
    CHECK(one == csv(run_experiment(cfg, 1), cfg));
    CHECK(one == csv(run_experiment(cfg, 2), cfg));
  }

  TEST_CASE("missing text file") {
    const auto what =
        config_error(R"({"experiment": "ngram", "ngram": {"text": "/nonexistent/x.txt"}})");
    CHECK(what.find("ngram.text") != std::string::npos);
  }

  TEST_CASE("n-gram memory") {
    CodebookSpec spec;
    spec.neurons = 256;
    spec.alphabet = kTextAlphabet;
    spec.seed = 2;
    const auto book = Codebook::generate(spec);
    const auto rho = RecurrentOperator::cyclic_shift(256);

    const auto mem = ingest_ngrams("abc", 3, book, rho);
    const auto tokens = text_tokens("abc");
    CHECK((mem.state - encode_ngram(tokens, book, rho)).norm() < 1e-12);
    CHECK(mem.total == 1);

    const auto unigrams = ingest_ngrams("aaa", 1, book, rho);
    const int a[] = {0};
    CHECK(ngram_count_estimate(unigrams, a, book, rho) == doctest::Approx(3.0));
    CHECK(unigrams.counts[0] == 3);
    CHECK(normalize_text("Hi, there!") == "hi  there ");
  }
}
