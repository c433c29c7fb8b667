#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vsamem/theory/accuracy.hpp"
#include "vsamem/theory/query.hpp"

namespace vsamem {

enum class Objective { total_info, usable_info, usable_horizon, storage_ratio };
const char* to_string(Objective o);
Objective parse_objective(const std::string& name);

enum class FreeParameter { lambda, kappa, gamma, tau, length, alphabet, neurons };
const char* to_string(FreeParameter p);
FreeParameter parse_free_parameter(const std::string& name);

/// κ, M and D are scanned exhaustively; the others use golden-section search
/// on a log scale (log(1 − λ) for λ).
bool is_integer_parameter(FreeParameter p);

struct OptimizationProblem {
  Objective objective = Objective::total_info;
  FreeParameter parameter = FreeParameter::lambda;
  theory::TheoryQuery query;
  bool analog = false;  // analog inputs instead of symbols
  double r_star = 1.0;  // usable objectives
  double lower = 0.5;
  double upper = 1.0;
  double tolerance = 1e-4;  // width on the search scale; relative value slack
  int coarse_points = 25;
  int dense_points = 400;

  void validate() const;
};

struct TracePoint {
  double parameter;
  double value;
};

struct OptimizationResult {
  double argmax = 0.0;
  double value = 0.0;
  bool fallback = false;  // trace was not unimodal; dense grid used
  std::vector<TracePoint> trace;

  void write_csv(std::ostream& out) const;
};

/// Query with the free parameter set to x.
theory::TheoryQuery with_parameter(const OptimizationProblem& problem, double x);
/// `curve` optionally tabulates symbolic accuracy for the problem's D.
double evaluate_objective(const OptimizationProblem& problem, double x,
                          const theory::AccuracyCurve* curve = nullptr);

OptimizationResult optimize(const OptimizationProblem& problem);

/// I_total / (N log₂(2κ + 1)) for a clipped bipolar buffer.
double storage_ratio(const theory::TheoryQuery& q);

}  // namespace vsamem
