#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "foodchain/bifurcation.hpp"
#include "foodchain/cycles.hpp"
#include "foodchain/dynamics.hpp"
#include "foodchain/equilibria.hpp"
#include "foodchain/fitting.hpp"
#include "foodchain/sweep.hpp"

namespace foodchain {

using Json = nlohmann::ordered_json;

// Parsers throw DomainError on missing or unknown keys and on values that
// fail the type invariants.

ResponseSpec response_from_json(const Json& j);
Json to_json(const ResponseSpec& spec);

/// `d2` may be omitted when `d2_fallback` is given (swept configurations).
ModelParams model_from_json(const Json& j, std::optional<double> d2_fallback = std::nullopt);
Json to_json(const ModelParams& params);

IntegratorConfig integrator_from_json(const Json& j);
Json to_json(const IntegratorConfig& cfg);

State state_from_json(const Json& j);
Json to_json(const State& s);

Json to_json(const EquilibriumPoint& e);
Json to_json(const ThresholdReport& report);
Json to_json(const LimitCycle& cycle, bool with_samples = false);
Json to_json(const AttractorSummary& summary);
Json to_json(const FitResult& result);
Json to_json(const ExtinctionVerdict& verdict);

struct SweepBlock {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  SweepOptions options;
};

struct SimulateBlock {
  double t_end = 1000.0;
  double dt = 0.1;
};

struct CycleBlock {
  std::optional<State> guess;
  std::optional<double> continue_to;
  double step = 2e-4;
  bool boundary = false;
};

/// Whole-run configuration file. Only `model` is required; each subcommand
/// reads its own block.
struct ExperimentConfig {
  Json model_json;
  std::optional<double> d2;
  IntegratorConfig integrator;
  std::optional<State> ic;
  std::optional<SweepBlock> sweep;
  SimulateBlock simulate;
  CycleBlock cycle;
  double extinction_t_max = 20000.0;
  bool classify_hopf = true;
  std::optional<FitProblem> fit;

  /// Model at the configured d2 (DomainError if none is set).
  ModelParams model() const;
  /// Model at an explicit d2 (for sweeps).
  ModelParams model_at(double d2) const;
};

ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

FitProblem fit_problem_from_json(const Json& j);

}  // namespace foodchain
