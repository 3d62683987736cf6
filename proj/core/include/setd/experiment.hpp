#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "setd/analysis.hpp"
#include "setd/config.hpp"
#include "setd/envs.hpp"
#include "setd/learners.hpp"

namespace setd {

enum class EnvKind { kTwoState, kBoyan, kBaird, kRandomMdp };

std::string_view to_string(EnvKind env);
EnvKind parse_env(std::string_view text);

struct RandomMdpParams {
  int n_states = 400;
  int n_actions = 10;
  int d = 201;
  std::uint64_t env_seed = 0;
};

// One learner configuration. `label` names it in every output file;
// params.gamma is overwritten with the MDP's discount at run time.
struct AlgorithmSpec {
  std::string label;
  Algorithm algorithm = Algorithm::kSetd;
  Hyperparams params;
};

struct ExperimentConfig {
  EnvKind env = EnvKind::kTwoState;
  RandomMdpParams random_mdp;
  std::vector<AlgorithmSpec> algorithms;
  long horizon = 1000;
  std::vector<std::uint64_t> seeds = default_seeds(20);
  SamplingMode sampling = SamplingMode::kSequential;
  long eval_every = 10;
  std::optional<Vector> theta_init;
  std::filesystem::path output_dir = "out";
  int threads = 0;  // 0: one per hardware thread

  static std::vector<std::uint64_t> default_seeds(int count);

  // Throws ConfigError for malformed settings and ContractViolation when ETD
  // is paired with i.i.d. sampling.
  void validate() const;
};

// Named step-size presets: boyan_lambda04, boyan_lambda08, baird,
// random_mdp, random_mdp_small. Throws ConfigError for unknown names.
ExperimentConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

// Reads env.*, run.*, algo.<label>.* keys; `preset = name` seeds the
// config before the remaining keys are applied.
ExperimentConfig parse_config(const KeyValueFile& file);

Environment make_environment(const ExperimentConfig& config);

struct CurveRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  long step = 0;
  double rmse = 0.0;
  double rmspbe = 0.0;
  bool diverged = false;

  bool operator==(const CurveRow&) const = default;
};

// Rows ordered by (algorithm order in the config, seed order, step).
using LearningCurve = std::vector<CurveRow>;

// Steps every (algorithm, seed) learner over its own sample stream and
// records metrics at step 0, every eval_every steps, and at the horizon.
// Tasks run in parallel; output order does not depend on scheduling.
LearningCurve run_experiment(const ExperimentConfig& config);

inline constexpr std::string_view kCurveHeader = "algorithm,seed,step,rmse,rmspbe,diverged";

void write_curves_csv(std::ostream& out, const LearningCurve& curve);
void write_curves_csv(const std::filesystem::path& path, const LearningCurve& curve);
LearningCurve read_curves_csv(std::istream& in, std::string_view origin = "<stream>");
LearningCurve read_curves_csv(const std::filesystem::path& path);

enum class SelectionMetric { kFinalRmse, kFinalRmspbe, kAucRmspbe };

std::string_view to_string(SelectionMetric metric);
SelectionMetric parse_selection_metric(std::string_view text);

struct GridSpec {
  std::vector<double> alphas;
  std::vector<double> mus;      // GTD2 / TDC only; empty keeps the config's mu
  std::vector<double> lambdas;  // lambda algorithms only; empty keeps the config's
  SelectionMetric metric = SelectionMetric::kFinalRmspbe;

  // The published grid of step sizes, ratios and trace parameters.
  static GridSpec table2();
};

// Keys: alpha, mu, lambda (comma lists), metric, or `preset = table2`.
GridSpec parse_grid(const KeyValueFile& file);

struct GridCell {
  std::string algorithm;
  double alpha = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  int n_seeds = 0;
  int diverged_seeds = 0;
  double mean = 0.0;  // over seeds; meaningless when diverged_seeds > 0
  double stddev = 0.0;
  bool best = false;  // argmin over this algorithm's non-diverged cells
};

std::vector<GridCell> grid_search(const ExperimentConfig& config, const GridSpec& grid);

inline constexpr std::string_view kGridHeader =
    "algorithm,alpha,mu,lambda,metric,n_seeds,diverged_seeds,mean,std,best";

void write_grid_csv(std::ostream& out, const std::vector<GridCell>& cells, SelectionMetric metric);

struct TwoStateRow {
  std::string algorithm;
  ObliqueDiagnostics diagnostics;
};

// Omega_S, Omega_E and Omega_TD = I on the two-state MDP, with their
// criterion values and distances to X*.
std::vector<TwoStateRow> analyze_two_state();

// One JSON object per row plus a leading {"x_star": ...} line.
void write_analysis_jsonl(std::ostream& out, const std::vector<TwoStateRow>& rows);

}  // namespace setd
