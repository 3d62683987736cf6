#include "setd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "setd/csv.hpp"
#include "setd/metrics.hpp"

namespace setd {
namespace {

// Runs f(0..n-1) on a small thread pool and rethrows the first exception.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

long parse_positive_long(const std::string& text, std::string_view key) {
  const long v = csv::parse_long(text);
  if (v <= 0) throw ConfigError(std::string(key) + " must be positive");
  return v;
}

AlgorithmSpec make_spec(std::string label, Algorithm algorithm, double alpha, double mu = 0.0,
                        double lambda = 0.0) {
  AlgorithmSpec spec;
  spec.label = std::move(label);
  spec.algorithm = algorithm;
  spec.params.alpha = alpha;
  spec.params.mu = mu;
  spec.params.lambda = lambda;
  return spec;
}

std::vector<double> sorted_unique(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json vector_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

std::string_view to_string(EnvKind env) {
  switch (env) {
    case EnvKind::kTwoState: return "two_state";
    case EnvKind::kBoyan: return "boyan";
    case EnvKind::kBaird: return "baird";
    case EnvKind::kRandomMdp: return "random_mdp";
  }
  return "?";
}

EnvKind parse_env(std::string_view text) {
  if (text == "two_state") return EnvKind::kTwoState;
  if (text == "boyan") return EnvKind::kBoyan;
  if (text == "baird") return EnvKind::kBaird;
  if (text == "random_mdp") return EnvKind::kRandomMdp;
  throw ConfigError("unknown environment '" + std::string(text) + "'");
}

std::vector<std::uint64_t> ExperimentConfig::default_seeds(int count) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(count, 0)));
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
  return seeds;
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ConfigError("no algorithms configured");
  if (seeds.empty()) throw ConfigError("no seeds configured");
  if (horizon <= 0) throw ConfigError("horizon must be positive");
  if (eval_every <= 0) throw ConfigError("eval_every must be positive");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  std::set<std::string> labels;
  for (const auto& spec : algorithms) {
    if (!labels.insert(spec.label).second) {
      throw ConfigError("duplicate algorithm label '" + spec.label + "'");
    }
    Hyperparams h = spec.params;
    h.gamma = 0.0;
    try {
      h.validate();
    } catch (const ModelError& e) {
      throw ConfigError(spec.label + ": " + e.what());
    }
    if (spec.algorithm == Algorithm::kEtd && sampling != SamplingMode::kSequential) {
      throw ContractViolation(spec.label + ": ETD requires sequential sampling");
    }
  }
  if (env == EnvKind::kRandomMdp &&
      (random_mdp.n_states < 2 || random_mdp.n_actions < 1 || random_mdp.d < 2)) {
    throw ConfigError("random_mdp needs n_states >= 2, n_actions >= 1, d >= 2");
  }
}

std::vector<std::string> preset_names() {
  return {"boyan_lambda04", "boyan_lambda08", "baird", "random_mdp", "random_mdp_small"};
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig c;
  c.sampling = SamplingMode::kSequential;
  c.seeds = ExperimentConfig::default_seeds(20);
  if (name == "boyan_lambda04" || name == "boyan_lambda08") {
    const bool low = name == "boyan_lambda04";
    const double lambda = low ? 0.4 : 0.8;
    c.env = EnvKind::kBoyan;
    c.horizon = 5000;
    c.algorithms = {
        make_spec("TD", Algorithm::kTdLambda, 0.2, 0.0, lambda),
        make_spec("SETD", Algorithm::kSetdLambda, low ? 0.4 : 0.3, 0.0, lambda),
        make_spec("ETD", Algorithm::kEtd, 0.04),
        make_spec("GTD2", Algorithm::kGtd2, low ? 0.5 : 0.3, 1.0),
        make_spec("TDC", Algorithm::kTdc, 0.3, 0.001),
    };
  } else if (name == "baird") {
    c.env = EnvKind::kBaird;
    c.horizon = 4000;
    c.theta_init = baird_initial_theta();
    c.algorithms = {
        make_spec("SETD", Algorithm::kSetd, 0.006),
        make_spec("GTD2", Algorithm::kGtd2, 0.005, 1.0),
        make_spec("TDC", Algorithm::kTdc, 0.006, 16.0),
    };
  } else if (name == "random_mdp" || name == "random_mdp_small") {
    c.env = EnvKind::kRandomMdp;
    c.horizon = 10000;
    if (name == "random_mdp_small") c.random_mdp = {50, 5, 26, 0};
    c.algorithms = {
        make_spec("ETD", Algorithm::kEtd, 2.5e-6),
        make_spec("SETD", Algorithm::kSetd, 8e-4),
        make_spec("GTD2", Algorithm::kGtd2, 2e-3, 1.0),
        make_spec("TDC", Algorithm::kTdc, 2e-3, 0.05),
    };
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

ExperimentConfig parse_config(const KeyValueFile& file) {
  ExperimentConfig c;
  c.algorithms.clear();
  if (auto p = file.get("preset")) c = preset_config(*p);

  // algo.<label>.<field>, grouped by label in first-seen order.
  std::vector<std::pair<std::string, std::map<std::string, std::string>>> algo_fields;

  for (const auto& [key, value] : file.entries()) {
    if (key == "preset") continue;
    if (key == "env.name") {
      c.env = parse_env(value);
    } else if (key == "env.n_states") {
      c.random_mdp.n_states = static_cast<int>(parse_positive_long(value, key));
    } else if (key == "env.n_actions") {
      c.random_mdp.n_actions = static_cast<int>(parse_positive_long(value, key));
    } else if (key == "env.d") {
      c.random_mdp.d = static_cast<int>(parse_positive_long(value, key));
    } else if (key == "env.seed") {
      c.random_mdp.env_seed = static_cast<std::uint64_t>(csv::parse_long(value));
    } else if (key == "run.horizon") {
      c.horizon = parse_positive_long(value, key);
    } else if (key == "run.seeds") {
      c.seeds = ExperimentConfig::default_seeds(static_cast<int>(parse_positive_long(value, key)));
    } else if (key == "run.seed_list") {
      c.seeds.clear();
      for (const auto& s : csv::split(value)) c.seeds.push_back(static_cast<std::uint64_t>(csv::parse_long(s)));
    } else if (key == "run.sampling") {
      c.sampling = parse_sampling_mode(value);
    } else if (key == "run.eval_every") {
      c.eval_every = parse_positive_long(value, key);
    } else if (key == "run.theta_init") {
      if (value == "zero") {
        c.theta_init.reset();
      } else if (value == "baird") {
        c.theta_init = baird_initial_theta();
      } else {
        const auto v = csv::parse_double_list(value);
        c.theta_init = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
    } else if (key == "run.output_dir") {
      c.output_dir = value;
    } else if (key == "run.threads") {
      c.threads = static_cast<int>(csv::parse_long(value));
    } else if (key.rfind("algo.", 0) == 0) {
      const std::string rest = key.substr(5);
      const auto dot = rest.rfind('.');
      if (dot == std::string::npos || dot == 0) throw ConfigError("malformed key " + key);
      const std::string label = rest.substr(0, dot);
      const std::string field = rest.substr(dot + 1);
      auto it = std::find_if(algo_fields.begin(), algo_fields.end(),
                             [&](const auto& e) { return e.first == label; });
      if (it == algo_fields.end()) {
        algo_fields.emplace_back(label, std::map<std::string, std::string>{});
        it = std::prev(algo_fields.end());
      }
      it->second[field] = value;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  for (const auto& [label, fields] : algo_fields) {
    auto existing = std::find_if(c.algorithms.begin(), c.algorithms.end(),
                                 [&](const AlgorithmSpec& s) { return s.label == label; });
    AlgorithmSpec* spec = nullptr;
    if (existing != c.algorithms.end()) {
      spec = &*existing;
    } else {
      if (!fields.count("alpha")) throw ConfigError("algo." + label + ".alpha is required");
      AlgorithmSpec fresh;
      fresh.label = label;
      fresh.algorithm = parse_algorithm(fields.count("type") ? fields.at("type") : label);
      c.algorithms.push_back(fresh);
      spec = &c.algorithms.back();
    }
    for (const auto& [field, value] : fields) {
      if (field == "type") {
        spec->algorithm = parse_algorithm(value);
      } else if (field == "alpha") {
        spec->params.alpha = csv::parse_double(value);
      } else if (field == "mu") {
        spec->params.mu = csv::parse_double(value);
      } else if (field == "lambda") {
        spec->params.lambda = csv::parse_double(value);
      } else {
        throw ConfigError("unknown field algo." + label + "." + field);
      }
    }
  }
  return c;
}

Environment make_environment(const ExperimentConfig& config) {
  switch (config.env) {
    case EnvKind::kTwoState: return build_two_state();
    case EnvKind::kBoyan: return build_boyan();
    case EnvKind::kBaird: return build_baird();
    case EnvKind::kRandomMdp:
      return build_random_mdp(config.random_mdp.n_states, config.random_mdp.n_actions,
                              config.random_mdp.d, config.random_mdp.env_seed);
  }
  throw ConfigError("unknown environment");
}

LearningCurve run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Environment env = make_environment(config);
  const TabularMDP& mdp = env.mdp;
  const int d = mdp.n_features();
  if (config.theta_init && config.theta_init->size() != d) {
    throw ConfigError("theta_init has " + std::to_string(config.theta_init->size()) +
                      " entries, the environment has d = " + std::to_string(d));
  }
  const GroundTruth gt = GroundTruth::build(mdp, env.policies);
  const Matrix& phi = mdp.features();

  const std::size_t n_seeds = config.seeds.size();
  const std::size_t n_tasks = config.algorithms.size() * n_seeds;
  std::vector<LearningCurve> results(n_tasks);

  parallel_for(n_tasks, config.threads, [&](std::size_t task) {
    const AlgorithmSpec& spec = config.algorithms[task / n_seeds];
    const std::uint64_t seed = config.seeds[task % n_seeds];
    Hyperparams h = spec.params;
    h.gamma = mdp.gamma();
    LearnerState state = LearnerState::make(spec.algorithm, d, config.theta_init);
    SampleStream stream(mdp, env.policies, seed, config.sampling);
    TransitionSample sample;

    LearningCurve& rows = results[task];
    rows.reserve(static_cast<std::size_t>(config.horizon / config.eval_every + 2));
    const auto record = [&](long t) {
      CurveRow row{spec.label, seed, t, 0.0, 0.0, state.diverged};
      if (state.diverged) {
        row.rmse = row.rmspbe = std::numeric_limits<double>::infinity();
      } else {
        row.rmse = rmse(state.theta, gt, phi);
        row.rmspbe = rmspbe(state.theta, gt, phi);
      }
      rows.push_back(std::move(row));
    };

    record(0);
    for (long t = 1; t <= config.horizon; ++t) {
      stream.next(sample);
      step(state, sample, h);
      if (t % config.eval_every == 0 || t == config.horizon) record(t);
    }
  });

  LearningCurve out;
  for (auto& part : results) {
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

void write_curves_csv(std::ostream& out, const LearningCurve& curve) {
  out << kCurveHeader << '\n';
  for (const auto& r : curve) {
    out << r.algorithm << ',' << r.seed << ',' << r.step << ',' << csv::format_double(r.rmse)
        << ',' << csv::format_double(r.rmspbe) << ',' << (r.diverged ? 1 : 0) << '\n';
  }
}

void write_curves_csv(const std::filesystem::path& path, const LearningCurve& curve) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  write_curves_csv(out, curve);
}

LearningCurve read_curves_csv(std::istream& in, std::string_view origin) {
  std::string line;
  if (!std::getline(in, line) || csv::trim(line) != kCurveHeader) {
    throw ConfigError(std::string(origin) + ": expected header '" + std::string(kCurveHeader) + "'");
  }
  LearningCurve curve;
  while (std::getline(in, line)) {
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 6) throw ConfigError(std::string(origin) + ": expected 6 fields: " + line);
    CurveRow r;
    r.algorithm = f[0];
    r.seed = static_cast<std::uint64_t>(csv::parse_long(f[1]));
    r.step = csv::parse_long(f[2]);
    r.rmse = csv::parse_double(f[3]);
    r.rmspbe = csv::parse_double(f[4]);
    r.diverged = csv::parse_bool01(f[5]);
    curve.push_back(std::move(r));
  }
  return curve;
}

LearningCurve read_curves_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_curves_csv(in, path.string());
}

std::string_view to_string(SelectionMetric metric) {
  switch (metric) {
    case SelectionMetric::kFinalRmse: return "final_rmse";
    case SelectionMetric::kFinalRmspbe: return "final_rmspbe";
    case SelectionMetric::kAucRmspbe: return "auc_rmspbe";
  }
  return "?";
}

SelectionMetric parse_selection_metric(std::string_view text) {
  if (text == "final_rmse") return SelectionMetric::kFinalRmse;
  if (text == "final_rmspbe") return SelectionMetric::kFinalRmspbe;
  if (text == "auc_rmspbe") return SelectionMetric::kAucRmspbe;
  throw ConfigError("unknown selection metric '" + std::string(text) + "'");
}

GridSpec GridSpec::table2() {
  GridSpec g;
  g.alphas = {1e-7, 1e-6, 1e-5, 1e-4, 0.001, 0.01, 0.1, 3e-6, 5e-6, 7e-6, 9e-6, 2e-6, 2.5e-6,
              2e-4, 4e-4, 6e-4, 8e-4, 0.2, 0.3, 0.4, 0.5, 0.6};
  for (int k = 2; k <= 9; ++k) {
    g.alphas.push_back(0.001 * k);
    g.alphas.push_back(0.01 * k);
  }
  g.alphas = sorted_unique(g.alphas);
  g.mus = sorted_unique({1e-4, 1e-3, 0.01, 0.1, 1, 4, 8, 16, 0.005, 0.05, 0.5});
  g.lambdas = {0.4, 0.8};
  return g;
}

GridSpec parse_grid(const KeyValueFile& file) {
  GridSpec g;
  if (auto p = file.get("preset")) {
    if (*p != "table2") throw ConfigError("unknown grid preset '" + *p + "'");
    g = GridSpec::table2();
  }
  for (const auto& [key, value] : file.entries()) {
    if (key == "preset") continue;
    if (key == "alpha") {
      g.alphas = sorted_unique(csv::parse_double_list(value));
    } else if (key == "mu") {
      g.mus = sorted_unique(csv::parse_double_list(value));
    } else if (key == "lambda") {
      g.lambdas = sorted_unique(csv::parse_double_list(value));
    } else if (key == "metric") {
      g.metric = parse_selection_metric(value);
    } else {
      throw ConfigError("unknown grid key '" + key + "'");
    }
  }
  if (g.alphas.empty()) throw ConfigError("grid needs at least one alpha");
  return g;
}

std::vector<GridCell> grid_search(const ExperimentConfig& config, const GridSpec& grid) {
  if (grid.alphas.empty()) throw ConfigError("grid needs at least one alpha");
  config.validate();
  std::vector<GridCell> cells;
  for (const AlgorithmSpec& base : config.algorithms) {
    const std::vector<double> mus =
        uses_mu(base.algorithm) && !grid.mus.empty() ? grid.mus : std::vector<double>{base.params.mu};
    const std::vector<double> lambdas = uses_lambda(base.algorithm) && !grid.lambdas.empty()
                                            ? grid.lambdas
                                            : std::vector<double>{base.params.lambda};
    const std::size_t first_cell = cells.size();
    for (double alpha : grid.alphas) {
      for (double mu : mus) {
        for (double lambda : lambdas) {
          ExperimentConfig cell_config = config;
          AlgorithmSpec spec = base;
          spec.params.alpha = alpha;
          spec.params.mu = mu;
          spec.params.lambda = lambda;
          cell_config.algorithms = {spec};
          const LearningCurve curve = run_experiment(cell_config);

          GridCell cell{base.label, alpha, mu, lambda};
          std::vector<double> values;
          for (std::uint64_t seed : config.seeds) {
            bool diverged = false;
            double sum = 0.0;
            long count = 0;
            const CurveRow* last = nullptr;
            for (const auto& row : curve) {
              if (row.seed != seed) continue;
              diverged = diverged || row.diverged;
              sum += row.rmspbe;
              ++count;
              last = &row;
            }
            ++cell.n_seeds;
            if (diverged || last == nullptr) {
              ++cell.diverged_seeds;
              continue;
            }
            switch (grid.metric) {
              case SelectionMetric::kFinalRmse: values.push_back(last->rmse); break;
              case SelectionMetric::kFinalRmspbe: values.push_back(last->rmspbe); break;
              case SelectionMetric::kAucRmspbe: values.push_back(sum / static_cast<double>(count)); break;
            }
          }
          if (cell.diverged_seeds > 0) {
            cell.mean = cell.stddev = std::numeric_limits<double>::infinity();
          } else {
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            cell.mean = mean;
            cell.stddev = std::sqrt(var / static_cast<double>(values.size()));
          }
          cells.push_back(cell);
        }
      }
    }
    GridCell* best = nullptr;
    for (std::size_t i = first_cell; i < cells.size(); ++i) {
      if (cells[i].diverged_seeds > 0) continue;
      if (best == nullptr || cells[i].mean < best->mean) best = &cells[i];
    }
    if (best != nullptr) best->best = true;
  }
  return cells;
}

void write_grid_csv(std::ostream& out, const std::vector<GridCell>& cells, SelectionMetric metric) {
  out << kGridHeader << '\n';
  for (const auto& c : cells) {
    out << c.algorithm << ',' << csv::format_double(c.alpha) << ',' << csv::format_double(c.mu)
        << ',' << csv::format_double(c.lambda) << ',' << to_string(metric) << ',' << c.n_seeds << ','
        << c.diverged_seeds << ',';
    if (c.diverged_seeds > 0) {
      out << "diverged,diverged";
    } else {
      out << csv::format_double(c.mean) << ',' << csv::format_double(c.stddev);
    }
    out << ',' << (c.best ? 1 : 0) << '\n';
  }
}

std::vector<TwoStateRow> analyze_two_state() {
  const Environment env = build_two_state();
  const int n = env.mdp.n_states();
  std::vector<TwoStateRow> rows;
  rows.push_back({"SETD", diagnose(env.mdp, env.policies, setd_omega(env.mdp, env.policies))});
  rows.push_back({"ETD", diagnose(env.mdp, env.policies, etd_omega(env.mdp, env.policies))});
  rows.push_back({"TD", diagnose(env.mdp, env.policies, Vector::Ones(n))});
  return rows;
}

void write_analysis_jsonl(std::ostream& out, const std::vector<TwoStateRow>& rows) {
  if (rows.empty()) return;
  nlohmann::json header;
  header["x_star"] = matrix_json(rows.front().diagnostics.x_star);
  header["C"] = matrix_json(rows.front().diagnostics.c);
  header["Lambda"] = matrix_json(rows.front().diagnostics.lambda);
  out << header.dump() << '\n';
  for (const auto& row : rows) {
    nlohmann::json j;
    j["algorithm"] = row.algorithm;
    j["omega"] = vector_json(row.diagnostics.omega);
    j["criterion"] = row.diagnostics.criterion;
    j["x"] = matrix_json(row.diagnostics.x_of_omega);
    j["x_distance"] = row.diagnostics.x_distance;
    out << j.dump() << '\n';
  }
}

}  // namespace setd
