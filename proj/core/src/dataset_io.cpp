#include <fstream>
#include <sstream>
#include <string>

#include "setd/csv.hpp"
#include "setd/envs.hpp"

namespace setd {
namespace {

constexpr std::string_view kDatasetHeader = "step,state,action,reward,next_state,rho,episode_end";

}  // namespace

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data,
                       const DatasetSpec& spec, std::string_view env_name) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << kDatasetHeader << '\n';
  for (std::size_t t = 0; t < data.size(); ++t) {
    const TransitionSample& s = data[t];
    out << t << ',' << s.state << ',' << s.action << ',' << csv::format_double(s.reward) << ','
        << s.next_state << ',' << csv::format_double(s.rho) << ',' << (s.episode_end ? 1 : 0)
        << '\n';
  }

  std::ofstream meta(path.string() + ".meta");
  if (!meta) throw ConfigError("cannot open metadata sidecar for " + path.string());
  meta << "env = " << env_name << '\n'
       << "n_states = " << spec.mdp.n_states() << '\n'
       << "n_actions = " << spec.mdp.n_actions() << '\n'
       << "n_features = " << spec.mdp.n_features() << '\n'
       << "gamma = " << csv::format_double(spec.mdp.gamma()) << '\n'
       << "horizon = " << spec.horizon << '\n'
       << "seed = " << spec.seed << '\n'
       << "mode = " << to_string(spec.mode) << '\n';
}

Dataset read_dataset_csv(const std::filesystem::path& path, const TabularMDP& mdp) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || csv::trim(line) != kDatasetHeader) {
    throw ConfigError(path.string() + ": unexpected dataset header");
  }
  const FeatureVector zero = FeatureVector::Zero(mdp.n_features());
  Dataset out;
  long expected_step = 0;
  while (std::getline(in, line)) {
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != 7) throw ConfigError(path.string() + ": expected 7 fields: " + line);
    TransitionSample s;
    if (csv::parse_long(fields[0]) != expected_step++) {
      throw ConfigError(path.string() + ": steps must be consecutive from 0");
    }
    s.state = static_cast<StateIndex>(csv::parse_long(fields[1]));
    s.action = static_cast<ActionIndex>(csv::parse_long(fields[2]));
    s.reward = csv::parse_double(fields[3]);
    s.next_state = static_cast<StateIndex>(csv::parse_long(fields[4]));
    s.rho = csv::parse_double(fields[5]);
    s.episode_end = csv::parse_bool01(fields[6]);
    if (s.state < 0 || s.state >= mdp.n_states() || s.next_state < 0 ||
        s.next_state >= mdp.n_states() || s.action < 0 || s.action >= mdp.n_actions()) {
      throw ConfigError(path.string() + ": index out of range: " + line);
    }
    s.phi = mdp.feature(s.state);
    s.phi_next = s.episode_end ? zero : mdp.feature(s.next_state);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace setd
