#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "setd/rng.hpp"
#include "setd/types.hpp"

namespace setd {

// sequential: consecutive samples chain (next_state(t) == state(t+1)
// inside an episode). iid: each sample's state is drawn independently from
// the behavior chain's stationary/visitation distribution.
enum class SamplingMode { kSequential, kIid };

std::string_view to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(std::string_view text);

struct Environment {
  TabularMDP mdp;
  PolicyPair policies;
};

struct DatasetSpec {
  TabularMDP mdp;
  PolicyPair policies;
  long horizon = 0;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::kSequential;
};

using Dataset = std::vector<TransitionSample>;

// Two states, actions left (0) / right (1) moving deterministically to state
// 0 / 1; zero rewards; gamma 0.9; features [1, 2]. Behavior is uniform,
// target always goes right.
Environment build_two_state();

// 14-state chain s0..s13 with s0 absorbing, one action, gamma 1, episodes
// start at s13. From s_i (i >= 2) step to s_{i-1} or s_{i-2} with equal
// probability and reward -3; s1 -> s0 pays -2. Four hat features anchored
// at 13, 26/3, 13/3, 0.
Environment build_boyan();

// 7-state star. Action dashed (0) goes uniformly to states 0..5, solid (1)
// goes to state 6. Zero rewards, gamma 0.99, eight features. Behavior takes
// dashed w.p. 6/7; the target always takes solid.
Environment build_baird();

// Initial weights conventionally used with build_baird().
Vector baird_initial_theta();

// Dense random MDP: P(s'|s,a) proportional to U[0,1] + 1e-5, rewards
// U[0,1], policies and start distribution drawn the same way and
// normalized, d-1 uniform features plus a constant one, gamma 0.95.
Environment build_random_mdp(int n_states, int n_actions, int d, std::uint64_t seed);

// Incremental version of generate_dataset: yields the same samples in the
// same order, one at a time, without storing the stream.
class SampleStream {
 public:
  SampleStream(const TabularMDP& mdp, const PolicyPair& policies, std::uint64_t seed,
               SamplingMode mode);

  // Overwrites `out` with the next sample. Reuses out's feature buffers.
  void next(TransitionSample& out);

 private:
  const TabularMDP* mdp_;
  const PolicyPair* policies_;
  SamplingMode mode_;
  Rng rng_;
  Vector state_dist_;
  StateIndex state_ = 0;
};

// Samples a transition stream. Throws CoverageError or, in iid mode,
// NoStationaryDistributionError.
Dataset generate_dataset(const DatasetSpec& spec);

// CSV export with header step,state,action,reward,next_state,rho,episode_end
// plus a `<path>.meta` sidecar of key=value lines describing the spec.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data,
                       const DatasetSpec& spec, std::string_view env_name);

// Rebuilds samples from a CSV written by write_dataset_csv; features come from
// `mdp`. Throws ConfigError on malformed input.
Dataset read_dataset_csv(const std::filesystem::path& path, const TabularMDP& mdp);

}  // namespace setd
