#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hotdesk/env.hpp"
#include "hotdesk/io.hpp"
#include "hotdesk/transport.hpp"

namespace hotdesk::dataset {

using graph::NodeId;

struct GameConfig {
  std::string game_id;
  std::string blue;     // registry id
  std::string red;      // registry id
  std::string network;  // topology id
  std::uint64_t network_seed = 0;
  std::uint64_t base_seed = 0;
};

/// blues x reds x networks, blue-major. Throws ConfigError if any factor is
/// empty. Game i gets base_seed = derive_seed(master_seed, {i}).
std::vector<GameConfig> build_game_set(const std::vector<std::string>& blues,
                                       const std::vector<std::string>& reds,
                                       const std::vector<std::string>& networks,
                                       std::uint64_t master_seed, std::uint64_t network_seed = 0);

struct GameEpisodes {
  std::vector<env::EpisodeTrajectory> current;
  /// pools[c] belongs to current[c]; pools never share an episode.
  std::vector<std::vector<env::EpisodeTrajectory>> pools;

  std::size_t episode_count() const;
};

/// n_c current episodes plus n_p pool episodes for each of them.
GameEpisodes generate_game_episodes(const GameConfig& g, const graph::Network& net,
                                    const graph::CostMatrix& cm, int n_c, int n_p,
                                    const env::EnvConfig& cfg = {});

/// Step indices round(i * final_step / (k - 1)) for i < k; every step when
/// the episode is shorter than k.
std::vector<int> subsample_past(const env::EpisodeTrajectory& traj, int k);

/// Uniform over {0, 1}; 0 when the episode has fewer than two transitions.
int pick_current_step(const env::EpisodeTrajectory& traj, Rng& rng);

/// Normalized discounted occupancy of the nodes Red newly compromised from
/// step t on. The entry node counts as occupied at step 0. Throws Error when
/// nothing was compromised from t on.
transport::NodeDistribution sr_ground_truth(const env::EpisodeTrajectory& traj, int t, double gamma);

struct PastRef {
  std::string episode_id;
  std::vector<int> steps;
};

struct ToMSample {
  std::string sample_id;
  std::string game_id;
  std::string network;
  std::uint64_t network_seed = 0;
  std::string blue;
  std::string red;
  std::string current_episode;
  int t = 0;  // current prefix is steps 0..t
  std::vector<PastRef> past;
  std::vector<NodeId> hvns;
  NodeId entry = -1;
  NodeId truth_hvn = -1;
  int truth_hvn_index = -1;
  std::map<std::string, transport::NodeDistribution> truth_sr;  // keyed by io::gamma_key
};

struct AssembleOptions {
  int n_past = 4;
  int k = 5;
  std::vector<double> gammas{0.5, 0.95, 0.999};
};

struct AssembleResult {
  std::vector<ToMSample> samples;
  int blue_wins_skipped = 0;
  int sr_excluded = 0;
};

/// One sample per current episode won by Red; past references come from the
/// episode's own pool only. Throws Error when n_past exceeds the pool.
AssembleResult assemble_samples(const GameConfig& g, const GameEpisodes& episodes,
                                const AssembleOptions& opts);

struct Split {
  std::vector<std::string> train;  // sample ids
  std::vector<std::string> val;
  std::vector<std::string> train_agents;
  std::vector<std::string> val_agents;
};

/// Red-agent-level split: agents are shuffled with `seed` and the first
/// round(ratio * agents) go to train. Throws ConfigError unless 0 < ratio < 1.
Split split_by_agent(const std::vector<ToMSample>& samples, double ratio, std::uint64_t seed);

/// Expands a species into member ids
/// "<base>:alpha=A,seed=S,index=i" for i < count.
std::vector<std::string> species_members(const std::string& base, double alpha, int count,
                                         std::uint64_t seed);

struct RedSource {
  std::vector<std::string> ids;  // explicit agents
  std::string species;           // base id, e.g. red.hvt_pref_sp
  double alpha = 0.01;
  int count = 0;
};

struct DatasetConfig {
  std::vector<std::string> blues{"blue.msn_d"};
  RedSource reds;
  RedSource holdout;  // count 0 disables the hold-out manifest
  std::vector<std::string> networks{"tree30"};
  std::uint64_t network_seed = 0;
  int n_c = 3;
  int n_p = 8;
  AssembleOptions assemble;
  double split_ratio = 0.75;
  std::uint64_t master_seed = 0;
  int jobs = 1;
  env::EnvConfig env;
};

/// Parses the "dataset" section of a config file. Unknown keys and type
/// errors raise ConfigError naming the field path.
DatasetConfig dataset_config_from_json(const io::Json& j, const std::string& path = "dataset");

struct DatasetSummary {
  int games = 0;
  int episodes = 0;
  int current_episodes = 0;
  int pool_episodes = 0;
  int red_wins = 0;
  int samples = 0;
  int train = 0;
  int val = 0;
  int holdout = 0;
  int sr_excluded = 0;
  bool pools_disjoint = false;
};

/// Full pipeline: episodes/*.jsonl plus manifest.json under out_dir.
DatasetSummary build_dataset(const DatasetConfig& cfg, const std::filesystem::path& out_dir);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The exception of the
/// lowest failing index is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

io::Json to_json(const ToMSample& s);
ToMSample sample_from_json(const io::Json& j);

/// Samples of a manifest (the hold-out section is included when asked).
std::vector<ToMSample> read_manifest_samples(const std::filesystem::path& manifest,
                                             bool include_holdout = false);

}  // namespace hotdesk::dataset
