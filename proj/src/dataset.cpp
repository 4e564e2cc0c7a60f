#include "hotdesk/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "config_util.hpp"
#include "hotdesk/agents.hpp"
#include "hotdesk/error.hpp"

namespace hotdesk::dataset {

namespace fs = std::filesystem;
using io::Json;

namespace {

std::string indexed(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%05zu", prefix, i);
  return buf;
}

}  // namespace

std::vector<GameConfig> build_game_set(const std::vector<std::string>& blues,
                                       const std::vector<std::string>& reds,
                                       const std::vector<std::string>& networks,
                                       std::uint64_t master_seed, std::uint64_t network_seed) {
  if (blues.empty()) throw ConfigError("build_game_set: no blue agents");
  if (reds.empty()) throw ConfigError("build_game_set: no red agents");
  if (networks.empty()) throw ConfigError("build_game_set: no networks");
  std::vector<GameConfig> games;
  games.reserve(blues.size() * reds.size() * networks.size());
  for (const auto& b : blues) {
    for (const auto& r : reds) {
      for (const auto& n : networks) {
        const std::size_t i = games.size();
        games.push_back(GameConfig{indexed("g", i), b, r, n, network_seed,
                                   derive_seed(master_seed, {i})});
      }
    }
  }
  return games;
}

std::size_t GameEpisodes::episode_count() const {
  std::size_t n = current.size();
  for (const auto& p : pools) n += p.size();
  return n;
}

GameEpisodes generate_game_episodes(const GameConfig& g, const graph::Network& net,
                                    const graph::CostMatrix& cm, int n_c, int n_p,
                                    const env::EnvConfig& cfg) {
  if (n_c < 1) throw ConfigError("generate_game_episodes: n_c must be at least 1");
  if (n_p < 0) throw ConfigError("generate_game_episodes: n_p must be non-negative");
  auto blue = agents::make_blue(g.blue);
  auto red = agents::make_red(g.red);
  GameEpisodes out;
  auto play = [&](std::uint64_t seed, std::string id) {
    env::RolloutOptions opts{cfg, true, std::move(id)};
    try {
      return env::rollout(net, cm, *blue, *red, seed, opts);
    } catch (const std::exception& e) {
      throw Error("game " + g.game_id + " (" + g.blue + " vs " + g.red + " on " + g.network +
                  "): " + e.what());
    }
  };
  for (int c = 0; c < n_c; ++c) {
    const auto cid = g.game_id + "-c" + std::to_string(c);
    out.current.push_back(play(derive_seed(g.base_seed, {0, std::uint64_t(c)}), cid));
    auto& pool = out.pools.emplace_back();
    for (int j = 0; j < n_p; ++j) {
      pool.push_back(play(derive_seed(g.base_seed, {1, std::uint64_t(c), std::uint64_t(j)}),
                          cid + "-p" + std::to_string(j)));
    }
  }
  return out;
}

std::vector<int> subsample_past(const env::EpisodeTrajectory& traj, int k) {
  if (k < 1) throw ConfigError("subsample_past: k must be at least 1");
  if (traj.steps.empty()) throw Error("subsample_past: trajectory has no recorded steps");
  const int last = traj.final_step;
  std::vector<int> idx;
  if (last + 1 < k) {
    for (int s = 0; s <= last; ++s) idx.push_back(s);
    return idx;
  }
  if (k == 1) return {0};
  for (int i = 0; i < k; ++i) {
    idx.push_back(static_cast<int>(std::lround(static_cast<double>(i) * last / (k - 1))));
  }
  return idx;
}

int pick_current_step(const env::EpisodeTrajectory& traj, Rng& rng) {
  const int t = static_cast<int>(uniform_index(rng, 2));
  return traj.final_step <= 1 ? 0 : t;
}

transport::NodeDistribution sr_ground_truth(const env::EpisodeTrajectory& traj, int t,
                                            double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("sr_ground_truth: gamma must be in (0, 1)");
  if (t < 0 || t > traj.final_step) throw Error("sr_ground_truth: step out of range");
  if (traj.steps.empty()) throw Error("sr_ground_truth: trajectory has no recorded steps");
  const std::size_t n = traj.steps.front().obs.vulnerability.size();
  std::vector<double> raw(n, 0.0);
  if (t == 0) raw[static_cast<std::size_t>(traj.entry)] += 1.0;
  double w = 1.0;
  for (int s = t; s < traj.final_step; ++s, w *= gamma) {
    for (NodeId v : traj.steps[static_cast<std::size_t>(s)].red_compromised) raw[v] += w;
  }
  double total = 0.0;
  for (double x : raw) total += x;
  if (!(total > 0.0)) {
    throw Error("sr_ground_truth: Red compromised no node from step " + std::to_string(t) +
                " of episode " + traj.episode_id);
  }
  for (double& x : raw) x /= total;
  return transport::NodeDistribution(std::move(raw));
}

AssembleResult assemble_samples(const GameConfig& g, const GameEpisodes& episodes,
                                const AssembleOptions& opts) {
  if (opts.n_past < 1) throw ConfigError("assemble_samples: n_past must be at least 1");
  AssembleResult out;
  for (std::size_t c = 0; c < episodes.current.size(); ++c) {
    const auto& cur = episodes.current[c];
    const auto& pool = episodes.pools.at(c);
    if (static_cast<int>(pool.size()) < opts.n_past) {
      throw Error("assemble_samples: game " + g.game_id + " pool has " +
                  std::to_string(pool.size()) + " episodes, n_past is " +
                  std::to_string(opts.n_past));
    }
    if (cur.outcome != env::Outcome::RedWin) {
      ++out.blue_wins_skipped;
      continue;
    }
    Rng rng(derive_seed(g.base_seed, {2, c}));
    ToMSample s;
    s.sample_id = cur.episode_id;
    s.game_id = g.game_id;
    s.network = g.network;
    s.network_seed = g.network_seed;
    s.blue = g.blue;
    s.red = g.red;
    s.current_episode = cur.episode_id;
    s.t = pick_current_step(cur, rng);
    s.hvns = cur.placement.hvns;
    s.entry = cur.entry;
    s.truth_hvn = cur.target;
    s.truth_hvn_index = cur.placement.target_index;

    // Partial Fisher-Yates over the pool.
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int i = 0; i < opts.n_past; ++i) {
      const std::size_t j = i + uniform_index(rng, order.size() - i);
      std::swap(order[i], order[j]);
      const auto& p = pool[order[i]];
      s.past.push_back(PastRef{p.episode_id, subsample_past(p, opts.k)});
    }

    try {
      for (double gamma : opts.gammas) s.truth_sr[io::gamma_key(gamma)] = sr_ground_truth(cur, s.t, gamma);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error&) {
      ++out.sr_excluded;
      continue;
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

Split split_by_agent(const std::vector<ToMSample>& samples, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split: ratio must be in (0, 1)");
  std::set<std::string> unique;
  for (const auto& s : samples) unique.insert(s.red);
  std::vector<std::string> agents(unique.begin(), unique.end());
  Rng rng(seed);
  for (std::size_t i = agents.size(); i > 1; --i) {
    std::swap(agents[i - 1], agents[uniform_index(rng, i)]);
  }
  const auto n_train = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(agents.size())));
  Split out;
  std::set<std::string> train_set(agents.begin(), agents.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.train_agents.assign(train_set.begin(), train_set.end());
  std::set<std::string> val_set(agents.begin() + static_cast<std::ptrdiff_t>(n_train), agents.end());
  out.val_agents.assign(val_set.begin(), val_set.end());
  for (const auto& s : samples) {
    (train_set.count(s.red) ? out.train : out.val).push_back(s.sample_id);
  }
  return out;
}

std::vector<std::string> species_members(const std::string& base, double alpha, int count,
                                         std::uint64_t seed) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(base + ":alpha=" + io::gamma_key(alpha) + ",seed=" + std::to_string(seed) +
                  ",index=" + std::to_string(i));
  }
  return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Config

namespace {

RedSource red_source_from_json(const Json& j, const std::string& path) {
  config::require_object(j, path);
  config::reject_unknown(j, path, {"ids", "species", "alpha", "count"});
  RedSource r;
  r.ids = config::get_strings(j, path, "ids", {});
  r.species = config::get_string(j, path, "species", "");
  r.alpha = config::get_double(j, path, "alpha", 0.01);
  r.count = static_cast<int>(config::get_int(j, path, "count", 0, 0));
  if (r.count > 0 && r.species.empty()) throw ConfigError(path + ".species: required when count > 0");
  if (!(r.alpha > 0.0)) throw ConfigError(path + ".alpha: must be positive");
  return r;
}

Json to_json(const RedSource& r) {
  return Json{{"alpha", r.alpha}, {"count", r.count}, {"ids", r.ids}, {"species", r.species}};
}

Json config_json(const DatasetConfig& c) {
  return Json{{"blues", c.blues},
              {"gammas", c.assemble.gammas},
              {"holdout", to_json(c.holdout)},
              {"k", c.assemble.k},
              {"max_steps", c.env.max_steps},
              {"n_c", c.n_c},
              {"n_p", c.n_p},
              {"n_past", c.assemble.n_past},
              {"network_seed", c.network_seed},
              {"networks", c.networks},
              {"reds", to_json(c.reds)},
              {"seed", c.master_seed},
              {"split_ratio", c.split_ratio}};
}

}  // namespace

DatasetConfig dataset_config_from_json(const Json& j, const std::string& path) {
  config::require_object(j, path);
  config::reject_unknown(j, path,
                         {"blues", "reds", "holdout", "networks", "network_seed", "n_c", "n_p",
                          "n_past", "k", "gammas", "split_ratio", "seed", "jobs", "max_steps"});
  DatasetConfig c;
  c.blues = config::get_strings(j, path, "blues", c.blues);
  if (j.contains("reds")) c.reds = red_source_from_json(j.at("reds"), path + ".reds");
  if (j.contains("holdout")) c.holdout = red_source_from_json(j.at("holdout"), path + ".holdout");
  c.networks = config::get_strings(j, path, "networks", c.networks);
  c.network_seed = config::get_seed(j, path, "network_seed", c.network_seed);
  c.n_c = static_cast<int>(config::get_int(j, path, "n_c", c.n_c, 1));
  c.n_p = static_cast<int>(config::get_int(j, path, "n_p", c.n_p, 0));
  c.assemble.n_past = static_cast<int>(config::get_int(j, path, "n_past", c.assemble.n_past, 1));
  c.assemble.k = static_cast<int>(config::get_int(j, path, "k", c.assemble.k, 1));
  c.assemble.gammas = config::get_doubles(j, path, "gammas", c.assemble.gammas);
  for (double g : c.assemble.gammas) {
    if (!(g > 0.0 && g < 1.0)) throw ConfigError(path + ".gammas: every gamma must be in (0, 1)");
  }
  c.split_ratio = config::get_double(j, path, "split_ratio", c.split_ratio);
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) {
    throw ConfigError(path + ".split_ratio: must be in (0, 1)");
  }
  c.master_seed = config::get_seed(j, path, "seed", c.master_seed);
  c.jobs = static_cast<int>(config::get_int(j, path, "jobs", c.jobs, 1));
  c.env.max_steps = static_cast<int>(config::get_int(j, path, "max_steps", c.env.max_steps, 1));
  if (c.assemble.n_past > c.n_p) {
    throw ConfigError(path + ".n_past: exceeds n_p (" + std::to_string(c.n_p) + ")");
  }
  for (const auto& b : c.blues) agents::parse_blue_id(b);
  for (const auto& r : c.reds.ids) agents::parse_red_id(r);
  for (const auto& r : c.holdout.ids) agents::parse_red_id(r);
  for (const auto& n : c.networks) graph::canonical_topology_id(n);
  return c;
}

// ---------------------------------------------------------------------------
// Serialization

Json to_json(const ToMSample& s) {
  Json past = Json::array();
  for (const auto& p : s.past) past.push_back(Json{{"episode", p.episode_id}, {"steps", p.steps}});
  Json sr = Json::object();
  for (const auto& [k, d] : s.truth_sr) sr[k] = d.mass;
  return Json{{"blue", s.blue},
              {"current", Json{{"episode", s.current_episode}, {"t", s.t}}},
              {"entry", s.entry},
              {"game_id", s.game_id},
              {"hvns", s.hvns},
              {"network", s.network},
              {"network_seed", s.network_seed},
              {"past", past},
              {"red", s.red},
              {"sample_id", s.sample_id},
              {"truth_hvn", s.truth_hvn},
              {"truth_hvn_index", s.truth_hvn_index},
              {"truth_sr", sr}};
}

ToMSample sample_from_json(const Json& j) {
  try {
    ToMSample s;
    s.sample_id = j.at("sample_id").get<std::string>();
    s.game_id = j.at("game_id").get<std::string>();
    s.network = j.at("network").get<std::string>();
    s.network_seed = j.at("network_seed").get<std::uint64_t>();
    s.blue = j.at("blue").get<std::string>();
    s.red = j.at("red").get<std::string>();
    s.current_episode = j.at("current").at("episode").get<std::string>();
    s.t = j.at("current").at("t").get<int>();
    for (const auto& p : j.at("past")) {
      s.past.push_back(PastRef{p.at("episode").get<std::string>(), p.at("steps").get<std::vector<int>>()});
    }
    s.hvns = j.at("hvns").get<std::vector<int>>();
    s.entry = j.at("entry").get<int>();
    s.truth_hvn = j.at("truth_hvn").get<int>();
    s.truth_hvn_index = j.at("truth_hvn_index").get<int>();
    for (auto it = j.at("truth_sr").begin(); it != j.at("truth_sr").end(); ++it) {
      s.truth_sr[it.key()] = transport::NodeDistribution(it.value().get<std::vector<double>>());
    }
    return s;
  } catch (const Json::exception& e) {
    throw Error(std::string("manifest sample: ") + e.what());
  }
}

std::vector<ToMSample> read_manifest_samples(const fs::path& manifest, bool include_holdout) {
  const Json m = io::read_json(manifest);
  if (m.value("schema_version", 0) != io::kSchemaVersion) {
    throw Error("manifest '" + manifest.string() + "': unsupported schema_version");
  }
  std::vector<ToMSample> out;
  for (const auto& s : m.at("samples")) out.push_back(sample_from_json(s));
  if (include_holdout && m.contains("holdout")) {
    for (const auto& s : m.at("holdout")) out.push_back(sample_from_json(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

struct Topology {
  graph::Network net;
  graph::CostMatrix cm;
};

struct GameOutput {
  AssembleResult assembled;
  int current = 0;
  int pool = 0;
  int red_wins = 0;
};

std::vector<std::string> red_agents(const RedSource& src, std::uint64_t seed) {
  std::vector<std::string> out = src.ids;
  if (src.count > 0) {
    auto members = species_members(src.species, src.alpha, src.count, seed);
    out.insert(out.end(), members.begin(), members.end());
  }
  return out;
}

std::vector<GameOutput> run_games(const std::vector<GameConfig>& games,
                                  const std::unordered_map<std::string, Topology>& topologies,
                                  const DatasetConfig& cfg, const fs::path& episode_dir) {
  std::vector<GameOutput> results(games.size());
  parallel_for(games.size(), cfg.jobs, [&](std::size_t i) {
    const auto& g = games[i];
    const auto& topo = topologies.at(g.network);
    GameEpisodes eps = generate_game_episodes(g, topo.net, topo.cm, cfg.n_c, cfg.n_p, cfg.env);
    auto write = [&](const env::EpisodeTrajectory& t) {
      io::write_trajectory_file(episode_dir / (t.episode_id + ".jsonl"), t);
    };
    GameOutput& r = results[i];
    for (const auto& t : eps.current) {
      write(t);
      ++r.current;
      r.red_wins += t.outcome == env::Outcome::RedWin;
    }
    for (const auto& pool : eps.pools) {
      for (const auto& t : pool) {
        write(t);
        ++r.pool;
      }
    }
    r.assembled = assemble_samples(g, eps, cfg.assemble);
  });
  return results;
}

}  // namespace

DatasetSummary build_dataset(const DatasetConfig& cfg, const fs::path& out_dir) {
  const auto reds = red_agents(cfg.reds, derive_seed(cfg.master_seed, {0x7265}));
  const auto holdout_reds = red_agents(cfg.holdout, derive_seed(cfg.master_seed, {0x686F}));

  std::vector<std::string> networks;
  std::unordered_map<std::string, Topology> topologies;
  for (const auto& n : cfg.networks) {
    const std::string id = graph::canonical_topology_id(n);
    networks.push_back(id);
    if (!topologies.count(id)) {
      auto net = graph::generate_network(id, cfg.network_seed);
      auto cm = graph::all_pairs_shortest_paths(net);
      topologies.emplace(id, Topology{std::move(net), std::move(cm)});
    }
  }

  const auto games = build_game_set(cfg.blues, reds, networks, cfg.master_seed, cfg.network_seed);
  std::vector<GameConfig> holdout_games;
  if (!holdout_reds.empty()) {
    holdout_games = build_game_set(cfg.blues, holdout_reds, networks,
                                   derive_seed(cfg.master_seed, {0x686F}), cfg.network_seed);
    for (std::size_t i = 0; i < holdout_games.size(); ++i) holdout_games[i].game_id = indexed("h", i);
  }

  const fs::path episode_dir = out_dir / "episodes";
  fs::create_directories(episode_dir);
  const auto main_results = run_games(games, topologies, cfg, episode_dir);
  const auto holdout_results = run_games(holdout_games, topologies, cfg, episode_dir);

  DatasetSummary sum;
  std::vector<ToMSample> samples, holdout;
  auto collect = [&](const std::vector<GameOutput>& results, std::vector<ToMSample>& into) {
    for (const auto& r : results) {
      sum.current_episodes += r.current;
      sum.pool_episodes += r.pool;
      sum.red_wins += r.red_wins;
      sum.sr_excluded += r.assembled.sr_excluded;
      into.insert(into.end(), r.assembled.samples.begin(), r.assembled.samples.end());
    }
  };
  collect(main_results, samples);
  collect(holdout_results, holdout);
  sum.games = static_cast<int>(games.size() + holdout_games.size());
  sum.episodes = sum.current_episodes + sum.pool_episodes;
  sum.samples = static_cast<int>(samples.size());
  sum.holdout = static_cast<int>(holdout.size());

  std::set<std::string> past_ids;
  std::size_t past_refs = 0;
  for (const auto* set : {&samples, &holdout}) {
    for (const auto& s : *set) {
      for (const auto& p : s.past) {
        past_ids.insert(p.episode_id);
        ++past_refs;
      }
    }
  }
  sum.pools_disjoint = past_ids.size() == past_refs;
  if (!sum.pools_disjoint) throw Error("build_dataset: past episodes shared between samples");

  Split split;
  if (!samples.empty()) split = split_by_agent(samples, cfg.split_ratio, derive_seed(cfg.master_seed, {0x73}));
  const std::set<std::string> train(split.train.begin(), split.train.end());
  sum.train = static_cast<int>(split.train.size());
  sum.val = static_cast<int>(split.val.size());

  Json sample_json = Json::array();
  for (const auto& s : samples) {
    Json j = to_json(s);
    j["split"] = train.count(s.sample_id) ? "train" : "val";
    sample_json.push_back(std::move(j));
  }
  Json holdout_json = Json::array();
  for (const auto& s : holdout) {
    Json j = to_json(s);
    j["split"] = "test";
    holdout_json.push_back(std::move(j));
  }
  Json manifest{{"config", config_json(cfg)},
                {"counts", Json{{"current_episodes", sum.current_episodes},
                                {"episodes", sum.episodes},
                                {"games", sum.games},
                                {"holdout", sum.holdout},
                                {"pool_episodes", sum.pool_episodes},
                                {"red_wins", sum.red_wins},
                                {"samples", sum.samples},
                                {"sr_excluded", sum.sr_excluded},
                                {"train", sum.train},
                                {"val", sum.val}}},
                {"episode_dir", "episodes"},
                {"holdout", holdout_json},
                {"pools_disjoint", sum.pools_disjoint},
                {"samples", sample_json},
                {"schema_version", io::kSchemaVersion},
                {"split", Json{{"train_agents", split.train_agents}, {"val_agents", split.val_agents}}}};
  io::write_json(out_dir / "manifest.json", manifest);
  return sum;
}

}  // namespace hotdesk::dataset
