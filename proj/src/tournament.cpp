#include <algorithm>
#include <cstdio>
#include <map>

#include "config_util.hpp"
#include "hotdesk/agents.hpp"
#include "hotdesk/error.hpp"
#include "hotdesk/eval.hpp"

namespace hotdesk::eval {

namespace fs = std::filesystem;
using io::Json;

TournamentConfig tournament_config_from_json(const Json& j, const std::string& path) {
  config::require_object(j, path);
  config::reject_unknown(j, path,
                         {"blues", "reds", "networks", "network_seed", "episodes_per_cell", "seed",
                          "jobs", "max_steps"});
  TournamentConfig c;
  c.blues = config::get_strings(j, path, "blues", agents::blue_ids());
  std::vector<std::string> default_reds;
  for (const auto& r : agents::red_ids()) default_reds.push_back(r + ":alpha=0.01");
  c.reds = config::get_strings(j, path, "reds", default_reds);
  c.networks = config::get_strings(j, path, "networks", c.networks);
  c.network_seed = config::get_seed(j, path, "network_seed", c.network_seed);
  c.episodes_per_cell =
      static_cast<int>(config::get_int(j, path, "episodes_per_cell", c.episodes_per_cell, 0));
  c.seed = config::get_seed(j, path, "seed", c.seed);
  c.jobs = static_cast<int>(config::get_int(j, path, "jobs", c.jobs, 1));
  c.env.max_steps = static_cast<int>(config::get_int(j, path, "max_steps", c.env.max_steps, 1));
  for (std::size_t i = 0; i < c.blues.size(); ++i) agents::parse_blue_id(c.blues[i]);
  for (std::size_t i = 0; i < c.reds.size(); ++i) agents::parse_red_id(c.reds[i]);
  for (std::size_t i = 0; i < c.networks.size(); ++i) {
    c.networks[i] = graph::canonical_topology_id(c.networks[i]);
  }
  return c;
}

const TournamentCell& TournamentTable::at(const std::string& blue, const std::string& red,
                                          const std::string& network) const {
  for (const auto& c : cells) {
    if (c.blue == blue && c.red == red && c.network == network) return c;
  }
  throw Error("tournament table has no cell " + blue + " / " + red + " / " + network);
}

TournamentTable TournamentTable::averaged() const {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<const TournamentCell*>> groups;
  for (const auto& c : cells) {
    auto key = std::make_pair(c.blue, c.red);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&c);
  }
  TournamentTable out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    TournamentCell a{key.first, key.second, "average"};
    for (const auto* c : g) {
      a.episodes += c->episodes;
      a.blue_wins += c->blue_wins;
      a.mean_blue_reward += c->mean_blue_reward / g.size();
      a.mean_duration += c->mean_duration / g.size();
    }
    out.cells.push_back(a);
  }
  return out;
}

double TournamentTable::blue_mean_win_rate(const std::string& blue) const {
  double total = 0.0;
  int n = 0;
  for (const auto& c : cells) {
    if (c.blue == blue) {
      total += c.blue_win_rate();
      ++n;
    }
  }
  if (n == 0) throw Error("tournament table has no cells for " + blue);
  return total / n;
}

TournamentTable run_tournament(const TournamentConfig& cfg) {
  if (cfg.blues.empty()) throw ConfigError("run_tournament: no blue agents");
  if (cfg.reds.empty()) throw ConfigError("run_tournament: no red agents");
  if (cfg.networks.empty()) throw ConfigError("run_tournament: no networks");

  struct Topo {
    graph::Network net;
    graph::CostMatrix cm;
  };
  std::vector<Topo> topos;
  for (const auto& n : cfg.networks) {
    auto net = graph::generate_network(n, cfg.network_seed);
    auto cm = graph::all_pairs_shortest_paths(net);
    topos.push_back(Topo{std::move(net), std::move(cm)});
  }

  const std::size_t nb = cfg.blues.size(), nr = cfg.reds.size();
  TournamentTable table;
  table.cells.resize(topos.size() * nb * nr);
  dataset::parallel_for(table.cells.size(), cfg.jobs, [&](std::size_t i) {
    const std::size_t ni = i / (nb * nr), bi = (i / nr) % nb, ri = i % nr;
    const auto& topo = topos[ni];
    auto blue = agents::make_blue(cfg.blues[bi]);
    auto red = agents::make_red(cfg.reds[ri]);
    TournamentCell& cell = table.cells[i];
    cell.blue = cfg.blues[bi];
    cell.red = cfg.reds[ri];
    cell.network = cfg.networks[ni];
    env::RolloutOptions opts{cfg.env, false, ""};
    double reward = 0.0, duration = 0.0;
    for (int e = 0; e < cfg.episodes_per_cell; ++e) {
      const auto seed = derive_seed(cfg.seed, {ni, ri, static_cast<std::uint64_t>(e)});
      const auto t = env::rollout(topo.net, topo.cm, *blue, *red, seed, opts);
      ++cell.episodes;
      cell.blue_wins += t.outcome == env::Outcome::BlueWin;
      reward += t.total_blue_reward;
      duration += t.final_step;
    }
    if (cell.episodes > 0) {
      cell.mean_blue_reward = reward / cell.episodes;
      cell.mean_duration = duration / cell.episodes;
    }
  });
  return table;
}

std::string tournament_csv(const TournamentTable& table, const std::string& network) {
  std::string out = "blue,red,episodes,blue_wins,blue_win_rate,mean_blue_reward,mean_duration\n";
  char buf[512];
  for (const auto& c : table.cells) {
    if (c.network != network) continue;
    std::snprintf(buf, sizeof buf, "%s,\"%s\",%d,%d,%.4f,%.4f,%.2f\n", c.blue.c_str(), c.red.c_str(),
                  c.episodes, c.blue_wins, c.blue_win_rate(), c.mean_blue_reward, c.mean_duration);
    out += buf;
  }
  return out;
}

void write_tournament_reports(const TournamentTable& table, const fs::path& dir) {
  std::vector<std::string> networks;
  for (const auto& c : table.cells) {
    if (std::find(networks.begin(), networks.end(), c.network) == networks.end()) {
      networks.push_back(c.network);
    }
  }
  Json cells = Json::array();
  for (const auto& n : networks) io::write_text(dir / (n + ".csv"), tournament_csv(table, n));
  const auto avg = table.averaged();
  io::write_text(dir / "average.csv", tournament_csv(avg, "average"));
  for (const auto* t : {&table, &avg}) {
    for (const auto& c : t->cells) {
      cells.push_back(Json{{"blue", c.blue},
                           {"blue_win_rate", c.blue_win_rate()},
                           {"blue_wins", c.blue_wins},
                           {"episodes", c.episodes},
                           {"mean_blue_reward", c.mean_blue_reward},
                           {"mean_duration", c.mean_duration},
                           {"network", c.network},
                           {"red", c.red}});
    }
  }
  io::write_json(dir / "tournament.json", Json{{"cells", cells}, {"schema_version", io::kSchemaVersion}});
}

}  // namespace hotdesk::eval
