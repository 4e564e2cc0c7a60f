#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "hotdesk/agents.hpp"
#include "hotdesk/dataset.hpp"
#include "hotdesk/error.hpp"
#include "hotdesk/eval.hpp"
#include "hotdesk/io.hpp"
#include "hotdesk/sinkhorn.hpp"
#include "hotdesk/transport.hpp"

namespace hotdesk::cli {

namespace fs = std::filesystem;
using io::Json;

std::string default_output_dir() {
  const char* v = std::getenv("HOTDESK_OUTPUT_DIR");
  return v && *v ? v : ".";
}

int default_jobs() {
  const char* v = std::getenv("HOTDESK_JOBS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw ConfigError("HOTDESK_JOBS must be a positive integer");
  return static_cast<int>(n);
}

namespace {

fs::path out_dir(const std::string& flag) { return flag.empty() ? fs::path(default_output_dir()) : fs::path(flag); }

/// Section of a versioned config file.
Json config_section(const std::string& path, const char* section) {
  const Json j = io::read_json(path);
  if (!j.is_object()) throw ConfigError("config: expected an object");
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer()) {
    throw ConfigError("config.schema_version: required integer");
  }
  if (j.at("schema_version").get<int>() != io::kSchemaVersion) {
    throw ConfigError("config.schema_version: unsupported version " + j.at("schema_version").dump());
  }
  if (!j.contains(section)) throw ConfigError(std::string("config.") + section + ": section missing");
  return j.at(section);
}

}  // namespace

int cmd_network(const NetworkArgs& a) {
  const auto net = graph::generate_network(a.topology, a.seed);
  const auto cm = graph::all_pairs_shortest_paths(net);
  const fs::path path = a.out.empty()
                            ? out_dir("") / ("network_" + net.name() + "_" + std::to_string(a.seed) + ".json")
                            : fs::path(a.out);
  io::write_json(path, io::to_json(net));
  std::printf("topology=%s nodes=%d edges=%zu branches=%d leaves=%zu diameter=%d entry=%d\n",
              net.name().c_str(), net.node_count(), net.edges().size(), net.branch_count(),
              net.leaves().size(), cm.diameter, net.entry());
  std::printf("wrote %s\n", path.string().c_str());
  return 0;
}

int cmd_simulate(const SimulateArgs& a) {
  if (a.episodes < 0) throw ConfigError("--episodes must be non-negative");
  auto blue = agents::make_blue(a.blue);
  auto red = agents::make_red(a.red);
  const auto net = graph::generate_network(a.network, a.network_seed);
  const auto cm = graph::all_pairs_shortest_paths(net);
  const fs::path dir = out_dir(a.out);
  env::RolloutOptions opts;
  opts.cfg.max_steps = a.max_steps;

  int blue_wins = 0;
  double reward = 0.0, duration = 0.0;
  Json episodes = Json::array();
  for (int e = 0; e < a.episodes; ++e) {
    char id[32];
    std::snprintf(id, sizeof id, "ep-%05d", e);
    opts.episode_id = id;
    const auto t = env::rollout(net, cm, *blue, *red, derive_seed(a.seed, {static_cast<std::uint64_t>(e)}), opts);
    io::write_trajectory_file(dir / "episodes" / (std::string(id) + ".jsonl"), t);
    blue_wins += t.outcome == env::Outcome::BlueWin;
    reward += t.total_blue_reward;
    duration += t.final_step;
    episodes.push_back(Json{{"episode_id", t.episode_id}, {"final_step", t.final_step},
                            {"outcome", std::string(env::to_string(t.outcome))},
                            {"target", t.target}, {"total_blue_reward", t.total_blue_reward}});
  }
  const double n = a.episodes;
  Json summary{{"blue", blue->id()},
               {"blue_win_rate", a.episodes ? Json(blue_wins / n) : Json(nullptr)},
               {"episodes", a.episodes},
               {"mean_blue_reward", a.episodes ? Json(reward / n) : Json(nullptr)},
               {"mean_duration", a.episodes ? Json(duration / n) : Json(nullptr)},
               {"network", net.name()},
               {"network_seed", a.network_seed},
               {"per_episode", episodes},
               {"red", red->id()},
               {"schema_version", io::kSchemaVersion},
               {"seed", a.seed}};
  io::write_json(dir / "summary.json", summary);
  if (a.episodes) {
    std::printf("episodes=%d blue_win_rate=%.4f mean_duration=%.2f mean_blue_reward=%.4f\n", a.episodes,
                blue_wins / n, duration / n, reward / n);
  } else {
    std::printf("episodes=0\n");
  }
  return 0;
}

int cmd_tournament(const TournamentArgs& a) {
  const Json section = config_section(a.config, "tournament");
  if (!a.seed && !section.contains("seed")) {
    throw ConfigError("config.tournament.seed: required (or pass --seed)");
  }
  auto cfg = eval::tournament_config_from_json(section, "config.tournament");
  if (a.episodes) cfg.episodes_per_cell = *a.episodes;
  if (a.seed) cfg.seed = *a.seed;
  cfg.jobs = a.jobs ? *a.jobs : (section.contains("jobs") ? cfg.jobs : default_jobs());
  const auto table = eval::run_tournament(cfg);
  const fs::path dir = out_dir(a.out);
  eval::write_tournament_reports(table, dir);
  std::cout << eval::tournament_csv(table.averaged(), "average");
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int cmd_dataset(const DatasetArgs& a) {
  const Json section = config_section(a.config, "dataset");
  if (!a.seed && !section.contains("seed")) {
    throw ConfigError("config.dataset.seed: required (or pass --seed)");
  }
  auto cfg = dataset::dataset_config_from_json(section, "config.dataset");
  if (a.seed) cfg.master_seed = *a.seed;
  cfg.jobs = a.jobs ? *a.jobs : (section.contains("jobs") ? cfg.jobs : default_jobs());
  const fs::path dir = out_dir(a.out);
  const auto s = dataset::build_dataset(cfg, dir);
  std::printf("games=%d episodes=%d current=%d pool=%d red_wins=%d samples=%d train=%d val=%d holdout=%d "
              "sr_excluded=%d\n",
              s.games, s.episodes, s.current_episodes, s.pool_episodes, s.red_wins, s.samples, s.train,
              s.val, s.holdout, s.sr_excluded);
  std::printf("past pools disjoint: %s\n", s.pools_disjoint ? "yes" : "no");
  std::printf("wrote %s\n", (dir / "manifest.json").string().c_str());
  return 0;
}

int cmd_score(const ScoreArgs& a) {
  const auto preds = io::read_predictions(a.predictions);
  const auto samples = dataset::read_manifest_samples(a.manifest, a.include_holdout);
  eval::ScoreOptions opts;
  opts.sr.gammas = a.gammas;
  opts.sr.floor = a.floor;
  if (!(a.floor >= 0.0 && a.floor <= 1.0)) throw ConfigError("--floor must be in [0, 1]");
  opts.sr.weightings.clear();
  for (double c : a.coefficients) {
    if (!(c >= -1.0 && c <= 1.0)) throw ConfigError("--coefficients must lie in [-1, 1]");
    const std::string name = c == -1.0 ? "neg" : c == 0.0 ? "neutral" : c == 1.0 ? "pos" : io::gamma_key(c);
    opts.sr.weightings.push_back({name, c});
  }
  if (a.remoteness == "entry_or_target") {
    opts.sr.remoteness = eval::Remoteness::EntryOrTarget;
  } else if (a.remoteness == "entry") {
    opts.sr.remoteness = eval::Remoteness::EntryOnly;
  } else {
    throw ConfigError("--remoteness must be entry_or_target or entry");
  }
  opts.sr.jobs = a.jobs ? *a.jobs : default_jobs();
  opts.k = a.k;
  opts.seed = a.seed;
  eval::TopologyCache topologies;
  const auto report = eval::score_predictions(preds, samples, opts, topologies);
  const fs::path dir = out_dir(a.out);
  eval::write_score_reports(report, preds, samples, opts, topologies, dir);
  std::printf("samples=%d weighted_f1=%.6f\n", report.hvt.samples, report.hvt.weighted_f1);
  for (const auto& s : report.ntd_stats) {
    std::printf("ntd network=%s gamma=%s weighting=%s n=%d mean=%.6f median=%.6f\n", s.network.c_str(),
                s.gamma.c_str(), s.weighting.c_str(), s.count, s.mean, s.median);
  }
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

namespace {

struct NtdInputs {
  graph::Network net;
  graph::CostMatrix cm;
  transport::NodeDistribution p, q;
};

NtdInputs load_ntd_inputs(const NtdArgs& a) {
  if (a.network_file.empty() == a.topology.empty()) {
    throw ConfigError("give exactly one of --network or --topology");
  }
  auto net = a.network_file.empty() ? graph::generate_network(a.topology, a.network_seed)
                                    : io::read_network(a.network_file);
  auto cm = graph::all_pairs_shortest_paths(net);
  transport::NodeDistribution p(io::read_vector(a.p)), q(io::read_vector(a.q));
  return NtdInputs{std::move(net), std::move(cm), std::move(p), std::move(q)};
}

Json plan_json(const Matrix<double>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

int cmd_ntd_score(const NtdArgs& a) {
  const auto in = load_ntd_inputs(a);
  const auto plan = transport::wasserstein(in.p, in.q, in.cm);
  Json out{{"cost", plan.cost}, {"diameter", in.cm.diameter}, {"ntd", transport::ntd(in.p, in.q, in.cm)}};
  if (a.plan) out["plan"] = plan_json(plan.plan);
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_ntd_sinkhorn(const NtdArgs& a) {
  const auto in = load_ntd_inputs(a);
  auto params = sinkhorn::default_params(in.cm);
  if (a.lambda) params.lambda = *a.lambda;
  params.max_iters = a.max_iters;
  params.convergence_tol = a.tol;
  if (!(params.lambda > 0.0)) throw ConfigError("--lambda must be positive");
  const auto r = sinkhorn::sinkhorn_plan(in.p, in.q, in.cm, params);
  Json out{{"converged", r.converged},
           {"entropy", r.entropy},
           {"exact_ntd", transport::ntd(in.p, in.q, in.cm)},
           {"iterations", r.iterations_used},
           {"lambda", params.lambda},
           {"marginal_violation", r.marginal_violation},
           {"transport_cost", r.transport_cost},
           {"value", r.value}};
  if (a.plan) out["plan"] = plan_json(r.plan);
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace hotdesk::cli
