#include <cstdio>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hotdesk/error.hpp"

namespace cli = hotdesk::cli;

int main(int argc, char** argv) {
  CLI::App app{"hotdesk: network transport distance and cyber-defence simulation toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  cli::NetworkArgs net;
  auto* c_net = app.add_subcommand("network", "Generate a network and write it as JSON");
  c_net->add_option("--topology", net.topology, "tree30|tree40|tree50|tree70|tree90|forest72|optical54")
      ->required();
  c_net->add_option("--seed", net.seed, "Generator seed")->required();
  c_net->add_option("--out", net.out, "Output file");
  c_net->callback([&] { action = [&] { return cli::cmd_network(net); }; });

  cli::SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Play episodes between two agents");
  c_sim->add_option("--blue", sim.blue, "Blue agent id, e.g. blue.msn_d")->required();
  c_sim->add_option("--red", sim.red, "Red agent id, e.g. red.hvt_pref_sp:alpha=0.01,seed=5,index=12")
      ->required();
  c_sim->add_option("--network", sim.network, "Topology id")->capture_default_str();
  c_sim->add_option("--network-seed", sim.network_seed, "Topology generator seed")->capture_default_str();
  c_sim->add_option("--episodes", sim.episodes, "Number of episodes")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Master seed")->required();
  c_sim->add_option("--max-steps", sim.max_steps, "Episode cap")->capture_default_str()->check(CLI::PositiveNumber);
  c_sim->add_option("--out", sim.out, "Output directory");
  c_sim->callback([&] { action = [&] { return cli::cmd_simulate(sim); }; });

  cli::TournamentArgs tour;
  auto* c_tour = app.add_subcommand("tournament", "Run an agent tournament from a config file");
  c_tour->add_option("--config", tour.config, "Config file (JSON)")->required();
  c_tour->add_option("--episodes", tour.episodes, "Episodes per cell (overrides config)");
  c_tour->add_option("--seed", tour.seed, "Seed (overrides config)");
  c_tour->add_option("--jobs", tour.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_tour->add_option("--out", tour.out, "Output directory");
  c_tour->callback([&] { action = [&] { return cli::cmd_tournament(tour); }; });

  cli::DatasetArgs ds;
  auto* c_ds = app.add_subcommand("dataset", "Build a dataset from a config file");
  c_ds->add_option("--config", ds.config, "Config file (JSON)")->required();
  c_ds->add_option("--seed", ds.seed, "Master seed (overrides config)");
  c_ds->add_option("--jobs", ds.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_ds->add_option("--out", ds.out, "Output directory");
  c_ds->callback([&] { action = [&] { return cli::cmd_dataset(ds); }; });

  cli::ScoreArgs sc;
  auto* c_sc = app.add_subcommand("score", "Score a prediction file against a dataset manifest");
  c_sc->add_option("--predictions", sc.predictions, "Prediction file (JSON lines)")->required();
  c_sc->add_option("--manifest", sc.manifest, "Dataset manifest.json")->required();
  c_sc->add_option("--gammas", sc.gammas, "Discount factors")->delimiter(',')->capture_default_str();
  c_sc->add_option("--coefficients", sc.coefficients, "Remoteness coefficients")
      ->delimiter(',')
      ->capture_default_str();
  c_sc->add_option("--floor", sc.floor, "Weighting floor f")->capture_default_str();
  c_sc->add_option("--k", sc.k, "Clusters for the hedging analysis")->capture_default_str()->check(CLI::PositiveNumber);
  c_sc->add_option("--seed", sc.seed, "k-means seed")->capture_default_str();
  c_sc->add_option("--remoteness", sc.remoteness, "entry_or_target|entry")->capture_default_str();
  c_sc->add_flag("--include-holdout", sc.include_holdout, "Also score the hold-out samples");
  c_sc->add_option("--jobs", sc.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_sc->add_option("--out", sc.out, "Output directory");
  c_sc->callback([&] { action = [&] { return cli::cmd_score(sc); }; });

  cli::NtdArgs ntd;
  auto* c_ntd = app.add_subcommand("ntd", "Network transport distance between two distributions");
  c_ntd->require_subcommand(1);
  auto add_inputs = [&](CLI::App* c) {
    c->add_option("--network", ntd.network_file, "Network JSON file");
    c->add_option("--topology", ntd.topology, "Topology id (instead of --network)");
    c->add_option("--network-seed", ntd.network_seed, "Topology generator seed");
    c->add_option("--p", ntd.p, "JSON array with P")->required();
    c->add_option("--q", ntd.q, "JSON array with Q")->required();
    c->add_flag("--plan", ntd.plan, "Include the transport plan");
  };
  auto* c_ntd_score = c_ntd->add_subcommand("score", "Exact NTD");
  add_inputs(c_ntd_score);
  c_ntd_score->callback([&] { action = [&] { return cli::cmd_ntd_score(ntd); }; });
  auto* c_ntd_sk = c_ntd->add_subcommand("sinkhorn", "Entropic NTD loss");
  add_inputs(c_ntd_sk);
  c_ntd_sk->add_option("--lambda", ntd.lambda, "Regularization (default 0.05 * diameter)");
  c_ntd_sk->add_option("--max-iters", ntd.max_iters, "Iteration cap")->capture_default_str();
  c_ntd_sk->add_option("--tol", ntd.tol, "Marginal violation tolerance")->capture_default_str();
  c_ntd_sk->callback([&] { action = [&] { return cli::cmd_ntd_sinkhorn(ntd); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return action ? action() : 2;
  } catch (const hotdesk::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
