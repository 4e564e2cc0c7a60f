#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hotdesk::cli {

/// HOTDESK_OUTPUT_DIR or ".".
std::string default_output_dir();
/// HOTDESK_JOBS or 1.
int default_jobs();

struct NetworkArgs {
  std::string topology;
  std::uint64_t seed = 0;
  std::string out;  // file; empty selects <output_dir>/network_<id>_<seed>.json
};
int cmd_network(const NetworkArgs& a);

struct SimulateArgs {
  std::string blue;
  std::string red;
  std::string network = "tree30";
  std::uint64_t network_seed = 0;
  int episodes = 1;
  std::uint64_t seed = 0;
  int max_steps = 500;
  std::string out;
};
int cmd_simulate(const SimulateArgs& a);

struct TournamentArgs {
  std::string config;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
};
int cmd_tournament(const TournamentArgs& a);

struct DatasetArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
};
int cmd_dataset(const DatasetArgs& a);

struct ScoreArgs {
  std::string predictions;
  std::string manifest;
  std::vector<double> gammas{0.5, 0.95, 0.999};
  std::vector<double> coefficients{-1.0, 0.0, 1.0};
  double floor = 0.1;
  int k = 4;
  std::uint64_t seed = 0;
  std::string remoteness = "entry_or_target";
  bool include_holdout = false;
  std::optional<int> jobs;
  std::string out;
};
int cmd_score(const ScoreArgs& a);

struct NtdArgs {
  std::string network_file;
  std::string topology;
  std::uint64_t network_seed = 0;
  std::string p;
  std::string q;
  bool plan = false;
  // sinkhorn only
  std::optional<double> lambda;
  int max_iters = 10000;
  double tol = 1e-8;
};
int cmd_ntd_score(const NtdArgs& a);
int cmd_ntd_sinkhorn(const NtdArgs& a);

}  // namespace hotdesk::cli
