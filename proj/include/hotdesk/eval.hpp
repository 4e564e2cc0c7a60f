#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hotdesk/dataset.hpp"
#include "hotdesk/env.hpp"
#include "hotdesk/io.hpp"
#include "hotdesk/matrix.hpp"

namespace hotdesk::eval {

using graph::NodeId;

// ---------------------------------------------------------------------------
// Tournaments

struct TournamentConfig {
  std::vector<std::string> blues;
  std::vector<std::string> reds;
  std::vector<std::string> networks{"tree30", "forest72", "optical54"};
  std::uint64_t network_seed = 0;
  int episodes_per_cell = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  env::EnvConfig env;
};

TournamentConfig tournament_config_from_json(const io::Json& j, const std::string& path = "tournament");

struct TournamentCell {
  std::string blue;
  std::string red;
  std::string network;  // "average" for the across-network table
  int episodes = 0;
  int blue_wins = 0;
  double mean_blue_reward = 0.0;
  double mean_duration = 0.0;

  double blue_win_rate() const { return episodes ? static_cast<double>(blue_wins) / episodes : 0.0; }
};

struct TournamentTable {
  std::vector<TournamentCell> cells;  // network-major, then blue, then red

  const TournamentCell& at(const std::string& blue, const std::string& red,
                           const std::string& network) const;
  /// Mean over networks of each (blue, red) cell.
  TournamentTable averaged() const;
  /// Mean blue win rate of one blue agent over all cells with that blue.
  double blue_mean_win_rate(const std::string& blue) const;
};

/// Every (network, blue, red) cell plays episodes_per_cell episodes. Episode
/// e against a given red on a given network uses the same seed for every
/// blue agent.
TournamentTable run_tournament(const TournamentConfig& cfg);

/// One CSV per network plus average.csv, and tournament.json.
void write_tournament_reports(const TournamentTable& table, const std::filesystem::path& dir);
std::string tournament_csv(const TournamentTable& table, const std::string& network);

// ---------------------------------------------------------------------------
// HVT classification

/// Support-weighted F1 over integer class labels.
double weighted_f1(const std::vector<int>& truth, const std::vector<int>& predicted);

struct HvtScore {
  double weighted_f1 = 0.0;
  std::vector<NodeId> classes;  // sorted union of true and predicted nodes
  Matrix<long> confusion;       // rows: true class, cols: predicted
  int samples = 0;
};

/// argmax of pred_hvn. A length-3 vector indexes the sample's HVN list, any
/// other length must equal the node count and indexes nodes. Ties go to the
/// lowest node id.
NodeId predicted_hvn(const io::PredictionRecord& pred, const dataset::ToMSample& sample);

/// Pairs every sample with its prediction. Throws Error listing up to ten
/// missing sample ids.
std::vector<std::pair<const dataset::ToMSample*, const io::PredictionRecord*>> match_predictions(
    const std::vector<io::PredictionRecord>& preds, const std::vector<dataset::ToMSample>& samples);

HvtScore score_hvt(const std::vector<io::PredictionRecord>& preds,
                   const std::vector<dataset::ToMSample>& samples);

// ---------------------------------------------------------------------------
// SR scoring

struct WeightingSpec {
  std::string name;           // "neg", "neutral", "pos"
  double coefficient = 0.0;   // applied to node remoteness
};

std::vector<WeightingSpec> default_weightings();  // -1, 0, +1

enum class Remoteness { EntryOrTarget, EntryOnly };

struct SrScoreOptions {
  std::vector<double> gammas{0.5, 0.95, 0.999};
  std::vector<WeightingSpec> weightings = default_weightings();
  double floor = 0.1;
  Remoteness remoteness = Remoteness::EntryOrTarget;
  int jobs = 1;
};

struct NtdRecord {
  std::string sample_id;
  std::string network;
  std::string gamma;      // io::gamma_key
  std::string weighting;  // WeightingSpec::name
  double ntd = 0.0;
};

struct NtdStats {
  std::string network;
  std::string gamma;
  std::string weighting;
  int count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Network and cost matrix per (topology, seed), built on demand.
class TopologyCache {
 public:
  const graph::Network& network(const std::string& topology, std::uint64_t seed);
  const graph::CostMatrix& cost(const std::string& topology, std::uint64_t seed);

 private:
  struct Entry {
    graph::Network net;
    graph::CostMatrix cm;
  };
  const Entry& get(const std::string& topology, std::uint64_t seed);
  std::map<std::pair<std::string, std::uint64_t>, Entry> entries_;
};

/// ntd_weighted(pred, truth) per sample x gamma x weighting, in sample
/// order. Throws when a requested gamma is missing from a prediction or a
/// ground truth.
std::vector<NtdRecord> score_sr(const std::vector<io::PredictionRecord>& preds,
                                const std::vector<dataset::ToMSample>& samples,
                                const SrScoreOptions& opts, TopologyCache& topologies);

/// Linear-interpolated quartiles per (network, gamma, weighting).
std::vector<NtdStats> summarize(const std::vector<NtdRecord>& records);

struct WeightingGap {
  std::string sample_id;
  double ntd_pos = 0.0;
  double ntd_neg = 0.0;
  double gap() const { return ntd_pos - ntd_neg; }
};

/// Sample with the largest |NTD(+1) - NTD(-1)| among records of one
/// (network, gamma) stratum; first in record order on ties. Throws Error
/// when the stratum is empty.
WeightingGap max_weighting_gap(const std::vector<NtdRecord>& records, const std::string& network,
                               const std::string& gamma, const std::string& pos = "pos",
                               const std::string& neg = "neg");

// ---------------------------------------------------------------------------
// Hedging analysis

struct KMeansResult {
  std::vector<int> assignment;
  std::vector<std::vector<double>> centroids;
  std::vector<int> sizes;
  int iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations (Euclidean). Throws Error
/// when there are fewer points than clusters.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed,
                    int max_iters = 300);

/// Branch (net.branch_of) carrying the most centroid mass; -1 when the mass
/// sits on node 0 or the centroid is empty.
int dominant_branch(const std::vector<double>& centroid, const graph::Network& net);

struct HedgingReport {
  KMeansResult clusters;
  std::vector<int> branch_labels;
};

HedgingReport hedging_clusters(const std::vector<std::vector<double>>& sr_predictions,
                               const graph::Network& net, int k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reports

struct ScoreOptions {
  SrScoreOptions sr;
  int k = 4;
  std::uint64_t seed = 0;
};

struct ScoreReport {
  HvtScore hvt;
  std::map<std::string, HvtScore> hvt_by_network;
  std::vector<NtdRecord> ntd_records;
  std::vector<NtdStats> ntd_stats;
};

ScoreReport score_predictions(const std::vector<io::PredictionRecord>& preds,
                              const std::vector<dataset::ToMSample>& samples,
                              const ScoreOptions& opts, TopologyCache& topologies);

/// score.json, confusion_<network>.csv, ntd_samples.csv, ntd_stats.csv,
/// weighting_gap.csv and hedging_<network>_<gamma>.csv.
void write_score_reports(const ScoreReport& report, const std::vector<io::PredictionRecord>& preds,
                         const std::vector<dataset::ToMSample>& samples, const ScoreOptions& opts,
                         TopologyCache& topologies, const std::filesystem::path& dir);

}  // namespace hotdesk::eval
