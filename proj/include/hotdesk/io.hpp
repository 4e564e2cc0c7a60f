#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hotdesk/env.hpp"
#include "hotdesk/graph.hpp"
#include "hotdesk/transport.hpp"

namespace hotdesk::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const graph::Network& net);
graph::Network network_from_json(const Json& j);

Json to_json(const env::StateObservation& obs);
env::StateObservation observation_from_json(const Json& j);

Json to_json(const env::BlueAction& a);
Json to_json(const env::RedAction& a);
env::BlueAction blue_action_from_json(const Json& j);
env::RedAction red_action_from_json(const Json& j);

/// First line of a trajectory file.
Json trajectory_header(const env::EpisodeTrajectory& traj);

/// One header line, then one line per recorded step.
void write_trajectory(std::ostream& os, const env::EpisodeTrajectory& traj);
env::EpisodeTrajectory read_trajectory(std::istream& is);

void write_trajectory_file(const std::filesystem::path& path, const env::EpisodeTrajectory& traj);
env::EpisodeTrajectory read_trajectory_file(const std::filesystem::path& path);

/// Text helpers. Writes are atomic per file (temp file + rename).
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

graph::Network read_network(const std::filesystem::path& path);

/// A JSON array of non-negative numbers. Not normalized here.
std::vector<double> read_vector(const std::filesystem::path& path);

/// Stable textual key for a discount factor ("0.5", "0.95", "0.999").
std::string gamma_key(double gamma);

struct PredictionRecord {
  std::string sample_id;
  /// Either one probability per HVN candidate (length 3) or per node.
  std::vector<double> pred_hvn;
  std::map<std::string, std::vector<double>> pred_sr;  // keyed by gamma_key
};

Json to_json(const PredictionRecord& p);
PredictionRecord prediction_from_json(const Json& j);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const std::vector<PredictionRecord>& preds);

}  // namespace hotdesk::io
