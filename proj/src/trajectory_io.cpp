#include <fstream>
#include <sstream>

#include "hotdesk/error.hpp"
#include "hotdesk/io.hpp"

namespace hotdesk::io {

namespace fs = std::filesystem;

Json to_json(const graph::Network& net) {
  Json edges = Json::array();
  for (auto [a, b] : net.edges()) edges.push_back({a, b});
  Json layers = Json::array();
  for (auto l : net.layers()) layers.push_back(std::string(graph::to_string(l)));
  return Json{{"edges", edges},     {"entry", net.entry()}, {"layers", layers},
              {"name", net.name()}, {"nodes", net.node_count()}, {"seed", net.seed()}};
}

graph::Network network_from_json(const Json& j) {
  try {
    std::vector<std::pair<graph::NodeId, graph::NodeId>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    std::vector<graph::Layer> layers;
    if (j.contains("layers")) {
      for (const auto& l : j.at("layers")) layers.push_back(graph::layer_from_string(l.get<std::string>()));
    }
    return graph::Network(j.at("nodes").get<int>(), std::move(edges), j.at("entry").get<int>(),
                          std::move(layers), j.value("name", std::string("custom")),
                          j.value("seed", std::uint64_t{0}));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("network file: ") + e.what());
  }
}

Json to_json(const env::StateObservation& obs) {
  Json features = Json::array();
  for (int v = 0; v < obs.node_count(); ++v) {
    features.push_back({obs.vulnerability[v], obs.visible_compromised[v], obs.hidden_compromised[v],
                        obs.isolated[v], obs.is_entry[v], obs.is_hvn[v]});
  }
  Json edges = Json::array();
  for (auto [a, b] : obs.edges) edges.push_back({a, b});
  return Json{{"edges", edges},
              {"features", features},
              {"red_locus", obs.red_locus},
              {"step", obs.step},
              {"zero_day_budget", obs.zero_day_budget}};
}

env::StateObservation observation_from_json(const Json& j) {
  env::StateObservation o;
  o.step = j.at("step").get<int>();
  o.red_locus = j.at("red_locus").get<int>();
  o.zero_day_budget = j.at("zero_day_budget").get<int>();
  for (const auto& f : j.at("features")) {
    if (f.size() != static_cast<std::size_t>(env::kFeatureCount)) {
      throw Error("observation: expected " + std::to_string(env::kFeatureCount) + " features per node");
    }
    o.vulnerability.push_back(f[0].get<double>());
    o.visible_compromised.push_back(f[1].get<std::uint8_t>());
    o.hidden_compromised.push_back(f[2].get<std::uint8_t>());
    o.isolated.push_back(f[3].get<std::uint8_t>());
    o.is_entry.push_back(f[4].get<std::uint8_t>());
    o.is_hvn.push_back(f[5].get<std::uint8_t>());
  }
  for (const auto& e : j.at("edges")) o.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return o;
}

Json to_json(const env::BlueAction& a) {
  return Json{{"node", a.node}, {"type", std::string(env::to_string(a.type))}};
}

Json to_json(const env::RedAction& a) {
  return Json{{"node", a.node}, {"type", std::string(env::to_string(a.type))}};
}

env::BlueAction blue_action_from_json(const Json& j) {
  return {env::blue_action_from_string(j.at("type").get<std::string>()), j.at("node").get<int>()};
}

env::RedAction red_action_from_json(const Json& j) {
  return {env::red_action_from_string(j.at("type").get<std::string>()), j.at("node").get<int>()};
}

Json trajectory_header(const env::EpisodeTrajectory& traj) {
  return Json{{"blue", traj.blue_id},
              {"entry", traj.entry},
              {"episode_id", traj.episode_id},
              {"final_step", traj.final_step},
              {"hvns", traj.placement.hvns},
              {"network", traj.network},
              {"network_seed", traj.network_seed},
              {"outcome", std::string(env::to_string(traj.outcome))},
              {"red", traj.red_id},
              {"schema_version", kSchemaVersion},
              {"seed", traj.seed},
              {"target", traj.target},
              {"target_index", traj.placement.target_index},
              {"total_blue_reward", traj.total_blue_reward}};
}

void write_trajectory(std::ostream& os, const env::EpisodeTrajectory& traj) {
  os << trajectory_header(traj).dump() << '\n';
  for (const auto& s : traj.steps) {
    Json line{{"blue_action", s.blue ? to_json(*s.blue) : Json(nullptr)},
              {"blue_reward", s.blue_reward},
              {"obs", to_json(s.obs)},
              {"red_action", s.red ? to_json(*s.red) : Json(nullptr)},
              {"red_compromised", s.red_compromised},
              {"t", s.t}};
    os << line.dump() << '\n';
  }
}

namespace {

env::Outcome outcome_from_string(const std::string& s) {
  for (auto o : {env::Outcome::Running, env::Outcome::RedWin, env::Outcome::BlueWin}) {
    if (env::to_string(o) == s) return o;
  }
  throw Error("trajectory: unknown outcome '" + s + "'");
}

}  // namespace

env::EpisodeTrajectory read_trajectory(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("trajectory: empty input");
  env::EpisodeTrajectory t;
  try {
    const Json h = Json::parse(line);
    const int version = h.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw Error("trajectory: unsupported schema_version " + std::to_string(version));
    }
    t.episode_id = h.at("episode_id").get<std::string>();
    t.network = h.at("network").get<std::string>();
    t.network_seed = h.at("network_seed").get<std::uint64_t>();
    t.seed = h.at("seed").get<std::uint64_t>();
    t.blue_id = h.at("blue").get<std::string>();
    t.red_id = h.at("red").get<std::string>();
    t.outcome = outcome_from_string(h.at("outcome").get<std::string>());
    t.target = h.at("target").get<int>();
    t.final_step = h.at("final_step").get<int>();
    t.entry = h.at("entry").get<int>();
    t.placement.hvns = h.at("hvns").get<std::vector<int>>();
    t.placement.target_index = h.at("target_index").get<int>();
    t.total_blue_reward = h.at("total_blue_reward").get<double>();
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const Json j = Json::parse(line);
      env::StepRecord s;
      s.t = j.at("t").get<int>();
      s.obs = observation_from_json(j.at("obs"));
      if (!j.at("blue_action").is_null()) s.blue = blue_action_from_json(j.at("blue_action"));
      if (!j.at("red_action").is_null()) s.red = red_action_from_json(j.at("red_action"));
      s.red_compromised = j.at("red_compromised").get<std::vector<int>>();
      s.blue_reward = j.at("blue_reward").get<double>();
      t.steps.push_back(std::move(s));
    }
  } catch (const Json::exception& e) {
    throw Error(std::string("trajectory: ") + e.what());
  }
  return t;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

Json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_trajectory_file(const fs::path& path, const env::EpisodeTrajectory& traj) {
  std::ostringstream os;
  write_trajectory(os, traj);
  write_text(path, os.str());
}

env::EpisodeTrajectory read_trajectory_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_trajectory(in);
}

graph::Network read_network(const fs::path& path) { return network_from_json(read_json(path)); }

std::vector<double> read_vector(const fs::path& path) {
  const Json j = read_json(path);
  if (!j.is_array()) throw ConfigError("'" + path.string() + "': expected a JSON array");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError("'" + path.string() + "': expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string gamma_key(double gamma) {
  std::ostringstream os;
  os.precision(12);
  os << gamma;
  return os.str();
}

Json to_json(const PredictionRecord& p) {
  Json sr = Json::object();
  for (const auto& [k, v] : p.pred_sr) sr[k] = v;
  return Json{{"pred_hvn", p.pred_hvn}, {"pred_sr", sr}, {"sample_id", p.sample_id}};
}

PredictionRecord prediction_from_json(const Json& j) {
  PredictionRecord p;
  p.sample_id = j.at("sample_id").get<std::string>();
  if (j.contains("pred_hvn")) p.pred_hvn = j.at("pred_hvn").get<std::vector<double>>();
  if (j.contains("pred_sr")) {
    for (auto it = j.at("pred_sr").begin(); it != j.at("pred_sr").end(); ++it) {
      p.pred_sr[gamma_key(std::stod(it.key()))] = it.value().get<std::vector<double>>();
    }
  }
  return p;
}

std::vector<PredictionRecord> read_predictions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::vector<PredictionRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(prediction_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_predictions(const fs::path& path, const std::vector<PredictionRecord>& preds) {
  std::string text;
  for (const auto& p : preds) text += to_json(p).dump() + "\n";
  write_text(path, text);
}

}  // namespace hotdesk::io
