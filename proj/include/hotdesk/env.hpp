#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hotdesk/graph.hpp"
#include "hotdesk/rng.hpp"

namespace hotdesk::env {

using graph::NodeId;

enum class BlueActionType {
  DoNothing,
  Scan,
  MakeSafeNode,
  ReduceNodeVulnerability,
  Restore,
  Isolate,
  Reconnect,
};

enum class RedActionType { DoNothing, BasicAttack, RandomMove, ZeroDayAttack, Spread, Intrude };

struct BlueAction {
  BlueActionType type = BlueActionType::DoNothing;
  NodeId node = -1;
  bool operator==(const BlueAction&) const = default;
};

struct RedAction {
  RedActionType type = RedActionType::DoNothing;
  NodeId node = -1;
  bool operator==(const RedAction&) const = default;
};

bool is_targeted(BlueActionType t);
bool is_targeted(RedActionType t);
std::string_view to_string(BlueActionType t);
std::string_view to_string(RedActionType t);
BlueActionType blue_action_from_string(std::string_view s);
RedActionType red_action_from_string(std::string_view s);

/// Environment constants. Defaults are the documented game rules used by
/// every shipped config and test.
struct EnvConfig {
  int max_steps = 500;
  double vulnerability_min = 0.2;
  double vulnerability_max = 0.8;
  double hidden_probability = 0.5;
  int zero_day_start = 1;
  int zero_day_period = 4;  // +1 zero-day every this many steps
  double rnv_multiplier = 0.8;
  double rnv_floor = 0.05;
  double compromised_cost = 1.0;
  double isolated_cost = 0.5;
  double red_win_penalty = 100.0;
};

enum class Outcome { Running, RedWin, BlueWin };
std::string_view to_string(Outcome o);

/// Mutable per-episode state. Edges are never removed from the topology;
/// an edge is active when neither endpoint is isolated, so Reconnect
/// restores exactly the pre-isolation edge set.
struct EpisodeState {
  std::vector<double> vulnerability;
  std::vector<double> initial_vulnerability;
  std::vector<std::uint8_t> compromised;
  std::vector<std::uint8_t> hidden;
  std::vector<std::uint8_t> isolated;
  int zero_day_budget = 0;
  int step = 0;
  NodeId red_locus = -1;
  graph::HvnPlacement placement;
  Outcome outcome = Outcome::Running;
  NodeId captured = -1;
  Rng rng;

  bool done() const { return outcome != Outcome::Running; }
  int compromised_count() const;
  int isolated_count() const;
  bool operator==(const EpisodeState&) const = default;
};

EpisodeState reset(const graph::Network& net, std::uint64_t seed, const EnvConfig& cfg = {});

bool edge_active(const EpisodeState& s, const graph::Network& net, NodeId a, NodeId b);
/// Active edges, sorted.
std::vector<std::pair<NodeId, NodeId>> active_edges(const EpisodeState& s,
                                                    const graph::Network& net);

/// Red can act at all only while it holds a non-isolated foothold: the entry
/// node or any compromised node that is not isolated.
bool red_has_foothold(const EpisodeState& s, const graph::Network& net);
/// Nodes a BasicAttack/ZeroDayAttack may target: uncompromised, not isolated,
/// and joined by an active edge to the entry or a compromised node (the
/// entry itself is attackable when clean and connected).
bool attackable(const EpisodeState& s, const graph::Network& net, NodeId v);
std::vector<NodeId> attackable_nodes(const EpisodeState& s, const graph::Network& net);

struct BlueEffect {
  bool applied = true;  // false for no-op actions (e.g. Reconnect on a connected node)
};

struct RedEffect {
  bool applied = true;
  std::vector<NodeId> newly_compromised;
};

/// Throws Error when a targeted action names a node outside the network.
BlueEffect apply_blue(EpisodeState& s, const graph::Network& net, const BlueAction& a,
                      const EnvConfig& cfg = {});
/// Stochastic outcomes draw from s.rng.
RedEffect apply_red(EpisodeState& s, const graph::Network& net, const RedAction& a,
                    const EnvConfig& cfg = {});

struct StepResult {
  double blue_reward = 0.0;
  double red_reward = 0.0;
  bool done = false;
  BlueEffect blue;
  RedEffect red;
};

/// Blue acts first, then Red. Throws Error once the episode is over.
StepResult step(EpisodeState& s, const graph::Network& net, const BlueAction& blue,
                const RedAction& red, const EnvConfig& cfg = {});

enum class Observer { Blue, Red, Full };

/// Per-node features plus the active adjacency. Masked entries are zero
/// (node flags) or -1 (scalars).
struct StateObservation {
  int step = 0;
  std::vector<double> vulnerability;
  std::vector<std::uint8_t> visible_compromised;
  std::vector<std::uint8_t> hidden_compromised;  // masked for Blue
  std::vector<std::uint8_t> isolated;
  std::vector<std::uint8_t> is_entry;
  std::vector<std::uint8_t> is_hvn;  // masked for Blue and Red
  std::vector<std::pair<NodeId, NodeId>> edges;
  NodeId red_locus = -1;     // masked for Blue
  int zero_day_budget = -1;  // masked for Blue

  int node_count() const { return static_cast<int>(vulnerability.size()); }
  bool compromised(NodeId v) const { return visible_compromised[v] || hidden_compromised[v]; }
  bool operator==(const StateObservation&) const = default;
};

inline constexpr int kFeatureCount = 6;

StateObservation observe(const EpisodeState& s, const graph::Network& net, Observer who);
/// Applies an observer's fixed mask to a full observation.
StateObservation mask(const StateObservation& full, Observer who);

/// What a policy may consult besides its observation. Red policies that
/// have no knowledge of high-value nodes must not read `placement`.
struct EpisodeContext {
  const graph::Network& net;
  const graph::CostMatrix& cm;
  const graph::HvnPlacement& placement;
  const EnvConfig& cfg;
};

class BluePolicy {
 public:
  virtual ~BluePolicy() = default;
  virtual std::string id() const = 0;
  virtual void begin_episode(const EpisodeContext& ctx, std::uint64_t seed) = 0;
  virtual BlueAction act(const StateObservation& obs, const EpisodeContext& ctx) = 0;
};

class RedPolicy {
 public:
  virtual ~RedPolicy() = default;
  virtual std::string id() const = 0;
  virtual void begin_episode(const EpisodeContext& ctx, std::uint64_t seed) = 0;
  virtual RedAction act(const StateObservation& obs, const EpisodeContext& ctx) = 0;
};

struct StepRecord {
  int t = 0;
  StateObservation obs;  // full observability
  std::optional<BlueAction> blue;
  std::optional<RedAction> red;
  std::vector<NodeId> red_compromised;
  double blue_reward = 0.0;
  bool operator==(const StepRecord&) const = default;
};

struct EpisodeTrajectory {
  std::string episode_id;
  std::string network;
  std::uint64_t network_seed = 0;
  std::uint64_t seed = 0;
  std::string blue_id;
  std::string red_id;
  Outcome outcome = Outcome::Running;
  NodeId target = -1;  // captured HVN on RedWin
  int final_step = 0;
  NodeId entry = -1;
  graph::HvnPlacement placement;
  double total_blue_reward = 0.0;
  /// One record per time-step 0..final_step; the last carries no actions.
  std::vector<StepRecord> steps;
  bool operator==(const EpisodeTrajectory&) const = default;
};

struct RolloutOptions {
  EnvConfig cfg;
  bool record_steps = true;
  std::string episode_id;
};

/// Runs reset and the step loop to termination. The environment, Blue and
/// Red each draw from their own stream derived from `seed`.
EpisodeTrajectory rollout(const graph::Network& net, const graph::CostMatrix& cm,
                          BluePolicy& blue, RedPolicy& red, std::uint64_t seed,
                          const RolloutOptions& opts = {});

}  // namespace hotdesk::env
