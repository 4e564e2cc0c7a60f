#include "hotdesk/env.hpp"

#include <algorithm>
#include <array>

#include "hotdesk/error.hpp"

namespace hotdesk::env {

namespace {

constexpr std::array<std::string_view, 7> kBlueNames{
    "DoNothing", "Scan", "MakeSafeNode", "ReduceNodeVulnerability", "Restore", "Isolate",
    "Reconnect"};
constexpr std::array<std::string_view, 6> kRedNames{"DoNothing",     "BasicAttack", "RandomMove",
                                                    "ZeroDayAttack", "Spread",      "Intrude"};

void check_node(const graph::Network& net, NodeId v, std::string_view action) {
  if (v < 0 || v >= net.node_count()) {
    throw Error(std::string(action) + ": node " + std::to_string(v) + " is not in the network");
  }
}

}  // namespace

bool is_targeted(BlueActionType t) {
  return t != BlueActionType::DoNothing && t != BlueActionType::Scan;
}

bool is_targeted(RedActionType t) {
  return t == RedActionType::BasicAttack || t == RedActionType::RandomMove ||
         t == RedActionType::ZeroDayAttack;
}

std::string_view to_string(BlueActionType t) { return kBlueNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(RedActionType t) { return kRedNames[static_cast<std::size_t>(t)]; }

BlueActionType blue_action_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kBlueNames.size(); ++i) {
    if (kBlueNames[i] == s) return static_cast<BlueActionType>(i);
  }
  throw Error("unknown blue action '" + std::string(s) + "'");
}

RedActionType red_action_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kRedNames.size(); ++i) {
    if (kRedNames[i] == s) return static_cast<RedActionType>(i);
  }
  throw Error("unknown red action '" + std::string(s) + "'");
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Running: return "Running";
    case Outcome::RedWin: return "RedWin";
    case Outcome::BlueWin: return "BlueWin";
  }
  return "Running";
}

int EpisodeState::compromised_count() const {
  return static_cast<int>(std::count(compromised.begin(), compromised.end(), 1));
}

int EpisodeState::isolated_count() const {
  return static_cast<int>(std::count(isolated.begin(), isolated.end(), 1));
}

EpisodeState reset(const graph::Network& net, std::uint64_t seed, const EnvConfig& cfg) {
  const auto n = static_cast<std::size_t>(net.node_count());
  EpisodeState s;
  s.rng.seed(seed);
  std::uniform_real_distribution<double> vuln(cfg.vulnerability_min, cfg.vulnerability_max);
  s.vulnerability.resize(n);
  for (auto& v : s.vulnerability) v = vuln(s.rng);
  s.initial_vulnerability = s.vulnerability;
  s.compromised.assign(n, 0);
  s.hidden.assign(n, 0);
  s.isolated.assign(n, 0);
  s.placement = graph::place_high_value_nodes(net, s.rng());
  s.compromised[net.entry()] = 1;
  s.zero_day_budget = cfg.zero_day_start;
  s.red_locus = net.entry();
  return s;
}

bool edge_active(const EpisodeState& s, const graph::Network& net, NodeId a, NodeId b) {
  return net.adjacent(a, b) && !s.isolated[a] && !s.isolated[b];
}

std::vector<std::pair<NodeId, NodeId>> active_edges(const EpisodeState& s,
                                                    const graph::Network& net) {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(net.edges().size());
  for (auto [a, b] : net.edges()) {
    if (!s.isolated[a] && !s.isolated[b]) out.emplace_back(a, b);
  }
  return out;
}

namespace {

bool is_source(const EpisodeState& s, const graph::Network& net, NodeId v) {
  return (v == net.entry() || s.compromised[v]) && !s.isolated[v];
}

}  // namespace

bool red_has_foothold(const EpisodeState& s, const graph::Network& net) {
  for (NodeId v = 0; v < net.node_count(); ++v) {
    if (is_source(s, net, v)) return true;
  }
  return false;
}

bool attackable(const EpisodeState& s, const graph::Network& net, NodeId v) {
  if (s.compromised[v] || s.isolated[v]) return false;
  if (v == net.entry()) return true;
  for (NodeId w : net.neighbors(v)) {
    if (is_source(s, net, w)) return true;
  }
  return false;
}

std::vector<NodeId> attackable_nodes(const EpisodeState& s, const graph::Network& net) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < net.node_count(); ++v) {
    if (attackable(s, net, v)) out.push_back(v);
  }
  return out;
}

BlueEffect apply_blue(EpisodeState& s, const graph::Network& net, const BlueAction& a,
                      const EnvConfig& cfg) {
  if (is_targeted(a.type)) check_node(net, a.node, to_string(a.type));
  const NodeId v = a.node;
  switch (a.type) {
    case BlueActionType::DoNothing:
      return {};
    case BlueActionType::Scan:
      std::fill(s.hidden.begin(), s.hidden.end(), 0);
      return {};
    case BlueActionType::MakeSafeNode:
      if (!s.compromised[v]) return {false};
      s.compromised[v] = 0;
      s.hidden[v] = 0;
      return {};
    case BlueActionType::ReduceNodeVulnerability:
      s.vulnerability[v] = std::max(cfg.rnv_floor, s.vulnerability[v] * cfg.rnv_multiplier);
      return {};
    case BlueActionType::Restore:
      s.compromised[v] = 0;
      s.hidden[v] = 0;
      s.vulnerability[v] = s.initial_vulnerability[v];
      return {};
    case BlueActionType::Isolate:
      if (s.isolated[v]) return {false};
      s.isolated[v] = 1;
      return {};
    case BlueActionType::Reconnect:
      if (!s.isolated[v]) return {false};
      s.isolated[v] = 0;
      return {};
  }
  return {};
}

namespace {

// One BasicAttack roll against v. Success probability is v's vulnerability.
bool basic_attack(EpisodeState& s, NodeId v, const EnvConfig& cfg, RedEffect& eff) {
  const bool success = uniform01(s.rng) < s.vulnerability[v];
  if (!success) return false;
  s.compromised[v] = 1;
  s.hidden[v] = uniform01(s.rng) < cfg.hidden_probability ? 1 : 0;
  eff.newly_compromised.push_back(v);
  return true;
}

}  // namespace

RedEffect apply_red(EpisodeState& s, const graph::Network& net, const RedAction& a,
                    const EnvConfig& cfg) {
  if (is_targeted(a.type)) check_node(net, a.node, to_string(a.type));
  RedEffect eff;
  if (a.type == RedActionType::DoNothing) return eff;
  if (!red_has_foothold(s, net)) {
    eff.applied = false;
    return eff;
  }
  switch (a.type) {
    case RedActionType::DoNothing:
      break;
    case RedActionType::BasicAttack:
      if (!attackable(s, net, a.node)) {
        eff.applied = false;
        break;
      }
      basic_attack(s, a.node, cfg, eff);
      break;
    case RedActionType::ZeroDayAttack:
      if (s.zero_day_budget <= 0 || !attackable(s, net, a.node)) {
        eff.applied = false;
        break;
      }
      s.zero_day_budget -= 1;
      s.compromised[a.node] = 1;
      s.hidden[a.node] = 1;
      eff.newly_compromised.push_back(a.node);
      break;
    case RedActionType::RandomMove:
      if (a.node == s.red_locus || !edge_active(s, net, s.red_locus, a.node)) {
        eff.applied = false;
        break;
      }
      s.red_locus = a.node;
      break;
    case RedActionType::Spread: {
      // Targets are fixed before any roll so new compromises do not chain
      // within one step.
      auto targets = attackable_nodes(s, net);
      for (NodeId v : targets) basic_attack(s, v, cfg, eff);
      break;
    }
    case RedActionType::Intrude:
      for (NodeId v = 0; v < net.node_count(); ++v) {
        if (!s.compromised[v] && !s.isolated[v]) basic_attack(s, v, cfg, eff);
      }
      break;
  }
  return eff;
}

StepResult step(EpisodeState& s, const graph::Network& net, const BlueAction& blue,
                const RedAction& red, const EnvConfig& cfg) {
  if (s.done()) throw Error("step called after the episode finished");
  StepResult r;
  r.blue = apply_blue(s, net, blue, cfg);
  r.red = apply_red(s, net, red, cfg);
  s.step += 1;
  if (cfg.zero_day_period > 0 && s.step % cfg.zero_day_period == 0) s.zero_day_budget += 1;

  for (std::size_t k = 0; k < s.placement.hvns.size(); ++k) {
    if (s.compromised[s.placement.hvns[k]]) {
      s.outcome = Outcome::RedWin;
      s.captured = s.placement.hvns[k];
      s.placement.target_index = static_cast<int>(k);
      break;
    }
  }
  if (!s.done() && s.step >= cfg.max_steps) s.outcome = Outcome::BlueWin;

  r.blue_reward = -(cfg.compromised_cost * s.compromised_count() +
                    cfg.isolated_cost * s.isolated_count());
  if (s.outcome == Outcome::RedWin) r.blue_reward -= cfg.red_win_penalty;
  r.red_reward = -r.blue_reward;
  r.done = s.done();
  return r;
}

StateObservation observe(const EpisodeState& s, const graph::Network& net, Observer who) {
  const auto n = static_cast<std::size_t>(net.node_count());
  StateObservation o;
  o.step = s.step;
  o.vulnerability = s.vulnerability;
  o.visible_compromised.resize(n);
  o.hidden_compromised.resize(n);
  o.is_entry.assign(n, 0);
  o.is_hvn.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    o.visible_compromised[v] = s.compromised[v] && !s.hidden[v];
    o.hidden_compromised[v] = s.compromised[v] && s.hidden[v];
  }
  o.isolated = s.isolated;
  o.is_entry[net.entry()] = 1;
  for (NodeId h : s.placement.hvns) o.is_hvn[h] = 1;
  o.edges = active_edges(s, net);
  o.red_locus = s.red_locus;
  o.zero_day_budget = s.zero_day_budget;
  return mask(o, who);
}

StateObservation mask(const StateObservation& full, Observer who) {
  StateObservation o = full;
  if (who == Observer::Full) return o;
  std::fill(o.is_hvn.begin(), o.is_hvn.end(), 0);
  if (who == Observer::Blue) {
    std::fill(o.hidden_compromised.begin(), o.hidden_compromised.end(), 0);
    o.red_locus = -1;
    o.zero_day_budget = -1;
  }
  return o;
}

namespace {

void validate_blue(const BlueAction& a, const graph::Network& net, int t, const std::string& id) {
  if (is_targeted(a.type) && (a.node < 0 || a.node >= net.node_count())) {
    throw Error("rollout: step " + std::to_string(t) + ": blue agent '" + id +
                "' returned invalid action " + std::string(to_string(a.type)) + "(" +
                std::to_string(a.node) + ")");
  }
}

void validate_red(const RedAction& a, const graph::Network& net, int t, const std::string& id) {
  if (is_targeted(a.type) && (a.node < 0 || a.node >= net.node_count())) {
    throw Error("rollout: step " + std::to_string(t) + ": red agent '" + id +
                "' returned invalid action " + std::string(to_string(a.type)) + "(" +
                std::to_string(a.node) + ")");
  }
}

}  // namespace

EpisodeTrajectory rollout(const graph::Network& net, const graph::CostMatrix& cm,
                          BluePolicy& blue, RedPolicy& red, std::uint64_t seed,
                          const RolloutOptions& opts) {
  EpisodeState s = reset(net, derive_seed(seed, {1}), opts.cfg);
  EpisodeContext ctx{net, cm, s.placement, opts.cfg};
  blue.begin_episode(ctx, derive_seed(seed, {2}));
  red.begin_episode(ctx, derive_seed(seed, {3}));

  EpisodeTrajectory traj;
  traj.episode_id = opts.episode_id;
  traj.network = net.name();
  traj.network_seed = net.seed();
  traj.seed = seed;
  traj.blue_id = blue.id();
  traj.red_id = red.id();
  traj.entry = net.entry();

  while (!s.done()) {
    const int t = s.step;
    StateObservation full = observe(s, net, Observer::Full);
    const BlueAction b = blue.act(mask(full, Observer::Blue), ctx);
    const RedAction r = red.act(mask(full, Observer::Red), ctx);
    validate_blue(b, net, t, traj.blue_id);
    validate_red(r, net, t, traj.red_id);
    StepResult res = step(s, net, b, r, opts.cfg);
    traj.total_blue_reward += res.blue_reward;
    if (opts.record_steps) {
      traj.steps.push_back(StepRecord{t, std::move(full), b, r,
                                      std::move(res.red.newly_compromised), res.blue_reward});
    }
  }
  if (opts.record_steps) {
    traj.steps.push_back(StepRecord{s.step, observe(s, net, Observer::Full), std::nullopt,
                                    std::nullopt, {}, 0.0});
  }
  traj.outcome = s.outcome;
  traj.target = s.captured;
  traj.final_step = s.step;
  traj.placement = s.placement;
  return traj;
}

}  // namespace hotdesk::env
