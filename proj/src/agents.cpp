#include "hotdesk/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hotdesk/error.hpp"

namespace hotdesk::agents {

using env::BlueAction;
using env::BlueActionType;
using env::RedAction;
using env::RedActionType;

std::vector<BluePolicyId> all_blue_policies() {
  return {BluePolicyId::Sleep,   BluePolicyId::Random,  BluePolicyId::RandomSmart,
          BluePolicyId::Isolate, BluePolicyId::MSN_D,   BluePolicyId::MSN_S,
          BluePolicyId::Restore, BluePolicyId::MSN_RNV, BluePolicyId::MSN_Restore,
          BluePolicyId::MSN_RNV_Restore};
}

std::vector<RedPolicyId> all_red_policies() {
  return {RedPolicyId::RandomSimple,     RedPolicyId::RandomSmart,
          RedPolicyId::TargetConnected,  RedPolicyId::TargetUnconnected,
          RedPolicyId::TargetVulnerable, RedPolicyId::TargetResilient,
          RedPolicyId::HVTSimple,        RedPolicyId::HVTPreference,
          RedPolicyId::HVTPreferenceSP};
}

bool uses_hvn_preferences(RedPolicyId id) {
  return id == RedPolicyId::HVTPreference || id == RedPolicyId::HVTPreferenceSP;
}

int parameter_dim(RedPolicyId id) { return uses_hvn_preferences(id) ? 3 : 6; }

void validate(const RedPolicySpec& spec) {
  if (static_cast<int>(spec.params.size()) != parameter_dim(spec.id)) {
    throw ConfigError("red policy '" + std::string(red_base_id(spec.id)) + "' expects " +
                      std::to_string(parameter_dim(spec.id)) + " parameters, got " +
                      std::to_string(spec.params.size()));
  }
  double total = 0.0;
  for (double x : spec.params) {
    if (!(x >= 0.0)) throw ConfigError("red policy parameters must be non-negative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("red policy parameters must sum to 1");
}

std::vector<double> sample_dirichlet(double alpha, int dim, Rng& rng) {
  if (!(alpha > 0.0)) throw ConfigError("Dirichlet concentration must be positive");
  if (dim < 1) throw ConfigError("Dirichlet dimension must be positive");
  // Gamma(a) = Gamma(a + 1) * U^(1/a), evaluated in log space.
  std::vector<double> log_g(static_cast<std::size_t>(dim));
  std::gamma_distribution<double> gamma(alpha + 1.0, 1.0);
  for (auto& lg : log_g) {
    const double g = gamma(rng);
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    lg = std::log(g) + std::log(u) / alpha;
  }
  const double hi = *std::max_element(log_g.begin(), log_g.end());
  std::vector<double> x(log_g.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::exp(log_g[i] - hi);
    total += x[i];
  }
  for (double& v : x) v /= total;
  return x;
}

SpeciesSample sample_species(double alpha, int count, int dim, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw ConfigError("sample_species: alpha must be positive");
  if (count < 1) throw ConfigError("sample_species: count must be at least 1");
  SpeciesSample s{alpha, {}};
  s.members.reserve(static_cast<std::size_t>(count));
  Rng rng(seed);
  for (int i = 0; i < count; ++i) s.members.push_back(sample_dirichlet(alpha, dim, rng));
  return s;
}

// ---------------------------------------------------------------------------
// Blue

double defensive_probability(int hops_to_hvn, int dmax) {
  const double ratio = dmax > 0 ? static_cast<double>(hops_to_hvn) / dmax : 0.0;
  return std::clamp(1.0 - ratio, 0.1, 0.95);
}

std::optional<std::pair<NodeId, int>> nearest_visible_threat(const env::StateObservation& obs,
                                                             const env::EpisodeContext& ctx) {
  std::optional<std::pair<NodeId, int>> best;
  for (NodeId v = 0; v < obs.node_count(); ++v) {
    if (!obs.visible_compromised[v]) continue;
    int d = std::numeric_limits<int>::max();
    for (NodeId h : ctx.placement.hvns) d = std::min(d, ctx.cm(v, h));
    if (!best || d < best->second) best = std::make_pair(v, d);
  }
  return best;
}

namespace {

template <typename Pred>
std::vector<NodeId> nodes_where(int n, Pred&& pred) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < n; ++v) {
    if (pred(v)) out.push_back(v);
  }
  return out;
}

NodeId pick(const std::vector<NodeId>& xs, Rng& rng) { return xs[uniform_index(rng, xs.size())]; }

bool chance(Rng& rng, double p) { return uniform01(rng) < p; }

NodeId most_vulnerable(const env::StateObservation& obs) {
  NodeId best = -1;
  for (NodeId v = 0; v < obs.node_count(); ++v) {
    if (obs.isolated[v]) continue;
    if (best < 0 || obs.vulnerability[v] > obs.vulnerability[best]) best = v;
  }
  return best;
}

BlueAction scan_or_harden(const env::StateObservation& obs, bool may_harden, Rng& rng) {
  if (may_harden && chance(rng, 0.5)) {
    NodeId v = most_vulnerable(obs);
    if (v >= 0) return {BlueActionType::ReduceNodeVulnerability, v};
  }
  return {BlueActionType::Scan};
}

BlueAction random_blue(const env::StateObservation& obs, bool smart, Rng& rng) {
  const auto type = static_cast<BlueActionType>(uniform_index(rng, 7));
  if (!env::is_targeted(type)) return {type};
  const int n = obs.node_count();
  if (!smart) return {type, static_cast<NodeId>(uniform_index(rng, static_cast<std::size_t>(n)))};

  std::vector<NodeId> candidates;
  switch (type) {
    case BlueActionType::MakeSafeNode:
    case BlueActionType::Restore:
      candidates = nodes_where(n, [&](NodeId v) { return obs.visible_compromised[v] != 0; });
      break;
    case BlueActionType::ReduceNodeVulnerability:
    case BlueActionType::Isolate:
      candidates = nodes_where(n, [&](NodeId v) { return obs.isolated[v] == 0; });
      break;
    case BlueActionType::Reconnect:
      candidates = nodes_where(n, [&](NodeId v) { return obs.isolated[v] != 0; });
      break;
    default:
      break;
  }
  if (candidates.empty()) return {BlueActionType::DoNothing};
  return {type, pick(candidates, rng)};
}

BlueAction isolate_blue(const env::StateObservation& obs, const env::EpisodeContext& ctx) {
  const NodeId entry = ctx.net.entry();
  if (!obs.isolated[entry]) return {BlueActionType::Isolate, entry};
  for (NodeId h : ctx.placement.hvns) {
    if (!obs.isolated[h]) return {BlueActionType::Isolate, h};
  }
  for (NodeId v = 0; v < obs.node_count(); ++v) {
    if (obs.visible_compromised[v]) return {BlueActionType::MakeSafeNode, v};
  }
  return {BlueActionType::Scan};
}

}  // namespace

BlueAction blue_act(BluePolicyId policy, const env::StateObservation& obs,
                    const env::EpisodeContext& ctx, Rng& rng) {
  switch (policy) {
    case BluePolicyId::Sleep:
      return {};
    case BluePolicyId::Random:
      return random_blue(obs, false, rng);
    case BluePolicyId::RandomSmart:
      return random_blue(obs, true, rng);
    case BluePolicyId::Isolate:
      return isolate_blue(obs, ctx);
    case BluePolicyId::MSN_D: {
      auto threat = nearest_visible_threat(obs, ctx);
      if (threat && threat->second <= 3) return {BlueActionType::MakeSafeNode, threat->first};
      return {BlueActionType::Scan};
    }
    case BluePolicyId::MSN_S:
    case BluePolicyId::Restore:
    case BluePolicyId::MSN_RNV:
    case BluePolicyId::MSN_Restore:
    case BluePolicyId::MSN_RNV_Restore: {
      const bool harden =
          policy == BluePolicyId::MSN_RNV || policy == BluePolicyId::MSN_RNV_Restore;
      auto threat = nearest_visible_threat(obs, ctx);
      if (!threat || !chance(rng, defensive_probability(threat->second, ctx.cm.diameter))) {
        return scan_or_harden(obs, harden, rng);
      }
      const NodeId v = threat->first;
      switch (policy) {
        case BluePolicyId::Restore:
          return {BlueActionType::Restore, v};
        case BluePolicyId::MSN_Restore:
        case BluePolicyId::MSN_RNV_Restore:
          return {chance(rng, 0.5) ? BlueActionType::MakeSafeNode : BlueActionType::Restore, v};
        default:
          return {BlueActionType::MakeSafeNode, v};
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Red

int select_preferred_target(const std::vector<double>& preferences,
                            const env::EpisodeContext& ctx) {
  const auto& hvns = ctx.placement.hvns;
  if (preferences.size() != hvns.size()) {
    throw Error("select_preferred_target: preference vector length differs from HVN count");
  }
  int best = -1;
  double best_score = -1.0;
  for (std::size_t i = 0; i < hvns.size(); ++i) {
    const double score = preferences[i] / ctx.cm(ctx.net.entry(), hvns[i]);
    if (best < 0 || score > best_score ||
        (score == best_score && hvns[i] < hvns[static_cast<std::size_t>(best)])) {
      best = static_cast<int>(i);
      best_score = score;
    }
  }
  return best;
}

std::vector<NodeId> attackable_from(const env::StateObservation& obs, NodeId entry) {
  const int n = obs.node_count();
  auto source = [&](NodeId v) { return (v == entry || obs.compromised(v)) && !obs.isolated[v]; };
  std::vector<std::uint8_t> reach(static_cast<std::size_t>(n), 0);
  for (auto [a, b] : obs.edges) {
    if (source(a)) reach[b] = 1;
    if (source(b)) reach[a] = 1;
  }
  if (!obs.isolated[entry]) reach[entry] = 1;
  return nodes_where(n, [&](NodeId v) {
    return reach[v] && !obs.compromised(v) && !obs.isolated[v];
  });
}

namespace {

std::vector<int> active_degree(const env::StateObservation& obs) {
  std::vector<int> deg(static_cast<std::size_t>(obs.node_count()), 0);
  for (auto [a, b] : obs.edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

std::vector<NodeId> locus_moves(const env::StateObservation& obs) {
  std::vector<NodeId> out;
  for (auto [a, b] : obs.edges) {
    if (a == obs.red_locus) out.push_back(b);
    if (b == obs.red_locus) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Deterministic target rule for the Target* agents; random otherwise.
NodeId choose_target(RedPolicyId id, const std::vector<NodeId>& candidates,
                     const env::StateObservation& obs, Rng& rng) {
  auto best_by = [&](auto key) {
    NodeId best = candidates.front();
    for (NodeId v : candidates) {
      if (key(v) > key(best)) best = v;
    }
    return best;
  };
  switch (id) {
    case RedPolicyId::TargetConnected: {
      auto deg = active_degree(obs);
      return best_by([&](NodeId v) { return deg[v]; });
    }
    case RedPolicyId::TargetUnconnected: {
      auto deg = active_degree(obs);
      return best_by([&](NodeId v) { return -deg[v]; });
    }
    case RedPolicyId::TargetVulnerable:
      return best_by([&](NodeId v) { return obs.vulnerability[v]; });
    case RedPolicyId::TargetResilient:
      return best_by([&](NodeId v) { return -obs.vulnerability[v]; });
    default:
      return pick(candidates, rng);
  }
}

RedAction attack(NodeId v, int budget) {
  return {budget > 0 ? RedActionType::ZeroDayAttack : RedActionType::BasicAttack, v};
}

RedAction probabilistic_red(const RedPolicySpec& spec, const env::StateObservation& obs,
                            const env::EpisodeContext& ctx, Rng& rng) {
  std::discrete_distribution<int> pick_action(spec.params.begin(), spec.params.end());
  auto type = static_cast<RedActionType>(pick_action(rng));
  const bool smart = spec.id != RedPolicyId::RandomSimple && spec.id != RedPolicyId::HVTSimple;
  if (smart && type == RedActionType::ZeroDayAttack && obs.zero_day_budget <= 0) {
    type = RedActionType::BasicAttack;
  }
  switch (type) {
    case RedActionType::BasicAttack:
    case RedActionType::ZeroDayAttack: {
      auto targets = attackable_from(obs, ctx.net.entry());
      if (targets.empty()) return {};
      return {type, choose_target(spec.id, targets, obs, rng)};
    }
    case RedActionType::RandomMove: {
      auto moves = locus_moves(obs);
      if (moves.empty()) return {};
      return {type, choose_target(spec.id, moves, obs, rng)};
    }
    default:
      return {type};
  }
}

void plan_route(const RedPolicySpec& spec, const env::EpisodeContext& ctx, RedMemory& memory) {
  memory.target_index = select_preferred_target(spec.params, ctx);
  memory.target = ctx.placement.hvns[static_cast<std::size_t>(memory.target_index)];
  memory.path = graph::shortest_path(ctx.net, ctx.net.entry(), memory.target);
  memory.planned = true;
}

// Next node on the planned route: the one after the furthest compromised
// route node (the entry always counts as held).
std::optional<NodeId> next_on_route(const env::StateObservation& obs, const RedMemory& memory) {
  std::size_t held = 0;
  for (std::size_t k = 1; k < memory.path.size(); ++k) {
    if (obs.compromised(memory.path[k])) held = k;
  }
  if (held + 1 >= memory.path.size()) return std::nullopt;
  return memory.path[held + 1];
}

}  // namespace

RedAction red_act(const RedPolicySpec& spec, const env::StateObservation& obs,
                  const env::EpisodeContext& ctx, RedMemory& memory, Rng& rng) {
  switch (spec.id) {
    case RedPolicyId::HVTPreference:
    case RedPolicyId::HVTPreferenceSP: {
      if (!memory.planned) plan_route(spec, ctx, memory);
      const auto targets = attackable_from(obs, ctx.net.entry());
      const bool deviate = spec.id == RedPolicyId::HVTPreference && !chance(rng, 0.8);
      if (deviate) {
        if (targets.empty()) return {};
        return {RedActionType::BasicAttack, pick(targets, rng)};
      }
      auto next = next_on_route(obs, memory);
      if (!next || !std::binary_search(targets.begin(), targets.end(), *next)) return {};
      return attack(*next, obs.zero_day_budget);
    }
    case RedPolicyId::HVTSimple: {
      const auto targets = attackable_from(obs, ctx.net.entry());
      std::vector<NodeId> hvn_targets;
      for (NodeId h : ctx.placement.hvns) {
        if (std::binary_search(targets.begin(), targets.end(), h)) hvn_targets.push_back(h);
      }
      if (!hvn_targets.empty()) {
        return attack(*std::min_element(hvn_targets.begin(), hvn_targets.end()),
                      obs.zero_day_budget);
      }
      return probabilistic_red(spec, obs, ctx, rng);
    }
    default:
      return probabilistic_red(spec, obs, ctx, rng);
  }
}

}  // namespace hotdesk::agents
