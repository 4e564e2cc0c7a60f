#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hotdesk/env.hpp"
#include "hotdesk/rng.hpp"

namespace hotdesk::agents {

using graph::NodeId;

enum class BluePolicyId {
  Sleep,
  Random,
  RandomSmart,
  Isolate,
  MSN_D,
  MSN_S,
  Restore,
  MSN_RNV,
  MSN_Restore,
  MSN_RNV_Restore,
};

enum class RedPolicyId {
  RandomSimple,
  RandomSmart,
  TargetConnected,
  TargetUnconnected,
  TargetVulnerable,
  TargetResilient,
  HVTSimple,
  HVTPreference,
  HVTPreferenceSP,
};

std::vector<BluePolicyId> all_blue_policies();
std::vector<RedPolicyId> all_red_policies();

/// True for the two agents parameterized by a preference over the three
/// high-value nodes; the others carry a probability over Red's six actions.
bool uses_hvn_preferences(RedPolicyId id);
/// Length of the parameter vector: 3 or 6.
int parameter_dim(RedPolicyId id);

struct RedPolicySpec {
  RedPolicyId id = RedPolicyId::RandomSimple;
  std::vector<double> params;
};

/// Checks the parameter vector length and that it lies on the simplex.
void validate(const RedPolicySpec& spec);

// ---------------------------------------------------------------------------
// Dirichlet species

struct SpeciesSample {
  double alpha = 0.0;
  std::vector<std::vector<double>> members;
};

/// One symmetric Dirichlet(alpha) draw, computed from log-Gamma variates so
/// very small alpha does not underflow to an all-zero vector.
std::vector<double> sample_dirichlet(double alpha, int dim, Rng& rng);

/// `count` i.i.d. draws, deterministic per seed.
SpeciesSample sample_species(double alpha, int count, int dim, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Policies

/// Probability of a defensive action for the stochastic MSN family:
/// clamp(1 - d / dmax, 0.1, 0.95).
double defensive_probability(int hops_to_hvn, int dmax);

/// Visible compromised node closest to any high-value node (ties: lowest
/// id) and its hop distance; nullopt when Blue sees no compromise.
std::optional<std::pair<NodeId, int>> nearest_visible_threat(const env::StateObservation& obs,
                                                             const env::EpisodeContext& ctx);

/// Blue policies see the Blue observation plus the location of the assets
/// they defend (ctx.placement).
env::BlueAction blue_act(BluePolicyId policy, const env::StateObservation& obs,
                         const env::EpisodeContext& ctx, Rng& rng);

/// Per-episode memory of the Red policies that plan ahead.
struct RedMemory {
  bool planned = false;
  int target_index = -1;
  NodeId target = -1;
  std::vector<NodeId> path;  // entry ... target
};

/// Preference-weighted choice used by HVTPreference(SP):
/// argmax_i pi_i / dist(entry, hvn_i), ties to the lowest node id.
int select_preferred_target(const std::vector<double>& preferences, const env::EpisodeContext& ctx);

/// Nodes Red could attack given its observation (see env::attackable).
std::vector<NodeId> attackable_from(const env::StateObservation& obs, NodeId entry);

env::RedAction red_act(const RedPolicySpec& spec, const env::StateObservation& obs,
                       const env::EpisodeContext& ctx, RedMemory& memory, Rng& rng);

// ---------------------------------------------------------------------------
// Registry
//
// Blue ids: blue.sleep, blue.random, blue.random_smart, blue.isolate,
// blue.msn_d, blue.msn_s, blue.restore, blue.msn_rnv, blue.msn_restore,
// blue.msn_rnv_restore.
//
// Red ids: red.random_simple, red.random_smart, red.target_connected,
// red.target_unconnected, red.target_vulnerable, red.target_resilient,
// red.hvt_simple, red.hvt_pref, red.hvt_pref_sp; optionally followed by
// ":key=value,..." with
//   alpha=A,seed=S,index=I   member I of sample_species(A, I+1, dim, S)
//   alpha=A                  a fresh Dirichlet(A) member every episode
//   p=x|y|z                  explicit parameter vector
// Without parameters the vector is uniform.

std::string_view blue_id(BluePolicyId id);
std::string_view red_base_id(RedPolicyId id);
BluePolicyId parse_blue_id(std::string_view id);

struct RedAgentSpec {
  RedPolicyId id = RedPolicyId::RandomSimple;
  std::optional<std::vector<double>> params;  // fixed member
  std::optional<double> species_alpha;        // set when drawn per episode
  std::string text;                           // canonical id string
};

RedAgentSpec parse_red_id(std::string_view id);
std::string format_red_id(RedPolicyId id, const std::vector<double>& params);

std::unique_ptr<env::BluePolicy> make_blue(std::string_view id);
std::unique_ptr<env::RedPolicy> make_red(std::string_view id);
std::unique_ptr<env::RedPolicy> make_red(const RedAgentSpec& spec);

std::vector<std::string> blue_ids();
std::vector<std::string> red_ids();

}  // namespace hotdesk::agents
