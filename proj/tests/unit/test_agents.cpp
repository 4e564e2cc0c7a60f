#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "../oracles.hpp"
#include "hotdesk/agents.hpp"
#include "hotdesk/error.hpp"

using namespace hotdesk;
using namespace hotdesk::agents;
using env::BlueActionType;
using env::RedActionType;

namespace {

// Centre 0 with one leg per length; legs are numbered consecutively.
graph::Network spider(const std::vector<int>& legs) {
  std::vector<std::pair<int, int>> e;
  int next = 1;
  for (int len : legs) {
    int prev = 0;
    for (int k = 0; k < len; ++k) {
      e.emplace_back(prev, next);
      prev = next++;
    }
  }
  return graph::Network(next, e, 0);
}

struct Scene {
  graph::Network net;
  graph::CostMatrix cm;
  env::EpisodeState s;
  env::EnvConfig cfg;
  explicit Scene(graph::Network n, std::uint64_t seed = 1)
      : net(std::move(n)), cm(graph::all_pairs_shortest_paths(net)), s(env::reset(net, seed)) {}
  env::EpisodeContext ctx() const { return {net, cm, s.placement, cfg}; }
};

RedPolicySpec action_only(RedPolicyId id, RedActionType t) {
  std::vector<double> p(6, 0.0);
  p[static_cast<std::size_t>(t)] = 1.0;
  return {id, p};
}

}  // namespace

TEST_SUITE("agents") {

TEST_CASE("dirichlet species") {
  auto sp = sample_species(0.01, 10000, 3, 42);
  CHECK(sp.members.size() == 10000);
  int sparse = 0;
  for (const auto& m : sp.members) {
    double total = 0.0;
    for (double x : m) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
    sparse += *std::max_element(m.begin(), m.end()) > 0.95;
  }
  CHECK(sparse >= 9000);
  CHECK(sample_species(0.01, 5, 6, 1).members == sample_species(0.01, 5, 6, 1).members);
  CHECK_THROWS_AS(sample_species(0.0, 5, 3, 1), ConfigError);
  CHECK_THROWS_AS(sample_species(-1.0, 5, 3, 1), ConfigError);

  // Large alpha concentrates near the centre.
  auto flat = sample_species(1000.0, 200, 3, 3);
  for (const auto& m : flat.members) {
    for (double x : m) CHECK(std::abs(x - 1.0 / 3) < 0.1);
  }
}

TEST_CASE("defensive probability") {
  CHECK(defensive_probability(0, 8) == 0.95);
  CHECK(defensive_probability(4, 8) == 0.5);
  CHECK(defensive_probability(8, 8) == 0.1);
  CHECK(defensive_probability(20, 8) == 0.1);
}

TEST_CASE("MSN_D distance rule") {
  Scene sc(spider({5, 5, 5}));  // HVNs are the three leg ends 5, 10, 15
  std::set<int> h(sc.s.placement.hvns.begin(), sc.s.placement.hvns.end());
  CHECK(h == std::set<int>{5, 10, 15});
  Rng rng(1);
  sc.s.compromised.assign(16, 0);

  sc.s.compromised[3] = 1;  // two hops from node 5
  auto obs = env::observe(sc.s, sc.net, env::Observer::Blue);
  CHECK(blue_act(BluePolicyId::MSN_D, obs, sc.ctx(), rng) == env::BlueAction{BlueActionType::MakeSafeNode, 3});

  sc.s.compromised[3] = 0;
  sc.s.compromised[1] = 1;  // four hops from node 5
  obs = env::observe(sc.s, sc.net, env::Observer::Blue);
  CHECK(blue_act(BluePolicyId::MSN_D, obs, sc.ctx(), rng).type == BlueActionType::Scan);

  // Hidden compromises are invisible to Blue.
  sc.s.compromised[1] = 0;
  sc.s.compromised[4] = 1;
  sc.s.hidden[4] = 1;
  obs = env::observe(sc.s, sc.net, env::Observer::Blue);
  CHECK(blue_act(BluePolicyId::MSN_D, obs, sc.ctx(), rng).type == BlueActionType::Scan);
  CHECK_FALSE(nearest_visible_threat(obs, sc.ctx()).has_value());
}

TEST_CASE("sleep and isolate") {
  Scene sc(spider({2, 3, 4}));
  Rng rng(2);
  auto obs = env::observe(sc.s, sc.net, env::Observer::Blue);
  CHECK(blue_act(BluePolicyId::Sleep, obs, sc.ctx(), rng) == env::BlueAction{});

  std::vector<int> isolated;
  for (int k = 0; k < 4; ++k) {
    obs = env::observe(sc.s, sc.net, env::Observer::Blue);
    auto a = blue_act(BluePolicyId::Isolate, obs, sc.ctx(), rng);
    CHECK(a.type == BlueActionType::Isolate);
    isolated.push_back(a.node);
    env::apply_blue(sc.s, sc.net, a);
  }
  CHECK(isolated[0] == sc.net.entry());
  CHECK(std::vector<int>(isolated.begin() + 1, isolated.end()) == sc.s.placement.hvns);
  obs = env::observe(sc.s, sc.net, env::Observer::Blue);
  // Entry is still visibly compromised after isolation.
  CHECK(blue_act(BluePolicyId::Isolate, obs, sc.ctx(), rng) ==
        env::BlueAction{BlueActionType::MakeSafeNode, sc.net.entry()});
}

TEST_CASE("MSN stochastic family frequencies") {
  Scene sc(spider({5, 5, 5}));
  sc.s.compromised.assign(16, 0);
  sc.s.compromised[1] = 1;  // 4 hops; diameter 10 -> p = 0.6
  auto obs = env::observe(sc.s, sc.net, env::Observer::Blue);
  Rng rng(3);
  const int n = 20000;
  int defend = 0, restore = 0, rnv = 0;
  for (int k = 0; k < n; ++k) {
    defend += blue_act(BluePolicyId::MSN_S, obs, sc.ctx(), rng).type == BlueActionType::MakeSafeNode;
    auto a = blue_act(BluePolicyId::MSN_RNV_Restore, obs, sc.ctx(), rng);
    restore += a.type == BlueActionType::Restore;
    rnv += a.type == BlueActionType::ReduceNodeVulnerability;
  }
  CHECK(std::abs(defend / double(n) - 0.6) < 0.02);
  CHECK(std::abs(restore / double(n) - 0.3) < 0.02);
  CHECK(std::abs(rnv / double(n) - 0.2) < 0.02);
}

TEST_CASE("HVT target selection") {
  Scene sc(spider({2, 5, 9}));
  sc.s.placement.hvns = {2, 7, 16};
  CHECK(sc.cm(0, 2) == 2);
  CHECK(sc.cm(0, 7) == 5);
  CHECK(sc.cm(0, 16) == 9);
  CHECK(select_preferred_target({1.0 / 3, 1.0 / 3, 1.0 / 3}, sc.ctx()) == 0);
  CHECK(select_preferred_target({0.0, 0.0, 1.0}, sc.ctx()) == 2);
  sc.s.placement.hvns = {16, 7, 2};
  CHECK(select_preferred_target({1.0, 0.0, 0.0}, sc.ctx()) == 0);
  // Equal scores go to the lower node id.
  sc.s.placement.hvns = {16, 7, 2};
  CHECK(select_preferred_target({0.0, 0.5, 0.2}, sc.ctx()) == 2);
}

TEST_CASE("target variants") {
  graph::Network star(4, {{0, 1}, {0, 2}, {0, 3}}, 0);
  env::EpisodeState s;
  s.vulnerability = {0.5, 0.3, 0.9, 0.5};
  s.initial_vulnerability = s.vulnerability;
  s.compromised = {1, 0, 0, 0};
  s.hidden = {0, 0, 0, 0};
  s.isolated = {0, 0, 0, 0};
  s.placement = {{1, 2, 3}, -1};
  s.red_locus = 0;
  s.zero_day_budget = 0;
  auto cm = graph::all_pairs_shortest_paths(star);
  env::EnvConfig cfg;
  env::EpisodeContext ctx{star, cm, s.placement, cfg};
  auto obs = env::observe(s, star, env::Observer::Red);
  Rng rng(4);
  RedMemory mem;
  auto spec = action_only(RedPolicyId::TargetVulnerable, RedActionType::BasicAttack);
  CHECK(red_act(spec, obs, ctx, mem, rng) == env::RedAction{RedActionType::BasicAttack, 2});
  spec.id = RedPolicyId::TargetResilient;
  CHECK(red_act(spec, obs, ctx, mem, rng) == env::RedAction{RedActionType::BasicAttack, 1});
  spec.id = RedPolicyId::TargetConnected;  // all leaves have degree 1: lowest id
  CHECK(red_act(spec, obs, ctx, mem, rng) == env::RedAction{RedActionType::BasicAttack, 1});

  // ZeroDay without budget: wasted by RandomSimple, converted by the rest.
  auto zd = action_only(RedPolicyId::RandomSimple, RedActionType::ZeroDayAttack);
  CHECK(red_act(zd, obs, ctx, mem, rng).type == RedActionType::ZeroDayAttack);
  zd.id = RedPolicyId::RandomSmart;
  CHECK(red_act(zd, obs, ctx, mem, rng).type == RedActionType::BasicAttack);
}

TEST_CASE("HVT simple attacks an adjacent HVN deterministically") {
  graph::Network star(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, 0);
  auto cm = graph::all_pairs_shortest_paths(star);
  env::EnvConfig cfg;
  auto s = env::reset(star, 7);
  s.placement.hvns = {4, 2, 3};
  env::EpisodeContext ctx{star, cm, s.placement, cfg};
  auto obs = env::observe(s, star, env::Observer::Red);
  Rng rng(5);
  RedMemory mem;
  RedPolicySpec spec{RedPolicyId::HVTSimple, std::vector<double>(6, 1.0 / 6)};
  CHECK(red_act(spec, obs, ctx, mem, rng) == env::RedAction{RedActionType::ZeroDayAttack, 2});
  obs.zero_day_budget = 0;
  CHECK(red_act(spec, obs, ctx, mem, rng) == env::RedAction{RedActionType::BasicAttack, 2});
}

TEST_CASE("shortest-path attacker follows a BFS shortest path") {
  auto sleep = make_blue("blue.sleep");
  for (const std::string topo : {"tree30", "tree90", "forest72", "optical54"}) {
    auto net = graph::generate_network(topo, 3);
    auto cm = graph::all_pairs_shortest_paths(net);
    oracle::Edges edges(net.edges().begin(), net.edges().end());
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto red = make_red("red.hvt_pref_sp:p=0.2|0.5|0.3");
      auto t = env::rollout(net, cm, *sleep, *red, seed);
      REQUIRE(t.outcome == env::Outcome::RedWin);
      std::vector<int> seq{net.entry()};
      for (const auto& st : t.steps) {
        for (int v : st.red_compromised) seq.push_back(v);
      }
      CHECK(seq.back() == t.target);
      CHECK(static_cast<int>(seq.size()) - 1 == oracle::pair_bfs(net.node_count(), edges, net.entry(), t.target));
      for (std::size_t k = 1; k < seq.size(); ++k) CHECK(net.adjacent(seq[k - 1], seq[k]));
      const int ti = select_preferred_target({0.2, 0.5, 0.3}, {net, cm, t.placement, {}});
      CHECK(t.placement.hvns[ti] == t.target);
    }
  }
}

TEST_CASE("policies always return legal actions") {
  auto net = graph::generate_network("tree30", 5);
  auto cm = graph::all_pairs_shortest_paths(net);
  env::EnvConfig cfg;
  Rng gen(99);
  std::vector<env::EpisodeState> states;
  for (int k = 0; k < 500; ++k) {
    auto s = env::reset(net, gen());
    const double pc = uniform01(gen), pi = 0.3 * uniform01(gen);
    for (int v = 0; v < 30; ++v) {
      s.compromised[v] = uniform01(gen) < pc;
      s.hidden[v] = s.compromised[v] && uniform01(gen) < 0.5;
      s.isolated[v] = uniform01(gen) < pi;
    }
    s.zero_day_budget = static_cast<int>(uniform_index(gen, 3));
    const auto locus_candidates = net.neighbors(net.entry());
    s.red_locus = uniform01(gen) < 0.5 ? net.entry() : locus_candidates[uniform_index(gen, locus_candidates.size())];
    states.push_back(std::move(s));
  }

  for (auto id : all_blue_policies()) {
    Rng rng(7);
    bool ok = true;
    for (int rep = 0; rep < 20; ++rep) {
      for (const auto& s : states) {
        env::EpisodeContext ctx{net, cm, s.placement, cfg};
        auto obs = env::observe(s, net, env::Observer::Blue);
        auto a = blue_act(id, obs, ctx, rng);
        if (env::is_targeted(a.type)) ok = ok && a.node >= 0 && a.node < 30;
        if (id == BluePolicyId::RandomSmart) {
          if (a.type == BlueActionType::Reconnect) ok = ok && s.isolated[a.node];
          if (a.type == BlueActionType::Isolate) ok = ok && !s.isolated[a.node];
          if (a.type == BlueActionType::MakeSafeNode) ok = ok && obs.visible_compromised[a.node];
        }
      }
    }
    CHECK_MESSAGE(ok, blue_id(id));
  }

  for (auto id : all_red_policies()) {
    Rng rng(8);
    auto members = sample_species(0.5, 20, parameter_dim(id), 11).members;
    bool ok = true;
    for (int rep = 0; rep < 20; ++rep) {
      RedPolicySpec spec{id, members[static_cast<std::size_t>(rep)]};
      for (const auto& s : states) {
        env::EpisodeContext ctx{net, cm, s.placement, cfg};
        auto obs = env::observe(s, net, env::Observer::Red);
        RedMemory mem;
        auto a = red_act(spec, obs, ctx, mem, rng);
        if (env::is_targeted(a.type)) ok = ok && a.node >= 0 && a.node < 30;
        if (a.type == RedActionType::BasicAttack || a.type == RedActionType::ZeroDayAttack) {
          ok = ok && env::attackable(s, net, a.node);
        }
        if (a.type == RedActionType::RandomMove) ok = ok && env::edge_active(s, net, s.red_locus, a.node);
        if (a.type == RedActionType::ZeroDayAttack && id != RedPolicyId::RandomSimple &&
            id != RedPolicyId::HVTSimple) {
          ok = ok && s.zero_day_budget > 0;
        }
      }
    }
    CHECK_MESSAGE(ok, red_base_id(id));
  }
}

TEST_CASE("attackable_from agrees with the environment") {
  auto net = graph::generate_network("forest72", 1);
  Rng gen(5);
  for (int k = 0; k < 300; ++k) {
    auto s = env::reset(net, gen());
    for (int v = 0; v < net.node_count(); ++v) {
      s.compromised[v] = uniform01(gen) < 0.2;
      s.isolated[v] = uniform01(gen) < 0.1;
    }
    auto obs = env::observe(s, net, env::Observer::Red);
    CHECK(attackable_from(obs, net.entry()) == env::attackable_nodes(s, net));
  }
}

TEST_CASE("registry") {
  CHECK(blue_ids().size() == 10);
  CHECK(red_ids().size() == 9);
  for (const auto& id : blue_ids()) CHECK(make_blue(id)->id() == id);
  for (const auto& id : red_ids()) CHECK(make_red(id)->id() == id);
  CHECK(parse_blue_id("blue.msn_d") == BluePolicyId::MSN_D);
  try {
    make_blue("blue.nope");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("blue.isolate") != std::string::npos);
  }
  CHECK_THROWS_AS(make_red("red.nope"), ConfigError);
  CHECK_THROWS_AS(make_red("red.hvt_pref:p=0.5|0.5"), ConfigError);
  CHECK_THROWS_AS(make_red("red.hvt_pref:p=0.5|0.6|0"), ConfigError);
  CHECK_THROWS_AS(make_red("red.hvt_pref:alpha=0.1,seed=3"), ConfigError);
  CHECK_THROWS_AS(make_red("red.hvt_pref:alpha=-1"), ConfigError);
  CHECK_THROWS_AS(make_red("red.hvt_pref:colour=blue"), ConfigError);

  auto uniform = parse_red_id("red.random_smart");
  CHECK(*uniform.params == std::vector<double>(6, 1.0 / 6));

  auto member = parse_red_id("red.hvt_pref_sp:alpha=0.01,seed=5,index=7");
  CHECK(*member.params == sample_species(0.01, 8, 3, 5).members[7]);
  CHECK_FALSE(member.species_alpha.has_value());

  auto species = parse_red_id("red.hvt_pref_sp:alpha=0.01");
  CHECK_FALSE(species.params.has_value());
  CHECK(*species.species_alpha == 0.01);

  auto explicit_p = parse_red_id(format_red_id(RedPolicyId::HVTPreference, {0.25, 0.5, 0.25}));
  CHECK(*explicit_p.params == std::vector<double>{0.25, 0.5, 0.25});
}

TEST_CASE("stochastic agents are deterministic per seed") {
  auto net = graph::generate_network("tree50", 2);
  auto cm = graph::all_pairs_shortest_paths(net);
  for (const auto& b : {"blue.random", "blue.msn_rnv_restore"}) {
    for (const auto& r : {"red.random_simple", "red.hvt_pref:alpha=0.5"}) {
      auto blue = make_blue(b);
      auto red = make_red(r);
      auto a = env::rollout(net, cm, *blue, *red, 1234);
      auto c = env::rollout(net, cm, *blue, *red, 1234);
      CHECK(a == c);
    }
  }
}

}  // TEST_SUITE
