#include <doctest.h>

#include <cmath>

#include "hotdesk/agents.hpp"
#include "hotdesk/env.hpp"
#include "hotdesk/error.hpp"

using namespace hotdesk;
using namespace hotdesk::env;

namespace {

struct IdleBlue : BluePolicy {
  std::string id() const override { return "idle"; }
  void begin_episode(const EpisodeContext&, std::uint64_t) override {}
  BlueAction act(const StateObservation&, const EpisodeContext&) override { return {}; }
};

struct IdleRed : RedPolicy {
  std::string id() const override { return "idle"; }
  void begin_episode(const EpisodeContext&, std::uint64_t) override {}
  RedAction act(const StateObservation&, const EpisodeContext&) override { return {}; }
};

struct BadRed : RedPolicy {
  std::string id() const override { return "bad"; }
  void begin_episode(const EpisodeContext&, std::uint64_t) override {}
  RedAction act(const StateObservation&, const EpisodeContext&) override {
    return {RedActionType::BasicAttack, 999};
  }
};

struct World {
  graph::Network net = graph::generate_network("tree30", 0);
  graph::CostMatrix cm = graph::all_pairs_shortest_paths(net);
};

}  // namespace

TEST_SUITE("env") {

TEST_CASE("reset") {
  World w;
  CHECK(reset(w.net, 5) == reset(w.net, 5));
  auto s = reset(w.net, 5);
  CHECK(s.compromised[w.net.entry()] == 1);
  CHECK(s.hidden[w.net.entry()] == 0);
  CHECK(s.compromised_count() == 1);
  CHECK(s.zero_day_budget == 1);
  CHECK(s.red_locus == w.net.entry());
  CHECK(s.placement.hvns.size() == 3);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto r = reset(w.net, seed);
    for (double v : r.vulnerability) {
      CHECK(v >= 0.2);
      CHECK(v <= 0.8);
    }
  }
}

TEST_CASE("blue actions") {
  World w;
  auto s = reset(w.net, 1);
  for (int v : {3, 4, 5}) {
    s.compromised[v] = 1;
    s.hidden[v] = 1;
  }
  apply_blue(s, w.net, {BlueActionType::Scan, -1});
  CHECK(std::count(s.hidden.begin(), s.hidden.end(), 1) == 0);

  auto before = s;
  auto eff = apply_blue(s, w.net, {BlueActionType::MakeSafeNode, 10});
  CHECK_FALSE(eff.applied);
  CHECK(s == before);

  apply_blue(s, w.net, {BlueActionType::MakeSafeNode, 3});
  CHECK(s.compromised[3] == 0);

  const double v0 = s.vulnerability[7];
  apply_blue(s, w.net, {BlueActionType::ReduceNodeVulnerability, 7});
  CHECK(s.vulnerability[7] == doctest::Approx(0.8 * v0));
  for (int k = 0; k < 40; ++k) apply_blue(s, w.net, {BlueActionType::ReduceNodeVulnerability, 7});
  CHECK(s.vulnerability[7] == doctest::Approx(0.05));
  apply_blue(s, w.net, {BlueActionType::Restore, 7});
  CHECK(s.vulnerability[7] == v0);
  apply_blue(s, w.net, {BlueActionType::Restore, 4});
  CHECK(s.compromised[4] == 0);

  CHECK_THROWS_AS(apply_blue(s, w.net, {BlueActionType::Isolate, 30}), Error);
  CHECK_THROWS_AS(apply_blue(s, w.net, {BlueActionType::Restore, -1}), Error);
}

TEST_CASE("isolate and reconnect round trip") {
  World w;
  auto s = reset(w.net, 2);
  const auto edges = active_edges(s, w.net);
  CHECK(edges == w.net.edges());
  for (int v : {0, 1, 7, 29}) {
    apply_blue(s, w.net, {BlueActionType::Isolate, v});
    for (auto [a, b] : active_edges(s, w.net)) {
      CHECK(a != v);
      CHECK(b != v);
    }
  }
  CHECK_FALSE(apply_blue(s, w.net, {BlueActionType::Isolate, 7}).applied);
  for (int v : {7, 29, 0, 1}) apply_blue(s, w.net, {BlueActionType::Reconnect, v});
  CHECK(active_edges(s, w.net) == edges);
  CHECK_FALSE(apply_blue(s, w.net, {BlueActionType::Reconnect, 7}).applied);
}

TEST_CASE("red actions") {
  World w;
  auto s = reset(w.net, 3);
  const int nb = w.net.neighbors(w.net.entry()).front();
  CHECK(attackable(s, w.net, nb));
  apply_red(s, w.net, {RedActionType::ZeroDayAttack, nb});
  CHECK(s.compromised[nb] == 1);
  CHECK(s.hidden[nb] == 1);
  CHECK(s.zero_day_budget == 0);
  const int nb2 = w.net.neighbors(w.net.entry())[1];
  CHECK_FALSE(apply_red(s, w.net, {RedActionType::ZeroDayAttack, nb2}).applied);
  CHECK(s.compromised[nb2] == 0);

  s.vulnerability[nb2] = 1.0;
  apply_red(s, w.net, {RedActionType::BasicAttack, nb2});
  CHECK(s.compromised[nb2] == 1);

  // A node two hops from any compromised node is out of reach.
  auto fresh = reset(w.net, 3);
  int far = -1;
  for (int v = 0; v < w.net.node_count(); ++v) {
    if (w.cm(w.net.entry(), v) == 3) far = v;
  }
  fresh.vulnerability[far] = 1.0;
  CHECK_FALSE(apply_red(fresh, w.net, {RedActionType::BasicAttack, far}).applied);
  CHECK(fresh.compromised[far] == 0);

  // Spread reaches every attackable node.
  auto spread = reset(w.net, 4);
  for (auto& v : spread.vulnerability) v = 1.0;
  apply_red(spread, w.net, {RedActionType::Spread, -1});
  for (int v : w.net.neighbors(w.net.entry())) CHECK(spread.compromised[v] == 1);
  CHECK(spread.compromised_count() == 1 + w.net.degree(w.net.entry()));

  // Intrude ignores adjacency.
  auto intr = reset(w.net, 4);
  for (auto& v : intr.vulnerability) v = 1.0;
  apply_red(intr, w.net, {RedActionType::Intrude, -1});
  CHECK(intr.compromised_count() == w.net.node_count());

  // RandomMove follows active edges only.
  auto mv = reset(w.net, 5);
  CHECK(apply_red(mv, w.net, {RedActionType::RandomMove, nb}).applied);
  CHECK(mv.red_locus == nb);
  CHECK_FALSE(apply_red(mv, w.net, {RedActionType::RandomMove, far}).applied);
}

TEST_CASE("foothold rule") {
  World w;
  auto s = reset(w.net, 6);
  apply_blue(s, w.net, {BlueActionType::Isolate, w.net.entry()});
  CHECK_FALSE(red_has_foothold(s, w.net));
  for (auto& v : s.vulnerability) v = 1.0;
  CHECK_FALSE(apply_red(s, w.net, {RedActionType::Intrude, -1}).applied);
  CHECK(s.compromised_count() == 1);
}

TEST_CASE("basic attack frequency") {
  World w;
  const int nb = w.net.neighbors(w.net.entry()).front();
  auto s = reset(w.net, 8);
  int success = 0, hidden = 0;
  const int trials = 10000;
  for (int k = 0; k < trials; ++k) {
    s.compromised[nb] = 0;
    s.hidden[nb] = 0;
    s.vulnerability[nb] = 0.5;
    apply_red(s, w.net, {RedActionType::BasicAttack, nb});
    success += s.compromised[nb];
    hidden += s.hidden[nb];
  }
  CHECK(std::abs(success / double(trials) - 0.5) <= 0.02);
  CHECK(std::abs(hidden / double(success) - 0.5) <= 0.03);
}

TEST_CASE("step: rewards, budget and termination") {
  World w;
  auto s = reset(w.net, 9);
  s.compromised[w.net.entry()] = 0;
  auto r = step(s, w.net, {}, {});
  CHECK(r.blue_reward == 0.0);
  CHECK(r.red_reward == 0.0);

  s = reset(w.net, 9);
  for (int k = 1; k <= 8; ++k) step(s, w.net, {}, {});
  CHECK(s.zero_day_budget == 3);

  s = reset(w.net, 9);
  apply_blue(s, w.net, {BlueActionType::Isolate, 5});
  r = step(s, w.net, {}, {});
  CHECK(r.blue_reward == -1.5);
  CHECK(r.red_reward == 1.5);

  s = reset(w.net, 9);
  const int h = s.placement.hvns[1];
  s.compromised[h] = 1;
  r = step(s, w.net, {}, {});
  CHECK(r.done);
  CHECK(s.outcome == Outcome::RedWin);
  CHECK(s.captured == h);
  CHECK(s.placement.target_index == 1);
  CHECK(r.blue_reward == -102.0);
  CHECK_THROWS_AS(step(s, w.net, {}, {}), Error);
}

TEST_CASE("sleep against do-nothing runs the full episode") {
  World w;
  IdleBlue blue;
  IdleRed red;
  auto t = rollout(w.net, w.cm, blue, red, 10);
  CHECK(t.outcome == Outcome::BlueWin);
  CHECK(t.final_step == 500);
  CHECK(t.total_blue_reward == -500.0);
  CHECK(t.steps.size() == 501);
  CHECK_FALSE(t.steps.back().blue.has_value());
  CHECK_FALSE(t.steps.back().red.has_value());
  for (std::size_t k = 0; k < t.steps.size(); ++k) CHECK(t.steps[k].t == static_cast<int>(k));
}

TEST_CASE("observation masks") {
  World w;
  auto s = reset(w.net, 11);
  s.compromised[3] = 1;
  s.hidden[3] = 1;
  s.compromised[4] = 1;
  auto full = observe(s, w.net, Observer::Full);
  auto blue = observe(s, w.net, Observer::Blue);
  auto red = observe(s, w.net, Observer::Red);
  CHECK(full.hidden_compromised[3] == 1);
  CHECK(full.visible_compromised[3] == 0);
  CHECK(blue.visible_compromised[3] == 0);
  CHECK(blue.hidden_compromised[3] == 0);
  CHECK(blue.visible_compromised[4] == 1);
  CHECK(red.compromised(3));
  CHECK(std::count(full.is_hvn.begin(), full.is_hvn.end(), 1) == 3);
  CHECK(std::count(blue.is_hvn.begin(), blue.is_hvn.end(), 1) == 0);
  CHECK(std::count(red.is_hvn.begin(), red.is_hvn.end(), 1) == 0);
  CHECK(blue.red_locus == -1);
  CHECK(blue.zero_day_budget == -1);
  CHECK(red.red_locus == s.red_locus);
  CHECK(blue == mask(full, Observer::Blue));
  CHECK(red == mask(full, Observer::Red));
  CHECK(full == mask(full, Observer::Full));
}

TEST_CASE("rollout determinism and invalid actions") {
  World w;
  auto blue = agents::make_blue("blue.msn_d");
  auto red = agents::make_red("red.random_smart");
  auto a = rollout(w.net, w.cm, *blue, *red, 77);
  auto b = rollout(w.net, w.cm, *blue, *red, 77);
  CHECK(a == b);

  IdleBlue sleep;
  BadRed bad;
  try {
    rollout(w.net, w.cm, sleep, bad, 1);
    FAIL("expected Error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("step 0") != std::string::npos);
    CHECK(msg.find("bad") != std::string::npos);
  }
}

TEST_CASE("isolate beats the shortest-path attacker; sleep loses quickly") {
  World w;
  auto isolate = agents::make_blue("blue.isolate");
  auto sleep = agents::make_blue("blue.sleep");
  auto sp = agents::make_red("red.hvt_pref_sp");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(rollout(w.net, w.cm, *isolate, *sp, seed).outcome == Outcome::BlueWin);
    auto t = rollout(w.net, w.cm, *sleep, *sp, seed);
    CHECK(t.outcome == Outcome::RedWin);
    int shortest = 1 << 30;
    for (int h : t.placement.hvns) shortest = std::min(shortest, w.cm(w.net.entry(), h));
    // Each hop needs a successful roll at probability >= 0.2.
    CHECK(t.final_step <= 15 * w.cm.diameter);
    CHECK(t.final_step >= shortest);
  }
}

}  // TEST_SUITE
