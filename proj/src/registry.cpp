#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "hotdesk/agents.hpp"
#include "hotdesk/error.hpp"

namespace hotdesk::agents {

namespace {

constexpr std::array<std::pair<BluePolicyId, std::string_view>, 10> kBlueNames{{
    {BluePolicyId::Sleep, "blue.sleep"},
    {BluePolicyId::Random, "blue.random"},
    {BluePolicyId::RandomSmart, "blue.random_smart"},
    {BluePolicyId::Isolate, "blue.isolate"},
    {BluePolicyId::MSN_D, "blue.msn_d"},
    {BluePolicyId::MSN_S, "blue.msn_s"},
    {BluePolicyId::Restore, "blue.restore"},
    {BluePolicyId::MSN_RNV, "blue.msn_rnv"},
    {BluePolicyId::MSN_Restore, "blue.msn_restore"},
    {BluePolicyId::MSN_RNV_Restore, "blue.msn_rnv_restore"},
}};

constexpr std::array<std::pair<RedPolicyId, std::string_view>, 9> kRedNames{{
    {RedPolicyId::RandomSimple, "red.random_simple"},
    {RedPolicyId::RandomSmart, "red.random_smart"},
    {RedPolicyId::TargetConnected, "red.target_connected"},
    {RedPolicyId::TargetUnconnected, "red.target_unconnected"},
    {RedPolicyId::TargetVulnerable, "red.target_vulnerable"},
    {RedPolicyId::TargetResilient, "red.target_resilient"},
    {RedPolicyId::HVTSimple, "red.hvt_simple"},
    {RedPolicyId::HVTPreference, "red.hvt_pref"},
    {RedPolicyId::HVTPreferenceSP, "red.hvt_pref_sp"},
}};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad value for '" + std::string(what) + "': '" + s + "'");
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("bad value for '" + std::string(what) + "': '" + s + "'");
  }
  return v;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

class RuleBasedBlue final : public env::BluePolicy {
 public:
  explicit RuleBasedBlue(BluePolicyId id) : id_(id) {}
  std::string id() const override { return std::string(blue_id(id_)); }
  void begin_episode(const env::EpisodeContext&, std::uint64_t seed) override { rng_.seed(seed); }
  env::BlueAction act(const env::StateObservation& obs, const env::EpisodeContext& ctx) override {
    return blue_act(id_, obs, ctx, rng_);
  }

 private:
  BluePolicyId id_;
  Rng rng_;
};

class RuleBasedRed final : public env::RedPolicy {
 public:
  explicit RuleBasedRed(RedAgentSpec spec) : spec_(std::move(spec)) {
    if (spec_.params) {
      current_ = {spec_.id, *spec_.params};
      validate(current_);
    }
  }
  std::string id() const override { return spec_.text; }
  void begin_episode(const env::EpisodeContext&, std::uint64_t seed) override {
    rng_.seed(seed);
    memory_ = {};
    if (spec_.species_alpha) {
      current_ = {spec_.id, sample_dirichlet(*spec_.species_alpha, parameter_dim(spec_.id), rng_)};
    }
  }
  env::RedAction act(const env::StateObservation& obs, const env::EpisodeContext& ctx) override {
    return red_act(current_, obs, ctx, memory_, rng_);
  }

 private:
  RedAgentSpec spec_;
  RedPolicySpec current_;
  RedMemory memory_;
  Rng rng_;
};

}  // namespace

std::string_view blue_id(BluePolicyId id) {
  for (auto& [k, name] : kBlueNames) {
    if (k == id) return name;
  }
  throw Error("unknown blue policy id");
}

std::string_view red_base_id(RedPolicyId id) {
  for (auto& [k, name] : kRedNames) {
    if (k == id) return name;
  }
  throw Error("unknown red policy id");
}

std::vector<std::string> blue_ids() {
  std::vector<std::string> out;
  for (auto& [k, name] : kBlueNames) out.emplace_back(name);
  return out;
}

std::vector<std::string> red_ids() {
  std::vector<std::string> out;
  for (auto& [k, name] : kRedNames) out.emplace_back(name);
  return out;
}

namespace {

std::string joined(const std::vector<std::string>& xs) {
  std::string s;
  for (const auto& x : xs) s += (s.empty() ? "" : ", ") + x;
  return s;
}

}  // namespace

BluePolicyId parse_blue_id(std::string_view id) {
  const std::string s = trim(id);
  for (auto& [k, name] : kBlueNames) {
    if (name == s) return k;
  }
  throw ConfigError("unknown blue agent '" + s + "'; valid ids: " + joined(blue_ids()));
}

std::string format_red_id(RedPolicyId id, const std::vector<double>& params) {
  std::string s(red_base_id(id));
  s += ":p=";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) s += '|';
    s += format_double(params[i]);
  }
  return s;
}

RedAgentSpec parse_red_id(std::string_view id) {
  const std::string s = trim(id);
  const auto colon = s.find(':');
  const std::string base = s.substr(0, colon);
  RedAgentSpec spec;
  bool found = false;
  for (auto& [k, name] : kRedNames) {
    if (name == base) {
      spec.id = k;
      found = true;
    }
  }
  if (!found) {
    throw ConfigError("unknown red agent '" + base + "'; valid ids: " + joined(red_ids()));
  }
  spec.text = s;
  const int dim = parameter_dim(spec.id);
  if (colon == std::string::npos) {
    spec.params = std::vector<double>(static_cast<std::size_t>(dim), 1.0 / dim);
    return spec;
  }

  std::optional<double> alpha;
  std::optional<std::uint64_t> seed, index;
  std::optional<std::vector<double>> explicit_params;
  std::stringstream fields(s.substr(colon + 1));
  std::string field;
  while (std::getline(fields, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ConfigError("red agent '" + s + "': expected key=value");
    const std::string key = trim(field.substr(0, eq));
    const std::string value = field.substr(eq + 1);
    if (key == "alpha") {
      alpha = parse_double(value, key);
    } else if (key == "seed") {
      seed = parse_u64(value, key);
    } else if (key == "index") {
      index = parse_u64(value, key);
    } else if (key == "p" || key == "probs" || key == "pi") {
      std::vector<double> v;
      std::stringstream parts(value);
      std::string part;
      while (std::getline(parts, part, '|')) v.push_back(parse_double(part, key));
      explicit_params = std::move(v);
    } else {
      throw ConfigError("red agent '" + s + "': unknown parameter '" + key + "'");
    }
  }

  if (explicit_params) {
    if (alpha || seed || index) {
      throw ConfigError("red agent '" + s + "': p= cannot be combined with alpha/seed/index");
    }
    spec.params = *explicit_params;
  } else if (alpha) {
    if (seed.has_value() != index.has_value()) {
      throw ConfigError("red agent '" + s + "': seed and index must be given together");
    }
    if (seed) {
      if (*index > 1000000) throw ConfigError("red agent '" + s + "': index too large");
      auto species = sample_species(*alpha, static_cast<int>(*index) + 1, dim, *seed);
      spec.params = species.members.back();
    } else {
      if (!(*alpha > 0.0)) throw ConfigError("red agent '" + s + "': alpha must be positive");
      spec.species_alpha = alpha;
    }
  } else {
    throw ConfigError("red agent '" + s + "': expected alpha=... or p=...");
  }
  if (spec.params) validate(RedPolicySpec{spec.id, *spec.params});
  return spec;
}

std::unique_ptr<env::BluePolicy> make_blue(std::string_view id) {
  return std::make_unique<RuleBasedBlue>(parse_blue_id(id));
}

std::unique_ptr<env::RedPolicy> make_red(std::string_view id) {
  return std::make_unique<RuleBasedRed>(parse_red_id(id));
}

std::unique_ptr<env::RedPolicy> make_red(const RedAgentSpec& spec) {
  return std::make_unique<RuleBasedRed>(spec);
}

}  // namespace hotdesk::agents
