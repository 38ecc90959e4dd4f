#include <fstream>
#include <sstream>

#include "ppsim/scenario.hpp"

namespace ppsim {

std::string to_string(Regime r) {
  return r == Regime::RuleBased ? "rule_based" : "discretionary";
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Baseline:
      return "baseline";
    case Variant::Norm:
      return "norm";
    case Variant::SecondOrderNorm:
      return "second_order_norm";
    case Variant::TeamReasoning:
      return "team_reasoning";
  }
  return "baseline";
}

Regime regime_from_string(const std::string& s) {
  if (s == "rule_based") return Regime::RuleBased;
  if (s == "discretionary") return Regime::Discretionary;
  throw config_error("regime: expected rule_based or discretionary, got '" + s + "'");
}

Variant variant_from_string(const std::string& s) {
  if (s == "baseline") return Variant::Baseline;
  if (s == "norm") return Variant::Norm;
  if (s == "second_order_norm") return Variant::SecondOrderNorm;
  if (s == "team_reasoning") return Variant::TeamReasoning;
  throw config_error("variant: unknown variant '" + s + "'");
}

NormalFormGame ScenarioConfig::default_game_a() {
  NormalFormGame g;
  g.id = "A";
  g.players = {"citizen_1", "citizen_2"};
  g.strategies = {{"plain", "plateau"}, {"plain", "plateau"}};
  g.payoffs[{0, 0}] = {333, 333};
  g.payoffs[{0, 1}] = {400, 300};
  g.payoffs[{1, 0}] = {300, 400};
  g.payoffs[{1, 1}] = {365, 365};
  return g;
}

NormalFormGame ScenarioConfig::default_game_b() {
  NormalFormGame g;
  g.id = "B";
  g.players = {"citizen_1", "citizen_2"};
  g.strategies = {{"plain", "plateau"}, {"plain", "plateau"}};
  g.payoffs[{0, 0}] = {333, 333};
  g.payoffs[{0, 1}] = {330, 365};
  g.payoffs[{1, 0}] = {365, 330};
  g.payoffs[{1, 1}] = {365, 365};
  return g;
}

ScenarioConfig ScenarioConfig::defaults() {
  ScenarioConfig c;
  c.game_a = default_game_a();
  c.game_b = default_game_b();
  return c;
}

void ScenarioConfig::validate() const {
  if (citizens < 1) throw config_error("citizens: must be >= 1");
  if (rounds < 0) throw config_error("rounds: must be >= 0");
  if (flood_probability < 0.0 || flood_probability > 1.0)
    throw config_error("flood_probability: must be in [0, 1]");
  if (income < 0) throw config_error("income: must be >= 0");
  if (house_value < 0) throw config_error("house_value: must be >= 0");
  if (flood_damage < 0) throw config_error("flood_damage: must be >= 0");
  game_a.validate();
  game_b.validate();
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_on_off(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true") return true;
  if (value == "off" || value == "false") return false;
  throw config_error(key + ": expected on or off, got '" + value + "'");
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error(key + ": expected an integer, got '" + value + "'");
  }
}

int strategy_index(const NormalFormGame& g, std::size_t player,
                   const std::string& name) {
  const auto& strats = g.strategies[player];
  for (std::size_t i = 0; i < strats.size(); ++i)
    if (strats[i] == name) return static_cast<int>(i);
  throw config_error("game " + g.id + ": unknown strategy '" + name + "'");
}

void apply_game_key(NormalFormGame& g, const std::string& key,
                    const std::string& value) {
  if (key == "players") {
    g.players = split(value, ',');
    return;
  }
  if (key == "strategies") {
    auto list = split(value, ',');
    g.strategies.assign(g.players.empty() ? 2 : g.players.size(), list);
    return;
  }
  if (key.rfind("payoff", 0) == 0) {
    auto names = split(key.substr(6), ' ');
    if (g.strategies.empty())
      throw config_error("game " + g.id + ": strategies must precede payoff rows");
    if (names.size() != g.players.size())
      throw config_error("game " + g.id + ": payoff row '" + key +
                         "' must name one strategy per player");
    std::vector<int> profile;
    for (std::size_t p = 0; p < names.size(); ++p)
      profile.push_back(strategy_index(g, p, names[p]));
    std::vector<long long> pays;
    for (const std::string& n : split(value, ' '))
      pays.push_back(parse_int(key, n));
    g.payoffs[profile] = std::move(pays);
    return;
  }
  throw config_error("game " + g.id + ": unknown key '" + key + "'");
}

}  // namespace

ScenarioConfig ScenarioConfig::from_ini(std::string_view text) {
  ScenarioConfig cfg;
  cfg.game_a.id = "A";
  cfg.game_b.id = "B";
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string line = trim(raw);
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("expected 'key = value': " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (section == "scenario") {
      if (key == "citizens")
        cfg.citizens = static_cast<int>(parse_int(key, value));
      else if (key == "rounds")
        cfg.rounds = static_cast<int>(parse_int(key, value));
      else if (key == "regime")
        cfg.regime = regime_from_string(value);
      else if (key == "flood_probability") {
        try {
          cfg.flood_probability = std::stod(value);
        } catch (const std::exception&) {
          throw config_error("flood_probability: expected a number, got '" + value + "'");
        }
      } else if (key == "income")
        cfg.income = parse_int(key, value);
      else if (key == "house_value")
        cfg.house_value = parse_int(key, value);
      else if (key == "flood_damage")
        cfg.flood_damage = parse_int(key, value);
      else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
      else if (key == "revision")
        cfg.revision_enabled = parse_on_off(key, value);
      else
        throw config_error("[scenario]: unknown key '" + key + "'");
    } else if (section == "variant") {
      if (key == "name")
        cfg.variant = variant_from_string(value);
      else if (key == "punishing_government")
        cfg.punishing_government = parse_on_off(key, value);
      else if (key == "punishment") {
        if (value == "immediate")
          cfg.punish_eventually = false;
        else if (value == "eventually")
          cfg.punish_eventually = true;
        else
          throw config_error("punishment: expected immediate or eventually");
      } else
        throw config_error("[variant]: unknown key '" + key + "'");
    } else if (section == "game.A") {
      apply_game_key(cfg.game_a, key, value);
    } else if (section == "game.B") {
      apply_game_key(cfg.game_b, key, value);
    } else {
      throw config_error("unknown section '" + section + "'");
    }
  }
  if (cfg.game_a.payoffs.empty()) cfg.game_a = default_game_a();
  if (cfg.game_b.payoffs.empty()) cfg.game_b = default_game_b();
  cfg.validate();
  return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_ini(buf.str());
}

double RunSummary::choice_rate(const std::string& strategy) const {
  if (citizen_rounds == 0) return 0.0;
  auto it = choices.find(strategy);
  long long n = it == choices.end() ? 0 : it->second;
  return static_cast<double>(n) / static_cast<double>(citizen_rounds);
}

}  // namespace ppsim
