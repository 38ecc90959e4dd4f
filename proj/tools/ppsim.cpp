// ppsim — plain-plateau collective-risk simulation driver.
//
// Subcommands:
//   run         one simulation; writes a JSONL trace and a JSON summary
//   sweep       many seeds; per-seed summaries plus an aggregate
//   solve-game  pure Nash profiles and the team-optimal profile of a game
//   check       built-in reproduction checks over the shipped defaults
//
// Exit codes: 0 success, 1 usage/config error, 2 check failure.

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppsim/scenario.hpp"
#include "ppsim/scenario_io.hpp"

using namespace ppsim;

namespace {

struct Overrides {
  std::string config_path;
  std::string regime;
  std::string variant;
  std::string revision;
  int rounds = -1;
  int citizens = -1;
  long long seed = -1;
  std::vector<std::string> injections;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "Scenario config file");
  cmd->add_option("--regime", ov.regime, "rule_based or discretionary")
      ->check(CLI::IsMember({"rule_based", "discretionary"}));
  cmd->add_option("--rounds", ov.rounds, "Number of rounds");
  cmd->add_option("--citizens", ov.citizens, "Number of citizens");
  cmd->add_option("--seed", ov.seed, "RNG seed");
  cmd->add_option("--variant", ov.variant,
                  "baseline, norm, second_order_norm or team_reasoning");
  cmd->add_option("--revision", ov.revision, "Belief revision on/off")
      ->check(CLI::IsMember({"on", "off"}));
}

ScenarioConfig make_config(const Overrides& ov) {
  ScenarioConfig cfg = ov.config_path.empty()
                           ? ScenarioConfig::defaults()
                           : ScenarioConfig::from_file(ov.config_path);
  if (!ov.regime.empty()) cfg.regime = regime_from_string(ov.regime);
  if (!ov.variant.empty()) cfg.variant = variant_from_string(ov.variant);
  if (!ov.revision.empty()) cfg.revision_enabled = ov.revision == "on";
  if (ov.rounds >= 0) cfg.rounds = ov.rounds;
  if (ov.citizens >= 0) cfg.citizens = ov.citizens;
  if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
  cfg.validate();
  return cfg;
}

void apply_injections(Simulation& sim, const std::vector<std::string>& specs) {
  for (const std::string& spec : specs) {
    std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
      throw config_error("--inject expects \"tick:event-term\", got '" + spec + "'");
    int tick = 0;
    try {
      tick = std::stoi(spec.substr(0, colon));
    } catch (const std::exception&) {
      throw config_error("--inject: bad tick in '" + spec + "'");
    }
    sim.add_injection(tick, Term::parse(spec.substr(colon + 1)));
  }
}

void write_to(const std::string& path,
              const std::function<void(std::ostream&)>& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw config_error("cannot open output file: " + path);
  writer(out);
}

std::string profile_line(const NormalFormGame& g, const std::vector<int>& profile) {
  std::ostringstream os;
  os << g.profile_str(profile) << " payoffs (";
  const auto& pay = g.payoff(profile);
  for (std::size_t i = 0; i < pay.size(); ++i) os << (i ? "," : "") << pay[i];
  os << ")";
  return os.str();
}

int cmd_run(const Overrides& ov, const std::string& trace_path,
            const std::string& summary_path) {
  ScenarioConfig cfg = make_config(ov);
  Simulation sim(cfg);
  apply_injections(sim, ov.injections);
  sim.run();
  if (!trace_path.empty())
    write_to(trace_path, [&](std::ostream& os) { write_trace_jsonl(os, sim); });
  write_to(summary_path, [&](std::ostream& os) { write_summary_json(os, sim); });
  return 0;
}

int cmd_sweep(const Overrides& ov, int seeds, const std::string& out_dir,
              const std::string& summary_path) {
  nlohmann::json per_seed = nlohmann::json::array();
  double plain_rate_sum = 0.0, plateau_rate_sum = 0.0;
  long long floods = 0, compensations = 0, taxes = 0, violations = 0;
  std::uint64_t first = ov.seed >= 0 ? static_cast<std::uint64_t>(ov.seed) : 0;
  for (int i = 0; i < seeds; ++i) {
    ScenarioConfig cfg = make_config(ov);
    cfg.seed = first + static_cast<std::uint64_t>(i);
    Simulation sim(cfg);
    sim.run();
    std::ostringstream buf;
    write_summary_json(buf, sim);
    nlohmann::json j = nlohmann::json::parse(buf.str());
    if (!out_dir.empty()) {
      std::ofstream out(out_dir + "/summary_seed" + std::to_string(cfg.seed) + ".json");
      if (!out) throw config_error("cannot write into sweep directory: " + out_dir);
      out << buf.str();
    }
    per_seed.push_back(j);
    plain_rate_sum += j["plain_choice_rate"].get<double>();
    plateau_rate_sum += j["plateau_choice_rate"].get<double>();
    floods += j["floods"].get<long long>();
    compensations += j["compensations"].get<long long>();
    taxes += j["taxes"].get<long long>();
    violations += j["violations"].get<long long>();
  }
  nlohmann::json agg;
  agg["seeds"] = seeds;
  agg["first_seed"] = first;
  agg["mean_plain_choice_rate"] = seeds ? plain_rate_sum / seeds : 0.0;
  agg["mean_plateau_choice_rate"] = seeds ? plateau_rate_sum / seeds : 0.0;
  agg["total_floods"] = floods;
  agg["total_compensations"] = compensations;
  agg["total_taxes"] = taxes;
  agg["total_violations"] = violations;
  agg["runs"] = per_seed;
  write_to(summary_path,
           [&](std::ostream& os) { os << agg.dump(2) << '\n'; });
  return 0;
}

int cmd_solve_game(const Overrides& ov, const std::string& game_id) {
  ScenarioConfig cfg = make_config(ov);
  const NormalFormGame* g = nullptr;
  if (game_id == "A" || game_id == "a") g = &cfg.game_a;
  else if (game_id == "B" || game_id == "b") g = &cfg.game_b;
  else throw config_error("--game: expected A or B, got '" + game_id + "'");

  std::cout << "game " << g->id << "\n";
  auto eq = pure_nash(*g);
  if (eq.empty()) {
    std::cout << "pure nash: none\n";
  } else {
    for (const auto& profile : eq)
      std::cout << "pure nash: " << profile_line(*g, profile) << "\n";
  }
  std::cout << "team optimal: " << profile_line(*g, team_optimal(*g)) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// check: reproduction suite over the shipped defaults.

struct Checker {
  bool all_ok = true;
  void expect(bool ok, const std::string& name) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    all_ok = all_ok && ok;
  }
};

int cmd_check(const Overrides& ov) {
  ScenarioConfig base = make_config(ov);
  Checker ck;

  // Equilibria of the shipped games.
  {
    auto eq_a = pure_nash(base.game_a);
    bool ok = eq_a.size() == 1 && base.game_a.profile_str(eq_a[0]) == "(plain,plain)" &&
              base.game_a.payoff(eq_a[0]) == std::vector<long long>{333, 333};
    ck.expect(ok, "game A: unique pure Nash (plain,plain) with payoffs (333,333)");
    auto eq_b = pure_nash(base.game_b);
    ok = eq_b.size() == 1 && base.game_b.profile_str(eq_b[0]) == "(plateau,plateau)" &&
         base.game_b.payoff(eq_b[0]) == std::vector<long long>{365, 365};
    ck.expect(ok, "game B: unique pure Nash (plateau,plateau) with payoffs (365,365)");
  }

  // Regime dichotomy over a 50-seed sweep.
  {
    bool rule_ok = true, disc_ok = true;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      ScenarioConfig cfg = base;
      cfg.citizens = 2;
      cfg.rounds = 10;
      cfg.seed = seed;
      cfg.regime = Regime::RuleBased;
      Simulation rb(cfg);
      rb.run();
      rule_ok = rule_ok && rb.summary().choice_rate("plateau") == 1.0 &&
                rb.summary().compensations == 0 && rb.summary().taxes == 0 &&
                rb.summary().violations == 0;
      cfg.regime = Regime::Discretionary;
      Simulation dc(cfg);
      dc.run();
      disc_ok = disc_ok && dc.summary().choice_rate("plain") == 1.0;
    }
    ck.expect(rule_ok,
              "rule_based, 50 seeds: all-plateau, no tax/compensation, no violations");
    ck.expect(disc_ok, "discretionary, 50 seeds: all-plain");
  }

  // A broken commitment (compensation despite the rule-based regime) is
  // flagged, and with belief revision enabled the citizens fall back to the
  // plain from the next round on.
  {
    auto revision_run = [&](bool revision) {
      ScenarioConfig cfg = base;
      cfg.citizens = 2;
      cfg.rounds = 4;
      cfg.regime = Regime::RuleBased;
      cfg.flood_probability = 0.0;
      cfg.revision_enabled = revision;
      Simulation sim(cfg);
      sim.add_injection(
          Simulation::tick_of(2, "choose_location"),
          Term::parse("change_role(c1, citizens, citizens_plateaudwellerrole,"
                      " citizens_plaindwellerrole)"));
      sim.add_injection(Simulation::tick_of(2, "flood"), Term::parse("flood"));
      sim.add_injection(Simulation::tick_of(2, "tax_compensate"),
                        Term::parse("compensate(c1, 100)"));
      sim.run();
      return sim;
    };

    Simulation with = revision_run(true);
    bool violated = false;
    for (const TickRecord& rec : with.trace())
      for (const Term& v : rec.violations)
        if (v.args()[0].is_compound() && v.args()[0].name() == "damage")
          violated = true;
    ck.expect(violated, "rule_based + injected compensation: commitment violation flagged");

    auto decisions_at = [](const Simulation& sim, int round) {
      int tick = Simulation::tick_of(round, "choose_location");
      for (const TickRecord& rec : sim.trace())
        if (rec.tick == tick) return rec.decisions;
      return std::map<std::string, std::string>{};
    };
    bool revised = true;
    for (const auto& [agent, strategy] : decisions_at(with, 4))
      revised = revised && strategy == "plain";
    ck.expect(revised && !decisions_at(with, 4).empty(),
              "revision on: citizens choose plain after the violation");

    Simulation without = revision_run(false);
    bool unchanged = true;
    for (const auto& [agent, strategy] : decisions_at(without, 4))
      unchanged = unchanged && strategy == "plateau";
    ck.expect(unchanged && !decisions_at(without, 4).empty(),
              "revision off: choices unchanged despite the violation");
  }

  // Determinism: same config and seed, byte-identical trace.
  {
    auto trace_bytes = [&]() {
      ScenarioConfig cfg = base;
      cfg.seed = 7;
      Simulation sim(cfg);
      sim.run();
      std::ostringstream buf;
      write_trace_jsonl(buf, sim);
      return buf.str();
    };
    ck.expect(trace_bytes() == trace_bytes(), "determinism: byte-identical reruns");
  }

  return ck.all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plain-plateau collective-risk simulation"};
  app.require_subcommand(1);

  Overrides ov;
  std::string trace_path, summary_path, out_dir, game_id = "A";
  int seeds = 50;

  CLI::App* run = app.add_subcommand("run", "Run one simulation");
  add_common_flags(run, ov);
  run->add_option("--trace", trace_path, "Trace output path (JSONL)");
  run->add_option("--summary", summary_path, "Summary output path (JSON; default stdout)");
  run->add_option("--inject", ov.injections,
                  "tick:event-term to add to that tick's batch (repeatable)");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a seed sweep");
  add_common_flags(sweep, ov);
  sweep->add_option("--seeds", seeds, "Number of seeds (starting at --seed)");
  sweep->add_option("--out", out_dir, "Directory for per-seed summaries");
  sweep->add_option("--summary", summary_path, "Aggregate output path (default stdout)");

  CLI::App* solve = app.add_subcommand("solve-game", "Solve a configured game");
  add_common_flags(solve, ov);
  solve->add_option("--game", game_id, "Game id: A or B");

  CLI::App* check = app.add_subcommand("check", "Run the reproduction checks");
  add_common_flags(check, ov);

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(ov, trace_path, summary_path);
    if (sweep->parsed()) return cmd_sweep(ov, seeds, out_dir, summary_path);
    if (solve->parsed()) return cmd_solve_game(ov, game_id);
    if (check->parsed()) return cmd_check(ov);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
