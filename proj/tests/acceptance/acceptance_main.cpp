// Acceptance suite: one pass/fail line per criterion, non-zero exit if any
// criterion fails. Self-contained apart from the CLI binary and the shipped
// default config (paths injected at build time).

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ppsim/ec.hpp"
#include "ppsim/formula.hpp"
#include "ppsim/game.hpp"
#include "ppsim/monitor.hpp"
#include "ppsim/scenario.hpp"

using namespace ppsim;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << number << ": " << name
            << std::endl;
  if (!ok) ++failures;
}

std::string run_cli(const std::string& args, int& exit_code) {
  std::string cmd = std::string(PPSIM_CLI_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    exit_code = -1;
    return "";
  }
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

// --- criterion 1 -----------------------------------------------------------

bool nash_reproduction() {
  int code_a = 0, code_b = 0;
  std::string a = run_cli("solve-game --config " PPSIM_DEFAULT_CFG " --game A", code_a);
  std::string b = run_cli("solve-game --config " PPSIM_DEFAULT_CFG " --game B", code_b);
  bool ok = code_a == 0 && code_b == 0;
  ok = ok && a.find("pure nash: (plain,plain) payoffs (333,333)") != std::string::npos;
  // Exactly one equilibrium line per game.
  ok = ok && a.find("pure nash") == a.rfind("pure nash");
  ok = ok && b.find("pure nash: (plateau,plateau) payoffs (365,365)") != std::string::npos;
  ok = ok && b.find("pure nash") == b.rfind("pure nash");
  return ok;
}

// --- criterion 2 -----------------------------------------------------------

bool regime_behaviour() {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ScenarioConfig cfg = ScenarioConfig::from_file(PPSIM_DEFAULT_CFG);
    cfg.citizens = 2;
    cfg.rounds = 10;
    cfg.seed = seed;
    cfg.regime = Regime::RuleBased;
    Simulation rb(cfg);
    rb.run();
    if (rb.summary().choice_rate("plateau") != 1.0) return false;
    if (rb.summary().taxes != 0 || rb.summary().compensations != 0) return false;
    if (rb.summary().violations != 0) return false;
    cfg.regime = Regime::Discretionary;
    Simulation dc(cfg);
    dc.run();
    if (dc.summary().choice_rate("plain") != 1.0) return false;
  }
  return true;
}

// --- criterion 3 -----------------------------------------------------------

bool social_utility_constants() {
  ScenarioConfig cfg = ScenarioConfig::from_file(PPSIM_DEFAULT_CFG);
  auto eq_a = pure_nash(cfg.game_a);
  auto eq_b = pure_nash(cfg.game_b);
  return eq_a.size() == 1 && cfg.game_a.payoff_sum(eq_a[0]) == 666 &&
         eq_b.size() == 1 && cfg.game_b.payoff_sum(eq_b[0]) == 730;
}

// --- criterion 4 -----------------------------------------------------------

Simulation broken_commitment_run(bool revision) {
  ScenarioConfig cfg = ScenarioConfig::from_file(PPSIM_DEFAULT_CFG);
  cfg.regime = Regime::RuleBased;
  cfg.rounds = 5;
  cfg.flood_probability = 0.0;
  cfg.revision_enabled = revision;
  Simulation sim(cfg);
  sim.add_injection(Simulation::tick_of(3, "choose_location"),
                    Term::parse("change_role(c1, citizens,"
                                " citizens_plateaudwellerrole,"
                                " citizens_plaindwellerrole)"));
  sim.add_injection(Simulation::tick_of(3, "flood"), Term::parse("flood"));
  sim.add_injection(Simulation::tick_of(3, "tax_compensate"),
                    Term::parse("compensate(c1, 100)"));
  sim.run();
  return sim;
}

bool violation_and_revision() {
  Simulation with = broken_commitment_run(true);
  int viol_tick = Simulation::tick_of(3, "repair");
  int at_tick = 0, elsewhere = 0;
  for (const TickRecord& rec : with.trace())
    for (const Term& v : rec.violations)
      if (v.args()[0].is_compound() && v.args()[0].name() == "damage")
        (rec.tick == viol_tick ? at_tick : elsewhere)++;
  if (at_tick != 1 || elsewhere != 0) return false;

  auto decisions = [](const Simulation& sim, int round) {
    int tick = Simulation::tick_of(round, "choose_location");
    for (const TickRecord& rec : sim.trace())
      if (rec.tick == tick) return rec.decisions;
    return std::map<std::string, std::string>{};
  };
  for (int round = 4; round <= 5; ++round) {
    auto d = decisions(with, round);
    if (d.size() != 2) return false;
    for (const auto& [agent, strategy] : d)
      if (strategy != "plain") return false;
  }
  Simulation without = broken_commitment_run(false);
  for (int round = 4; round <= 5; ++round)
    for (const auto& [agent, strategy] : decisions(without, round))
      if (strategy != "plateau") return false;
  return true;
}

// --- criterion 5 -----------------------------------------------------------

bool progression_oracle() {
  // All formulas over fluents p, q and event e with not/and/or/next/
  // eventually/always nested up to depth 3 (atoms at depth 1), deduplicated
  // structurally after the factories' simplifications.
  std::vector<FormulaPtr> formulas = {
      Formula::fluent(Term::atom("p")), Formula::fluent(Term::atom("q")),
      Formula::happ(Term::atom("e"))};
  std::set<std::string> seen;
  for (const auto& f : formulas) seen.insert(formula_to_term(f).str());
  auto add = [&](const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (seen.insert(formula_to_term(f).str()).second) out.push_back(f);
  };
  for (int level = 2; level <= 3; ++level) {
    std::vector<FormulaPtr> fresh;
    const std::vector<FormulaPtr>& base = formulas;
    for (const auto& f : base) {
      add(Formula::f_not(f), fresh);
      add(Formula::next(f), fresh);
      add(Formula::eventually(f), fresh);
      add(Formula::always(f), fresh);
      for (const auto& g : base) {
        add(Formula::f_and({f, g}), fresh);
        add(Formula::f_or({f, g}), fresh);
      }
    }
    formulas.insert(formulas.end(), fresh.begin(), fresh.end());
  }

  // The 8 possible observations.
  std::vector<StepObservation> kinds;
  for (int bits = 0; bits < 8; ++bits) {
    StepObservation o;
    if (bits & 1) o.fluents.push_back(Term::atom("p"));
    if (bits & 2) o.fluents.push_back(Term::atom("q"));
    if (bits & 4) o.events.push_back(Term::atom("e"));
    o.label = "step";
    kinds.push_back(o);
  }

  // Progression state per formula along the current trace prefix:
  // +1 resolved true, 0 resolved false, -1 still pending.
  struct PState {
    int resolved;
    FormulaPtr residual;
  };
  long long checked = 0;
  bool ok = true;

  std::vector<StepObservation> trace;
  std::function<void(const std::vector<PState>&, int)> dfs =
      [&](const std::vector<PState>& states, int depth) {
        if (!ok || depth == 4) return;
        for (const StepObservation& obs : kinds) {
          trace.push_back(obs);
          std::vector<PState> next;
          next.reserve(states.size());
          for (std::size_t i = 0; i < states.size(); ++i) {
            PState st = states[i];
            if (st.resolved == -1) {
              Residual r = progress(st.residual, obs);
              if (r.is_true()) st = {1, nullptr};
              else if (r.is_false()) st = {0, nullptr};
              else st = {-1, r.formula};
            }
            Outcome want = trace_eval(formulas[i], trace);
            bool agree = (st.resolved == 1 && want == Outcome::True) ||
                         (st.resolved == 0 && want == Outcome::False) ||
                         (st.resolved == -1 && want == Outcome::Unknown);
            ++checked;
            if (!agree) {
              ok = false;
              std::cout << "  disagreement: " << formula_to_term(formulas[i]).str()
                        << " at trace length " << trace.size() << "\n";
              return;
            }
            next.push_back(std::move(st));
          }
          dfs(next, depth + 1);
          trace.pop_back();
          if (!ok) return;
        }
      };
  std::vector<PState> init;
  for (const auto& f : formulas) init.push_back({-1, f});
  dfs(init, 0);
  std::cout << "  (progression oracle: " << formulas.size() << " formulas, "
            << checked << " comparisons)\n";
  return ok;
}

// --- criterion 6 -----------------------------------------------------------

bool inertia_property() {
  std::mt19937 rng(2024);
  const std::vector<std::string> fluents = {"f1", "f2", "f3", "f4"};
  const std::vector<std::string> events = {"e1", "e2", "e3"};
  for (int run = 0; run < 1000; ++run) {
    std::string rules;
    std::set<std::pair<std::string, std::string>> inits, terms;
    for (const auto& ev : events)
      for (const auto& fl : fluents) {
        if (rng() % 3 == 0) {
          rules += "initiates(" + ev + ", " + fl + ").\n";
          inits.insert({ev, fl});
        }
        if (rng() % 3 == 0) {
          rules += "terminates(" + ev + ", " + fl + ").\n";
          terms.insert({ev, fl});
        }
      }
    Engine e;
    e.load_rules(rules);
    std::set<std::string> held;
    std::vector<Term> initial;
    for (const auto& fl : fluents)
      if (rng() % 2) {
        held.insert(fl);
        initial.push_back(Term::atom(fl));
      }
    e.initially(initial);
    for (int t = 0; t < 10; ++t) {
      std::vector<Term> batch;
      std::set<std::string> occurring;
      for (const auto& ev : events)
        if (rng() % 2) {
          batch.push_back(Term::atom(ev));
          occurring.insert(ev);
        }
      e.step(batch, "next");
      std::set<std::string> next;
      for (const auto& fl : fluents) {
        bool initiated = false, terminated = false;
        for (const auto& ev : occurring) {
          initiated = initiated || inits.count({ev, fl});
          terminated = terminated || terms.count({ev, fl});
        }
        if (initiated || (held.count(fl) && !terminated)) next.insert(fl);
        if (e.state(t + 1).holds(Term::atom(fl)) != (next.count(fl) > 0)) return false;
      }
      held = std::move(next);
    }
  }
  return true;
}

// --- criterion 7 -----------------------------------------------------------

bool flood_cap() {
  std::mt19937 rng(4096);
  for (int run = 0; run < 1000; ++run) {
    long long fd = 1 + rng() % 500;
    long long v = 1 + rng() % 400;
    Engine e;
    e.load_rules(scenario_effect_rules());
    e.set_constant("flood_causes_damage", fd);
    e.set_constant("initial_house_on_plain_value", v);
    e.initially({Term::parse("location(c1,plain)"), Term::parse("location(c2,plain)")});
    for (int t = 0; t < 10; ++t) {
      std::vector<Term> batch;
      if (rng() % 2) batch.push_back(Term::atom("flood"));
      e.step(batch, "next");
      for (const Substitution& s :
           e.holds_at(Term::parse("damage(A,D)"), t + 1))
        if (s.lookup("D")->value() > v) return false;
    }
  }
  return true;
}

// --- criterion 8 -----------------------------------------------------------

bool norm_variants() {
  ScenarioConfig cfg = ScenarioConfig::from_file(PPSIM_DEFAULT_CFG);
  cfg.regime = Regime::Discretionary;
  cfg.rounds = 2;
  cfg.flood_probability = 0.0;

  // First-order norm: violation exactly from the tick the agent is on the
  // plain.
  cfg.variant = Variant::Norm;
  Simulation norm(cfg);
  norm.run();
  int first_plain_tick = Simulation::tick_of(1, "flood");
  for (const TickRecord& rec : norm.trace()) {
    bool has = false;
    for (const Term& v : rec.violations)
      if (v.args()[0].is_compound() && v.args()[0].name() == "member") has = true;
    if (has != (rec.tick >= first_plain_tick)) return false;
  }

  // Second-order: the punishment expectation activates off the violation and
  // is itself violated when no punish event follows...
  cfg.variant = Variant::SecondOrderNorm;
  Simulation so(cfg);
  so.run();
  int punish_viol = 0;
  for (const TickRecord& rec : so.trace())
    for (const Term& v : rec.violations)
      if (v.args()[1] == Term::parse("happ(punish(c1))")) ++punish_viol;
  if (punish_viol == 0) return false;

  // ... and fulfilled when the government punishes.
  cfg.punishing_government = true;
  Simulation pg(cfg);
  pg.run();
  int fulfilled = 0, violated = 0;
  for (const TickRecord& rec : pg.trace()) {
    for (const Term& f : rec.fulfilments)
      if (f.args()[1] == Term::parse("happ(punish(c1))")) ++fulfilled;
    for (const Term& v : rec.violations)
      if (v.args()[1] == Term::parse("happ(punish(c1))")) ++violated;
  }
  return fulfilled > 0 && violated == 0;
}

// --- criterion 9 -----------------------------------------------------------

bool team_reasoning() {
  // PD test matrix: C=s0, D=s1 with R=2, T=3, S=0, P=1 per player.
  NormalFormGame pd;
  pd.id = "pd";
  pd.players = {"p1", "p2"};
  pd.strategies = {{"c", "d"}, {"c", "d"}};
  pd.payoffs[{0, 0}] = {2, 2};
  pd.payoffs[{0, 1}] = {0, 3};
  pd.payoffs[{1, 0}] = {3, 0};
  pd.payoffs[{1, 1}] = {1, 1};
  if (pd.profile_str(team_optimal(pd)) != "(c,c)") return false;

  // Team-variant agents on the PD-shaped game A cooperate (plateau).
  ScenarioConfig cfg = ScenarioConfig::from_file(PPSIM_DEFAULT_CFG);
  cfg.regime = Regime::Discretionary;
  cfg.variant = Variant::TeamReasoning;
  cfg.rounds = 3;
  cfg.flood_probability = 0.0;
  Simulation sim(cfg);
  sim.run();
  return sim.summary().choice_rate("plateau") == 1.0;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  auto timed = [&](int number, const std::string& name,
                   const std::function<bool()>& fn) {
    auto start = clock::now();
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      std::cout << "  exception: " << e.what() << "\n";
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() -
                                                                    start)
                  .count();
    report(number, name + " [" + std::to_string(ms) + " ms]", ok);
  };

  timed(1, "Nash reproduction via solve-game", nash_reproduction);
  timed(2, "regime behaviour over a 50-seed sweep", regime_behaviour);
  timed(3, "social-utility constants 666 and 730", social_utility_constants);
  timed(4, "violation and revision after an injected compensation",
        violation_and_revision);
  timed(5, "exhaustive progression vs finite-trace oracle", progression_oracle);
  timed(6, "inertia equation on 1000 randomized rule sets", inertia_property);
  timed(7, "flood damage cap on 1000 randomized runs", flood_cap);
  timed(8, "norm and second-order norm variants", norm_variants);
  timed(9, "team reasoning picks the cooperative profile", team_reasoning);

  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
