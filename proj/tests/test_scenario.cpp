#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "ppsim/scenario.hpp"
#include "ppsim/scenario_io.hpp"

using namespace ppsim;

namespace {

ScenarioConfig base_config() {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.flood_probability = 0.0;  // deterministic unless a test wants floods
  cfg.rounds = 4;
  return cfg;
}

const TickRecord& record_at(const Simulation& sim, int tick) {
  for (const TickRecord& rec : sim.trace())
    if (rec.tick == tick) return rec;
  throw std::runtime_error("no record at tick " + std::to_string(tick));
}

bool batch_has(const TickRecord& rec, const std::string& term) {
  Term t = Term::parse(term);
  for (const Term& e : rec.events)
    if (e == t) return true;
  return false;
}

}  // namespace

TEST_CASE("build: rule_based installs the no-compensation commitment") {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::RuleBased;
  Simulation sim(cfg);
  sim.run();
  Term exp1 = Term::parse("exp_rule(damage(A,_), not(happ(compensate(A,_))))");
  CHECK(!sim.engine().holds_at(exp1, 1).empty());
  for (const AgentRecord& a : sim.agents()) CHECK(a.selected_game == 'B');
  CHECK(sim.engine().state(1).holds(Term::parse("member(c1,citizens)")));
  CHECK(sim.engine().state(1).holds(Term::parse("member(c2,citizens)")));
}

TEST_CASE("build: discretionary regime means no commitment and game A") {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::Discretionary;
  Simulation sim(cfg);
  sim.run();
  Term exp1 = Term::parse("exp_rule(damage(A,_), not(happ(compensate(A,_))))");
  CHECK(sim.engine().holds_at(exp1, 1).empty());
  for (const AgentRecord& a : sim.agents()) CHECK(a.selected_game == 'A');
}

TEST_CASE("choices: rule_based all plateau, discretionary all plain") {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::RuleBased;
  Simulation rb(cfg);
  rb.run();
  CHECK(rb.summary().choice_rate("plateau") == 1.0);

  cfg.regime = Regime::Discretionary;
  Simulation dc(cfg);
  dc.run();
  CHECK(dc.summary().choice_rate("plain") == 1.0);
}

TEST_CASE("choices: conflicting expectations tie-break to the Nash strategy") {
  // Installing a second, plain-location expectation rule alongside the
  // rule-based plateau one gives every citizen one vote for each location;
  // the tie falls back to the game-B equilibrium, plateau.
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::RuleBased;
  Simulation sim(cfg);
  sim.add_injection(1, Term::parse("install_location_expectation(plain)"));
  sim.run();
  const TickRecord& choose2 = record_at(sim, Simulation::tick_of(2, "choose_location"));
  for (const auto& [agent, strategy] : choose2.decisions) CHECK(strategy == "plateau");
  CHECK(!choose2.decisions.empty());
}

TEST_CASE("government: compensation funded by an even plateau tax") {
  // Three citizens, discretionary: force c2 and c3 onto the plateau, flood
  // c1 with damage 101, and check the 51/50 remainder split.
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::Discretionary;
  cfg.citizens = 3;
  cfg.flood_damage = 101;
  Simulation sim(cfg);
  int choose1 = Simulation::tick_of(1, "choose_location");
  sim.add_injection(choose1, Term::parse(
      "change_role(c2, citizens, none, citizens_plateaudwellerrole)"));
  sim.add_injection(choose1, Term::parse(
      "change_role(c3, citizens, none, citizens_plateaudwellerrole)"));
  sim.add_injection(Simulation::tick_of(1, "flood"), Term::parse("flood"));
  sim.run();
  const TickRecord& tax = record_at(sim, Simulation::tick_of(1, "tax_compensate"));
  CHECK(batch_has(tax, "compensate(c1,101)"));
  CHECK(batch_has(tax, "taxed(c2,51)"));
  CHECK(batch_has(tax, "taxed(c3,50)"));
}

TEST_CASE("government: nobody on the plateau means no tax and no compensation") {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::Discretionary;
  Simulation sim(cfg);
  sim.add_injection(Simulation::tick_of(1, "flood"), Term::parse("flood"));
  sim.run();
  const TickRecord& tax = record_at(sim, Simulation::tick_of(1, "tax_compensate"));
  CHECK(tax.events.empty());
  CHECK(sim.summary().compensations == 0);
  CHECK(sim.summary().taxes == 0);
}

TEST_CASE("run: p=0 yields no floods and no damage in either regime") {
  for (Regime r : {Regime::RuleBased, Regime::Discretionary}) {
    ScenarioConfig cfg = base_config();
    cfg.regime = r;
    Simulation sim(cfg);
    sim.run();
    CHECK(sim.summary().floods == 0);
    for (int t = 0; t <= cfg.rounds * Simulation::kLabelsPerRound; ++t)
      CHECK(sim.engine().holds_at(Term::parse("damage(A,D)"), t).empty());
  }
}

TEST_CASE("run: money conservation at every tax_compensate tick") {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.regime = Regime::Discretionary;
  cfg.citizens = 4;
  cfg.flood_probability = 1.0;
  Simulation sim(cfg);
  // Mixed locations so taxation actually happens.
  int choose1 = Simulation::tick_of(1, "choose_location");
  sim.add_injection(choose1, Term::parse(
      "change_role(c3, citizens, none, citizens_plateaudwellerrole)"));
  sim.add_injection(choose1, Term::parse(
      "change_role(c4, citizens, none, citizens_plateaudwellerrole)"));
  sim.run();
  bool any = false;
  for (const TickRecord& rec : sim.trace()) {
    long long compensated = 0, taxed = 0;
    for (const Term& e : rec.events) {
      if (!e.is_compound()) continue;
      if (e.name() == "compensate") compensated += e.args()[1].value();
      if (e.name() == "taxed") taxed += e.args()[1].value();
    }
    if (compensated || taxed) {
      any = true;
      CHECK(compensated == taxed);
    }
  }
  CHECK(any);
}

TEST_CASE("run: damage is bounded by the house value under certain floods") {
  ScenarioConfig cfg = ScenarioConfig::defaults();
  cfg.regime = Regime::Discretionary;
  cfg.flood_probability = 1.0;
  cfg.flood_damage = 250;  // > V once accumulated
  Simulation sim(cfg);
  sim.run();
  CHECK(sim.summary().floods == cfg.rounds);
  for (int t = 0; t <= cfg.rounds * Simulation::kLabelsPerRound; ++t)
    for (const Substitution& s : sim.engine().holds_at(Term::parse("damage(A,D)"), t))
      CHECK(s.lookup("D")->value() <= cfg.house_value);
}

TEST_CASE("run: byte-identical trace for equal config and seed") {
  auto dump = [](std::uint64_t seed) {
    ScenarioConfig cfg = ScenarioConfig::defaults();
    cfg.regime = Regime::Discretionary;
    cfg.seed = seed;
    Simulation sim(cfg);
    sim.run();
    std::ostringstream os;
    write_trace_jsonl(os, sim);
    std::ostringstream sm;
    write_summary_json(sm, sim);
    return os.str() + sm.str();
  };
  CHECK(dump(3) == dump(3));
  CHECK(dump(3) != dump(4));  // the seed actually reaches the generator
}

TEST_CASE("run: a simulation can only run once") {
  Simulation sim(base_config());
  sim.run();
  CHECK_THROWS_AS(sim.run(), error);
}

// ---------------------------------------------------------------------------
// Violation and revision (compensation despite the rule-based commitment)

namespace {

Simulation broken_commitment_run(bool revision) {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::RuleBased;
  cfg.revision_enabled = revision;
  Simulation sim(cfg);
  // Round 3: c1 is forced onto the plain, a flood damages it, and the
  // government compensates anyway.
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

int commitment_violations(const Simulation& sim, int tick) {
  int n = 0;
  for (const Term& v : record_at(sim, tick).violations)
    if (v.args()[0].is_compound() && v.args()[0].name() == "damage") ++n;
  return n;
}

}  // namespace

TEST_CASE("revision: the violation is flagged exactly once, next tick") {
  Simulation sim = broken_commitment_run(true);
  int viol_tick = Simulation::tick_of(3, "repair");
  CHECK(commitment_violations(sim, viol_tick) == 1);
  int total = 0;
  for (const TickRecord& rec : sim.trace())
    total += commitment_violations(sim, rec.tick);
  CHECK(total == 1);
}

TEST_CASE("revision on: all citizens choose plain from the next round") {
  Simulation sim = broken_commitment_run(true);
  const auto& d4 = record_at(sim, Simulation::tick_of(4, "choose_location")).decisions;
  REQUIRE(d4.size() == 2);
  for (const auto& [agent, strategy] : d4) CHECK(strategy == "plain");
  for (const AgentRecord& a : sim.agents()) CHECK(a.selected_game == 'A');
}

TEST_CASE("revision off: choices unchanged, violation still recorded") {
  Simulation sim = broken_commitment_run(false);
  CHECK(commitment_violations(sim, Simulation::tick_of(3, "repair")) == 1);
  const auto& d4 = record_at(sim, Simulation::tick_of(4, "choose_location")).decisions;
  REQUIRE(d4.size() == 2);
  for (const auto& [agent, strategy] : d4) CHECK(strategy == "plateau");
  for (const AgentRecord& a : sim.agents()) CHECK(a.selected_game == 'B');
}

// ---------------------------------------------------------------------------
// Variants

TEST_CASE("norm variant: violation flagged the tick an agent is on the plain") {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::Discretionary;  // citizens head for the plain
  cfg.variant = Variant::Norm;
  cfg.rounds = 2;
  Simulation sim(cfg);
  sim.run();
  // location(A,plain) first holds at the flood tick of round 1.
  int first_plain_tick = Simulation::tick_of(1, "flood");
  for (const TickRecord& rec : sim.trace()) {
    bool has_norm_viol = false;
    for (const Term& v : rec.violations)
      if (v.args()[0].is_compound() && v.args()[0].name() == "member")
        has_norm_viol = true;
    CHECK(has_norm_viol == (rec.tick >= first_plain_tick));
  }
}

TEST_CASE("second-order norm: punishment expected, violated when absent") {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::Discretionary;
  cfg.variant = Variant::SecondOrderNorm;
  cfg.rounds = 2;
  Simulation sim(cfg);
  sim.run();
  int punish_viol = 0;
  for (const TickRecord& rec : sim.trace())
    for (const Term& v : rec.violations)
      if (v.args()[1] == Term::parse("happ(punish(c1))")) ++punish_viol;
  CHECK(punish_viol > 0);
}

TEST_CASE("second-order norm: a punishing government fulfils the expectation") {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::Discretionary;
  cfg.variant = Variant::SecondOrderNorm;
  cfg.punishing_government = true;
  cfg.rounds = 2;
  Simulation sim(cfg);
  sim.run();
  int fulfilled = 0, violated = 0;
  for (const TickRecord& rec : sim.trace()) {
    for (const Term& f : rec.fulfilments)
      if (f.args()[1] == Term::parse("happ(punish(c1))")) ++fulfilled;
    for (const Term& v : rec.violations)
      if (v.args()[1] == Term::parse("happ(punish(c1))")) ++violated;
  }
  CHECK(fulfilled > 0);
  CHECK(violated == 0);
}

TEST_CASE("second-order norm: eventual punishment stays pending until it lands") {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::Discretionary;
  cfg.variant = Variant::SecondOrderNorm;
  cfg.punish_eventually = true;
  cfg.rounds = 3;
  Simulation sim(cfg);
  sim.add_injection(14, Term::parse("punish(c1)"));
  sim.run();
  int fulfilled_at = -1;
  for (const TickRecord& rec : sim.trace()) {
    for (const Term& v : rec.violations)
      CHECK(v.args()[1] != Term::parse("eventually(happ(punish(c1)))"));
    for (const Term& f : rec.fulfilments)
      if (f.args()[1] == Term::parse("eventually(happ(punish(c1)))"))
        fulfilled_at = rec.tick;
  }
  // The punish event is observed one tick after injection.
  CHECK(fulfilled_at == 15);
}

TEST_CASE("team reasoning: PD players choose the team-optimal plateau") {
  ScenarioConfig cfg = base_config();
  cfg.regime = Regime::Discretionary;  // game A, a prisoner's dilemma
  cfg.variant = Variant::TeamReasoning;
  Simulation sim(cfg);
  sim.run();
  CHECK(sim.summary().choice_rate("plateau") == 1.0);
  CHECK(sim.engine().state(2).holds(Term::parse("game(citizens,a)")));
  CHECK(sim.engine().state(2).holds(Term::parse("team_optimal(a,plateau)")));
}

TEST_CASE("the shipped rules file matches the embedded rule set") {
  std::ifstream in(PPSIM_RULES_FILE);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == scenario_effect_rules());
}

// ---------------------------------------------------------------------------
// Config parsing

TEST_CASE("config: ini round-trip of scenario settings") {
  ScenarioConfig cfg = ScenarioConfig::from_ini(R"(
# comment
[scenario]
citizens = 3
rounds = 7
regime = discretionary
flood_probability = 0.5
income = 10
house_value = 20
flood_damage = 5
seed = 42
revision = on

[variant]
name = second_order_norm
punishing_government = on
punishment = eventually
)");
  CHECK(cfg.citizens == 3);
  CHECK(cfg.rounds == 7);
  CHECK(cfg.regime == Regime::Discretionary);
  CHECK(cfg.flood_probability == 0.5);
  CHECK(cfg.income == 10);
  CHECK(cfg.seed == 42);
  CHECK(cfg.revision_enabled);
  CHECK(cfg.variant == Variant::SecondOrderNorm);
  CHECK(cfg.punishing_government);
  CHECK(cfg.punish_eventually);
  // Games fall back to the shipped defaults.
  CHECK(pure_nash(cfg.game_a).size() == 1);
}

TEST_CASE("config: custom game block") {
  ScenarioConfig cfg = ScenarioConfig::from_ini(R"(
[game.A]
players = r1, r2
strategies = c, d
payoff c c = 2 2
payoff c d = 0 3
payoff d c = 3 0
payoff d d = 1 1
)");
  auto eq = pure_nash(cfg.game_a);
  REQUIRE(eq.size() == 1);
  CHECK(cfg.game_a.profile_str(eq[0]) == "(d,d)");
}

TEST_CASE("config: errors name the offending field") {
  auto msg_of = [](const std::string& text) {
    try {
      ScenarioConfig::from_ini(text);
      return std::string();
    } catch (const config_error& e) {
      return std::string(e.what());
    }
  };
  CHECK(msg_of("[scenario]\nciizens = 2\n").find("ciizens") != std::string::npos);
  CHECK(msg_of("[scenario]\nregime = monarchy\n").find("monarchy") != std::string::npos);
  CHECK(msg_of("[scenario]\nflood_probability = 2.0\n").find("flood_probability") !=
        std::string::npos);
  CHECK(msg_of("[scenario]\ncitizens = 0\n").find("citizens") != std::string::npos);
  CHECK_THROWS_AS(ScenarioConfig::from_file("/nonexistent/file.cfg"), config_error);
}
