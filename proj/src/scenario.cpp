#include "ppsim/scenario.hpp"

#include <algorithm>

namespace ppsim {

// ---------------------------------------------------------------------------
// Effect rules

// The narrative clauses (flood damage is capped by the house value on first
// and repeat floods alike) plus the wiring the scenario drives through
// events: institution membership, expectation-rule installation/revision,
// team-game announcements and house repair.
const std::string& scenario_effect_rules() {
  static const std::string text = R"RULES(
% --- regime commitment ---------------------------------------------------
initiates(join(government_agent, government, rulesbasedregimerole),
          exp_rule(damage(A, _), not(happ(compensate(A, _))))).

% --- institution membership ----------------------------------------------
initiates(join(A, I, _), member(A, I)).

% --- income ---------------------------------------------------------------
initiates(receive_income(A, RMoney), wealth(A, NMoney)) :-
    holds_at(wealth(A, OMoney)),
    is(NMoney, plus(OMoney, RMoney)).
terminates(receive_income(A, _), wealth(A, _)).

% --- location choice ------------------------------------------------------
initiates(change_role(A, citizens, _, citizens_plaindwellerrole), location(A, plain)) :-
    holds_at(member(A, citizens)).
initiates(change_role(A, citizens, _, citizens_plateaudwellerrole), location(A, plateau)) :-
    holds_at(member(A, citizens)).
terminates(change_role(A, citizens, _, _), location(A, _)).

% --- flooding -------------------------------------------------------------
initiates(flood, damage(A, D)) :-
    holds_at(location(A, plain)),
    not_holds(damage(A, _)),
    const(flood_causes_damage, FD),
    const(initial_house_on_plain_value, V),
    is(D, min(FD, V)).
initiates(flood, damage(A, D)) :-
    holds_at(damage(A, CD)),
    const(initial_house_on_plain_value, V),
    const(flood_causes_damage, FD),
    is(D, min(plus(FD, CD), V)).
terminates(flood, damage(_, _)).

% --- taxation and compensation -------------------------------------------
initiates(taxed(A, Tax), wealth(A, New)) :-
    holds_at(wealth(A, Old)),
    is(New, minus(Old, Tax)).
terminates(taxed(A, _), wealth(A, _)).

initiates(compensate(A, Money), wealth(A, New)) :-
    holds_at(wealth(A, Old)),
    is(New, plus(Old, Money)).
terminates(compensate(A, _), wealth(A, _)).

% --- repair ---------------------------------------------------------------
initiates(repair_full(A, Cost), wealth(A, New)) :-
    holds_at(wealth(A, Old)),
    is(New, minus(Old, Cost)).
terminates(repair_full(A, _), wealth(A, _)).
terminates(repair_full(A, _), damage(A, _)).

initiates(repair_partial(A, Cost), wealth(A, 0)).
initiates(repair_partial(A, Cost), damage(A, New)) :-
    holds_at(damage(A, Old)),
    is(New, minus(Old, Cost)).
terminates(repair_partial(A, _), wealth(A, _)).
terminates(repair_partial(A, _), damage(A, _)).

% --- consumption ----------------------------------------------------------
initiates(consumed(A), wealth(A, 0)).
terminates(consumed(A), wealth(A, _)).

% --- expectation-rule installation and revision ---------------------------
initiates(install_location_expectation(L),
          exp_rule(and([member(A, citizens), @choose_location]),
                   next(location(A, L)))).

terminates(revise_location_expectation(_), exp_rule(_, next(location(_, _)))).
initiates(revise_location_expectation(L),
          exp_rule(and([member(A, citizens), @choose_location]),
                   next(location(A, L)))).

initiates(install_norm_rule,
          exp_rule(member(A, citizens), never(location(A, plain)))).

initiates(install_punishment_rule(immediate),
          exp_rule(viol(member(A, citizens), never(location(A, plain))),
                   happ(punish(A)))).
initiates(install_punishment_rule(eventually),
          exp_rule(viol(member(A, citizens), never(location(A, plain))),
                   eventually(happ(punish(A))))).

% --- team reasoning -------------------------------------------------------
initiates(announce_team_game(T, G, Act), game(T, G)).
initiates(announce_team_game(T, G, Act), team_optimal(G, Act)).

initiates(install_team_rule,
          exp_rule(and([member(A, citizens), game(citizens, G),
                        team_optimal(G, Act), @choose_location]),
                   next(happ(A, Act)))).
)RULES";
  return text;
}

// ---------------------------------------------------------------------------
// Simulation

const std::vector<std::string>& Simulation::round_labels() {
  static const std::vector<std::string> labels = {
      "receive_income", "choose_location", "flood",
      "tax_compensate", "repair",          "consume"};
  return labels;
}

int Simulation::tick_of(int round, const std::string& label) {
  const auto& labels = round_labels();
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label)
      return (round - 1) * kLabelsPerRound + 1 + static_cast<int>(i);
  throw error("unknown step label: " + label);
}

Simulation::Simulation(ScenarioConfig config) : config_(std::move(config)) {
  config_.validate();
  engine_.load_rules(scenario_effect_rules());
  engine_.set_constant("flood_causes_damage", config_.flood_damage);
  engine_.set_constant("initial_house_on_plain_value", config_.house_value);

  std::vector<Term> initial;
  for (int i = 1; i <= config_.citizens; ++i) {
    AgentRecord agent;
    agent.id = "c" + std::to_string(i);
    agent.role = "none";
    agent.selected_game = config_.regime == Regime::RuleBased ? 'B' : 'A';
    agents_.push_back(agent);
    initial.push_back(Term::compound("wealth", {Term::atom(agent.id), Term::number(0)}));
  }
  engine_.initially(initial, "init");
  rng_state_ = config_.seed;
}

void Simulation::add_injection(int tick, Term event) {
  if (!event.is_ground() && !ground_except_quoted(event))
    throw config_error("injected event must be ground: " + event.str());
  injections_[tick].push_back(std::move(event));
}

bool Simulation::flood_draw() {
  // splitmix64; raw 64-bit threshold comparison keeps the draw portable.
  rng_state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = rng_state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  double p = config_.flood_probability;
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return z < static_cast<std::uint64_t>(p * 18446744073709551616.0);
}

std::vector<ExpRule> Simulation::rules_in_state(int t) const {
  std::vector<ExpRule> rules;
  for (const Term& f : engine_.state(t).fluents)
    if (f.is_compound() && f.name() == "exp_rule" && f.arity() == 2)
      rules.push_back(ExpRule::from_fluent(f));
  return rules;
}

StepObservation Simulation::observe(int t) const {
  StepObservation obs;
  obs.fluents = engine_.state(t).fluents;
  obs.label = engine_.state(t).label;
  if (t > 0) obs.events = engine_.events_at(t - 1);
  for (const Term& e : obs.events)
    if (e.is_compound() && e.name() == "viol" && e.arity() == 2)
      obs.violations.push_back(violation_pair_from_event(e));
  return obs;
}

// Nash-fallback strategy of `agent` in its selected game.
std::string Simulation::choose_strategy(const AgentRecord& agent) const {
  std::map<std::string, int> counts;
  for (const Substitution& s : monitor_.expected_instances(
           Term::compound("location", {Term::var("A"), Term::var("L")}))) {
    if (const Term* l = s.lookup("L"); l && l->is_atom()) counts[l->name()]++;
  }
  for (const Substitution& s : monitor_.expected_instances(
           Term::compound("does", {Term::var("A"), Term::var("S")}))) {
    if (const Term* a = s.lookup("S"); a && a->is_atom()) counts[a->name()]++;
  }

  // Most commonly expected location; ties and no-expectations fall back to
  // the agent's own equilibrium strategy.
  std::string best;
  int best_count = 0;
  bool unique = false;
  for (const auto& [strategy, count] : counts) {
    if (count > best_count) {
      best = strategy;
      best_count = count;
      unique = true;
    } else if (count == best_count) {
      unique = false;
    }
  }
  if (unique) return best;

  const NormalFormGame& g =
      agent.selected_game == 'A' ? config_.game_a : config_.game_b;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < agents_.size(); ++i)
    if (agents_[i].id == agent.id) idx = i % g.player_count();
  auto eq = pure_nash(g);
  int strat = eq.empty() ? 0 : eq.front()[idx];
  return g.strategies[idx][static_cast<std::size_t>(strat)];
}

std::vector<Term> Simulation::government_act(int t) const {
  // Compensation equal to recorded damage, funded by an even split over the
  // plateau dwellers (lexicographically first dwellers take the remainder);
  // nobody on the plateau means no tax and no compensation.
  std::vector<std::pair<std::string, long long>> damaged;
  for (const Substitution& s : engine_.holds_at(
           Term::compound("damage", {Term::var("A"), Term::var("D")}), t)) {
    const Term* a = s.lookup("A");
    const Term* d = s.lookup("D");
    if (a && d && a->is_atom() && d->is_number())
      damaged.emplace_back(a->name(), d->value());
  }
  std::sort(damaged.begin(), damaged.end());
  if (damaged.empty()) return {};

  std::vector<std::string> dwellers;
  for (const Substitution& s : engine_.holds_at(
           Term::compound("location", {Term::var("B"), Term::atom("plateau")}), t))
    if (const Term* b = s.lookup("B"); b && b->is_atom())
      dwellers.push_back(b->name());
  std::sort(dwellers.begin(), dwellers.end());
  if (dwellers.empty()) return {};

  long long total = 0;
  std::vector<Term> events;
  for (const auto& [id, amount] : damaged) {
    total += amount;
    events.push_back(
        Term::compound("compensate", {Term::atom(id), Term::number(amount)}));
  }
  long long k = static_cast<long long>(dwellers.size());
  long long share = total / k;
  long long remainder = total % k;
  for (std::size_t i = 0; i < dwellers.size(); ++i) {
    long long amount = share + (static_cast<long long>(i) < remainder ? 1 : 0);
    events.push_back(
        Term::compound("taxed", {Term::atom(dwellers[i]), Term::number(amount)}));
  }
  return events;
}

std::vector<Term> Simulation::policy_events(int t, const std::string& label,
                                            TickRecord& rec) {
  std::vector<Term> events;
  auto atom = [](const std::string& s) { return Term::atom(s); };

  if (t == 0) {
    events.push_back(Term::compound(
        "join", {atom("government_agent"), atom("government"),
                 atom(config_.regime == Regime::RuleBased
                          ? "rulesbasedregimerole"
                          : "discretionarybasedregimerole")}));
    for (const AgentRecord& agent : agents_)
      events.push_back(Term::compound(
          "join", {atom(agent.id), atom("citizens"), atom("citizenrole")}));
    if (config_.variant == Variant::Norm ||
        config_.variant == Variant::SecondOrderNorm)
      events.push_back(atom("install_norm_rule"));
    if (config_.variant == Variant::SecondOrderNorm)
      events.push_back(Term::compound(
          "install_punishment_rule",
          {atom(config_.punish_eventually ? "eventually" : "immediate")}));
    return events;
  }

  if (t == 1) {
    // Citizens check for the no-compensation commitment and select the game
    // they believe they are playing; the equilibrium (or team) expectation
    // rule is installed accordingly.
    Term exp_rule_1 = Term::parse(
        "exp_rule(damage(A, _), not(happ(compensate(A, _))))");
    bool committed = !engine_.holds_at(exp_rule_1, 1).empty();
    for (AgentRecord& agent : agents_) agent.selected_game = committed ? 'B' : 'A';
    const NormalFormGame& g = committed ? config_.game_b : config_.game_a;
    if (config_.variant == Variant::TeamReasoning) {
      auto best = team_optimal(g);
      events.push_back(Term::compound(
          "announce_team_game",
          {atom("citizens"), atom(committed ? "b" : "a"),
           atom(g.strategies[0][static_cast<std::size_t>(best[0])])}));
      events.push_back(atom("install_team_rule"));
    } else {
      auto eq = pure_nash(g);
      int strat = eq.empty() ? 0 : eq.front()[0];
      events.push_back(Term::compound(
          "install_location_expectation",
          {atom(g.strategies[0][static_cast<std::size_t>(strat)])}));
    }
  }

  if (label == "receive_income") {
    for (const AgentRecord& agent : agents_)
      events.push_back(Term::compound(
          "receive_income", {atom(agent.id), Term::number(config_.income)}));
  } else if (label == "choose_location") {
    for (AgentRecord& agent : agents_) {
      std::string strategy = choose_strategy(agent);
      rec.decisions[agent.id] = strategy;
      summary_.choices[strategy]++;
      summary_.citizen_rounds++;
      events.push_back(Term::compound("does", {atom(agent.id), atom(strategy)}));
      if (strategy == "plain" || strategy == "plateau") {
        std::string new_role = strategy == "plain" ? "citizens_plaindwellerrole"
                                                   : "citizens_plateaudwellerrole";
        events.push_back(Term::compound(
            "change_role",
            {atom(agent.id), atom("citizens"), atom(agent.role), atom(new_role)}));
        agent.role = new_role;
      }
    }
  } else if (label == "flood") {
    if (flood_draw()) {
      events.push_back(atom("flood"));
      summary_.floods++;
    }
  } else if (label == "tax_compensate") {
    if (config_.regime == Regime::Discretionary) {
      for (Term& e : government_act(t)) events.push_back(std::move(e));
    }
  } else if (label == "repair") {
    for (const AgentRecord& agent : agents_) {
      auto dmg = engine_.holds_at(
          Term::compound("damage", {atom(agent.id), Term::var("D")}), t);
      auto wlt = engine_.holds_at(
          Term::compound("wealth", {atom(agent.id), Term::var("W")}), t);
      if (dmg.empty() || wlt.empty()) continue;
      long long damage = dmg.front().lookup("D")->value();
      long long wealth = wlt.front().lookup("W")->value();
      if (damage <= 0 || wealth <= 0) continue;
      if (wealth >= damage)
        events.push_back(Term::compound(
            "repair_full", {atom(agent.id), Term::number(damage)}));
      else
        events.push_back(Term::compound(
            "repair_partial", {atom(agent.id), Term::number(wealth)}));
    }
  } else if (label == "consume") {
    for (const AgentRecord& agent : agents_)
      events.push_back(Term::compound("consumed", {atom(agent.id)}));
  }
  return events;
}

void Simulation::run() {
  if (ran_) throw error("simulation already ran");
  ran_ = true;

  const int total = config_.rounds * kLabelsPerRound;

  for (int t = 0; t <= total; ++t) {
    const std::string label = engine_.state(t).label;
    StepObservation obs = observe(t);
    MonitorOutput mo = monitor_.tick(obs, rules_in_state(t));

    TickRecord rec;
    rec.tick = t;
    rec.label = label;
    rec.activations = static_cast<int>(mo.activated.size());
    for (const Classification& c : mo.fulfilments)
      rec.fulfilments.push_back(c.event_term(false));
    for (const Classification& c : mo.violations)
      rec.violations.push_back(c.event_term(true));
    summary_.fulfilments += static_cast<long long>(mo.fulfilments.size());
    summary_.violations += static_cast<long long>(mo.violations.size());

    std::vector<Term> batch = policy_events(t, label, rec);

    // Deliver classifications as events the next state can condition on.
    for (const Classification& c : mo.fulfilments)
      batch.push_back(c.event_term(false));
    for (const Classification& c : mo.violations)
      batch.push_back(c.event_term(true));

    // Government sanction policy: punish every agent the first-order norm
    // flagged this tick, in the same batch as the viol event.
    if (config_.variant == Variant::SecondOrderNorm &&
        config_.punishing_government) {
      for (const Classification& c : mo.violations) {
        if (c.rule.is_compound() && c.rule.args()[0].is_compound() &&
            c.rule.args()[0].name() == "member") {
          if (const Term* a = c.grounding.lookup("A"))
            batch.push_back(Term::compound("punish", {*a}));
        }
      }
    }

    // Belief revision: a violated no-compensation expectation discredits
    // the rule-based commitment; game A and its equilibrium location take
    // over from the next choose_location step.
    if (config_.revision_enabled && !revised_) {
      for (const Classification& c : mo.violations) {
        if (c.rule.is_compound() && c.rule.args()[0].is_compound() &&
            c.rule.args()[0].name() == "damage") {
          revised_ = true;
          for (AgentRecord& agent : agents_) agent.selected_game = 'A';
          auto eq = pure_nash(config_.game_a);
          int strat = eq.empty() ? 0 : eq.front()[0];
          batch.push_back(Term::compound(
              "revise_location_expectation",
              {Term::atom(config_.game_a.strategies[0][static_cast<std::size_t>(strat)])}));
          break;
        }
      }
    }

    if (auto it = injections_.find(t); it != injections_.end()) {
      for (const Term& injected : it->second) {
        if (injected.is_compound() && injected.name() == "change_role" &&
            injected.arity() == 4) {
          // Forced move: drop the agent's own role change for this tick.
          std::erase_if(batch, [&](const Term& e) {
            return e.is_compound() && e.name() == "change_role" &&
                   e.arity() == 4 && e.args()[0] == injected.args()[0];
          });
        }
        batch.push_back(injected);
      }
    }

    for (const Term& e : batch) {
      if (!e.is_compound()) continue;
      if (e.name() == "compensate") summary_.compensations++;
      if (e.name() == "taxed") summary_.taxes++;
    }

    rec.events = batch;
    if (t >= 1) trace_.push_back(std::move(rec));

    const std::string next_label =
        t < total ? round_labels()[static_cast<std::size_t>(t) % kLabelsPerRound]
                  : "end";
    engine_.step(batch, next_label);
  }
}

}  // namespace ppsim
