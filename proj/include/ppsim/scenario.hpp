#pragma once

// The plain-plateau simulation: wires the engine, monitor and games into
// the round cycle receive_income -> choose_location -> flood ->
// tax_compensate -> repair -> consume, with regime-dependent expectation
// rules, agent and government policies, and the norm / second-order-norm /
// team-reasoning variants.
//
// Tick layout: tick 0 is the initialisation tick (institution joins);
// round r >= 1 occupies ticks (r-1)*6+1 .. r*6 in label-cycle order.
// The observation at tick t pairs the state at t with the events recorded
// at t-1 (the batch that produced the state).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppsim/ec.hpp"
#include "ppsim/game.hpp"
#include "ppsim/monitor.hpp"
#include "ppsim/term.hpp"

namespace ppsim {

enum class Regime { RuleBased, Discretionary };
enum class Variant { Baseline, Norm, SecondOrderNorm, TeamReasoning };

std::string to_string(Regime r);
std::string to_string(Variant v);
Regime regime_from_string(const std::string& s);    // throws config_error
Variant variant_from_string(const std::string& s);  // throws config_error

struct ScenarioConfig {
  int citizens = 2;
  int rounds = 10;
  Regime regime = Regime::RuleBased;
  double flood_probability = 0.25;
  long long income = 400;
  long long house_value = 300;   // initial_house_on_plain_value
  long long flood_damage = 100;  // flood_causes_damage
  std::uint64_t seed = 0;
  Variant variant = Variant::Baseline;
  bool revision_enabled = false;
  // Second-order-norm options: does the government punish flagged
  // violators, and is punishment expected immediately or eventually?
  bool punishing_government = false;
  bool punish_eventually = false;
  NormalFormGame game_a;  // discretionary regime
  NormalFormGame game_b;  // rule-based regime

  void validate() const;  // throws config_error naming the field

  static ScenarioConfig from_ini(std::string_view text);
  static ScenarioConfig from_file(const std::string& path);

  // The two shipped payoff matrices (fixed reference diagonals, constructed
  // off-diagonals preserving the dilemma orderings).
  static NormalFormGame default_game_a();
  static NormalFormGame default_game_b();
  static ScenarioConfig defaults();
};

struct AgentRecord {
  std::string id;
  std::string institution = "citizens";
  std::string role;          // citizens_plaindwellerrole / citizens_plateaudwellerrole
  char selected_game = 'B';  // 'A' or 'B'
};

struct TickRecord {
  int tick = 0;
  std::string label;
  std::vector<Term> events;  // batch recorded at this tick
  std::map<std::string, std::string> decisions;  // agent id -> chosen strategy
  std::vector<Term> violations;  // viol(cond, exp) classified at this tick
  std::vector<Term> fulfilments;
  int activations = 0;
};

struct RunSummary {
  std::map<std::string, long long> choices;  // strategy atom -> count
  long long citizen_rounds = 0;
  long long floods = 0;
  long long compensations = 0;
  long long taxes = 0;
  long long violations = 0;
  long long fulfilments = 0;

  double choice_rate(const std::string& strategy) const;
};

class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);

  // Testing hook: adds `event` to the batch recorded at `tick`. An injected
  // change_role for an agent replaces that agent's own move at that tick.
  void add_injection(int tick, Term event);

  void run();

  const std::vector<TickRecord>& trace() const { return trace_; }
  const RunSummary& summary() const { return summary_; }
  const Engine& engine() const { return engine_; }
  const Monitor& monitor() const { return monitor_; }
  const std::vector<AgentRecord>& agents() const { return agents_; }
  const ScenarioConfig& config() const { return config_; }

  static constexpr int kLabelsPerRound = 6;
  static const std::vector<std::string>& round_labels();
  // Global tick of `label` in 1-based round `round`.
  static int tick_of(int round, const std::string& label);

 private:
  std::vector<ExpRule> rules_in_state(int t) const;
  StepObservation observe(int t) const;
  std::vector<Term> policy_events(int t, const std::string& label,
                                  TickRecord& rec);
  std::string choose_strategy(const AgentRecord& agent) const;
  std::vector<Term> government_act(int t) const;
  bool flood_draw();

  ScenarioConfig config_;
  Engine engine_;
  Monitor monitor_;
  std::vector<AgentRecord> agents_;
  std::map<int, std::vector<Term>> injections_;
  std::vector<Term> monitor_events_;  // fulf/viol/punish carried to next batch
  std::uint64_t rng_state_ = 0;
  bool revised_ = false;
  std::vector<TickRecord> trace_;
  RunSummary summary_;
  bool ran_ = false;
};

// Effect-rule text the simulation loads: the transcribed narrative clauses
// plus the scenario wiring (membership, expectation-rule installation and
// revision, repair).
const std::string& scenario_effect_rules();

}  // namespace ppsim
