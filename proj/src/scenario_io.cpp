#include "ppsim/scenario_io.hpp"

#include <json.hpp>

namespace ppsim {

using nlohmann::json;

static json terms_json(const std::vector<Term>& terms) {
  json arr = json::array();
  for (const Term& t : terms) arr.push_back(t.str());
  return arr;
}

void write_trace_jsonl(std::ostream& os, const Simulation& sim) {
  for (const TickRecord& rec : sim.trace()) {
    json j;
    j["tick"] = rec.tick;
    j["label"] = rec.label;
    j["events"] = terms_json(rec.events);
    j["decisions"] = json::object();
    for (const auto& [agent, strategy] : rec.decisions)
      j["decisions"][agent] = strategy;
    j["violations"] = terms_json(rec.violations);
    j["fulfilments"] = terms_json(rec.fulfilments);
    j["activations"] = rec.activations;
    const StepDelta& delta = sim.engine().delta_at(rec.tick);
    j["initiated"] = terms_json(delta.initiated);
    j["terminated"] = terms_json(delta.terminated);
    os << j.dump() << '\n';
  }
}

void write_summary_json(std::ostream& os, const Simulation& sim) {
  const ScenarioConfig& cfg = sim.config();
  const RunSummary& s = sim.summary();
  json j;
  j["citizens"] = cfg.citizens;
  j["rounds"] = cfg.rounds;
  j["regime"] = to_string(cfg.regime);
  j["variant"] = to_string(cfg.variant);
  j["seed"] = cfg.seed;
  j["revision"] = cfg.revision_enabled;
  j["choices"] = json::object();
  for (const auto& [strategy, count] : s.choices) j["choices"][strategy] = count;
  j["citizen_rounds"] = s.citizen_rounds;
  j["plain_choice_rate"] = s.choice_rate("plain");
  j["plateau_choice_rate"] = s.choice_rate("plateau");
  j["floods"] = s.floods;
  j["compensations"] = s.compensations;
  j["taxes"] = s.taxes;
  j["violations"] = s.violations;
  j["fulfilments"] = s.fulfilments;
  os << j.dump(2) << '\n';
}

}  // namespace ppsim
