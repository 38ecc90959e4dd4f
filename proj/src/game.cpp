#include "ppsim/game.hpp"

#include <numeric>
#include <sstream>

namespace ppsim {

const std::vector<long long>& NormalFormGame::payoff(
    const std::vector<int>& profile) const {
  auto it = payoffs.find(profile);
  if (it == payoffs.end())
    throw config_error("game " + id + ": missing payoff for profile " +
                       profile_str(profile));
  return it->second;
}

std::string NormalFormGame::profile_str(const std::vector<int>& profile) const {
  std::ostringstream os;
  os << '(';
  for (std::size_t p = 0; p < profile.size(); ++p) {
    if (p) os << ',';
    os << strategies[p][static_cast<std::size_t>(profile[p])];
  }
  os << ')';
  return os.str();
}

long long NormalFormGame::payoff_sum(const std::vector<int>& profile) const {
  const auto& v = payoff(profile);
  return std::accumulate(v.begin(), v.end(), 0LL);
}

std::vector<std::vector<int>> NormalFormGame::all_profiles() const {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(player_count(), 0);
  while (true) {
    out.push_back(cur);
    std::size_t p = player_count();
    while (p > 0) {
      --p;
      if (++cur[p] < static_cast<int>(strategies[p].size())) break;
      cur[p] = 0;
      if (p == 0) return out;
    }
  }
}

void NormalFormGame::validate() const {
  if (players.empty()) throw config_error("game " + id + ": players is empty");
  if (strategies.size() != players.size())
    throw config_error("game " + id + ": strategies must list one set per player");
  for (const auto& s : strategies)
    if (s.empty()) throw config_error("game " + id + ": empty strategy set");
  for (const auto& profile : all_profiles()) {
    auto it = payoffs.find(profile);
    if (it == payoffs.end())
      throw config_error("game " + id + ": missing payoff row for profile " +
                         profile_str(profile));
    if (it->second.size() != players.size())
      throw config_error("game " + id + ": payoff vector for " +
                         profile_str(profile) + " must have one entry per player");
  }
  if (payoffs.size() != all_profiles().size())
    throw config_error("game " + id + ": payoff table has rows for unknown profiles");
}

std::vector<std::vector<int>> pure_nash(const NormalFormGame& g) {
  std::vector<std::vector<int>> out;
  for (const auto& profile : g.all_profiles()) {
    bool stable = true;
    for (std::size_t p = 0; p < g.player_count() && stable; ++p) {
      long long here = g.payoff(profile)[p];
      for (int alt = 0; alt < static_cast<int>(g.strategies[p].size()); ++alt) {
        if (alt == profile[p]) continue;
        std::vector<int> dev = profile;
        dev[p] = alt;
        if (g.payoff(dev)[p] > here) {
          stable = false;
          break;
        }
      }
    }
    if (stable) out.push_back(profile);
  }
  return out;
}

std::vector<int> team_optimal(const NormalFormGame& g) {
  std::vector<int> best;
  long long best_sum = 0;
  for (const auto& profile : g.all_profiles()) {
    long long sum = g.payoff_sum(profile);
    if (best.empty() || sum > best_sum) {
      best = profile;
      best_sum = sum;
    }
  }
  return best;
}

}  // namespace ppsim
