#pragma once

// Normal-form games with pure-strategy Nash enumeration and team-optimal
// joint strategy selection. Profiles are vectors of per-player strategy
// indices; enumeration order is lexicographic by index.

#include <map>
#include <string>
#include <vector>

#include "ppsim/errors.hpp"

namespace ppsim {

struct NormalFormGame {
  std::string id;
  std::vector<std::string> players;
  std::vector<std::vector<std::string>> strategies;  // one list per player
  std::map<std::vector<int>, std::vector<long long>> payoffs;

  std::size_t player_count() const { return players.size(); }
  const std::vector<long long>& payoff(const std::vector<int>& profile) const;
  std::string profile_str(const std::vector<int>& profile) const;
  long long payoff_sum(const std::vector<int>& profile) const;

  // Checks the payoff table is total over the strategy cross-product and
  // each vector has one entry per player. Throws config_error.
  void validate() const;

  // All profiles in lexicographic order.
  std::vector<std::vector<int>> all_profiles() const;
};

// Profiles where no player can strictly improve by unilateral deviation.
std::vector<std::vector<int>> pure_nash(const NormalFormGame& g);

// Profile maximising the payoff sum; lexicographically first on ties.
std::vector<int> team_optimal(const NormalFormGame& g);

}  // namespace ppsim
