#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rbmc/mdp.h"
#include "rbmc/rational.h"
#include "rbmc/value_iteration.h"

namespace rbmc {

/// Reference unfolding of a model by its accumulated reward. Used to cross-check the
/// reward-bounded algorithms; it grows with the bound and is only meant for small models.
struct UnfoldedMdp {
    Mdp model;
    /// Pairs (s, r) with s in the goal and r <= bound. These are absorbing.
    StateSet goal;
    std::vector<StateIndex> originalState;
    /// Accumulated reward of each pair; empty for the saturated overflow layer (reward > bound).
    std::vector<std::optional<Rational>> accumulated;
};

inline constexpr std::size_t kDefaultMaxUnfoldedStates = 1'000'000;
inline constexpr double kOracleEpsilon = 1e-10;

/// Materialises the pairs reachable from (initial, 0). Rewards may be arbitrary nonnegative
/// rationals; a branch with reward r moves (s, k) to (s', k + r), or to the overflow layer
/// once k + r exceeds the bound. Throws ResourceLimitError above maxStates pairs.
UnfoldedMdp unfold(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Rational bound,
                   std::size_t maxStates = kDefaultMaxUnfoldedStates);

/// Reward-bounded reachability for each of the given bounds, each on its own unfolding,
/// via unbounded value iteration at epsilon 1e-10. `largest` receives the size of the biggest unfolding.
std::vector<double> oracleBoundedProb(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward,
                                      std::span<Rational const> bounds, Optimization opt,
                                      ModelSize* largest = nullptr);

/// Bounds 0, 1, ..., n.
std::vector<double> oracleBoundedProb(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward,
                                      std::uint64_t n, Optimization opt);

}  // namespace rbmc
