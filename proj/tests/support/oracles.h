#pragma once

#include <cstdint>
#include <vector>

#include "rbmc/mdp.h"
#include "rbmc/value_iteration.h"

namespace rbmc::fixtures {

/// Solves A x = b by Gaussian elimination with partial pivoting. A is dense and row-major.
std::vector<double> solveDense(std::vector<std::vector<double>> a, std::vector<double> b);

/// Every positional choice vector of the model: choice[s] indexes model.transitions(s).
std::vector<std::vector<std::size_t>> allChoices(Mdp const& model);

/// Exact probability of eventually reaching `targets` in the chain induced by `choice`,
/// using only the branches for which `allowed(s, i, j)` holds. Solved with a dense linear system
/// after removing states that cannot reach the targets.
template <typename Allowed>
std::vector<double> reachProbability(Mdp const& model, std::vector<std::size_t> const& choice,
                                     std::vector<bool> const& isTarget, Allowed const& allowed);

/// Reward-bounded CDF for bounds 0..n built from per-step optimal measures: for each state and
/// positional scheduler, the distribution over the landing state of the first reward-1 step,
/// composed n times. Rewards must be 0 or 1. Independent of the library's algorithms.
std::vector<double> stepMeasureCdf(Mdp const& model, StateSet const& goal, RewardStructure const& rewards,
                                   Optimization opt, std::uint64_t n);

/// Reachability probability of `goal` from the initial state of a deterministic chain, by dense solve.
double chainReachProbability(Mdp const& chain, StateSet const& goal);

}  // namespace rbmc::fixtures

#include "oracles_impl.h"
