#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rbmc/elimination.h"
#include "rbmc/mdp.h"
#include "rbmc/rational.h"
#include "rbmc/transforms.h"
#include "rbmc/value_iteration.h"

namespace rbmc {

enum class Algorithm { ModifiedValueIteration, SchedulerEnumerationVi, SchedulerEnumerationElim, StateElimination, Unfolding };

enum class ProbabilityMode { ValueIteration, DtmcElimination };

std::string toString(Algorithm algorithm);
/// Accepts the CLI names modvi, senum-vi, senum-elim, elim and unfold.
std::optional<Algorithm> parseAlgorithm(std::string_view name);

/// Either an explicit reward bound or "run until the CDF stops changing".
struct Bound {
    std::optional<Rational> limit;

    static Bound automatic() { return {}; }
    static Bound upTo(Rational value) { return {value}; }
    bool isAutomatic() const { return !limit.has_value(); }
};

struct SolverOptions {
    double epsilon = kDefaultEpsilon;
    std::uint64_t maxSweeps = kDefaultMaxSweeps;
    /// Cap on bound steps when the bound is automatic.
    std::uint64_t maxBoundSteps = 1'000'000;
    std::uint64_t maxSchedulersPerState = 1'000'000;
    EliminationOptions elimination;
};

struct CdfResult {
    Optimization opt = Optimization::Maximize;
    /// values[i]: optimal probability to reach the goal with accumulated reward <= i / rewardScale.
    std::vector<double> values;
    /// Set when an automatic bound stopped: the last index whose step still changed the values by >= epsilon.
    std::optional<std::uint64_t> converged;
    double epsilon = kDefaultEpsilon;
    std::int64_t rewardScale = 1;
    bool boundTruncated = false;
    ModelSize inputSize;
    ModelSize reducedSize;
    /// Per bound step i >= 1 (stored at i - 1), the maximum relative error over all sweeps of that step.
    std::vector<double> stepErrors;
};

/// Step-bounded model over the relevant states plus a bottom state, in which one step is one unit of reward.
struct MergedModel {
    /// Transition labels carry the provenance: a composite action label or "sched#k".
    Mdp model;
    StateIndex bottom = 0;
    /// origin[m]: regular state of the down-redirected model that merged state m stands for (bottom excluded).
    std::vector<StateIndex> origin;
};

/// Initial state plus every target of a reward-one branch.
StateSet relevantStates(TransformedMdp const& down);

/// Reachability distribution of a deterministic chain from one state: the probability of
/// ending up in each copy state, with the rest of the mass stuck forever (bottom).
struct ReachDistribution {
    /// Targets are copy-state indices of the chain, ascending.
    Distribution copies;
    double bottom = 0.0;
};

/// States with index >= numRegular are the absorbing copies.
ReachDistribution computeProbs(Mdp const& chain, std::size_t numRegular, StateIndex from, ProbabilityMode mode,
                               double epsilon = kDefaultEpsilon);

/// Enumerates, for every relevant state, the simple schedulers of the reward-free part reachable from it
/// and keeps one transition per distinct reachability distribution.
MergedModel mergeBySchedulerEnumeration(TransformedMdp const& down, StateSet const& relevant, ProbabilityMode mode,
                                        double epsilon = kDefaultEpsilon,
                                        std::uint64_t maxSchedulersPerState = 1'000'000);

/// Turns an eliminated workspace into the merged model: branches into copies go to their
/// origin, branches into regular states and stuck mass go to bottom.
MergedModel mergeEliminated(TransformedMdp const& down, StateSet const& relevant, EliminationWorkspace const& workspace);

/// Modified value iteration: alternates copying values onto the copies with unbounded value iteration.
CdfResult modvi(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Bound bound,
                Optimization opt, SolverOptions const& options = {});

/// Scheduler enumeration followed by step-bounded value iteration on the merged model.
CdfResult senum(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Bound bound,
                Optimization opt, ProbabilityMode mode, SolverOptions const& options = {});

/// MDP state elimination followed by step-bounded value iteration on the merged model.
CdfResult elim(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Bound bound,
               Optimization opt, SolverOptions const& options = {});

/// Dispatches to the algorithm (including the unfolding oracle).
CdfResult computeCdf(Algorithm algorithm, Mdp const& model, StateSet const& goal, RewardStructure const& boundReward,
                     Bound bound, Optimization opt, SolverOptions const& options = {});

/// computeCdf with an automatic bound. If the bound-step cap is hit, `converged` stays empty.
CdfResult runToConvergence(Algorithm algorithm, Mdp const& model, StateSet const& goal,
                           RewardStructure const& boundReward, Optimization opt, SolverOptions const& options = {});

}  // namespace rbmc
