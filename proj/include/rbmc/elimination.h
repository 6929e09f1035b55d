#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rbmc/mdp.h"
#include "rbmc/transforms.h"

namespace rbmc {

/// Self-loop probabilities within this distance of 1 make a state (or action) a trap.
inline constexpr double kSelfLoopOneTolerance = 1e-12;

// ---------------------------------------------------------------------------
// DTMC state elimination
// ---------------------------------------------------------------------------

/// Mutable sparse copy of a Markov chain supporting reachability-preserving state elimination.
class DtmcEliminator {
   public:
    /// Throws ModelError unless every state has exactly one transition.
    explicit DtmcEliminator(Mdp const& chain);

    /// Redirects every predecessor branch p_a into t to t's other successors u_i with
    /// probability p_a * p_bi / (1 - p_c). t keeps its own outgoing row.
    /// Throws NumericalError if t's self-loop probability is 1.
    void eliminate(StateIndex t);

    /// Removes every branch into t (the mass is lost). Used for probability-1 sinks.
    void dropIncoming(StateIndex t);

    double selfLoop(StateIndex t) const;
    std::map<StateIndex, double> const& row(StateIndex s) const { return rows_[s]; }
    std::size_t numStates() const { return rows_.size(); }

    /// Rebuilds an Mdp with the original names, actions and labels.
    Mdp toMdp(Mdp const& original) const;

   private:
    std::vector<std::map<StateIndex, double>> rows_;
    std::vector<std::set<StateIndex>> predecessors_;
};

/// One elimination step on a deterministic model. t must not be the initial state.
Mdp eliminateDtmcState(Mdp const& chain, StateIndex t);

// ---------------------------------------------------------------------------
// MDP state elimination
// ---------------------------------------------------------------------------

/// Transition of a model under elimination. `stuck` is probability mass that entered an
/// action whose self-loop probability was 1; it is sent to the bottom state when merging.
struct WorkTransition {
    std::string label;
    Distribution branches;
    double stuck = 0.0;
};

struct EliminationOptions {
    /// Drop transitions whose distribution (and stuck mass) equals an earlier one within 1e-12.
    bool mergeDuplicates = true;
    /// Total branch budget of the workspace; exceeding it throws ResourceLimitError.
    std::size_t maxBranches = 50'000'000;
};

/// Scheduler-preserving elimination of MDP states.
///
/// Eliminating t replaces every predecessor transition (s, a) with a branch p_a into t by
/// one composite transition (s, a.b_i) per action b_i of t. The composite keeps the other
/// branches of (s, a) and adds p_a * p_bij / (1 - p_ci) for every successor of (t, b_i)
/// other than t itself, where p_ci is the self-loop probability of b_i. Retained states
/// stay in the model as sources: their own self-loops are folded per action and later
/// eliminations keep rewriting their transitions.
class EliminationWorkspace {
   public:
    EliminationWorkspace(Mdp const& model, std::vector<bool> retained, EliminationOptions options = {});

    std::size_t numStates() const { return transitions_.size(); }
    std::span<WorkTransition const> transitions(StateIndex s) const { return transitions_[s]; }
    std::set<StateIndex> const& predecessors(StateIndex s) const { return predecessors_[s]; }
    bool isEliminated(StateIndex s) const { return eliminated_[s]; }
    bool isRetained(StateIndex s) const { return retained_[s]; }

    std::size_t numTransitions() const;
    std::size_t numBranches() const { return branchCount_; }

    void eliminate(StateIndex t);

    /// Recomputes the predecessor index from scratch and compares it with the maintained one.
    bool predecessorIndexConsistent() const;

   private:
    void dedupe(StateIndex s);
    void countBranches(std::ptrdiff_t delta);

    std::vector<std::vector<WorkTransition>> transitions_;
    std::vector<std::set<StateIndex>> predecessors_;
    std::vector<bool> eliminated_;
    std::vector<bool> retained_;
    EliminationOptions options_;
    std::size_t branchCount_ = 0;
};

inline void eliminateMdpState(EliminationWorkspace& workspace, StateIndex t) { workspace.eliminate(t); }

/// Eliminates every regular state of a down-redirected model, greedily picking the state
/// with the smallest (predecessor count x action count) next. Relevant states keep their
/// outgoing transitions.
EliminationWorkspace eliminateAll(TransformedMdp const& model, StateSet const& relevant, EliminationOptions options = {});

}  // namespace rbmc
