#pragma once

#include <cstdint>
#include <set>

#include "rbmc/mdp.h"
#include "rbmc/value_iteration.h"

namespace rbmc {

struct RewardedMdp {
    Mdp model;
    RewardStructure rewards;
};

/// Goal states lose their transitions and become tau Dirac self-loops carrying reward 1,
/// so that reaching the goal is counted exactly once.
RewardedMdp makeAbsorbing(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward);

struct NormalizedModel {
    Mdp model;
    /// Every branch carries reward 0 or 1.
    RewardStructure rewards;
    /// Bound in scaled units, floor(bound * scale).
    std::uint64_t bound = 0;
    /// Least common multiple of all reward denominators.
    std::int64_t scale = 1;
    /// True if bound * scale was not an integer and had to be floored.
    bool boundTruncated = false;
    /// Number of states of the input model; fresh chain states come after them.
    std::size_t originalStates = 0;
};

inline constexpr std::int64_t kMaxScaledReward = std::int64_t{1} << 31;
inline constexpr std::size_t kMaxChainStates = 10'000'000;

/// Rewrites the reward structure to 0/1 values.
///
/// Rational rewards are first scaled by the LCM of their denominators (together with the
/// bound); a branch with integer reward r > 1 is then routed through r - 1 fresh states
/// named "<from>@<action>#k", each hop carrying reward 1. Throws ModelError on negative
/// rewards and ResourceLimitError when the LCM or a scaled reward exceeds 2^31.
NormalizedModel normalizeRewards(Mdp const& model, RewardStructure const& boundReward, Rational bound = Rational(0));

enum class Redirection { Up, Down };

/// S plus one absorbing copy per regular state. Copy of s has index numRegular + s.
struct TransformedMdp {
    Mdp model;
    std::size_t numRegular = 0;
    /// origin[k] is the regular state copied by new state numRegular + k.
    std::vector<StateIndex> origin;
    /// Reward-one branches of the input, keyed by their original target.
    std::set<BranchKey> rewardOneBranches;

    StateIndex copyOf(StateIndex s) const { return static_cast<StateIndex>(numRegular + s); }
    bool isCopy(StateIndex s) const { return s >= numRegular; }
    StateIndex originOf(StateIndex copy) const { return origin[copy - numRegular]; }
};

/// Retargets every reward-one branch out of s to s_new (Up) or to the copy of its own
/// target (Down). Branch probabilities are preserved; copies are tau self-loops.
/// Throws ModelError if a reward other than 0 or 1 is present.
TransformedMdp redirect(Mdp const& model, RewardStructure const& boundReward, Redirection direction);

inline TransformedMdp redirectUp(Mdp const& model, RewardStructure const& boundReward) {
    return redirect(model, boundReward, Redirection::Up);
}
inline TransformedMdp redirectDown(Mdp const& model, RewardStructure const& boundReward) {
    return redirect(model, boundReward, Redirection::Down);
}

/// Probabilities to reach the goal along reward-free paths, indexed like a
/// TransformedMdp of the goal-absorbing model (regular states first, then copies).
/// Copies of goal states hold 1, all other copies 0.
ValueVector initialValues(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Optimization opt,
                          double epsilon = kDefaultEpsilon);

}  // namespace rbmc
