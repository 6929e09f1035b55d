#include "rbmc/transforms.h"

#include <algorithm>
#include <map>

#include "rbmc/errors.h"

namespace rbmc {

RewardedMdp makeAbsorbing(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward) {
    std::size_t const n = model.numStates();
    std::vector<bool> isGoal(n, false);
    for (StateIndex g : goal) {
        if (g >= n) {
            throw ModelError("goal state index " + std::to_string(g) + " out of range");
        }
        isGoal[g] = true;
    }
    std::vector<std::vector<Transition>> transitions(n);
    for (StateIndex s = 0; s < n; ++s) {
        if (isGoal[s]) {
            transitions[s].push_back(Transition{std::string(kTauAction), dirac(s)});
        } else {
            auto original = model.transitions(s);
            transitions[s].assign(original.begin(), original.end());
        }
    }
    RewardStructure rewards(boundReward.name());
    for (auto const& [key, value] : boundReward.entries()) {
        if (key.source < n && !isGoal[key.source]) rewards.set(key, value);
    }
    for (StateIndex g : goal) {
        rewards.set(BranchKey{g, std::string(kTauAction), g}, Rational(1));
    }
    return {Mdp(model.stateNames(), model.initialState(), std::move(transitions), model.labels()), std::move(rewards)};
}

NormalizedModel normalizeRewards(Mdp const& model, RewardStructure const& boundReward, Rational bound) {
    if (bound.isNegative()) {
        throw ModelError("reward bound must be nonnegative, got " + bound.toString());
    }
    auto const aligned = boundReward.alignTo(model);
    std::int64_t scale = 1;
    for (auto const& [key, value] : boundReward.entries()) {
        if (value.isNegative()) {
            throw ModelError("negative reward " + value.toString() + " in '" + boundReward.name() + "'");
        }
        scale = checkedLcm(scale, value.denominator());
        if (scale > kMaxScaledReward) {
            throw ResourceLimitError("reward denominator LCM exceeds 2^31");
        }
    }

    NormalizedModel result;
    result.scale = scale;
    result.originalStates = model.numStates();
    Rational scaledBound = bound * Rational(scale);
    result.bound = static_cast<std::uint64_t>(scaledBound.floor());
    result.boundTruncated = !scaledBound.isInteger();

    std::vector<std::string> names = model.stateNames();
    std::vector<std::vector<Transition>> transitions(model.numStates());
    RewardStructure rewards(boundReward.name());
    std::map<std::pair<StateIndex, std::string>, std::size_t> chainCounter;
    std::size_t freshStates = 0;

    for (StateIndex s = 0; s < model.numStates(); ++s) {
        auto const original = model.transitions(s);
        for (std::size_t i = 0; i < original.size(); ++i) {
            Transition transition = original[i];
            for (std::size_t j = 0; j < transition.distribution.size(); ++j) {
                Branch& branch = transition.distribution[j];
                Rational scaled = aligned[s][i][j] * Rational(scale);
                if (scaled > Rational(kMaxScaledReward)) {
                    throw ResourceLimitError("scaled reward exceeds 2^31 at (" + model.stateName(s) + "," +
                                             transition.action + ")");
                }
                std::int64_t const reward = scaled.numerator();
                if (reward <= 1) {
                    if (reward == 1) rewards.set(BranchKey{s, transition.action, branch.target}, Rational(1));
                    continue;
                }
                freshStates += static_cast<std::size_t>(reward - 1);
                if (freshStates > kMaxChainStates) {
                    throw ResourceLimitError("reward normalization needs more than " + std::to_string(kMaxChainStates) +
                                             " chain states");
                }
                auto& counter = chainCounter[{s, transition.action}];
                StateIndex const finalTarget = branch.target;
                StateIndex previous = s;
                std::string previousAction = transition.action;
                for (std::int64_t k = 1; k < reward; ++k) {
                    auto const chainState = static_cast<StateIndex>(names.size());
                    names.push_back(model.stateName(s) + "@" + transition.action + "#" + std::to_string(++counter));
                    transitions.emplace_back();
                    if (previous == s) {
                        branch.target = chainState;
                    } else {
                        transitions[previous].push_back(Transition{std::string(kTauAction), dirac(chainState)});
                    }
                    rewards.set(BranchKey{previous, previousAction, chainState}, Rational(1));
                    previous = chainState;
                    previousAction = std::string(kTauAction);
                }
                transitions[previous].push_back(Transition{std::string(kTauAction), dirac(finalTarget)});
                rewards.set(BranchKey{previous, previousAction, finalTarget}, Rational(1));
            }
            transitions[s].push_back(std::move(transition));
        }
    }
    result.model = Mdp(std::move(names), model.initialState(), std::move(transitions), model.labels());
    result.rewards = std::move(rewards);
    return result;
}

TransformedMdp redirect(Mdp const& model, RewardStructure const& boundReward, Redirection direction) {
    std::size_t const n = model.numStates();
    auto const aligned = boundReward.alignTo(model);
    TransformedMdp result;
    result.numRegular = n;
    result.origin.resize(n);

    std::vector<std::string> names = model.stateNames();
    names.reserve(2 * n);
    for (StateIndex s = 0; s < n; ++s) {
        names.push_back(model.stateName(s) + "_new");
        result.origin[s] = s;
    }

    std::vector<std::vector<Transition>> transitions(2 * n);
    for (StateIndex s = 0; s < n; ++s) {
        auto const original = model.transitions(s);
        for (std::size_t i = 0; i < original.size(); ++i) {
            Transition converted{original[i].action, {}};
            for (std::size_t j = 0; j < original[i].distribution.size(); ++j) {
                Branch const& branch = original[i].distribution[j];
                Rational const& reward = aligned[s][i][j];
                StateIndex target = branch.target;
                if (reward == Rational(1)) {
                    result.rewardOneBranches.insert(BranchKey{s, original[i].action, branch.target});
                    target = result.copyOf(direction == Redirection::Up ? s : branch.target);
                } else if (!reward.isZero()) {
                    throw ModelError("reward " + reward.toString() + " at (" + model.stateName(s) + "," +
                                     original[i].action + ") is not 0 or 1; normalize first");
                }
                auto existing = std::find_if(converted.distribution.begin(), converted.distribution.end(),
                                             [&](Branch const& b) { return b.target == target; });
                if (existing != converted.distribution.end()) {
                    existing->probability += branch.probability;
                } else {
                    converted.distribution.push_back(Branch{target, branch.probability});
                }
            }
            transitions[s].push_back(std::move(converted));
        }
    }
    for (StateIndex s = 0; s < n; ++s) {
        StateIndex const copy = result.copyOf(s);
        transitions[copy].push_back(Transition{std::string(kTauAction), dirac(copy)});
    }
    result.model = Mdp(std::move(names), model.initialState(), std::move(transitions), model.labels());
    return result;
}

ValueVector initialValues(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Optimization opt,
                          double epsilon) {
    auto absorbing = makeAbsorbing(model, goal, boundReward);
    auto up = redirectUp(absorbing.model, absorbing.rewards);
    ValueVector values(up.model.numStates(), 0.0);
    for (StateIndex g : goal) {
        values[g] = 1.0;
        values[up.copyOf(g)] = 1.0;
    }
    unboundedValueIteration(values, up.model, opt, epsilon);
    return values;
}

}  // namespace rbmc
