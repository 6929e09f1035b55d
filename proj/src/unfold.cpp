#include "rbmc/unfold.h"

#include <algorithm>
#include <deque>
#include <map>
#include <string>

#include "rbmc/errors.h"

namespace rbmc {

namespace {

// (state, numerator, denominator); denominator 0 marks the overflow layer.
using PairKey = std::tuple<StateIndex, std::int64_t, std::int64_t>;

PairKey keyOf(StateIndex s, std::optional<Rational> const& accumulated) {
    if (!accumulated) return {s, 0, 0};
    return {s, accumulated->numerator(), accumulated->denominator()};
}

}  // namespace

UnfoldedMdp unfold(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Rational bound,
                   std::size_t maxStates) {
    std::vector<bool> isGoal(model.numStates(), false);
    for (StateIndex g : goal) {
        if (g >= model.numStates()) throw ModelError("goal state index out of range");
        isGoal[g] = true;
    }
    auto const rewards = boundReward.alignTo(model);

    UnfoldedMdp result;
    std::map<PairKey, StateIndex> index;
    std::vector<std::string> names;
    std::vector<std::vector<Transition>> transitions;
    std::deque<StateIndex> queue;

    auto intern = [&](StateIndex s, std::optional<Rational> accumulated) {
        auto key = keyOf(s, accumulated);
        if (auto it = index.find(key); it != index.end()) return it->second;
        if (names.size() >= maxStates) {
            throw ResourceLimitError("unfolding exceeds " + std::to_string(maxStates) + " states");
        }
        auto const id = static_cast<StateIndex>(names.size());
        index.emplace(key, id);
        names.push_back(model.stateName(s) + "|" + (accumulated ? accumulated->toString() : std::string("overflow")));
        transitions.emplace_back();
        result.originalState.push_back(s);
        result.accumulated.push_back(accumulated);
        queue.push_back(id);
        return id;
    };

    intern(model.initialState(), Rational(0));
    while (!queue.empty()) {
        StateIndex const pair = queue.front();
        queue.pop_front();
        StateIndex const s = result.originalState[pair];
        std::optional<Rational> const accumulated = result.accumulated[pair];
        if (accumulated && isGoal[s]) {
            result.goal.push_back(pair);
            transitions[pair].push_back(Transition{std::string(kTauAction), dirac(pair)});
            continue;
        }
        auto const original = model.transitions(s);
        for (std::size_t i = 0; i < original.size(); ++i) {
            Transition unfolded{original[i].action, {}};
            for (std::size_t j = 0; j < original[i].distribution.size(); ++j) {
                Branch const& branch = original[i].distribution[j];
                std::optional<Rational> next;
                if (accumulated) {
                    Rational sum = *accumulated + rewards[s][i][j];
                    if (sum <= bound) next = sum;
                }
                StateIndex const target = intern(branch.target, next);
                unfolded.distribution.push_back(Branch{target, branch.probability});
            }
            transitions[pair].push_back(std::move(unfolded));
        }
    }
    result.goal = makeStateSet(std::move(result.goal));
    result.model = Mdp(std::move(names), 0, std::move(transitions));
    return result;
}

std::vector<double> oracleBoundedProb(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward,
                                      std::span<Rational const> bounds, Optimization opt, ModelSize* largest) {
    std::vector<double> values;
    values.reserve(bounds.size());
    for (Rational const& bound : bounds) {
        auto unfolded = unfold(model, goal, boundReward, bound);
        ValueVector v(unfolded.model.numStates(), 0.0);
        for (StateIndex g : unfolded.goal) v[g] = 1.0;
        unboundedValueIteration(v, unfolded.model, opt, kOracleEpsilon);
        values.push_back(v[unfolded.model.initialState()]);
        if (largest && unfolded.model.numStates() >= largest->states) *largest = sizeOf(unfolded.model);
    }
    return values;
}

std::vector<double> oracleBoundedProb(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward,
                                      std::uint64_t n, Optimization opt) {
    std::vector<Rational> bounds;
    for (std::uint64_t i = 0; i <= n; ++i) bounds.emplace_back(static_cast<std::int64_t>(i));
    return oracleBoundedProb(model, goal, boundReward, bounds, opt);
}

}  // namespace rbmc
