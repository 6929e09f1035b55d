#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbmc::fixtures {

std::vector<double> solveDense(std::vector<std::vector<double>> a, std::vector<double> b) {
    std::size_t const n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-300) throw std::runtime_error("singular system");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double const factor = a[r][col] / a[col][col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double sum = b[i];
        for (std::size_t c = i + 1; c < n; ++c) sum -= a[i][c] * x[c];
        x[i] = sum / a[i][i];
    }
    return x;
}

std::vector<std::vector<std::size_t>> allChoices(Mdp const& model) {
    std::vector<std::vector<std::size_t>> result;
    std::vector<std::size_t> choice(model.numStates(), 0);
    while (true) {
        result.push_back(choice);
        std::size_t s = 0;
        while (s < model.numStates()) {
            if (++choice[s] < model.transitions(static_cast<StateIndex>(s)).size()) break;
            choice[s] = 0;
            ++s;
        }
        if (s == model.numStates()) return result;
    }
}

std::vector<double> stepMeasureCdf(Mdp const& model, StateSet const& goal, RewardStructure const& rewards,
                                   Optimization opt, std::uint64_t n) {
    std::size_t const numStates = model.numStates();
    std::vector<bool> isGoal(numStates, false);
    for (StateIndex g : goal) isGoal[g] = true;
    auto const aligned = rewards.alignTo(model);

    // Goal states are absorbing and every further step costs one unit.
    std::vector<std::vector<Transition>> rows(numStates);
    for (StateIndex s = 0; s < numStates; ++s) {
        if (isGoal[s]) {
            rows[s].push_back(Transition{"loop", dirac(s)});
        } else {
            rows[s].assign(model.transitions(s).begin(), model.transitions(s).end());
        }
    }
    Mdp const absorbing(model.stateNames(), model.initialState(), rows);
    auto isRewardOne = [&](StateIndex s, std::size_t i, std::size_t j) {
        return isGoal[s] || !aligned[s][i][j].isZero();
    };
    auto isFree = [&](StateIndex s, std::size_t i, std::size_t j) { return !isRewardOne(s, i, j); };

    auto const choices = allChoices(absorbing);
    bool const maximize = opt == Optimization::Maximize;
    auto better = [&](double x, double y) { return maximize ? x > y : x < y; };

    // measure[c][s][t]: probability that the first reward-one step from s under choice c lands in t.
    std::vector<std::vector<std::vector<double>>> measure(choices.size());
    for (std::size_t c = 0; c < choices.size(); ++c) {
        auto const& choice = choices[c];
        // Landing measure: add one sink per landing state, reached through a reward-one branch.
        std::vector<std::vector<Transition>> split(2 * numStates);
        for (StateIndex s = 0; s < numStates; ++s) {
            Transition const& chosen = absorbing.transitions(s)[choice[s]];
            Distribution d;
            for (std::size_t j = 0; j < chosen.distribution.size(); ++j) {
                Branch b = chosen.distribution[j];
                if (isRewardOne(s, choice[s], j)) b.target = static_cast<StateIndex>(numStates + b.target);
                d.push_back(b);
            }
            split[s].push_back(Transition{chosen.action, d});
            split[numStates + s].push_back(Transition{"sink", dirac(static_cast<StateIndex>(numStates + s))});
        }
        Mdp const splitModel(std::vector<std::string>(2 * numStates), 0, split);
        std::vector<std::size_t> splitChoice(2 * numStates, 0);
        measure[c].assign(numStates, std::vector<double>(numStates, 0.0));
        for (StateIndex t = 0; t < numStates; ++t) {
            std::vector<bool> target(2 * numStates, false);
            target[numStates + t] = true;
            auto x = reachProbability(splitModel, splitChoice, target,
                                      [](StateIndex, std::size_t, std::size_t) { return true; });
            for (StateIndex s = 0; s < numStates; ++s) measure[c][s][t] = x[s];
        }
    }
    // Bound 0: optimal reachability of the goal along reward-free branches.
    std::vector<double> w(numStates, maximize ? 0.0 : 1.0);
    for (auto const& choice : choices) {
        auto r = reachProbability(absorbing, choice, isGoal,
                                  [&](StateIndex s, std::size_t i, std::size_t j) { return isFree(s, i, j); });
        for (StateIndex s = 0; s < numStates; ++s) {
            if (better(r[s], w[s])) w[s] = r[s];
        }
    }

    std::vector<double> cdf{w[absorbing.initialState()]};
    for (std::uint64_t i = 1; i <= n; ++i) {
        std::vector<double> next(numStates, maximize ? 0.0 : 1.0);
        for (std::size_t c = 0; c < choices.size(); ++c) {
            for (StateIndex s = 0; s < numStates; ++s) {
                double sum = 0.0;
                for (StateIndex t = 0; t < numStates; ++t) sum += measure[c][s][t] * w[t];
                sum = std::min(sum, 1.0);
                if (better(sum, next[s])) next[s] = sum;
            }
        }
        w = std::move(next);
        cdf.push_back(w[absorbing.initialState()]);
    }
    return cdf;
}

double chainReachProbability(Mdp const& chain, StateSet const& goal) {
    std::vector<bool> isTarget(chain.numStates(), false);
    for (StateIndex g : goal) isTarget[g] = true;
    std::vector<std::size_t> choice(chain.numStates(), 0);
    auto x = reachProbability(chain, choice, isTarget, [](StateIndex, std::size_t, std::size_t) { return true; });
    return x[chain.initialState()];
}

}  // namespace rbmc::fixtures
