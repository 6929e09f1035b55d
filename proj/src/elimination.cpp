#include "rbmc/elimination.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_set>

#include "rbmc/errors.h"

namespace rbmc {

DtmcEliminator::DtmcEliminator(Mdp const& chain) : rows_(chain.numStates()), predecessors_(chain.numStates()) {
    for (StateIndex s = 0; s < chain.numStates(); ++s) {
        auto transitions = chain.transitions(s);
        if (transitions.size() != 1) {
            throw ModelError("DTMC elimination needs a deterministic model; state '" + chain.stateName(s) + "' has " +
                             std::to_string(transitions.size()) + " transitions");
        }
        for (auto const& branch : transitions.front().distribution) {
            rows_[s][branch.target] += branch.probability;
            predecessors_[branch.target].insert(s);
        }
    }
}

double DtmcEliminator::selfLoop(StateIndex t) const {
    auto it = rows_[t].find(t);
    return it == rows_[t].end() ? 0.0 : it->second;
}

void DtmcEliminator::eliminate(StateIndex t) {
    double const loop = selfLoop(t);
    if (loop >= 1.0 - kSelfLoopOneTolerance) {
        throw NumericalError("cannot eliminate state " + std::to_string(t) + ": self-loop probability is 1");
    }
    double const scale = 1.0 / (1.0 - loop);
    std::vector<StateIndex> sources(predecessors_[t].begin(), predecessors_[t].end());
    for (StateIndex s : sources) {
        if (s == t) continue;
        auto& row = rows_[s];
        auto into = row.find(t);
        if (into == row.end()) continue;
        double const pa = into->second;
        row.erase(into);
        for (auto const& [u, pb] : rows_[t]) {
            if (u == t) continue;
            row[u] += pa * pb * scale;
            predecessors_[u].insert(s);
        }
    }
    predecessors_[t].clear();
    if (loop > 0.0) predecessors_[t].insert(t);
}

void DtmcEliminator::dropIncoming(StateIndex t) {
    for (StateIndex s : predecessors_[t]) {
        if (s != t) rows_[s].erase(t);
    }
    bool const keepsLoop = rows_[t].count(t) > 0;
    predecessors_[t].clear();
    if (keepsLoop) predecessors_[t].insert(t);
}

Mdp DtmcEliminator::toMdp(Mdp const& original) const {
    std::vector<std::vector<Transition>> transitions(rows_.size());
    for (StateIndex s = 0; s < rows_.size(); ++s) {
        Transition transition{original.transitions(s).front().action, {}};
        for (auto const& [target, probability] : rows_[s]) {
            transition.distribution.push_back(Branch{target, probability});
        }
        transitions[s].push_back(std::move(transition));
    }
    return Mdp(original.stateNames(), original.initialState(), std::move(transitions), original.labels());
}

Mdp eliminateDtmcState(Mdp const& chain, StateIndex t) {
    if (t == chain.initialState()) {
        throw ModelError("the initial state cannot be eliminated");
    }
    DtmcEliminator eliminator(chain);
    eliminator.eliminate(t);
    return eliminator.toMdp(chain);
}

namespace {

void addBranch(Distribution& distribution, StateIndex target, double probability) {
    auto it = std::lower_bound(distribution.begin(), distribution.end(), target,
                               [](Branch const& b, StateIndex s) { return b.target < s; });
    if (it != distribution.end() && it->target == target) {
        it->probability += probability;
    } else {
        distribution.insert(it, Branch{target, probability});
    }
}

bool sameDistribution(WorkTransition const& a, WorkTransition const& b) {
    constexpr double tolerance = 1e-12;
    if (a.branches.size() != b.branches.size() || std::abs(a.stuck - b.stuck) > tolerance) return false;
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (a.branches[i].target != b.branches[i].target ||
            std::abs(a.branches[i].probability - b.branches[i].probability) > tolerance) {
            return false;
        }
    }
    return true;
}

std::set<StateIndex> targetsOf(std::vector<WorkTransition> const& transitions) {
    std::set<StateIndex> targets;
    for (auto const& transition : transitions) {
        for (auto const& branch : transition.branches) targets.insert(branch.target);
    }
    return targets;
}

std::size_t branchesOf(std::vector<WorkTransition> const& transitions) {
    std::size_t count = 0;
    for (auto const& transition : transitions) count += transition.branches.size();
    return count;
}

}  // namespace

EliminationWorkspace::EliminationWorkspace(Mdp const& model, std::vector<bool> retained, EliminationOptions options)
    : transitions_(model.numStates()),
      predecessors_(model.numStates()),
      eliminated_(model.numStates(), false),
      retained_(std::move(retained)),
      options_(options) {
    retained_.resize(model.numStates(), false);
    for (StateIndex s = 0; s < model.numStates(); ++s) {
        for (auto const& transition : model.transitions(s)) {
            WorkTransition work{transition.action, {}, 0.0};
            for (auto const& branch : transition.distribution) {
                addBranch(work.branches, branch.target, branch.probability);
                predecessors_[branch.target].insert(s);
            }
            branchCount_ += work.branches.size();
            transitions_[s].push_back(std::move(work));
        }
    }
    countBranches(0);
}

std::size_t EliminationWorkspace::numTransitions() const {
    std::size_t count = 0;
    for (auto const& ts : transitions_) count += ts.size();
    return count;
}

void EliminationWorkspace::countBranches(std::ptrdiff_t delta) {
    branchCount_ = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(branchCount_) + delta);
    if (branchCount_ > options_.maxBranches) {
        throw ResourceLimitError("state elimination exceeded the branch budget of " +
                                 std::to_string(options_.maxBranches) + " (currently " + std::to_string(branchCount_) +
                                 " branches)");
    }
}

void EliminationWorkspace::dedupe(StateIndex s) {
    auto& transitions = transitions_[s];
    if (transitions.size() < 2) return;
    // Sort indices by distribution so that equal distributions become neighbours.
    std::vector<std::size_t> order(transitions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto less = [&](std::size_t x, std::size_t y) {
        auto const& a = transitions[x];
        auto const& b = transitions[y];
        if (a.branches.size() != b.branches.size()) return a.branches.size() < b.branches.size();
        for (std::size_t i = 0; i < a.branches.size(); ++i) {
            if (a.branches[i].target != b.branches[i].target) return a.branches[i].target < b.branches[i].target;
        }
        for (std::size_t i = 0; i < a.branches.size(); ++i) {
            if (a.branches[i].probability != b.branches[i].probability) {
                return a.branches[i].probability < b.branches[i].probability;
            }
        }
        if (a.stuck != b.stuck) return a.stuck < b.stuck;
        return x < y;
    };
    std::sort(order.begin(), order.end(), less);
    std::vector<bool> drop(transitions.size(), false);
    std::size_t representative = order[0];
    for (std::size_t k = 1; k < order.size(); ++k) {
        std::size_t const current = order[k];
        if (!sameDistribution(transitions[representative], transitions[current])) {
            representative = current;
            continue;
        }
        // Keep the earliest transition; it takes the shortest provenance label of its group.
        std::size_t const keep = std::min(representative, current);
        std::size_t const gone = std::max(representative, current);
        if (transitions[gone].label.size() < transitions[keep].label.size()) {
            transitions[keep].label = std::move(transitions[gone].label);
        }
        drop[gone] = true;
        representative = keep;
    }
    std::vector<WorkTransition> kept;
    kept.reserve(transitions.size());
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        if (!drop[i]) kept.push_back(std::move(transitions[i]));
    }
    transitions = std::move(kept);
}

void EliminationWorkspace::eliminate(StateIndex t) {
    assert(t < numStates());
    if (eliminated_[t]) {
        throw ModelError("state " + std::to_string(t) + " was already eliminated");
    }

    // Fold t's self-loops into each of its own actions.
    std::vector<WorkTransition> folded;
    folded.reserve(transitions_[t].size());
    for (auto const& transition : transitions_[t]) {
        double loop = 0.0;
        for (auto const& branch : transition.branches) {
            if (branch.target == t) loop += branch.probability;
        }
        WorkTransition result{transition.label, {}, 0.0};
        if (loop >= 1.0 - kSelfLoopOneTolerance) {
            result.stuck = 1.0;
        } else {
            double const scale = 1.0 / (1.0 - loop);
            for (auto const& branch : transition.branches) {
                if (branch.target != t) result.branches.push_back(Branch{branch.target, branch.probability * scale});
            }
            result.stuck = transition.stuck * scale;
        }
        folded.push_back(std::move(result));
    }

    auto rewrite = [&](StateIndex s, std::vector<WorkTransition> replacement) {
        auto const before = targetsOf(transitions_[s]);
        std::ptrdiff_t const oldCount = static_cast<std::ptrdiff_t>(branchesOf(transitions_[s]));
        transitions_[s] = std::move(replacement);
        if (options_.mergeDuplicates) dedupe(s);
        auto const after = targetsOf(transitions_[s]);
        for (StateIndex u : before) {
            if (!after.count(u)) predecessors_[u].erase(s);
        }
        for (StateIndex u : after) predecessors_[u].insert(s);
        countBranches(static_cast<std::ptrdiff_t>(branchesOf(transitions_[s])) - oldCount);
    };

    std::vector<StateIndex> sources(predecessors_[t].begin(), predecessors_[t].end());
    for (StateIndex s : sources) {
        if (s == t) continue;
        std::vector<WorkTransition> replacement;
        std::vector<WorkTransition> current = transitions_[s];
        for (auto& transition : current) {
            auto into = std::find_if(transition.branches.begin(), transition.branches.end(),
                                     [&](Branch const& b) { return b.target == t; });
            if (into == transition.branches.end()) {
                replacement.push_back(std::move(transition));
                continue;
            }
            double const pa = into->probability;
            transition.branches.erase(into);
            for (auto const& action : folded) {
                WorkTransition composite{transition.label + "." + action.label, transition.branches,
                                         transition.stuck + pa * action.stuck};
                for (auto const& branch : action.branches) {
                    addBranch(composite.branches, branch.target, pa * branch.probability);
                }
                replacement.push_back(std::move(composite));
            }
        }
        // Collision-free labels, resolved in creation order.
        std::unordered_set<std::string> labels;
        for (auto& transition : replacement) {
            std::string label = transition.label;
            for (std::size_t k = 2; labels.count(label) > 0; ++k) label = transition.label + "#" + std::to_string(k);
            labels.insert(label);
            transition.label = std::move(label);
        }
        rewrite(s, std::move(replacement));
    }

    if (retained_[t]) {
        rewrite(t, std::move(folded));
    } else {
        rewrite(t, {});
    }
    predecessors_[t].clear();
    eliminated_[t] = true;
}

bool EliminationWorkspace::predecessorIndexConsistent() const {
    std::vector<std::set<StateIndex>> expected(numStates());
    for (StateIndex s = 0; s < numStates(); ++s) {
        for (StateIndex u : targetsOf(transitions_[s])) expected[u].insert(s);
    }
    return expected == predecessors_;
}

EliminationWorkspace eliminateAll(TransformedMdp const& model, StateSet const& relevant, EliminationOptions options) {
    std::vector<bool> retained(model.model.numStates(), false);
    for (StateIndex r : relevant) retained[r] = true;
    EliminationWorkspace workspace(model.model, std::move(retained), options);

    auto score = [&](StateIndex s) {
        std::size_t incoming = workspace.predecessors(s).size();
        if (workspace.predecessors(s).count(s)) --incoming;
        return incoming * workspace.transitions(s).size();
    };
    using Entry = std::pair<std::size_t, StateIndex>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (StateIndex s = 0; s < model.numRegular; ++s) queue.emplace(score(s), s);
    while (!queue.empty()) {
        auto [stored, s] = queue.top();
        queue.pop();
        if (workspace.isEliminated(s)) continue;
        std::size_t const current = score(s);
        if (current != stored) {
            queue.emplace(current, s);
            continue;
        }
        workspace.eliminate(s);
    }
    return workspace;
}

}  // namespace rbmc
