#include "rbmc/mdp.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "rbmc/errors.h"

namespace rbmc {

Mdp::Mdp(std::vector<std::string> stateNames, StateIndex initial, std::vector<std::vector<Transition>> transitions,
         std::map<std::string, StateSet> labels)
    : names_(std::move(stateNames)), initial_(initial), transitions_(std::move(transitions)), labels_(std::move(labels)) {
    transitions_.resize(names_.size());
    index_.reserve(names_.size());
    for (StateIndex s = 0; s < names_.size(); ++s) {
        index_.emplace(names_[s], s);
    }
}

std::optional<StateIndex> Mdp::findState(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Transition const* Mdp::findTransition(StateIndex s, std::string_view action) const {
    for (auto const& transition : transitions_[s]) {
        if (transition.action == action) return &transition;
    }
    return nullptr;
}

StateSet const* Mdp::label(std::string_view name) const {
    auto it = labels_.find(std::string(name));
    return it == labels_.end() ? nullptr : &it->second;
}

std::size_t Mdp::numTransitions() const {
    std::size_t count = 0;
    for (auto const& ts : transitions_) count += ts.size();
    return count;
}

std::size_t Mdp::numBranches() const {
    std::size_t count = 0;
    for (auto const& ts : transitions_) {
        for (auto const& t : ts) count += t.distribution.size();
    }
    return count;
}

bool Mdp::isDeterministic() const {
    return std::all_of(transitions_.begin(), transitions_.end(), [](auto const& ts) { return ts.size() == 1; });
}

StateIndex MdpBuilder::addState(std::string name) {
    names_.push_back(std::move(name));
    transitions_.emplace_back();
    return static_cast<StateIndex>(names_.size() - 1);
}

void MdpBuilder::addTransition(StateIndex from, std::string action, Distribution distribution) {
    if (from >= transitions_.size()) {
        transitions_.resize(from + 1);
    }
    transitions_[from].push_back(Transition{std::move(action), std::move(distribution)});
}

void MdpBuilder::addLabel(std::string const& label, StateIndex s) {
    auto& states = labels_[label];
    states.insert(std::lower_bound(states.begin(), states.end(), s), s);
    states.erase(std::unique(states.begin(), states.end()), states.end());
}

Mdp MdpBuilder::build() && {
    return Mdp(std::move(names_), initial_, std::move(transitions_), std::move(labels_));
}

void RewardStructure::set(BranchKey key, Rational value) {
    if (value.isZero()) {
        values_.erase(key);
    } else {
        values_[std::move(key)] = value;
    }
}

Rational RewardStructure::get(StateIndex source, std::string_view action, StateIndex target) const {
    auto it = values_.find(BranchKey{source, std::string(action), target});
    return it == values_.end() ? Rational() : it->second;
}

std::vector<std::vector<std::vector<Rational>>> RewardStructure::alignTo(Mdp const& model) const {
    std::vector<std::vector<std::vector<Rational>>> aligned(model.numStates());
    for (StateIndex s = 0; s < model.numStates(); ++s) {
        auto transitions = model.transitions(s);
        aligned[s].resize(transitions.size());
        for (std::size_t i = 0; i < transitions.size(); ++i) {
            aligned[s][i].resize(transitions[i].distribution.size());
        }
    }
    for (auto const& [key, value] : values_) {
        if (key.source >= model.numStates()) continue;
        auto transitions = model.transitions(key.source);
        for (std::size_t i = 0; i < transitions.size(); ++i) {
            if (transitions[i].action != key.action) continue;
            auto const& dist = transitions[i].distribution;
            for (std::size_t j = 0; j < dist.size(); ++j) {
                if (dist[j].target == key.target) aligned[key.source][i][j] = value;
            }
        }
    }
    return aligned;
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i > 0) out << "; ";
        out << violations[i].message;
    }
    return out.str();
}

ValidationReport validate(Mdp const& model, std::span<RewardStructure const> rewards) {
    ValidationReport report;
    auto add = [&](std::string message, std::optional<StateIndex> state = std::nullopt,
                   std::optional<std::string> action = std::nullopt) {
        report.violations.push_back(Violation{std::move(message), state, std::move(action)});
    };
    std::size_t const n = model.numStates();
    auto name = [&](StateIndex s) { return s < n ? model.stateName(s) : "#" + std::to_string(s); };

    if (n == 0) {
        add("model has no states");
        return report;
    }
    if (model.initialState() >= n) {
        add("initial state index " + std::to_string(model.initialState()) + " out of range");
    }
    std::set<std::string> seenNames;
    for (StateIndex s = 0; s < n; ++s) {
        if (!seenNames.insert(model.stateName(s)).second) {
            add("duplicate state name '" + model.stateName(s) + "'", s);
        }
    }

    for (StateIndex s = 0; s < n; ++s) {
        auto transitions = model.transitions(s);
        if (transitions.empty()) {
            add("state '" + name(s) + "' has no transitions", s);
        }
        std::set<std::string> actions;
        for (auto const& transition : transitions) {
            std::string const where = "(" + name(s) + "," + transition.action + ")";
            if (!actions.insert(transition.action).second) {
                add("duplicate action at " + where, s, transition.action);
            }
            if (transition.distribution.empty()) {
                add("empty distribution at " + where, s, transition.action);
                continue;
            }
            std::set<StateIndex> targets;
            double sum = 0.0;
            for (auto const& branch : transition.distribution) {
                if (branch.target >= n) {
                    add("branch target out of range at " + where, s, transition.action);
                } else if (!targets.insert(branch.target).second) {
                    add("duplicate target '" + name(branch.target) + "' at " + where, s, transition.action);
                }
                if (!std::isfinite(branch.probability) || branch.probability <= 0.0 || branch.probability > 1.0) {
                    add("probability outside (0,1] at " + where, s, transition.action);
                }
                sum += branch.probability;
            }
            if (std::abs(sum - 1.0) > kDistributionTolerance) {
                add("distribution sum ≠ 1 at " + where, s, transition.action);
            }
        }
    }

    for (auto const& [label, states] : model.labels()) {
        for (StateIndex s : states) {
            if (s >= n) add("label '" + label + "' refers to state index " + std::to_string(s) + " out of range");
        }
    }

    for (auto const& structure : rewards) {
        for (auto const& [key, value] : structure.entries()) {
            std::string const where = "(" + name(key.source) + "," + key.action + "," + name(key.target) + ")";
            if (value.isNegative()) {
                add("negative reward in '" + structure.name() + "' at " + where, key.source, key.action);
            }
            if (value.isZero()) continue;
            bool exists = false;
            if (key.source < n) {
                if (auto const* transition = model.findTransition(key.source, key.action)) {
                    exists = std::any_of(transition->distribution.begin(), transition->distribution.end(),
                                         [&](Branch const& b) { return b.target == key.target; });
                }
            }
            if (!exists) {
                add("reward on missing branch " + where + " in '" + structure.name() + "'", key.source, key.action);
            }
        }
    }
    return report;
}

Mdp restrict(Mdp const& model, SimpleScheduler const& scheduler) {
    std::vector<std::vector<Transition>> transitions(model.numStates());
    for (StateIndex s = 0; s < model.numStates(); ++s) {
        auto it = scheduler.choice.find(s);
        if (it == scheduler.choice.end()) {
            throw ModelError("scheduler has no choice for state '" + model.stateName(s) + "'");
        }
        auto const* chosen = model.findTransition(s, it->second);
        if (chosen == nullptr) {
            throw ModelError("scheduler picks action '" + it->second + "' not enabled in state '" + model.stateName(s) + "'");
        }
        transitions[s].push_back(*chosen);
    }
    return Mdp(model.stateNames(), model.initialState(), std::move(transitions), model.labels());
}

StateSet makeStateSet(std::vector<StateIndex> states) {
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    return states;
}

}  // namespace rbmc
