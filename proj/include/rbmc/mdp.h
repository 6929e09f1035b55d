#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rbmc/rational.h"

namespace rbmc {

using StateIndex = std::uint32_t;

/// Sorted, duplicate-free set of state indices.
using StateSet = std::vector<StateIndex>;

/// Action label of the internal self-loops introduced by the model transformations.
inline constexpr std::string_view kTauAction = "tau";

/// Distributions summing to one within this absolute slack are accepted.
inline constexpr double kDistributionTolerance = 1e-9;

struct Branch {
    StateIndex target;
    double probability;

    friend bool operator==(Branch const&, Branch const&) = default;
};

/// Ordered branches of one transition; a single branch with probability 1 is a Dirac distribution.
using Distribution = std::vector<Branch>;

inline Distribution dirac(StateIndex target) { return {Branch{target, 1.0}}; }

struct Transition {
    std::string action;
    Distribution distribution;
};

/// Immutable explicit-state MDP. States are dense indices in declaration order.
///
/// Construction does not check the MDP invariants; run validate() on anything that
/// comes from outside the library.
class Mdp {
   public:
    Mdp() = default;
    Mdp(std::vector<std::string> stateNames, StateIndex initial, std::vector<std::vector<Transition>> transitions,
        std::map<std::string, StateSet> labels = {});

    std::size_t numStates() const { return names_.size(); }
    StateIndex initialState() const { return initial_; }
    std::string const& stateName(StateIndex s) const { return names_[s]; }
    std::vector<std::string> const& stateNames() const { return names_; }
    std::optional<StateIndex> findState(std::string_view name) const;

    std::span<Transition const> transitions(StateIndex s) const { return transitions_[s]; }
    Transition const* findTransition(StateIndex s, std::string_view action) const;

    std::map<std::string, StateSet> const& labels() const { return labels_; }
    /// Nullptr if no such label exists.
    StateSet const* label(std::string_view name) const;

    std::size_t numTransitions() const;
    std::size_t numBranches() const;
    bool isDeterministic() const;

   private:
    std::vector<std::string> names_;
    StateIndex initial_ = 0;
    std::vector<std::vector<Transition>> transitions_;
    std::map<std::string, StateSet> labels_;
    std::unordered_map<std::string, StateIndex> index_;
};

/// Incremental construction helper; build() hands the collected data to an Mdp.
class MdpBuilder {
   public:
    StateIndex addState(std::string name);
    void setInitial(StateIndex s) { initial_ = s; }
    void addTransition(StateIndex from, std::string action, Distribution distribution);
    void addLabel(std::string const& label, StateIndex s);
    std::size_t numStates() const { return names_.size(); }
    std::string const& stateName(StateIndex s) const { return names_[s]; }

    Mdp build() &&;

   private:
    std::vector<std::string> names_;
    StateIndex initial_ = 0;
    std::vector<std::vector<Transition>> transitions_;
    std::map<std::string, StateSet> labels_;
};

struct BranchKey {
    StateIndex source;
    std::string action;
    StateIndex target;

    friend auto operator<=>(BranchKey const&, BranchKey const&) = default;
};

/// Named, nonnegative rational reward per branch. Missing keys mean reward zero.
class RewardStructure {
   public:
    RewardStructure() = default;
    explicit RewardStructure(std::string name) : name_(std::move(name)) {}

    std::string const& name() const { return name_; }
    void set(BranchKey key, Rational value);
    Rational get(StateIndex source, std::string_view action, StateIndex target) const;
    std::map<BranchKey, Rational> const& entries() const { return values_; }

    /// Per-branch rewards aligned with model.transitions(s)[i].distribution[j].
    std::vector<std::vector<std::vector<Rational>>> alignTo(Mdp const& model) const;

   private:
    std::string name_;
    std::map<BranchKey, Rational> values_;
};

/// Positional deterministic scheduler: one enabled action per state.
struct SimpleScheduler {
    std::map<StateIndex, std::string> choice;
};

struct Violation {
    std::string message;
    std::optional<StateIndex> state;
    std::optional<std::string> action;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

/// Checks every structural invariant of the model and of the given reward structures.
/// Violations are reported, never thrown.
ValidationReport validate(Mdp const& model, std::span<RewardStructure const> rewards = {});

/// The Markov chain induced by a simple scheduler: each state keeps only the chosen transition.
/// Throws ModelError if the scheduler misses a state or names a disabled action.
Mdp restrict(Mdp const& model, SimpleScheduler const& scheduler);

/// Size of a model: the columns of a state-space table.
struct ModelSize {
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t branches = 0;
};

inline ModelSize sizeOf(Mdp const& model) { return {model.numStates(), model.numTransitions(), model.numBranches()}; }

/// Sorts and deduplicates a list of state indices.
StateSet makeStateSet(std::vector<StateIndex> states);

}  // namespace rbmc
