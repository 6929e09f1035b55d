#include "rbmc/bounded.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rbmc/errors.h"
#include "rbmc/unfold.h"

namespace rbmc {

std::string toString(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::ModifiedValueIteration:
            return "modvi";
        case Algorithm::SchedulerEnumerationVi:
            return "senum-vi";
        case Algorithm::SchedulerEnumerationElim:
            return "senum-elim";
        case Algorithm::StateElimination:
            return "elim";
        case Algorithm::Unfolding:
            return "unfold";
    }
    return "unknown";
}

std::optional<Algorithm> parseAlgorithm(std::string_view name) {
    for (Algorithm a : {Algorithm::ModifiedValueIteration, Algorithm::SchedulerEnumerationVi,
                        Algorithm::SchedulerEnumerationElim, Algorithm::StateElimination, Algorithm::Unfolding}) {
        if (toString(a) == name) return a;
    }
    return std::nullopt;
}

StateSet relevantStates(TransformedMdp const& down) {
    std::vector<StateIndex> states{down.model.initialState()};
    for (BranchKey const& key : down.rewardOneBranches) states.push_back(key.target);
    return makeStateSet(std::move(states));
}

namespace {

constexpr double kBottomTolerance = 1e-12;

}  // namespace

ReachDistribution computeProbs(Mdp const& chain, std::size_t numRegular, StateIndex from, ProbabilityMode mode,
                               double epsilon) {
    if (from >= numRegular) throw ModelError("computeProbs: source must be a regular state");
    ReachDistribution result;
    double total = 0.0;
    if (mode == ProbabilityMode::ValueIteration) {
        for (std::size_t c = numRegular; c < chain.numStates(); ++c) {
            ValueVector v(chain.numStates(), 0.0);
            v[c] = 1.0;
            unboundedValueIteration(v, chain, Optimization::Maximize, epsilon);
            if (v[from] > 0.0) {
                result.copies.push_back(Branch{static_cast<StateIndex>(c), v[from]});
                total += v[from];
            }
        }
    } else {
        DtmcEliminator eliminator(chain);
        for (std::size_t t = 0; t < numRegular; ++t) {
            auto const state = static_cast<StateIndex>(t);
            if (state == from) continue;
            if (eliminator.selfLoop(state) >= 1.0 - kSelfLoopOneTolerance) {
                eliminator.dropIncoming(state);
            } else {
                eliminator.eliminate(state);
            }
        }
        double const loop = eliminator.selfLoop(from);
        if (loop < 1.0 - kSelfLoopOneTolerance) {
            for (auto const& [target, p] : eliminator.row(from)) {
                if (target < numRegular) continue;
                double const q = p / (1.0 - loop);
                result.copies.push_back(Branch{target, q});
                total += q;
            }
        }
    }
    // Rounding residue below the merge tolerance is not stuck mass.
    result.bottom = 1.0 - total > kBottomTolerance ? 1.0 - total : 0.0;
    return result;
}

namespace {

constexpr double kMergeTolerance = 1e-12;

bool lessDistribution(Distribution const& a, Distribution const& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].target != b[i].target) return a[i].target < b[i].target;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].probability != b[i].probability) return a[i].probability < b[i].probability;
    }
    return false;
}

bool sameDistribution(Distribution const& a, Distribution const& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].target != b[i].target || std::abs(a[i].probability - b[i].probability) > kMergeTolerance) {
            return false;
        }
    }
    return true;
}

/// Drops transitions whose distribution equals an earlier one; the survivor keeps the shortest label.
void dedupeTransitions(std::vector<Transition>& transitions) {
    if (transitions.size() < 2) return;
    std::vector<std::size_t> order(transitions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (lessDistribution(transitions[x].distribution, transitions[y].distribution)) return true;
        if (lessDistribution(transitions[y].distribution, transitions[x].distribution)) return false;
        return x < y;
    });
    std::vector<bool> drop(transitions.size(), false);
    std::size_t representative = order[0];
    for (std::size_t k = 1; k < order.size(); ++k) {
        std::size_t const current = order[k];
        if (!sameDistribution(transitions[representative].distribution, transitions[current].distribution)) {
            representative = current;
            continue;
        }
        std::size_t const keep = std::min(representative, current);
        std::size_t const gone = std::max(representative, current);
        if (transitions[gone].action.size() < transitions[keep].action.size()) {
            transitions[keep].action = std::move(transitions[gone].action);
        }
        drop[gone] = true;
        representative = keep;
    }
    std::vector<Transition> kept;
    kept.reserve(transitions.size());
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        if (!drop[i]) kept.push_back(std::move(transitions[i]));
    }
    transitions = std::move(kept);
}

class MergedModelBuilder {
   public:
    MergedModelBuilder(TransformedMdp const& down, StateSet const& relevant) : down_(down) {
        index_.assign(down.numRegular, kNone);
        for (std::size_t m = 0; m < relevant.size(); ++m) {
            index_[relevant[m]] = static_cast<StateIndex>(m);
            names_.push_back(down.model.stateName(relevant[m]));
            origin_.push_back(relevant[m]);
        }
        bottom_ = static_cast<StateIndex>(relevant.size());
        names_.push_back("bottom");
        transitions_.resize(relevant.size() + 1);
        transitions_[bottom_].push_back(Transition{std::string(kTauAction), dirac(bottom_)});
    }

    StateIndex bottom() const { return bottom_; }

    /// Mass into regular state `origin` of the down model; throws if it is not relevant.
    StateIndex mergedIndexOf(StateIndex origin) const {
        if (index_[origin] == kNone) throw ModelError("copy of a non-relevant state reached");
        return index_[origin];
    }

    /// Adds a transition; equal distributions are merged by build(). Branches may be unsorted.
    void add(StateIndex relevantState, std::string label, Distribution distribution) {
        std::sort(distribution.begin(), distribution.end(),
                  [](Branch const& x, Branch const& y) { return x.target < y.target; });
        Distribution merged;
        for (Branch const& b : distribution) {
            if (b.probability <= 0.0) continue;
            if (!merged.empty() && merged.back().target == b.target) {
                merged.back().probability += b.probability;
            } else {
                merged.push_back(b);
            }
        }
        double total = 0.0;
        for (Branch const& b : merged) total += b.probability;
        if (total > 1.0) {
            for (Branch& b : merged) b.probability /= total;
        }
        if (merged.empty()) merged = dirac(bottom_);
        transitions_[index_[relevantState]].push_back(Transition{std::move(label), std::move(merged)});
    }

    MergedModel build() && {
        for (auto& list : transitions_) dedupeTransitions(list);
        StateIndex const initial = index_[down_.model.initialState()];
        return MergedModel{Mdp(std::move(names_), initial, std::move(transitions_)), bottom_, std::move(origin_)};
    }

   private:
    static constexpr StateIndex kNone = std::numeric_limits<StateIndex>::max();

    TransformedMdp const& down_;
    std::vector<StateIndex> index_;
    std::vector<std::string> names_;
    std::vector<StateIndex> origin_;
    std::vector<std::vector<Transition>> transitions_;
    StateIndex bottom_ = 0;
};

}  // namespace

MergedModel mergeBySchedulerEnumeration(TransformedMdp const& down, StateSet const& relevant, ProbabilityMode mode,
                                        double epsilon, std::uint64_t maxSchedulersPerState) {
    MergedModelBuilder builder(down, relevant);
    std::size_t const n = down.numRegular;
    Mdp const& model = down.model;

    std::vector<int> choice(n, -1);
    std::vector<char> reached(n, 0);
    std::vector<StateIndex> order;
    std::vector<StateIndex> local(model.numStates(), 0);

    for (StateIndex r : relevant) {
        std::uint64_t schedulers = 0;
        order.assign(1, r);
        reached[r] = 1;

        auto emit = [&] {
            if (++schedulers > maxSchedulersPerState) {
                throw ResourceLimitError("more than " + std::to_string(maxSchedulersPerState) +
                                         " schedulers from state " + model.stateName(r));
            }
            // Local chain: the reached regular states in discovery order, then the copies they hit.
            std::vector<StateIndex> copies;
            for (std::size_t k = 0; k < order.size(); ++k) local[order[k]] = static_cast<StateIndex>(k);
            for (StateIndex s : order) {
                for (Branch const& b : model.transitions(s)[choice[s]].distribution) {
                    if (down.isCopy(b.target)) copies.push_back(b.target);
                }
            }
            copies = makeStateSet(std::move(copies));
            for (std::size_t k = 0; k < copies.size(); ++k) local[copies[k]] = static_cast<StateIndex>(order.size() + k);

            std::vector<std::vector<Transition>> rows(order.size() + copies.size());
            for (std::size_t k = 0; k < order.size(); ++k) {
                Transition const& chosen = model.transitions(order[k])[choice[order[k]]];
                Distribution d;
                d.reserve(chosen.distribution.size());
                for (Branch const& b : chosen.distribution) d.push_back(Branch{local[b.target], b.probability});
                rows[k].push_back(Transition{chosen.action, std::move(d)});
            }
            for (std::size_t k = 0; k < copies.size(); ++k) {
                auto const self = static_cast<StateIndex>(order.size() + k);
                rows[self].push_back(Transition{std::string(kTauAction), dirac(self)});
            }
            std::vector<std::string> names(rows.size());
            Mdp chain(std::move(names), 0, std::move(rows));
            ReachDistribution reach = computeProbs(chain, order.size(), 0, mode, epsilon);

            Distribution merged;
            for (Branch const& b : reach.copies) {
                StateIndex const copy = copies[b.target - order.size()];
                merged.push_back(Branch{builder.mergedIndexOf(down.originOf(copy)), b.probability});
            }
            if (reach.bottom > 0.0) merged.push_back(Branch{builder.bottom(), reach.bottom});
            builder.add(r, "sched#" + std::to_string(schedulers - 1), std::move(merged));
        };

        // Iterative DFS over action choices of the states reached so far.
        struct Frame {
            std::size_t pos;
            std::size_t nextAction;
            std::size_t mark;
        };
        std::vector<Frame> stack{{0, 0, 0}};
        while (!stack.empty()) {
            Frame& frame = stack.back();
            if (frame.pos == order.size()) {
                emit();
                stack.pop_back();
                continue;
            }
            StateIndex const s = order[frame.pos];
            if (frame.nextAction > 0) {
                for (std::size_t k = frame.mark; k < order.size(); ++k) reached[order[k]] = 0;
                order.resize(frame.mark);
            }
            if (frame.nextAction == model.transitions(s).size()) {
                choice[s] = -1;
                stack.pop_back();
                continue;
            }
            std::size_t const a = frame.nextAction++;
            choice[s] = static_cast<int>(a);
            frame.mark = order.size();
            for (Branch const& b : model.transitions(s)[a].distribution) {
                if (!down.isCopy(b.target) && !reached[b.target]) {
                    reached[b.target] = 1;
                    order.push_back(b.target);
                }
            }
            std::size_t const next = frame.pos + 1;
            stack.push_back(Frame{next, 0, 0});
        }
        reached[r] = 0;
    }
    return std::move(builder).build();
}

MergedModel mergeEliminated(TransformedMdp const& down, StateSet const& relevant,
                            EliminationWorkspace const& workspace) {
    MergedModelBuilder builder(down, relevant);
    for (StateIndex r : relevant) {
        for (WorkTransition const& t : workspace.transitions(r)) {
            Distribution merged;
            double bottom = t.stuck;
            for (Branch const& b : t.branches) {
                if (down.isCopy(b.target)) {
                    merged.push_back(Branch{builder.mergedIndexOf(down.originOf(b.target)), b.probability});
                } else {
                    bottom += b.probability;
                }
            }
            if (bottom > 0.0) merged.push_back(Branch{builder.bottom(), bottom});
            builder.add(r, t.label, std::move(merged));
        }
    }
    return std::move(builder).build();
}

namespace {

struct Prepared {
    NormalizedModel normalized;
    TransformedMdp down;
    ValueVector initial;
};

Prepared prepare(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Bound const& bound,
                 Optimization opt, SolverOptions const& options) {
    for (StateIndex g : goal) {
        if (g >= model.numStates()) throw ModelError("goal state index out of range");
    }
    if (bound.limit && bound.limit->isNegative()) throw ModelError("reward bound must be nonnegative");
    Prepared p;
    p.normalized = normalizeRewards(model, boundReward, bound.limit.value_or(Rational(0)));
    RewardedMdp absorbing = makeAbsorbing(p.normalized.model, goal, p.normalized.rewards);
    p.down = redirectDown(absorbing.model, absorbing.rewards);
    p.initial = initialValues(p.normalized.model, goal, p.normalized.rewards, opt, options.epsilon);
    return p;
}

class BoundStepper {
   public:
    virtual ~BoundStepper() = default;
    virtual double value() const = 0;
    /// Advances the bound by one reward unit and returns the step's error.
    virtual double advance() = 0;

   protected:
    /// Bounded reachability never decreases with the bound; this removes iteration noise below the previous step.
    void keepMonotone(ValueVector const& previous) {
        for (std::size_t s = 0; s < previous.size(); ++s) values_[s] = std::max(values_[s], previous[s]);
    }

    ValueVector values_;
};

class ModviStepper : public BoundStepper {
   public:
    ModviStepper(TransformedMdp const& down, ValueVector initial, Optimization opt, SolverOptions const& options)
        : down_(down), opt_(opt), options_(options) {
        values_ = std::move(initial);
    }

    double value() const override { return values_[down_.model.initialState()]; }

    double advance() override {
        for (std::size_t s = 0; s < down_.numRegular; ++s) values_[down_.copyOf(static_cast<StateIndex>(s))] = values_[s];
        ValueVector const previous(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(down_.numRegular));
        double const error =
            unboundedValueIteration(values_, down_.model, opt_, options_.epsilon, options_.maxSweeps).cumulativeMaxError;
        keepMonotone(previous);
        return error;
    }

   private:
    TransformedMdp const& down_;
    Optimization opt_;
    SolverOptions const& options_;
};

class MergedStepper : public BoundStepper {
   public:
    MergedStepper(MergedModel const& merged, ValueVector const& initial, Optimization opt)
        : merged_(merged), opt_(opt) {
        values_.assign(merged.model.numStates(), 0.0);
        for (std::size_t m = 0; m < merged.origin.size(); ++m) values_[m] = initial[merged.origin[m]];
    }

    double value() const override { return values_[merged_.model.initialState()]; }

    double advance() override {
        ValueVector const previous = values_;
        double const error = stepBoundedValueIteration(values_, merged_.model, 1, opt_).errors.front();
        keepMonotone(previous);
        return error;
    }

   private:
    MergedModel const& merged_;
    Optimization opt_;
};

CdfResult drive(BoundStepper& stepper, Prepared const& p, Mdp const& input, Bound const& bound, Optimization opt,
                SolverOptions const& options, ModelSize reduced) {
    CdfResult result;
    result.opt = opt;
    result.epsilon = options.epsilon;
    result.rewardScale = p.normalized.scale;
    result.boundTruncated = p.normalized.boundTruncated;
    result.inputSize = sizeOf(input);
    result.reducedSize = reduced;
    result.values.push_back(stepper.value());
    if (!bound.isAutomatic()) {
        for (std::uint64_t i = 1; i <= p.normalized.bound; ++i) {
            result.stepErrors.push_back(stepper.advance());
            result.values.push_back(stepper.value());
        }
        return result;
    }
    for (std::uint64_t i = 1; i <= options.maxBoundSteps; ++i) {
        double const error = stepper.advance();
        if (error < options.epsilon) {
            result.converged = i - 1;
            return result;
        }
        result.stepErrors.push_back(error);
        result.values.push_back(stepper.value());
    }
    return result;
}

}  // namespace

CdfResult modvi(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Bound bound,
                Optimization opt, SolverOptions const& options) {
    Prepared p = prepare(model, goal, boundReward, bound, opt, options);
    ModviStepper stepper(p.down, p.initial, opt, options);
    return drive(stepper, p, model, bound, opt, options, sizeOf(p.down.model));
}

CdfResult senum(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Bound bound,
                Optimization opt, ProbabilityMode mode, SolverOptions const& options) {
    Prepared p = prepare(model, goal, boundReward, bound, opt, options);
    MergedModel merged = mergeBySchedulerEnumeration(p.down, relevantStates(p.down), mode, options.epsilon,
                                                     options.maxSchedulersPerState);
    MergedStepper stepper(merged, p.initial, opt);
    return drive(stepper, p, model, bound, opt, options, sizeOf(merged.model));
}

CdfResult elim(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Bound bound,
               Optimization opt, SolverOptions const& options) {
    Prepared p = prepare(model, goal, boundReward, bound, opt, options);
    StateSet const relevant = relevantStates(p.down);
    EliminationWorkspace workspace = eliminateAll(p.down, relevant, options.elimination);
    MergedModel merged = mergeEliminated(p.down, relevant, workspace);
    MergedStepper stepper(merged, p.initial, opt);
    return drive(stepper, p, model, bound, opt, options, sizeOf(merged.model));
}

namespace {

CdfResult unfoldCdf(Mdp const& model, StateSet const& goal, RewardStructure const& boundReward, Bound const& bound,
                    Optimization opt, SolverOptions const& options) {
    if (bound.isAutomatic()) throw UnsupportedError("the unfold algorithm needs an explicit bound");
    if (bound.limit->isNegative()) throw ModelError("reward bound must be nonnegative");
    for (StateIndex g : goal) {
        if (g >= model.numStates()) throw ModelError("goal state index out of range");
    }
    std::int64_t scale = 1;
    for (auto const& [key, value] : boundReward.entries()) {
        if (value.isNegative()) throw ModelError("negative reward");
        scale = checkedLcm(scale, value.denominator());
    }
    Rational const scaledBound = *bound.limit * Rational(scale);
    std::int64_t const steps = scaledBound.floor();
    std::vector<Rational> bounds;
    for (std::int64_t k = 0; k <= steps; ++k) bounds.emplace_back(k, scale);

    CdfResult result;
    result.opt = opt;
    result.epsilon = kOracleEpsilon;
    result.rewardScale = scale;
    result.boundTruncated = !scaledBound.isInteger();
    result.inputSize = sizeOf(model);
    result.values = oracleBoundedProb(model, goal, boundReward, bounds, opt, &result.reducedSize);
    (void)options;
    return result;
}

}  // namespace

CdfResult computeCdf(Algorithm algorithm, Mdp const& model, StateSet const& goal, RewardStructure const& boundReward,
                     Bound bound, Optimization opt, SolverOptions const& options) {
    switch (algorithm) {
        case Algorithm::ModifiedValueIteration:
            return modvi(model, goal, boundReward, bound, opt, options);
        case Algorithm::SchedulerEnumerationVi:
            return senum(model, goal, boundReward, bound, opt, ProbabilityMode::ValueIteration, options);
        case Algorithm::SchedulerEnumerationElim:
            return senum(model, goal, boundReward, bound, opt, ProbabilityMode::DtmcElimination, options);
        case Algorithm::StateElimination:
            return elim(model, goal, boundReward, bound, opt, options);
        case Algorithm::Unfolding:
            return unfoldCdf(model, goal, boundReward, bound, opt, options);
    }
    throw UnsupportedError("unknown algorithm");
}

CdfResult runToConvergence(Algorithm algorithm, Mdp const& model, StateSet const& goal,
                           RewardStructure const& boundReward, Optimization opt, SolverOptions const& options) {
    return computeCdf(algorithm, model, goal, boundReward, Bound::automatic(), opt, options);
}

}  // namespace rbmc
