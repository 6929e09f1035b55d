#include "rbmc/value_iteration.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "rbmc/errors.h"

namespace rbmc {

namespace {

constexpr double kRangeSlack = 1e-12;

template <typename Lookup>
double bestValue(std::span<Transition const> transitions, Optimization opt, Lookup const& value) {
    double best = opt == Optimization::Maximize ? -1.0 : 2.0;
    for (auto const& transition : transitions) {
        double sum = 0.0;
        for (auto const& branch : transition.distribution) {
            sum += branch.probability * value(branch.target);
        }
        best = opt == Optimization::Maximize ? std::max(best, sum) : std::min(best, sum);
    }
    return best;
}

void checkValue(double value, StateIndex s) {
    if (!std::isfinite(value) || value < -kRangeSlack || value > 1.0 + kRangeSlack) {
        throw NumericalError("value " + std::to_string(value) + " outside [0,1] at state " + std::to_string(s));
    }
}

double relativeChange(double updated, double previous) {
    return updated > 0.0 ? std::abs(updated - previous) / updated : 0.0;
}

}  // namespace

SweepStats unboundedValueIteration(ValueVector& values, Mdp const& model, Optimization opt, double epsilon,
                                   std::uint64_t maxSweeps) {
    assert(values.size() == model.numStates());
    SweepStats stats;
    std::size_t const n = model.numStates();
    auto lookup = [&](StateIndex s) { return values[s]; };
    while (true) {
        if (stats.iterations == maxSweeps) {
            throw ConvergenceError("unbounded value iteration did not converge within " + std::to_string(maxSweeps) +
                                   " sweeps (last error " + std::to_string(stats.lastError) + ")");
        }
        double error = 0.0;
        for (StateIndex s = 0; s < n; ++s) {
            double updated = bestValue(model.transitions(s), opt, lookup);
            checkValue(updated, s);
            error = std::max(error, relativeChange(updated, values[s]));
            values[s] = updated;
        }
        ++stats.iterations;
        stats.lastError = error;
        stats.cumulativeMaxError = std::max(stats.cumulativeMaxError, error);
        if (error < epsilon) break;
    }
    return stats;
}

StepTrace stepBoundedValueIteration(ValueVector& values, Mdp const& model, std::uint64_t steps, Optimization opt,
                                    std::span<StateIndex const> watched) {
    assert(values.size() == model.numStates());
    StepTrace trace;
    trace.values.reserve(steps);
    trace.errors.reserve(steps);
    std::size_t const n = model.numStates();
    ValueVector previous(n);
    auto lookup = [&](StateIndex s) { return previous[s]; };
    for (std::uint64_t i = 0; i < steps; ++i) {
        previous = values;
        double error = 0.0;
        for (StateIndex s = 0; s < n; ++s) {
            double updated = bestValue(model.transitions(s), opt, lookup);
            checkValue(updated, s);
            error = std::max(error, relativeChange(updated, previous[s]));
            values[s] = updated;
        }
        std::vector<double> snapshot;
        snapshot.reserve(watched.size());
        for (StateIndex s : watched) snapshot.push_back(values[s]);
        trace.values.push_back(std::move(snapshot));
        trace.errors.push_back(error);
    }
    return trace;
}

}  // namespace rbmc
