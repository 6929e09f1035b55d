#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbmc/mdp.h"

namespace rbmc {

enum class Optimization { Maximize, Minimize };

/// One probability per state of the model it is used with.
using ValueVector = std::vector<double>;

inline constexpr double kDefaultEpsilon = 1e-6;
inline constexpr std::uint64_t kDefaultMaxSweeps = 10'000'000;

struct SweepStats {
    std::uint64_t iterations = 0;
    /// Maximum relative change of the final sweep.
    double lastError = 0.0;
    /// Maximum relative change over every sweep of the call.
    double cumulativeMaxError = 0.0;
};

/// Gauss-Seidel value iteration for unbounded reachability.
///
/// Sweeps the states in ascending index order, updating in place, until the maximum
/// relative change |new - old| / new of a sweep drops below epsilon. States whose new
/// value is zero do not contribute to the error, so an all-zero vector stops after a
/// single sweep. Throws ConvergenceError after maxSweeps sweeps and NumericalError if a
/// value leaves [0,1].
SweepStats unboundedValueIteration(ValueVector& values, Mdp const& model, Optimization opt,
                                   double epsilon = kDefaultEpsilon, std::uint64_t maxSweeps = kDefaultMaxSweeps);

struct StepTrace {
    /// values[i][k]: value of watched state k after step i + 1.
    std::vector<std::vector<double>> values;
    /// Maximum relative change of step i + 1 (same measure as unboundedValueIteration).
    std::vector<double> errors;
};

/// Exactly `steps` synchronous (Jacobi) sweeps, each reading the previous sweep's values.
StepTrace stepBoundedValueIteration(ValueVector& values, Mdp const& model, std::uint64_t steps, Optimization opt,
                                    std::span<StateIndex const> watched = {});

}  // namespace rbmc
