#pragma once

#include <cstdint>

#include "rbmc/model_io.h"

namespace rbmc {

struct RandomModelOptions {
    std::uint64_t seed = 1;
    std::size_t states = 5;
    std::size_t maxActions = 2;
    double rewardDensity = 0.5;
};

/// Deterministic in the options on every platform. Each state gets 1..maxActions actions
/// "a0", "a1", ... with 1..3 distinct targets and weights 1..9; each branch carries reward 1
/// in structure "r" with probability rewardDensity. Label "goal" is a random nonempty state set.
/// Throws ModelError if states < 2 or maxActions < 1.
ModelBundle generateRandomModel(RandomModelOptions const& options);

}  // namespace rbmc
