#include "rbmc/random_model.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "rbmc/errors.h"

namespace rbmc {

namespace {

// Plain modulo reduction keeps the output identical across standard libraries.
class Draw {
   public:
    explicit Draw(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t below(std::uint64_t n) { return engine_() % n; }
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
    bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

   private:
    std::mt19937_64 engine_;
};

}  // namespace

ModelBundle generateRandomModel(RandomModelOptions const& options) {
    if (options.states < 2) throw ModelError("random models need at least 2 states");
    if (options.maxActions < 1) throw ModelError("random models need at least 1 action per state");
    Draw draw(options.seed);
    std::size_t const n = options.states;

    ModelBundle bundle;
    bundle.name = "random-" + std::to_string(options.seed);
    RewardStructure reward("r");
    MdpBuilder builder;
    for (std::size_t s = 0; s < n; ++s) builder.addState("s" + std::to_string(s));
    builder.setInitial(0);

    for (std::size_t s = 0; s < n; ++s) {
        auto const source = static_cast<StateIndex>(s);
        std::size_t const actions = draw.between(1, options.maxActions);
        for (std::size_t a = 0; a < actions; ++a) {
            std::string action = "a" + std::to_string(a);
            std::size_t const width = std::min<std::size_t>(draw.between(1, 3), n);
            std::vector<StateIndex> targets;
            while (targets.size() < width) {
                auto const t = static_cast<StateIndex>(draw.below(n));
                if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
            }
            std::vector<std::uint64_t> weights;
            for (std::size_t k = 0; k < width; ++k) weights.push_back(draw.between(1, 9));
            std::uint64_t const total = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
            Distribution distribution;
            for (std::size_t k = 0; k < width; ++k) {
                distribution.push_back(
                    Branch{targets[k], static_cast<double>(weights[k]) / static_cast<double>(total)});
                if (draw.chance(options.rewardDensity)) reward.set(BranchKey{source, action, targets[k]}, Rational(1));
            }
            builder.addTransition(source, std::move(action), std::move(distribution));
        }
    }

    std::vector<StateIndex> goal;
    for (std::size_t s = 0; s < n; ++s) {
        if (draw.chance(0.3)) goal.push_back(static_cast<StateIndex>(s));
    }
    if (goal.empty()) goal.push_back(static_cast<StateIndex>(draw.below(n)));
    for (StateIndex g : goal) builder.addLabel("goal", g);

    bundle.mdp = std::move(builder).build();
    bundle.rewards.push_back(std::move(reward));
    return bundle;
}

}  // namespace rbmc
