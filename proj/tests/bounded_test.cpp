#include <gtest/gtest.h>

#include "models.h"
#include "oracles.h"
#include "rbmc/bounded.h"
#include "rbmc/errors.h"
#include "rbmc/random_model.h"
#include "rbmc/unfold.h"

namespace rbmc {

void PrintTo(Algorithm algorithm, std::ostream* out) { *out << toString(algorithm); }

}  // namespace rbmc

namespace {

using namespace rbmc;

SolverOptions preciseOptions() {
    SolverOptions options;
    options.epsilon = 1e-10;
    return options;
}

constexpr Algorithm kReduced[] = {Algorithm::ModifiedValueIteration, Algorithm::SchedulerEnumerationVi,
                                  Algorithm::SchedulerEnumerationElim, Algorithm::StateElimination};

class BoundedAlgorithmTest : public ::testing::TestWithParam<Algorithm> {};

TEST_P(BoundedAlgorithmTest, ExampleMaxCdf) {
    auto bundle = fixtures::exampleModel();
    auto result = computeCdf(GetParam(), bundle.mdp, {3}, bundle.rewards[0], Bound::upTo(Rational(2)),
                             Optimization::Maximize);
    ASSERT_EQ(result.values.size(), 3u);
    EXPECT_NEAR(result.values[0], 0.25, 1e-6);
    EXPECT_NEAR(result.values[1], 0.40, 1e-6);
    EXPECT_NEAR(result.values[2], 0.52, 1e-6);
    EXPECT_EQ(result.rewardScale, 1);
    EXPECT_FALSE(result.converged.has_value());
}

TEST_P(BoundedAlgorithmTest, ExampleMinCdfIsZero) {
    auto bundle = fixtures::exampleModel();
    auto result = computeCdf(GetParam(), bundle.mdp, {3}, bundle.rewards[0], Bound::upTo(Rational(6)),
                             Optimization::Minimize);
    for (double v : result.values) EXPECT_EQ(v, 0.0);
}

TEST_P(BoundedAlgorithmTest, EmptyGoalGivesZero) {
    auto bundle = fixtures::exampleModel();
    auto result = computeCdf(GetParam(), bundle.mdp, {}, bundle.rewards[0], Bound::upTo(Rational(3)),
                             Optimization::Maximize);
    for (double v : result.values) EXPECT_EQ(v, 0.0);
}

TEST_P(BoundedAlgorithmTest, InitialGoalGivesOne) {
    auto bundle = fixtures::exampleModel();
    auto result = computeCdf(GetParam(), bundle.mdp, {0}, bundle.rewards[0], Bound::upTo(Rational(3)),
                             Optimization::Minimize);
    for (double v : result.values) EXPECT_EQ(v, 1.0);
}

TEST_P(BoundedAlgorithmTest, ZeroRewardsGiveConstantCdf) {
    auto bundle = fixtures::exampleModel();
    RewardStructure none("r");
    auto result = computeCdf(GetParam(), bundle.mdp, {3}, none, Bound::upTo(Rational(4)), Optimization::Maximize);
    for (double v : result.values) EXPECT_NEAR(v, 1.0, 1e-5);
}

TEST_P(BoundedAlgorithmTest, RationalRewardsAreScaled) {
    auto bundle = fixtures::exampleModel();
    RewardStructure half("r");
    half.set({0, "b", 0}, Rational(1, 2));
    half.set({1, "d", 1}, Rational(1, 2));
    auto result = computeCdf(GetParam(), bundle.mdp, {3}, half, Bound::upTo(Rational(1)), Optimization::Maximize);
    EXPECT_EQ(result.rewardScale, 2);
    ASSERT_EQ(result.values.size(), 3u);
    EXPECT_NEAR(result.values[2], 0.52, 1e-6);
    auto truncated = computeCdf(GetParam(), bundle.mdp, {3}, half, Bound::upTo(Rational(3, 4)),
                                Optimization::Maximize);
    EXPECT_TRUE(truncated.boundTruncated);
    EXPECT_EQ(truncated.values.size(), 2u);
}

TEST_P(BoundedAlgorithmTest, MultiUnitRewardsMatchTheOracle) {
    auto bundle = fixtures::exampleModel();
    RewardStructure two("r");
    two.set({0, "b", 0}, Rational(2));
    two.set({1, "d", 1}, Rational(3));
    auto result = computeCdf(GetParam(), bundle.mdp, {3}, two, Bound::upTo(Rational(7)), Optimization::Maximize,
                             preciseOptions());
    auto oracle = oracleBoundedProb(bundle.mdp, {3}, two, 7, Optimization::Maximize);
    ASSERT_EQ(result.values.size(), oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_NEAR(result.values[i], oracle[i], 1e-8) << i;
}

TEST_P(BoundedAlgorithmTest, AutomaticBoundConverges) {
    auto bundle = fixtures::exampleModel();
    auto max = runToConvergence(GetParam(), bundle.mdp, {3}, bundle.rewards[0], Optimization::Maximize);
    ASSERT_TRUE(max.converged.has_value());
    EXPECT_EQ(max.values.size(), *max.converged + 1);
    EXPECT_GE(max.values.back(), 1.0 - 1e-5);
    auto min = runToConvergence(GetParam(), bundle.mdp, {3}, bundle.rewards[0], Optimization::Minimize);
    ASSERT_TRUE(min.converged.has_value());
    EXPECT_EQ(*min.converged, 0u);
    EXPECT_EQ(min.values, std::vector<double>{0.0});
}

TEST_P(BoundedAlgorithmTest, BoundStepCapLeavesConvergenceUnset) {
    auto bundle = fixtures::exampleModel();
    SolverOptions options;
    options.maxBoundSteps = 5;
    auto result = runToConvergence(GetParam(), bundle.mdp, {3}, bundle.rewards[0], Optimization::Maximize, options);
    EXPECT_FALSE(result.converged.has_value());
    EXPECT_EQ(result.values.size(), 6u);
}

TEST_P(BoundedAlgorithmTest, InvalidGoalIsRejected) {
    auto bundle = fixtures::exampleModel();
    EXPECT_THROW(computeCdf(GetParam(), bundle.mdp, {17}, bundle.rewards[0], Bound::upTo(Rational(1)),
                            Optimization::Maximize),
                 ModelError);
}

INSTANTIATE_TEST_SUITE_P(AllReductions, BoundedAlgorithmTest, ::testing::ValuesIn(kReduced),
                         [](auto const& info) {
                             std::string name = toString(info.param);
                             std::replace(name.begin(), name.end(), '-', '_');
                             return name;
                         });

TEST(BoundedTest, AlgorithmNamesRoundTrip) {
    for (Algorithm a : kReduced) EXPECT_EQ(parseAlgorithm(toString(a)), a);
    EXPECT_EQ(parseAlgorithm("unfold"), Algorithm::Unfolding);
    EXPECT_FALSE(parseAlgorithm("bogus").has_value());
}

TEST(BoundedTest, UnfoldWithAutomaticBoundIsUnsupported) {
    auto bundle = fixtures::exampleModel();
    EXPECT_THROW(runToConvergence(Algorithm::Unfolding, bundle.mdp, {3}, bundle.rewards[0], Optimization::Maximize),
                 UnsupportedError);
}

TEST(BoundedTest, RelevantStatesOfTheExample) {
    auto bundle = fixtures::exampleModel();
    auto absorbing = makeAbsorbing(bundle.mdp, {3}, bundle.rewards[0]);
    auto down = redirectDown(absorbing.model, absorbing.rewards);
    EXPECT_EQ(relevantStates(down), (StateSet{0, 1, 3}));
}

TEST(BoundedTest, ComputeProbsModesAgree) {
    MdpBuilder b;
    StateIndex const x = b.addState("x");
    StateIndex const y = b.addState("y");
    StateIndex const c1 = b.addState("c1");
    StateIndex const c2 = b.addState("c2");
    b.addTransition(x, "a", {{y, 0.5}, {x, 0.25}, {c1, 0.25}});
    b.addTransition(y, "a", {{x, 0.5}, {c2, 0.25}, {y, 0.25}});
    b.addTransition(c1, "tau", dirac(c1));
    b.addTransition(c2, "tau", dirac(c2));
    Mdp chain = std::move(b).build();
    auto vi = computeProbs(chain, 2, x, ProbabilityMode::ValueIteration, 1e-12);
    auto elim = computeProbs(chain, 2, x, ProbabilityMode::DtmcElimination);
    ASSERT_EQ(vi.copies.size(), 2u);
    ASSERT_EQ(elim.copies.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(vi.copies[i].target, elim.copies[i].target);
        EXPECT_NEAR(vi.copies[i].probability, elim.copies[i].probability, 1e-10);
    }
    EXPECT_NEAR(elim.copies[0].probability + elim.copies[1].probability, 1.0, 1e-12);
    EXPECT_NEAR(elim.bottom, 0.0, 1e-12);
}

TEST(BoundedTest, ComputeProbsSendsTrappedMassToBottom) {
    MdpBuilder b;
    StateIndex const x = b.addState("x");
    StateIndex const trap = b.addState("trap");
    StateIndex const c = b.addState("c");
    b.addTransition(x, "a", {{trap, 0.4}, {c, 0.6}});
    b.addTransition(trap, "a", dirac(trap));
    b.addTransition(c, "tau", dirac(c));
    Mdp chain = std::move(b).build();
    for (auto mode : {ProbabilityMode::ValueIteration, ProbabilityMode::DtmcElimination}) {
        auto reach = computeProbs(chain, 2, x, mode);
        ASSERT_EQ(reach.copies.size(), 1u);
        EXPECT_NEAR(reach.copies[0].probability, 0.6, 1e-12);
        EXPECT_NEAR(reach.bottom, 0.4, 1e-12);
    }
}

TEST(BoundedTest, SchedulerEnumerationOnTheExample) {
    auto bundle = fixtures::exampleModel();
    auto absorbing = makeAbsorbing(bundle.mdp, {3}, bundle.rewards[0]);
    auto down = redirectDown(absorbing.model, absorbing.rewards);
    auto relevant = relevantStates(down);
    auto merged = mergeBySchedulerEnumeration(down, relevant, ProbabilityMode::DtmcElimination);
    EXPECT_EQ(merged.model.numStates(), 4u);
    EXPECT_EQ(merged.model.transitions(0).size(), 3u);
    EXPECT_EQ(merged.model.transitions(1).size(), 3u);
    EXPECT_EQ(merged.model.transitions(2).size(), 1u);
    EXPECT_EQ(merged.origin, (std::vector<StateIndex>{0, 1, 3}));
    EXPECT_THROW(mergeBySchedulerEnumeration(down, relevant, ProbabilityMode::ValueIteration, 1e-6, 2),
                 ResourceLimitError);
}

TEST(BoundedTest, DeterministicModelsGiveIdenticalMergedModels) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto bundle = generateRandomModel({seed, 7, 1, 0.5});
        auto absorbing = makeAbsorbing(bundle.mdp, *bundle.mdp.label("goal"), bundle.rewards[0]);
        auto down = redirectDown(absorbing.model, absorbing.rewards);
        auto relevant = relevantStates(down);
        auto enumerated = mergeBySchedulerEnumeration(down, relevant, ProbabilityMode::DtmcElimination);
        auto eliminated = mergeEliminated(down, relevant, eliminateAll(down, relevant));
        ASSERT_EQ(enumerated.model.numStates(), eliminated.model.numStates());
        for (StateIndex s = 0; s < enumerated.model.numStates(); ++s) {
            auto const& a = enumerated.model.transitions(s);
            auto const& b = eliminated.model.transitions(s);
            ASSERT_EQ(a.size(), 1u);
            ASSERT_EQ(b.size(), 1u);
            ASSERT_EQ(a[0].distribution.size(), b[0].distribution.size()) << "seed " << seed;
            for (std::size_t k = 0; k < a[0].distribution.size(); ++k) {
                EXPECT_EQ(a[0].distribution[k].target, b[0].distribution[k].target);
                EXPECT_NEAR(a[0].distribution[k].probability, b[0].distribution[k].probability, 1e-12);
            }
        }
    }
}

TEST(BoundedTest, FullRewardDensityMatchesStepBoundedIteration) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto bundle = generateRandomModel({seed, 6, 2, 1.0});
        StateSet const& goal = *bundle.mdp.label("goal");
        auto absorbing = makeAbsorbing(bundle.mdp, goal, bundle.rewards[0]).model;
        ValueVector v(absorbing.numStates(), 0.0);
        for (StateIndex g : goal) v[g] = 1.0;
        std::vector<double> expected{v[absorbing.initialState()]};
        StateIndex watched[] = {absorbing.initialState()};
        auto trace = stepBoundedValueIteration(v, absorbing, 8, Optimization::Maximize, watched);
        for (auto const& row : trace.values) expected.push_back(row[0]);
        for (Algorithm a : kReduced) {
            auto result = computeCdf(a, bundle.mdp, goal, bundle.rewards[0], Bound::upTo(Rational(8)),
                                     Optimization::Maximize, preciseOptions());
            ASSERT_EQ(result.values.size(), expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i) {
                EXPECT_NEAR(result.values[i], expected[i], 1e-8) << toString(a) << " seed " << seed << " i " << i;
            }
        }
    }
}

TEST(BoundedTest, ZeroRewardDensityGivesUnboundedProbability) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto bundle = generateRandomModel({seed, 6, 2, 0.0});
        StateSet const& goal = *bundle.mdp.label("goal");
        ValueVector v(bundle.mdp.numStates(), 0.0);
        for (StateIndex g : goal) v[g] = 1.0;
        auto absorbing = makeAbsorbing(bundle.mdp, goal, bundle.rewards[0]).model;
        unboundedValueIteration(v, absorbing, Optimization::Maximize, 1e-12);
        for (Algorithm a : kReduced) {
            auto result = computeCdf(a, bundle.mdp, goal, bundle.rewards[0], Bound::upTo(Rational(4)),
                                     Optimization::Maximize, preciseOptions());
            for (double x : result.values) EXPECT_NEAR(x, v[absorbing.initialState()], 1e-8) << toString(a);
        }
    }
}

}  // namespace
