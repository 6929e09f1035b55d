#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rbmc/errors.h"
#include "rbmc/model_io.h"
#include "rbmc/random_model.h"

namespace {

void printSize(char const* what, rbmc::ModelSize const& size) {
    std::cerr << what << ": states=" << size.states << " transitions=" << size.transitions
              << " branches=" << size.branches << '\n';
}

int runQueryCommand(std::string const& modelPath, rbmc::Query const& query, rbmc::SolverOptions const& options,
                    std::string const& outPath, bool stats) {
    rbmc::ModelBundle const bundle = rbmc::loadModelFile(modelPath);
    rbmc::CdfResult const result = rbmc::runQuery(bundle, query, options);
    if (result.boundTruncated) {
        std::cerr << "warning: bound is not a multiple of 1/" << result.rewardScale << "; rounded down\n";
    }
    if (outPath.empty()) {
        rbmc::writeCdfCsv(std::cout, result);
    } else {
        std::ofstream out(outPath, std::ios::binary);
        if (!out) throw rbmc::ModelError("cannot write '" + outPath + "'");
        rbmc::writeCdfCsv(out, result);
    }
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.12g", result.values.back());
    std::cerr << "result: " << buffer << '\n';
    if (query.bound.isAutomatic()) {
        if (!result.converged) throw rbmc::ConvergenceError("bound-step cap reached before convergence");
        std::cerr << "converged at bound " << *result.converged << '\n';
    }
    if (stats) {
        printSize("input", result.inputSize);
        printSize("reduced", result.reducedSize);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reward-bounded reachability checker for explicit-state MDPs"};
    app.require_subcommand(1);

    auto* query = app.add_subcommand("query", "Compute the CDF of a reward-bounded reachability query");
    std::string modelPath;
    std::string goal;
    std::string reward;
    std::string opt = "max";
    std::string bound;
    std::string algorithm = "modvi";
    double epsilon = rbmc::kDefaultEpsilon;
    std::string outPath;
    bool stats = false;
    query->add_option("--model", modelPath, "Model document (JSON)")->required();
    query->add_option("--goal", goal, "Goal label")->required();
    query->add_option("--reward", reward, "Reward structure bounding the paths")->required();
    query->add_option("--opt", opt, "max or min")->check(CLI::IsMember({"max", "min"}));
    query->add_option("--bound", bound, "Reward bound N, or auto")->required();
    query->add_option("--algorithm", algorithm, "modvi, senum-vi, senum-elim, elim or unfold")
        ->check(CLI::IsMember({"modvi", "senum-vi", "senum-elim", "elim", "unfold"}));
    query->add_option("--epsilon", epsilon, "Relative convergence threshold");
    query->add_option("--out", outPath, "CSV output file (default: stdout)");
    query->add_flag("--stats", stats, "Print model sizes before and after reduction");
    rbmc::SolverOptions options;
    query->add_option("--max-schedulers", options.maxSchedulersPerState,
                      "Cap on enumerated schedulers per relevant state (senum)");
    query->add_option("--max-bound-steps", options.maxBoundSteps, "Cap on bound steps with --bound auto");

    auto* generate = app.add_subcommand("generate", "Write a random model document");
    rbmc::RandomModelOptions random;
    std::string generateOut;
    generate->add_option("--seed", random.seed, "Random seed");
    generate->add_option("--states", random.states, "Number of states (>= 2)");
    generate->add_option("--max-actions", random.maxActions, "Maximal number of actions per state");
    generate->add_option("--reward-density", random.rewardDensity, "Probability that a branch has reward 1")
        ->check(CLI::Range(0.0, 1.0));
    generate->add_option("--out", generateOut, "Output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*query) {
            rbmc::Query q;
            q.opt = opt == "min" ? rbmc::Optimization::Minimize : rbmc::Optimization::Maximize;
            q.goalLabel = goal;
            q.rewardName = reward;
            q.bound = bound == "auto" ? rbmc::Bound::automatic() : rbmc::Bound::upTo(rbmc::Rational::parse(bound));
            q.algorithm = *rbmc::parseAlgorithm(algorithm);
            q.epsilon = epsilon;
            return runQueryCommand(modelPath, q, options, outPath, stats);
        }
        std::string const text = rbmc::serializeModel(rbmc::generateRandomModel(random));
        if (generateOut.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(generateOut, std::ios::binary);
            if (!out) throw rbmc::ModelError("cannot write '" + generateOut + "'");
            out << text;
        }
        return 0;
    } catch (rbmc::UnsupportedError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (rbmc::ResourceLimitError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (rbmc::ConvergenceError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (rbmc::Error const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
