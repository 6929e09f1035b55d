#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rbmc/bounded.h"
#include "rbmc/mdp.h"

namespace rbmc {

/// A parsed model document: the MDP with its labels and every named reward structure.
struct ModelBundle {
    std::string name;
    Mdp mdp;
    std::vector<RewardStructure> rewards;

    /// Nullptr if no structure has that name.
    RewardStructure const* findReward(std::string_view rewardName) const;
};

/// Parses and validates a JSON model document. Throws ModelError on syntax errors
/// (with line and column), unknown state or reward references and invariant violations.
ModelBundle parseModel(std::string_view document);
ModelBundle loadModelFile(std::string const& path);

/// Inverse of parseModel. Rewards are written as integers or "p/q" strings.
std::string serializeModel(ModelBundle const& bundle);

/// Header "bound,value", one LF-terminated row per bound index, values with 12 significant digits.
void writeCdfCsv(std::ostream& out, CdfResult const& result);

struct Query {
    Optimization opt = Optimization::Maximize;
    std::string goalLabel;
    std::string rewardName;
    Bound bound;
    Algorithm algorithm = Algorithm::ModifiedValueIteration;
    double epsilon = kDefaultEpsilon;
};

/// Resolves the label and reward names against the bundle and dispatches to computeCdf.
CdfResult runQuery(ModelBundle const& bundle, Query const& query, SolverOptions options = {});

}  // namespace rbmc
