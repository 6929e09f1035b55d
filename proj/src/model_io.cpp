#include "rbmc/model_io.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rbmc/errors.h"

namespace rbmc {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string lineAndColumn(std::string_view document, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < document.size(); ++i) {
        if (document[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

Json const& require(Json const& object, char const* key, char const* context) {
    auto it = object.find(key);
    if (it == object.end()) throw ModelError(std::string(context) + ": missing key '" + key + "'");
    return *it;
}

std::string requireString(Json const& value, std::string const& what) {
    if (!value.is_string()) throw ModelError(what + " must be a string");
    return value.get<std::string>();
}

Rational parseRational(Json const& value, std::string const& what) {
    try {
        if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
        if (value.is_number_float()) return Rational::fromDouble(value.get<double>());
        if (value.is_string()) return Rational::parse(value.get<std::string>());
    } catch (ModelError const& e) {
        throw ModelError(what + ": " + e.what());
    }
    throw ModelError(what + " must be a number or a \"p/q\" string");
}

double parseProbability(Json const& value, std::string const& what) {
    if (value.is_number()) return value.get<double>();
    return parseRational(value, what).toDouble();
}

}  // namespace

RewardStructure const* ModelBundle::findReward(std::string_view rewardName) const {
    for (RewardStructure const& r : rewards) {
        if (r.name() == rewardName) return &r;
    }
    return nullptr;
}

ModelBundle parseModel(std::string_view document) {
    Json root;
    try {
        root = Json::parse(document.begin(), document.end());
    } catch (Json::parse_error const& e) {
        std::size_t const byte = e.byte > 0 ? e.byte - 1 : 0;
        throw ModelError("syntax error at " + lineAndColumn(document, byte));
    }
    if (!root.is_object()) throw ModelError("model document must be a JSON object");

    ModelBundle bundle;
    if (auto it = root.find("name"); it != root.end()) bundle.name = requireString(*it, "name");

    Json const& states = require(root, "states", "model");
    if (!states.is_array()) throw ModelError("'states' must be an array");
    MdpBuilder builder;
    std::map<std::string, StateIndex> index;
    for (Json const& s : states) {
        std::string name = requireString(s, "state name");
        StateIndex const id = builder.addState(name);
        index.emplace(std::move(name), id);
    }
    auto lookup = [&](Json const& value, std::string const& where) {
        std::string name = requireString(value, where);
        auto it = index.find(name);
        if (it == index.end()) throw ModelError(where + ": undeclared state '" + name + "'");
        return it->second;
    };

    builder.setInitial(lookup(require(root, "initial", "model"), "initial"));

    if (auto it = root.find("labels"); it != root.end()) {
        if (!it->is_object()) throw ModelError("'labels' must be an object");
        for (auto const& [label, members] : it->items()) {
            if (!members.is_array()) throw ModelError("label '" + label + "' must be an array of state names");
            for (Json const& m : members) builder.addLabel(label, lookup(m, "label '" + label + "'"));
        }
    }

    std::map<std::string, std::size_t> rewardIndex;
    if (auto it = root.find("rewards"); it != root.end()) {
        if (!it->is_array()) throw ModelError("'rewards' must be an array");
        for (Json const& r : *it) {
            std::string name = requireString(r, "reward structure name");
            if (rewardIndex.count(name)) throw ModelError("duplicate reward structure '" + name + "'");
            rewardIndex.emplace(name, bundle.rewards.size());
            bundle.rewards.emplace_back(std::move(name));
        }
    }

    if (auto it = root.find("transitions"); it != root.end()) {
        if (!it->is_array()) throw ModelError("'transitions' must be an array");
        for (Json const& t : *it) {
            if (!t.is_object()) throw ModelError("transition records must be objects");
            StateIndex const from = lookup(require(t, "from", "transition"), "transition source");
            std::string action = requireString(require(t, "action", "transition"), "action");
            std::string const where = "transition (" + builder.stateName(from) + ", " + action + ")";
            Json const& branches = require(t, "branches", where.c_str());
            if (!branches.is_array()) throw ModelError(where + ": 'branches' must be an array");
            Distribution distribution;
            for (Json const& b : branches) {
                if (!b.is_object()) throw ModelError(where + ": branches must be objects");
                StateIndex const to = lookup(require(b, "to", where.c_str()), where + " branch target");
                double const p = parseProbability(require(b, "prob", where.c_str()), where + " probability");
                distribution.push_back(Branch{to, p});
                if (auto r = b.find("rewards"); r != b.end()) {
                    if (!r->is_object()) throw ModelError(where + ": 'rewards' must be an object");
                    for (auto const& [rewardName, value] : r->items()) {
                        auto ri = rewardIndex.find(rewardName);
                        if (ri == rewardIndex.end()) {
                            throw ModelError(where + ": unknown reward structure '" + rewardName + "'");
                        }
                        bundle.rewards[ri->second].set(BranchKey{from, action, to},
                                                       parseRational(value, where + " reward"));
                    }
                }
            }
            builder.addTransition(from, std::move(action), std::move(distribution));
        }
    }

    bundle.mdp = std::move(builder).build();
    ValidationReport report = validate(bundle.mdp, bundle.rewards);
    if (!report.ok()) throw ModelError("invalid model: " + report.summary());
    return bundle;
}

ModelBundle loadModelFile(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parseModel(buffer.str());
}

std::string serializeModel(ModelBundle const& bundle) {
    Mdp const& m = bundle.mdp;
    OrderedJson root;
    root["name"] = bundle.name;
    root["states"] = m.stateNames();
    root["initial"] = m.stateName(m.initialState());
    OrderedJson labels = OrderedJson::object();
    for (auto const& [label, members] : m.labels()) {
        OrderedJson names = OrderedJson::array();
        for (StateIndex s : members) names.push_back(m.stateName(s));
        labels[label] = std::move(names);
    }
    root["labels"] = std::move(labels);
    OrderedJson rewardNames = OrderedJson::array();
    for (RewardStructure const& r : bundle.rewards) rewardNames.push_back(r.name());
    root["rewards"] = std::move(rewardNames);

    OrderedJson transitions = OrderedJson::array();
    for (StateIndex s = 0; s < m.numStates(); ++s) {
        for (Transition const& t : m.transitions(s)) {
            OrderedJson record;
            record["from"] = m.stateName(s);
            record["action"] = t.action;
            OrderedJson branches = OrderedJson::array();
            for (Branch const& b : t.distribution) {
                OrderedJson branch;
                branch["to"] = m.stateName(b.target);
                branch["prob"] = b.probability;
                OrderedJson rewards = OrderedJson::object();
                for (RewardStructure const& r : bundle.rewards) {
                    Rational const value = r.get(s, t.action, b.target);
                    if (value.isZero()) continue;
                    if (value.isInteger()) {
                        rewards[r.name()] = value.numerator();
                    } else {
                        rewards[r.name()] = value.toString();
                    }
                }
                if (!rewards.empty()) branch["rewards"] = std::move(rewards);
                branches.push_back(std::move(branch));
            }
            record["branches"] = std::move(branches);
            transitions.push_back(std::move(record));
        }
    }
    root["transitions"] = std::move(transitions);
    return root.dump(2) + "\n";
}

void writeCdfCsv(std::ostream& out, CdfResult const& result) {
    out << "bound,value\n";
    char buffer[64];
    for (std::size_t i = 0; i < result.values.size(); ++i) {
        if (result.rewardScale == 1) {
            out << i;
        } else {
            std::snprintf(buffer, sizeof buffer, "%.12g",
                          static_cast<double>(i) / static_cast<double>(result.rewardScale));
            out << buffer;
        }
        std::snprintf(buffer, sizeof buffer, "%.12g", result.values[i]);
        out << ',' << buffer << '\n';
    }
}

CdfResult runQuery(ModelBundle const& bundle, Query const& query, SolverOptions options) {
    StateSet const* goal = bundle.mdp.label(query.goalLabel);
    if (!goal) throw ModelError("unknown label '" + query.goalLabel + "'");
    RewardStructure const* reward = bundle.findReward(query.rewardName);
    if (!reward) throw ModelError("unknown reward structure '" + query.rewardName + "'");
    if (!(query.epsilon > 0.0)) throw ModelError("epsilon must be positive");
    options.epsilon = query.epsilon;
    return computeCdf(query.algorithm, bundle.mdp, *goal, *reward, query.bound, query.opt, options);
}

}  // namespace rbmc
