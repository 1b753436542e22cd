#include "robplan/scenario.hpp"

#include "robplan/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace robplan {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ValidationError(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(join(path, key), "missing required field");
    return *it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ValidationError(path, "expected a number");
    return v.get<double>();
}

double number(const json& obj, const std::string& key, const std::string& path) {
    return as_number(require(obj, key, path), join(path, key));
}

std::size_t positive_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() <= 0)
        throw ValidationError(path, "expected a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path) {
    const auto& arr = require(obj, key, path);
    const auto field = join(path, key);
    if (!arr.is_array()) throw ValidationError(field, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_number(arr[i], at_index(field, i)));
    return out;
}

std::string type_tag(const json& obj, const std::string& path) {
    const auto& t = require(obj, "type", path);
    if (!t.is_string()) throw ValidationError(join(path, "type"), "expected a string");
    return t.get<std::string>();
}

// Re-raises a module validation error with the config path prepended.
template <class F>
auto with_prefix(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        if (e.field().empty()) throw ValidationError(path, e.what());
        const std::string what = e.what();
        const auto colon = what.find(": ");
        throw ValidationError(join(path, e.field()),
                              colon == std::string::npos ? what : what.substr(colon + 2));
    }
}

Domain parse_domain(const json& obj, const std::string& path) {
    return {number(obj, "lower", path), number(obj, "upper", path)};
}

Utility parse_utility(const json& obj, DecisionBounds bounds, const std::string& path) {
    const auto type = type_tag(obj, path);
    if (type == "market_bidding") {
        const double p = number(obj, "p", path);
        const double q = number(obj, "q", path);
        if (!(p > 0.0)) throw ValidationError(join(path, "p"), "must be > 0");
        if (!(q > p)) throw ValidationError(join(path, "q"), "must exceed p");
        return with_prefix(path, [&] { return market_bidding(p, q, bounds.lower, bounds.upper); });
    }
    if (type == "piecewise_affine_min") {
        const auto& arr = require(obj, "pieces", path);
        const auto field = join(path, "pieces");
        if (!arr.is_array()) throw ValidationError(field, "expected an array of [a, c, d]");
        std::vector<AffinePiece> pieces;
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const auto item = at_index(field, k);
            if (!arr[k].is_array() || arr[k].size() != 3) throw ValidationError(item, "expected [a, c, d]");
            pieces.push_back({as_number(arr[k][0], item), as_number(arr[k][1], item), as_number(arr[k][2], item)});
        }
        return with_prefix(path, [&] { return Utility(std::move(pieces), bounds); });
    }
    throw ValidationError(join(path, "type"), "unknown utility type '" + type + "'");
}

ConstraintFunction parse_function(const json& obj, const std::string& path) {
    const auto type = type_tag(obj, path);
    const auto closed = [&] {
        const auto it = obj.find("closed_right");
        if (it == obj.end()) return false;
        if (!it->is_boolean()) throw ValidationError(join(path, "closed_right"), "expected a boolean");
        return it->get<bool>();
    };
    const auto exponent = [&] {
        const auto& k = require(obj, "k", path);
        return static_cast<int>(positive_count(k, join(path, "k")));
    };
    if (type == "indicator") return Indicator{number(obj, "lo", path), number(obj, "hi", path), closed()};
    if (type == "neg_indicator") return NegIndicator{number(obj, "lo", path), number(obj, "hi", path), closed()};
    if (type == "affine") return Affine{number(obj, "c0", path), number(obj, "c1", path)};
    if (type == "power") return Power{exponent()};
    if (type == "neg_power") return NegPower{exponent()};
    throw ValidationError(join(path, "type"), "unknown constraint function type '" + type + "'");
}

void parse_forecasts(const json& obj, const std::optional<Domain>& domain, Scenario& out,
                     const std::string& path) {
    const auto type = type_tag(obj, path);
    if (type == "prediction_intervals") {
        PredictionIntervals pi{numbers(obj, "breakpoints", path), numbers(obj, "lower_probs", path),
                               numbers(obj, "upper_probs", path)};
        with_prefix(path, [&] { pi.validate(); return 0; });
        if (domain && (domain->lower != pi.breakpoints.front() || domain->upper != pi.breakpoints.back()))
            throw ValidationError(join(path, "breakpoints"), "first and last breakpoints must match the domain");
        out.forecasts = with_prefix(path, [&] { return to_generic(pi); });
        out.intervals = std::move(pi);
        return;
    }
    if (type == "generic") {
        if (!domain) throw ValidationError("domain", "required for generic forecasts");
        const auto& arr = require(obj, "constraints", path);
        const auto field = join(path, "constraints");
        if (!arr.is_array()) throw ValidationError(field, "expected an array");
        std::vector<ForecastConstraint> constraints;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto item = at_index(field, i);
            constraints.push_back({parse_function(require(arr[i], "g", item), join(item, "g")),
                                   number(arr[i], "epsilon", item), std::nullopt});
        }
        out.forecasts = with_prefix(path, [&] { return ForecastSet(*domain, std::move(constraints)); });
        return;
    }
    throw ValidationError(join(path, "type"), "unknown forecasts type '" + type + "'");
}

DiscreteDistribution parse_truth(const json& obj, const Domain& domain, const std::string& path) {
    const auto& arr = require(obj, "atoms", path);
    const auto field = join(path, "atoms");
    if (!arr.is_array()) throw ValidationError(field, "expected an array of [location, probability]");
    std::vector<Atom> atoms;
    for (std::size_t j = 0; j < arr.size(); ++j) {
        const auto item = at_index(field, j);
        if (!arr[j].is_array() || arr[j].size() != 2) throw ValidationError(item, "expected [location, probability]");
        atoms.push_back({as_number(arr[j][0], item), as_number(arr[j][1], item)});
    }
    return with_prefix(path, [&] {
        DiscreteDistribution d(std::move(atoms));
        d.validate_in(domain);
        return d;
    });
}

void parse_solver(const json& obj, Scenario& out, const std::string& path) {
    if (!obj.is_object()) throw ValidationError(path, "expected an object");
    if (const auto it = obj.find("exchange"); it != obj.end()) {
        const auto p = join(path, "exchange");
        auto& cfg = out.exchange;
        if (it->contains("initial_grid_points"))
            cfg.initial_grid_points = positive_count((*it)["initial_grid_points"], join(p, "initial_grid_points"));
        if (it->contains("violation_tolerance")) cfg.violation_tolerance = number(*it, "violation_tolerance", p);
        if (it->contains("max_rounds")) cfg.max_rounds = positive_count((*it)["max_rounds"], join(p, "max_rounds"));
        if (it->contains("search_grid_points"))
            cfg.search_grid_points = positive_count((*it)["search_grid_points"], join(p, "search_grid_points"));
        with_prefix(p, [&] { cfg.validate(); return 0; });
    }
    if (const auto it = obj.find("grid"); it != obj.end()) {
        const auto p = join(path, "grid");
        if (it->contains("base_points")) out.grid.base_points = positive_count((*it)["base_points"], join(p, "base_points"));
        if (it->contains("epsilon_shift")) out.grid.epsilon_shift = number(*it, "epsilon_shift", p);
    }
    if (const auto it = obj.find("refine"); it != obj.end()) {
        const auto p = join(path, "refine");
        if (it->contains("max_iterations"))
            out.refine.max_iterations = positive_count((*it)["max_iterations"], join(p, "max_iterations"));
        if (it->contains("improvement_tolerance")) {
            out.refine.improvement_tolerance = number(*it, "improvement_tolerance", p);
            if (!(out.refine.improvement_tolerance >= 0.0))
                throw ValidationError(join(p, "improvement_tolerance"), "must be >= 0");
        }
    }
}

} // namespace

Scenario parse_scenario(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError("", std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("", "scenario must be a JSON object");

    Scenario out;
    std::optional<Domain> domain;
    if (root.contains("domain")) {
        domain = parse_domain(root["domain"], "domain");
        with_prefix("", [&] { domain->validate(); return 0; });
    }
    DecisionBounds bounds{0.0, 1.0};
    if (root.contains("decision")) bounds = {number(root["decision"], "lower", "decision"),
                                              number(root["decision"], "upper", "decision")};
    out.utility = parse_utility(require(root, "utility", ""), bounds, "utility");
    parse_forecasts(require(root, "forecasts", ""), domain, out, "forecasts");
    out.exchange.validate();

    if (root.contains("truth")) {
        out.truth = parse_truth(root["truth"], out.forecasts.domain(), "truth");
        out.truth_consistent = out.truth->max_constraint_violation(out.forecasts) <= 1e-9;
    }
    if (root.contains("oracle")) {
        const auto& o = root["oracle"];
        const auto type = type_tag(o, "oracle");
        if (type != "clamped_step") throw ValidationError("oracle.type", "unknown oracle type '" + type + "'");
        OracleSpec spec{number(o, "step", "oracle"), o.contains("margin") ? number(o, "margin", "oracle") : 0.0};
        if (!(spec.step > 0.0)) throw ValidationError("oracle.step", "must be > 0");
        if (!(spec.margin >= 0.0)) throw ValidationError("oracle.margin", "must be >= 0");
        out.oracle = spec;
    }
    if (root.contains("solver")) parse_solver(root["solver"], out, "solver");
    with_prefix("solver.grid", [&] { out.grid.validate(out.forecasts); return 0; });
    out.refine.exchange = out.exchange;
    return out;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("config", "cannot read '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

} // namespace robplan
