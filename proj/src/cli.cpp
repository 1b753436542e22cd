#include "robplan/cli.hpp"

#include "robplan/errors.hpp"
#include "robplan/oracle_check.hpp"
#include "robplan/refine.hpp"
#include "robplan/robust_solver.hpp"
#include "robplan/scenario.hpp"
#include "robplan/sensitivity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace robplan::cli {
namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kCheckGrid = 21;

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json optional_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ordered_json lambda_json(const ForecastSet& fs, const std::vector<double>& lambda) {
    auto arr = ordered_json::array();
    for (std::size_t i = 0; i < fs.size(); ++i) {
        ordered_json e;
        e["index"] = i;
        e["kind"] = std::string(bound_kind_name(fs[i].kind()));
        e["interval"] = fs[i].interval ? ordered_json(*fs[i].interval) : ordered_json(nullptr);
        e["value"] = lambda[i];
        arr.push_back(std::move(e));
    }
    return arr;
}

std::string method_name(SolveMethod m) {
    switch (m) {
    case SolveMethod::IntervalReduction:
        return "interval_reduction";
    case SolveMethod::CellReduction:
        return "cell_reduction";
    case SolveMethod::Exchange:
        return "exchange";
    }
    return "unknown";
}

ordered_json distribution_json(const DiscreteDistribution& d) {
    auto arr = ordered_json::array();
    for (const auto& a : d.atoms()) arr.push_back(ordered_json::array({a.location, a.probability}));
    return arr;
}

std::string cmd_solve(const Scenario& s, bool worst_case) {
    auto sol = solve(s.forecasts, s.utility, s.exchange);
    if (worst_case) sol = with_worst_case(std::move(sol), s.forecasts, s.utility, s.grid);
    ordered_json out;
    out["b_star"] = sol.b_star;
    out["objective"] = sol.objective;
    out["lambda"] = lambda_json(s.forecasts, sol.lambda_star);
    out["eta"] = sol.eta_star;
    out["method"] = method_name(sol.method);
    if (sol.method == SolveMethod::Exchange) {
        out["max_violation"] = sol.max_violation;
        out["rounds"] = sol.rounds;
    }
    if (s.truth) {
        out["true_expected_at_b_star"] = true_expected(*s.truth, s.utility, sol.b_star);
        out["truth_consistent"] = s.truth_consistent;
    }
    if (sol.worst_case_distribution) out["worst_case_distribution"] = distribution_json(*sol.worst_case_distribution);
    return out.dump(2) + "\n";
}

std::string cmd_sweep(const Scenario& s, std::size_t grid) {
    const auto points = sweep(s.forecasts, s.utility, grid, s.exchange);
    std::ostringstream out;
    out << (s.truth ? "b,worst_case,true_expected\n" : "b,worst_case\n");
    for (const auto& p : points) {
        out << format_number(p.b) << ',' << format_number(p.worst_case);
        if (s.truth) out << ',' << format_number(true_expected(*s.truth, s.utility, p.b));
        out << '\n';
    }
    return out.str();
}

std::string cmd_sensitivity(const Scenario& s, double delta) {
    const auto sol = solve(s.forecasts, s.utility, s.exchange);
    const auto report = sensitivities(sol, s.forecasts);
    ordered_json out;
    out["base_objective"] = report.base_objective;
    out["b_star"] = sol.b_star;
    out["delta"] = delta;
    auto entries = ordered_json::array();
    std::vector<double> unit(s.forecasts.size(), 0.0);
    for (const auto& e : report.entries) {
        std::fill(unit.begin(), unit.end(), 0.0);
        unit[e.forecast_index] = delta;
        ordered_json item;
        item["index"] = e.forecast_index;
        item["kind"] = std::string(bound_kind_name(e.kind));
        item["interval"] = e.interval_index ? ordered_json(*e.interval_index) : ordered_json(nullptr);
        item["lambda"] = e.lambda;
        item["predicted_bound"] = lower_bound_after_change(report, unit);
        entries.push_back(std::move(item));
    }
    out["entries"] = std::move(entries);
    return out.dump(2) + "\n";
}

// Bound in the coordinates users edit: lower bounds are reported as
// probabilities, not as their negated generic form.
double user_bound(const ForecastConstraint& c, double epsilon) {
    return c.kind() == BoundKind::Lower ? -epsilon : epsilon;
}

std::string lambda_header(const ForecastConstraint& c, std::size_t i) {
    switch (c.kind()) {
    case BoundKind::Upper:
        return "lambda_upper_" + std::to_string(*c.interval + 1);
    case BoundKind::Lower:
        return "lambda_lower_" + std::to_string(*c.interval + 1);
    case BoundKind::Generic:
        break;
    }
    return "lambda_" + std::to_string(i);
}

std::string cmd_refine(const Scenario& s, std::size_t iters, std::ostream& err) {
    if (!s.truth) throw ValidationError("truth", "refine needs a truth distribution for the oracle");
    if (!s.oracle) throw ValidationError("oracle", "refine needs an oracle section");
    ClampedStepOracle oracle(*s.truth, s.forecasts, s.oracle->step, s.oracle->margin);
    auto options = s.refine;
    options.max_iterations = iters;
    const auto trace = refine_loop(s.forecasts, s.utility, oracle, options);

    const auto& fs = s.forecasts;
    std::ostringstream out;
    out << "iter,refined_index,refined_kind,new_bound,objective,b_star";
    for (std::size_t i = 0; i < fs.size(); ++i) out << ',' << lambda_header(fs[i], i);
    out << '\n';
    for (const auto& r : trace.iterations) {
        out << r.iteration << ',';
        if (r.refined_index) {
            const auto& c = fs[*r.refined_index];
            out << *r.refined_index << ',' << bound_kind_name(c.kind()) << ','
                << format_number(user_bound(c, *r.new_epsilon));
        } else {
            out << ",,";
        }
        out << ',' << format_number(r.objective) << ',' << format_number(r.b_star);
        for (double l : r.lambda) out << ',' << format_number(l);
        out << '\n';
    }
    err << "termination: " << termination_name(trace.termination) << "\n";
    return out.str();
}

std::string cmd_check(const Scenario& s) {
    const auto& bounds = s.utility.decision_bounds();
    double gap_max = 0.0;
    for (std::size_t i = 0; i < kCheckGrid; ++i) {
        double b = bounds.lower + (bounds.upper - bounds.lower) * static_cast<double>(i) /
                                      static_cast<double>(kCheckGrid - 1);
        if (i + 1 == kCheckGrid) b = bounds.upper;
        gap_max = std::max(gap_max, duality_gap(s.forecasts, s.utility, b, s.grid, s.exchange));
    }
    const auto slack = strict_feasibility_slack(s.forecasts, s.grid.base_points);
    ordered_json out;
    out["duality_gap_max"] = gap_max;
    switch (slack.status) {
    case SlackStatus::Bounded:
        out["slack_status"] = "bounded";
        break;
    case SlackStatus::Unbounded:
        out["slack_status"] = "unbounded";
        break;
    case SlackStatus::Infeasible:
        out["slack_status"] = "infeasible";
        break;
    }
    out["strict_feasibility_slack"] = optional_number(slack.zeta);
    if (slack.status == SlackStatus::Bounded && slack.zeta > 0.0)
        out["feasibility_ball_radius"] = feasibility_ball_radius(slack.zeta, s.forecasts.epsilons());
    else
        out["feasibility_ball_radius"] = nullptr;
    return out.dump(2) + "\n";
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message,
                  const std::string& field = {}) {
    ordered_json e;
    e["error"] = kind;
    e["message"] = message;
    if (!field.empty()) e["field"] = field;
    err << e.dump() << "\n";
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust planning under probabilistic forecasts", "robplan"};
    app.require_subcommand(1);

    std::string config;
    std::string out_path;
    std::size_t grid = 101;
    std::size_t iters = 50;
    double delta = 0.01;
    bool worst_case = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config, "Scenario JSON file")->required();
        sub->add_option("--out", out_path, "Write the result to PATH instead of stdout");
    };
    auto* solve_cmd = app.add_subcommand("solve", "Robustly optimal decision and multipliers (JSON)");
    add_common(solve_cmd);
    solve_cmd->add_flag("--worst-case", worst_case, "Attach the brute-force worst-case distribution");
    auto* sweep_cmd = app.add_subcommand("sweep", "Worst-case value over a grid of decisions (CSV)");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--grid", grid, "Number of decisions")->check(CLI::Range(2, 1'000'000));
    auto* sens_cmd = app.add_subcommand("sensitivity", "Ranked forecast sensitivities (JSON)");
    add_common(sens_cmd);
    sens_cmd->add_option("--delta", delta, "Tightening used for the predicted bounds");
    auto* refine_cmd = app.add_subcommand("refine", "Sensitivity-driven refinement trace (CSV)");
    add_common(refine_cmd);
    refine_cmd->add_option("--iters", iters, "Maximum number of refinements");
    auto* check_cmd = app.add_subcommand("check", "Duality gap and strict feasibility diagnostics (JSON)");
    add_common(check_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "UsageError", e.what());
        return kExitConfigError;
    }

    try {
        const Scenario scenario = load_scenario(config);
        if (scenario.truth && !scenario.truth_consistent)
            err << "warning: truth distribution violates the forecasts\n";

        std::string result;
        if (solve_cmd->parsed())
            result = cmd_solve(scenario, worst_case);
        else if (sweep_cmd->parsed())
            result = cmd_sweep(scenario, grid);
        else if (sens_cmd->parsed())
            result = cmd_sensitivity(scenario, delta);
        else if (refine_cmd->parsed())
            result = cmd_refine(scenario, iters, err);
        else if (check_cmd->parsed())
            result = cmd_check(scenario);

        if (out_path.empty()) {
            out << result;
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) {
                report_error(err, "IoError", "cannot write '" + out_path + "'");
                return kExitConfigError;
            }
            file << result;
        }
        return kExitOk;
    } catch (const ValidationError& e) {
        report_error(err, "ValidationError", e.what(), e.field());
        return kExitConfigError;
    } catch (const DomainError& e) {
        report_error(err, "DomainError", e.what());
        return kExitConfigError;
    } catch (const PreconditionError& e) {
        report_error(err, "PreconditionError", e.what());
        return kExitConfigError;
    } catch (const AmbiguitySetEmpty& e) {
        report_error(err, "AmbiguitySetEmpty", e.what());
        return kExitSolverFailure;
    } catch (const ConvergenceFailure& e) {
        report_error(err, "ConvergenceFailure", e.what());
        return kExitSolverFailure;
    } catch (const NumericalFailure& e) {
        report_error(err, "NumericalFailure", e.what());
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        report_error(err, "InternalError", e.what());
        return kExitSolverFailure;
    }
}

} // namespace robplan::cli
