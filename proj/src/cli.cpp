#include "l1lab/cli.hpp"
#include "l1lab/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace l1lab::cli {

namespace {

std::string point_text(const L1Function& f) {
    std::string out = "(";
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i > 0) out += ",";
        out += format_rational(f[i]);
    }
    return out + ")";
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        values.push_back(parse_rational(item));
    }
    return values;
}

// "0.54;0.56" or "0.5,0.1;0.3,0.3": two functions separated by ';',
// coordinates separated by ','.
std::pair<L1Function, L1Function> parse_witness_pair(const std::string& text) {
    const auto split = text.find(';');
    if (split == std::string::npos) {
        throw ParseError("witness pair must be '<f>;<g>', got '" + text + "'");
    }
    L1Function f, g;
    for (const Rational& v : parse_rational_list(text.substr(0, split))) f.push_back(v);
    for (const Rational& v : parse_rational_list(text.substr(split + 1))) g.push_back(v);
    if (f.empty() || g.empty()) {
        throw ParseError("witness pair must name both points: '" + text + "'");
    }
    return {std::move(f), std::move(g)};
}

void print_report_summary(const RunReport& report) {
    std::cout << "scenario  " << report.scenario << "\n";
    std::cout << "pipeline  " << report.pipeline << "\n";
    std::cout << "orbit     " << report.trace.points.size() << " points";
    if (report.trace.preperiod) {
        std::cout << ", preperiod " << *report.trace.preperiod << ", period "
                  << *report.trace.period;
    } else if (report.trace.stopped_by_displacement) {
        std::cout << ", stopped by small displacement";
    } else {
        std::cout << ", no repeat within budget " << report.trace.budget;
    }
    std::cout << ", final " << point_text(report.trace.final_point()) << "\n";
    for (const StageDiagnostics& diag : report.diagnostics) {
        std::cout << "stage     " << diag.stage << ": " << diag.nonexpansive.summary() << "; "
                  << diag.idempotent.summary() << "; " << diag.deviation.summary() << "\n";
    }
    if (report.profile) {
        std::cout << "profile   [" << metric_name(report.profile->metric) << ", "
                  << report.profile->grid_description << "] min "
                  << format_rational(report.profile->min_value) << " at "
                  << point_text(report.profile->min_witness) << ", max "
                  << format_rational(report.profile->max_value) << " at "
                  << point_text(report.profile->max_witness) << "\n";
    }
    if (report.geometry) {
        std::cout << "geometry  diameter " << format_rational(report.geometry->diameter)
                  << ", radius estimate " << format_rational(report.geometry->radius_estimate);
        if (report.geometry->ratio) {
            std::cout << ", ratio " << format_rational(*report.geometry->ratio);
        }
        std::cout << "\n";
    }
    for (const CheckResult& check : report.checks) {
        std::cout << (check.pass ? "  [ok]   " : "  [FAIL] ") << check.name << ": "
                  << check.detail << "\n";
    }
    std::cout << "wall time " << report.wall_ms << " ms\n";
}

int run_command(const std::string& scenario_path, const std::string& trace_path,
                const std::string& report_path) {
    const ScenarioConfig config = load_scenario(scenario_path);
    const RunReport report = run_scenario(config);
    print_report_summary(report);
    if (!trace_path.empty()) {
        write_trace_csv(report.trace, trace_path);
        std::cout << "trace written to " << trace_path << "\n";
    }
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw IoError("cannot write report file '" + report_path + "'");
        out << report_to_json_text(report);
        std::cout << "report written to " << report_path << "\n";
    }
    return report.expected_pass ? kExitOk : kExitVerificationFailed;
}

int verify_paper_command(const std::string& case_name) {
    std::vector<std::string> names;
    if (!case_name.empty()) {
        names.push_back(case_name);
    } else {
        names = paper_case_names();
    }

    bool all_pass = true;
    for (const std::string& name : names) {
        const ScenarioConfig config = paper_case(name); // throws ConfigError if unknown
        const RunReport report = run_scenario(config);
        all_pass = all_pass && report.expected_pass;
        std::cout << (report.expected_pass ? "PASS " : "FAIL ") << name << "\n";
        for (const CheckResult& check : report.checks) {
            std::cout << (check.pass ? "  [ok]   " : "  [FAIL] ") << check.name << ": "
                      << check.detail << "\n";
        }
    }
    std::cout << (all_pass ? "all cases verified" : "some cases FAILED") << " (" << names.size()
              << " case" << (names.size() == 1 ? "" : "s") << ")\n";
    return all_pass ? kExitOk : kExitVerificationFailed;
}

int sweep_command(const std::string& scenario_path, const std::string& parameter,
                  const std::string& values_text, const std::string& out_path) {
    const ScenarioConfig base = load_scenario(scenario_path);
    const std::vector<Rational> values = parse_rational_list(values_text);

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write sweep file '" + out_path + "'");

    if (parameter == "eps") {
        const std::vector<L1Function> grid = profile_points(base);
        if (grid.empty()) {
            throw ConfigError("eps sweep requires a profile_grid in the scenario");
        }
        const Operator pipeline = build_pipeline(base);
        out << "param,value,result,witness\n";
        for (const Rational& eps : values) {
            const auto found = epsilon_fixed_point_search(pipeline, base.metric, eps, grid);
            out << "eps," << format_rational(eps) << "," << (found ? "found" : "none") << ",";
            if (found) {
                for (std::size_t i = 0; i < found->size(); ++i) {
                    if (i > 0) out << ";";
                    out << format_rational((*found)[i]);
                }
            }
            out << "\n";
        }
    } else {
        out << "param,value,preperiod,period,displacement_min,displacement_max\n";
        for (std::size_t row = 0; row < values.size(); ++row) {
            ScenarioConfig varied = base;
            if (substitute_parameter(varied.pipeline, parameter, values[row]) == 0) {
                throw ConfigError("parameter '" + parameter +
                                  "' does not occur in the scenario pipeline");
            }
            varied.seed = derive_seed(base.seed, row);
            const Operator pipeline = build_pipeline(varied);
            const OrbitTrace trace =
                iterate_orbit(pipeline, resolve_initial(varied), varied.max_steps, varied.stop);
            out << parameter << "," << format_rational(values[row]) << ",";
            if (trace.preperiod) {
                out << *trace.preperiod << "," << *trace.period;
            } else {
                out << ",";
            }
            const std::vector<L1Function> grid = profile_points(varied);
            if (!grid.empty()) {
                const DisplacementProfile profile =
                    displacement_profile(pipeline, varied.metric, grid);
                out << "," << format_rational(profile.min_value) << ","
                    << format_rational(profile.max_value);
            } else {
                out << ",,";
            }
            out << "\n";
        }
    }
    std::cout << "sweep of " << parameter << " over " << values.size() << " value"
              << (values.size() == 1 ? "" : "s") << " written to " << out_path << "\n";
    return kExitOk;
}

int check_op_command(const std::string& scenario_path, const std::string& property,
                     std::size_t samples, std::uint64_t seed, bool seed_given,
                     const std::vector<std::string>& witness_texts, const std::string& bound_text,
                     const std::string& delta_text, unsigned grid_denominator) {
    const ScenarioConfig config = load_scenario(scenario_path);
    const Operator pipeline = build_pipeline(config);
    const std::uint64_t effective_seed = seed_given ? seed : config.seed;
    Sampler sampler(config.space, config.set, effective_seed);

    DiagnosticReport report;
    if (property == "nonexpansive") {
        std::vector<std::pair<L1Function, L1Function>> witnesses;
        for (const std::string& text : witness_texts) {
            witnesses.push_back(parse_witness_pair(text));
        }
        report = check_nonexpansive(pipeline, sampler, samples, config.metric, witnesses);
        if (report.worst_pair) {
            std::cout << "worst pair " << point_text(report.worst_pair->first) << " vs "
                      << point_text(report.worst_pair->second) << "\n";
        }
    } else if (property == "idempotent") {
        report = check_idempotent(pipeline, sampler, samples);
        if (report.witness) {
            std::cout << "failing point " << point_text(*report.witness) << "\n";
        }
    } else if (property == "deviation") {
        std::vector<L1Function> extra;
        if (config.space.size() == 1) {
            extra = scalar_grid(config.space, grid_denominator);
        }
        std::optional<Rational> bound;
        if (!bound_text.empty()) bound = parse_rational(bound_text);
        report = max_deviation(pipeline, sampler, samples, extra, bound);
        if (report.witness) {
            std::cout << "deviation attained at " << point_text(*report.witness) << "\n";
        }
    } else { // perturbation
        const std::vector<OperatorSpec> stages = pipeline_stages(config.pipeline);
        if (stages.size() < 2) {
            throw ConfigError("perturbation check needs a pipeline with at least two stages "
                              "(nonexpansive part followed by the coarsener)");
        }
        CompositeSpec head;
        head.stages.assign(stages.begin(), stages.end() - 1);
        const Operator t = build_operator(OperatorSpec{std::move(head)}, config.space, config.set);
        const Operator q = build_operator(stages.back(), config.space, config.set);

        Rational delta;
        if (!delta_text.empty()) {
            delta = parse_rational(delta_text);
        } else {
            std::vector<L1Function> extra;
            if (config.space.size() == 1) {
                extra = scalar_grid(config.space, grid_denominator);
            }
            delta = max_deviation(q, sampler.derive(1), samples, extra).max_deviation;
            std::cout << "measured coarsener deviation delta = " << format_rational(delta) << "\n";
        }
        report = perturbation_estimate(t, q, delta, sampler, samples, config.metric);
        if (report.worst_pair) {
            std::cout << "largest distance increase " << format_rational(report.max_deviation)
                      << " at " << point_text(report.worst_pair->first) << " vs "
                      << point_text(report.worst_pair->second) << "\n";
        }
    }

    std::cout << report.summary() << "\n";
    return report.pass ? kExitOk : kExitVerificationFailed;
}

} // namespace

void write_trace_csv(const OrbitTrace& trace, const std::filesystem::path& path) {
    if (trace.points.empty()) throw DomainError("write_trace_csv: empty trace");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trace file '" + path.string() + "'");

    const std::size_t width = trace.points.front().size();
    out << "step,displacement";
    for (std::size_t i = 0; i < width; ++i) out << ",value_" << i;
    out << "\n";
    for (std::size_t row = 0; row < trace.points.size(); ++row) {
        out << row << ",";
        if (row > 0) out << format_rational(trace.displacements[row - 1]);
        for (const Rational& v : trace.points[row]) out << "," << format_rational(v);
        out << "\n";
    }
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"nonexpansive-operator dynamics on finite L1 spaces"};
    app.require_subcommand(1);

    std::string scenario_path, trace_path, report_path;
    auto* run = app.add_subcommand("run", "run a scenario file and evaluate its expected block");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--trace", trace_path, "write the orbit trace CSV here");
    run->add_option("--report", report_path, "write the run report JSON here");

    std::string case_name;
    auto* verify = app.add_subcommand("verify-paper", "verify the built-in case registry");
    verify->add_option("--case", case_name, "verify a single named case");

    std::string sweep_scenario, sweep_param, sweep_values, sweep_out;
    auto* sweep = app.add_subcommand("sweep", "vary one parameter of a scenario");
    sweep->add_option("scenario", sweep_scenario, "base scenario JSON file")->required();
    sweep->add_option("--param", sweep_param, "d | step | delta | eps")
        ->required()
        ->check(CLI::IsMember({"d", "step", "delta", "eps"}));
    sweep->add_option("--values", sweep_values, "comma-separated rational values")->required();
    sweep->add_option("--out", sweep_out, "output CSV path")->required();

    std::string check_scenario, check_property, check_bound, check_delta;
    std::size_t check_samples = 200;
    std::uint64_t check_seed = 0;
    unsigned check_grid = 200;
    std::vector<std::string> check_witnesses;
    auto* check = app.add_subcommand("check-op", "check one operator property of a pipeline");
    check->add_option("scenario", check_scenario, "scenario JSON file")->required();
    check
        ->add_option("--property", check_property,
                     "nonexpansive | idempotent | deviation | perturbation")
        ->required()
        ->check(CLI::IsMember({"nonexpansive", "idempotent", "deviation", "perturbation"}));
    check->add_option("--samples", check_samples, "sample (pair) count");
    auto* seed_option = check->add_option("--seed", check_seed, "sampler seed (default: scenario seed)");
    check->add_option("--witness", check_witnesses,
                      "extra pair '<f>;<g>', coordinates comma-separated (repeatable)");
    check->add_option("--bound", check_bound, "assert max deviation <= bound");
    check->add_option("--delta", check_delta,
                      "coarsener error bound (default: measured via max deviation)");
    check->add_option("--grid-denominator", check_grid,
                      "scalar-space exhaustive grid resolution");

    try {
        std::vector<const char*> argv;
        argv.push_back("l1lab");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) return run_command(scenario_path, trace_path, report_path);
        if (verify->parsed()) return verify_paper_command(case_name);
        if (sweep->parsed()) return sweep_command(sweep_scenario, sweep_param, sweep_values, sweep_out);
        return check_op_command(check_scenario, check_property, check_samples, check_seed,
                                seed_option->count() > 0, check_witnesses, check_bound,
                                check_delta, check_grid);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace l1lab::cli
