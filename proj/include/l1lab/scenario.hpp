#pragma once

#include "l1lab/dynamics.hpp"
#include "l1lab/geometry.hpp"
#include "l1lab/operators.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace l1lab {

/// Starting point of an iteration: explicit values, or a seeded random draw
/// from the feasible box rescaled to the required mass.
struct Initial {
    bool random = false;
    L1Function values; // used when !random
};

/// Where a displacement profile (and epsilon searches) evaluate the pipeline.
struct ProfileGrid {
    enum class Kind { None, Uniform, Explicit, Sampled };
    Kind kind = Kind::None;
    unsigned denominator = 100;     // Uniform: multiples of 1/denominator on [0,1]
    std::vector<L1Function> points; // Explicit
    std::size_t sample_count = 0;   // Sampled
};

struct EpsSearchExpectation {
    Rational eps;
    bool expect_found = false;
};

struct AfppExpectation {
    std::size_t trials = 0;
    Rational bound;
};

struct PigeonholeExpectation {
    std::vector<Rational> translation_distances;
    std::size_t max_entry_steps = 0; // bound on preperiod + period
};

struct RotationExpectation {
    std::uint64_t p = 0;
    std::uint64_t q = 1;
    std::uint64_t expected_period = 1;
};

/// Everything a scenario is allowed to pin down in advance. Each present
/// field becomes one named check in the run report; comparisons are exact.
struct ExpectedResults {
    std::optional<std::vector<L1Function>> orbit_prefix;
    std::optional<std::size_t> preperiod;
    std::optional<std::size_t> period;
    std::optional<std::size_t> stabilizes_within; // period 1 entered within N steps
    std::optional<L1Function> fixed_point;        // also re-verified by direct application
    std::optional<Rational> displacement_min;
    std::optional<Rational> displacement_max;
    std::optional<L1Function> displacement_min_witness;
    std::optional<L1Function> displacement_max_witness;
    std::vector<EpsSearchExpectation> eps_search;
    std::optional<AfppExpectation> afpp;
    std::optional<PigeonholeExpectation> pigeonhole;
    std::vector<RotationExpectation> rotation_periods;
};

/// A declarative experiment: space, feasible set, pipeline, start, metric,
/// iteration budget and stop rule, seed, and optional expectations.
struct ScenarioConfig {
    std::string name;
    MeasureSpace space = MeasureSpace::counting(1);
    FeasibleSetSpec set{Rational(0), Rational(1), std::nullopt};
    OperatorSpec pipeline{CompositeSpec{}};
    Initial initial;
    Metric metric = Metric::L1;
    std::size_t max_steps = 100;
    StopCondition stop = StopCondition::exact_repeat();
    std::uint64_t seed = 0;
    ProfileGrid profile_grid;
    bool geometry = false;
    std::size_t diagnostic_samples = 64;
    std::optional<ExpectedResults> expected;
};

struct StageDiagnostics {
    std::string stage;
    DiagnosticReport nonexpansive;
    DiagnosticReport idempotent;
    DiagnosticReport deviation;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Result of an approximate-fixed-point trial set: the maximum displacement
/// of the unperturbed fixed point under `trials` independently seeded
/// perturbed pipelines, which must stay within the perturbation budget.
struct AfppTrialReport {
    std::size_t trials = 0;
    Rational delta;
    Rational max_displacement;
    std::uint64_t worst_seed = 0;
    L1Function fixed_point;
    std::size_t violations = 0;
    std::optional<std::string> precondition_failure;
    bool pass = false;
};

struct RunReport {
    std::string scenario;
    std::string pipeline; // stage list as text
    OrbitTrace trace;
    std::vector<StageDiagnostics> diagnostics;
    std::optional<DisplacementProfile> profile;
    std::optional<GeometryReport> geometry;
    std::optional<AfppTrialReport> afpp;
    std::vector<CheckResult> checks; // one per expected-block item
    bool expected_pass = true;       // all checks passed (true when no expectations)
    double wall_ms = 0;              // shown on stdout, never serialized
};

/// Parse a scenario from JSON text. Throws ParseError with a field-level
/// message on malformed input, ConfigError on invariant violations.
ScenarioConfig parse_scenario_text(const std::string& json_text);

/// Read and parse a scenario file. Throws IoError when unreadable.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// The executable pipeline of a scenario (feasible-set bounds attached).
Operator build_pipeline(const ScenarioConfig& config);

/// The scenario's starting point: explicit values (membership-checked) or
/// the seeded random draw.
L1Function resolve_initial(const ScenarioConfig& config);

/// Run diagnostics, iterate the orbit, evaluate the expected block.
/// Deterministic in (config, seed). Budget exhaustion is reported, not fatal.
RunReport run_scenario(const ScenarioConfig& config);

/// Perturbation trials around the fixed point of the unperturbed pipeline.
/// Requires the pipeline to end in exactly one perturbation stage.
AfppTrialReport afpp_trial(const ScenarioConfig& config, std::size_t trials);

/// Built-in registry of cases with their published numbers pinned in the
/// expected block. Throws ConfigError for unknown names (message lists all).
ScenarioConfig paper_case(const std::string& name);
const std::vector<std::string>& paper_case_names();

/// Replace every occurrence of a tunable parameter in a pipeline spec:
/// "d" (translation distance), "step" (grid quantizer), "delta"
/// (perturbation). Returns how many stages were rewritten.
std::size_t substitute_parameter(OperatorSpec& spec, const std::string& parameter,
                                 const Rational& value);

/// Top-level stage list of a pipeline (a non-composite spec is one stage).
std::vector<OperatorSpec> pipeline_stages(const OperatorSpec& spec);

/// Materialize the scenario's profile grid (empty when none is configured).
/// When `description` is non-null it receives a short grid summary.
std::vector<L1Function> profile_points(const ScenarioConfig& config,
                                       std::string* description = nullptr);

/// Serialize a run report as pretty JSON text (stable key order, no wall
/// time, so identical runs produce byte-identical artifacts).
std::string report_to_json_text(const RunReport& report);

/// Serialize an operator spec in the scenario JSON dialect.
std::string operator_spec_to_json_text(const OperatorSpec& spec);

} // namespace l1lab
