#include "l1lab/scenario.hpp"
#include "l1lab/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

namespace l1lab {

using nlohmann::json;

namespace {

// --- JSON helpers ----------------------------------------------------------

const json& need(const json& obj, const char* field, const std::string& context) {
    if (!obj.is_object() || !obj.contains(field)) {
        throw ParseError(context + ": missing field '" + field + "'");
    }
    return obj.at(field);
}

std::string string_of(const json& v, const std::string& context) {
    if (!v.is_string()) throw ParseError(context + ": expected a string");
    return v.get<std::string>();
}

Rational rat_of(const json& v, const std::string& context) {
    if (!v.is_string()) {
        throw ParseError(context + ": rationals must be strings, e.g. \"0.6\" or \"3/5\"");
    }
    try {
        return parse_rational(v.get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(context + ": " + e.what());
    }
}

std::uint64_t uint_of(const json& v, const std::string& context) {
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw ParseError(context + ": expected a nonnegative integer");
    }
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        throw ParseError(context + ": expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

// One function value: an array of rational strings, or a bare string for
// one-atom spaces.
L1Function values_of(const json& v, const std::string& context) {
    if (v.is_string()) return {rat_of(v, context)};
    if (!v.is_array()) throw ParseError(context + ": expected an array of rational strings");
    L1Function out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(rat_of(v.at(i), context + "[" + std::to_string(i) + "]"));
    }
    return out;
}

json values_to_json(const L1Function& f) {
    json out = json::array();
    for (const Rational& v : f) out.push_back(format_rational(v));
    return out;
}

// --- OperatorSpec <-> JSON -------------------------------------------------

OperatorSpec spec_from_json(const json& j, const std::string& context) {
    const std::string kind = string_of(need(j, "kind", context), context + ".kind");
    if (kind == "translation") {
        return {TranslationSpec{rat_of(need(j, "d", context), context + ".d")}};
    }
    if (kind == "averaging") {
        return {AveragingSpec{}};
    }
    if (kind == "clip") {
        return {ClipSpec{rat_of(need(j, "lower", context), context + ".lower"),
                         rat_of(need(j, "upper", context), context + ".upper")}};
    }
    if (kind == "cond_exp") {
        const json& blocks = need(j, "blocks", context);
        if (!blocks.is_array()) throw ParseError(context + ".blocks: expected an array");
        CondExpSpec spec;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const json& block = blocks.at(b);
            const std::string bctx = context + ".blocks[" + std::to_string(b) + "]";
            if (!block.is_array()) throw ParseError(bctx + ": expected an array of atom indices");
            std::vector<std::size_t> indices;
            for (const json& idx : block) {
                indices.push_back(static_cast<std::size_t>(uint_of(idx, bctx)));
            }
            spec.blocks.push_back(std::move(indices));
        }
        return {std::move(spec)};
    }
    if (kind == "grid_quantizer") {
        return {GridQuantizerSpec{rat_of(need(j, "step", context), context + ".step")}};
    }
    if (kind == "perturbation") {
        PerturbationSpec spec;
        spec.delta = rat_of(need(j, "delta", context), context + ".delta");
        spec.seed = uint_of(need(j, "seed", context), context + ".seed");
        return {std::move(spec)};
    }
    if (kind == "composite") {
        const json& stages = need(j, "stages", context);
        if (!stages.is_array()) throw ParseError(context + ".stages: expected an array");
        CompositeSpec spec;
        for (std::size_t i = 0; i < stages.size(); ++i) {
            spec.stages.push_back(
                spec_from_json(stages.at(i), context + ".stages[" + std::to_string(i) + "]"));
        }
        return {std::move(spec)};
    }
    throw ParseError(context + ": unknown operator kind '" + kind + "'");
}

json spec_to_json(const OperatorSpec& spec) {
    struct Visitor {
        json operator()(const TranslationSpec& t) const {
            return {{"kind", "translation"}, {"d", format_rational(t.distance)}};
        }
        json operator()(const AveragingSpec&) const { return {{"kind", "averaging"}}; }
        json operator()(const ClipSpec& c) const {
            return {{"kind", "clip"},
                    {"lower", format_rational(c.lower)},
                    {"upper", format_rational(c.upper)}};
        }
        json operator()(const CondExpSpec& ce) const {
            json blocks = json::array();
            for (const auto& block : ce.blocks) blocks.push_back(block);
            return {{"kind", "cond_exp"}, {"blocks", blocks}};
        }
        json operator()(const GridQuantizerSpec& g) const {
            return {{"kind", "grid_quantizer"}, {"step", format_rational(g.step)}};
        }
        json operator()(const PerturbationSpec& p) const {
            return {{"kind", "perturbation"}, {"delta", format_rational(p.delta)},
                    {"seed", p.seed}};
        }
        json operator()(const CompositeSpec& c) const {
            json stages = json::array();
            for (const OperatorSpec& s : c.stages) stages.push_back(spec_to_json(s));
            return {{"kind", "composite"}, {"stages", stages}};
        }
    };
    return std::visit(Visitor{}, spec.kind);
}

// --- Expected block --------------------------------------------------------

ExpectedResults expected_from_json(const json& j) {
    ExpectedResults e;
    const std::string ctx = "expected";
    if (j.contains("orbit_prefix")) {
        const json& prefix = j.at("orbit_prefix");
        if (!prefix.is_array()) throw ParseError("expected.orbit_prefix: expected an array");
        std::vector<L1Function> points;
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            points.push_back(
                values_of(prefix.at(i), "expected.orbit_prefix[" + std::to_string(i) + "]"));
        }
        e.orbit_prefix = std::move(points);
    }
    if (j.contains("preperiod")) e.preperiod = uint_of(j.at("preperiod"), ctx + ".preperiod");
    if (j.contains("period")) e.period = uint_of(j.at("period"), ctx + ".period");
    if (j.contains("stabilizes_within")) {
        e.stabilizes_within = uint_of(j.at("stabilizes_within"), ctx + ".stabilizes_within");
    }
    if (j.contains("fixed_point")) {
        e.fixed_point = values_of(j.at("fixed_point"), ctx + ".fixed_point");
    }
    if (j.contains("displacement_min")) {
        e.displacement_min = rat_of(j.at("displacement_min"), ctx + ".displacement_min");
    }
    if (j.contains("displacement_max")) {
        e.displacement_max = rat_of(j.at("displacement_max"), ctx + ".displacement_max");
    }
    if (j.contains("displacement_min_witness")) {
        e.displacement_min_witness =
            values_of(j.at("displacement_min_witness"), ctx + ".displacement_min_witness");
    }
    if (j.contains("displacement_max_witness")) {
        e.displacement_max_witness =
            values_of(j.at("displacement_max_witness"), ctx + ".displacement_max_witness");
    }
    if (j.contains("eps_search")) {
        const json& searches = j.at("eps_search");
        if (!searches.is_array()) throw ParseError("expected.eps_search: expected an array");
        for (const json& s : searches) {
            EpsSearchExpectation item;
            item.eps = rat_of(need(s, "eps", ctx + ".eps_search"), ctx + ".eps_search.eps");
            const std::string verdict =
                string_of(need(s, "expect", ctx + ".eps_search"), ctx + ".eps_search.expect");
            if (verdict == "found") item.expect_found = true;
            else if (verdict == "none") item.expect_found = false;
            else throw ParseError("expected.eps_search.expect: 'found' or 'none'");
            e.eps_search.push_back(std::move(item));
        }
    }
    if (j.contains("afpp")) {
        const json& a = j.at("afpp");
        AfppExpectation item;
        item.trials = uint_of(need(a, "trials", ctx + ".afpp"), ctx + ".afpp.trials");
        item.bound = rat_of(need(a, "bound", ctx + ".afpp"), ctx + ".afpp.bound");
        e.afpp = std::move(item);
    }
    if (j.contains("pigeonhole")) {
        const json& p = j.at("pigeonhole");
        PigeonholeExpectation item;
        const json& ds = need(p, "d_values", ctx + ".pigeonhole");
        if (!ds.is_array()) throw ParseError("expected.pigeonhole.d_values: expected an array");
        for (const json& d : ds) item.translation_distances.push_back(rat_of(d, ctx));
        item.max_entry_steps =
            uint_of(need(p, "max_entry_steps", ctx + ".pigeonhole"), ctx + ".pigeonhole");
        e.pigeonhole = std::move(item);
    }
    if (j.contains("rotation_periods")) {
        const json& rs = j.at("rotation_periods");
        if (!rs.is_array()) throw ParseError("expected.rotation_periods: expected an array");
        for (const json& r : rs) {
            RotationExpectation item;
            item.p = uint_of(need(r, "p", ctx), ctx + ".rotation_periods.p");
            item.q = uint_of(need(r, "q", ctx), ctx + ".rotation_periods.q");
            item.expected_period = uint_of(need(r, "period", ctx), ctx + ".rotation_periods.period");
            e.rotation_periods.push_back(item);
        }
    }
    return e;
}

ProfileGrid profile_grid_from_json(const json& j) {
    ProfileGrid grid;
    const std::string kind = string_of(need(j, "kind", "profile_grid"), "profile_grid.kind");
    if (kind == "uniform") {
        grid.kind = ProfileGrid::Kind::Uniform;
        grid.denominator =
            static_cast<unsigned>(uint_of(need(j, "denominator", "profile_grid"),
                                          "profile_grid.denominator"));
        if (grid.denominator == 0) throw ParseError("profile_grid.denominator: must be positive");
    } else if (kind == "explicit") {
        grid.kind = ProfileGrid::Kind::Explicit;
        const json& pts = need(j, "points", "profile_grid");
        if (!pts.is_array()) throw ParseError("profile_grid.points: expected an array");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            grid.points.push_back(
                values_of(pts.at(i), "profile_grid.points[" + std::to_string(i) + "]"));
        }
        if (grid.points.empty()) throw ParseError("profile_grid.points: must not be empty");
    } else if (kind == "sampled") {
        grid.kind = ProfileGrid::Kind::Sampled;
        grid.sample_count = uint_of(need(j, "count", "profile_grid"), "profile_grid.count");
        if (grid.sample_count == 0) throw ParseError("profile_grid.count: must be positive");
    } else {
        throw ParseError("profile_grid.kind: expected uniform, explicit or sampled");
    }
    return grid;
}

ScenarioConfig scenario_from_json(const json& j) {
    ScenarioConfig config;
    config.name = string_of(need(j, "name", "scenario"), "scenario.name");

    const json& space = need(j, "space", "scenario");
    const json& weights = need(space, "weights", "scenario.space");
    if (!weights.is_array() || weights.empty()) {
        throw ParseError("scenario.space.weights: expected a nonempty array");
    }
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        std::string label = std::to_string(i);
        if (space.contains("labels")) {
            const json& labels = space.at("labels");
            if (!labels.is_array() || labels.size() != weights.size()) {
                throw ParseError("scenario.space.labels: must match weights length");
            }
            label = string_of(labels.at(i), "scenario.space.labels");
        }
        atoms.push_back(
            Atom{std::move(label),
                 rat_of(weights.at(i), "scenario.space.weights[" + std::to_string(i) + "]")});
    }
    try {
        config.space = MeasureSpace(std::move(atoms));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("scenario.space: ") + e.what());
    }

    const json& set = need(j, "set", "scenario");
    config.set.lower = rat_of(need(set, "lower", "scenario.set"), "scenario.set.lower");
    config.set.upper = rat_of(need(set, "upper", "scenario.set"), "scenario.set.upper");
    if (set.contains("mass")) {
        config.set.mass = rat_of(set.at("mass"), "scenario.set.mass");
    }
    validate_feasible_set(config.set, config.space);

    config.pipeline = spec_from_json(need(j, "pipeline", "scenario"), "scenario.pipeline");

    const json& initial = need(j, "initial", "scenario");
    if (initial.is_string() && initial.get<std::string>() == "random") {
        config.initial.random = true;
    } else {
        config.initial.random = false;
        config.initial.values = values_of(initial, "scenario.initial");
    }

    config.metric = parse_metric(string_of(need(j, "metric", "scenario"), "scenario.metric"));
    config.max_steps = uint_of(need(j, "max_steps", "scenario"), "scenario.max_steps");
    if (config.max_steps == 0) throw ParseError("scenario.max_steps: must be positive");

    if (j.contains("stop")) {
        const json& stop = j.at("stop");
        const std::string kind = string_of(need(stop, "kind", "scenario.stop"), "scenario.stop.kind");
        if (kind == "exact_repeat") {
            config.stop = StopCondition::exact_repeat();
        } else if (kind == "displacement_below") {
            const Rational eps = rat_of(need(stop, "eps", "scenario.stop"), "scenario.stop.eps");
            if (eps <= 0) throw ParseError("scenario.stop.eps: must be positive");
            config.stop = StopCondition::displacement_below(eps);
        } else {
            throw ParseError("scenario.stop.kind: expected exact_repeat or displacement_below");
        }
    }

    config.seed = uint_of(need(j, "seed", "scenario"), "scenario.seed");

    if (j.contains("profile_grid")) {
        config.profile_grid = profile_grid_from_json(j.at("profile_grid"));
    }
    if (j.contains("geometry")) {
        if (!j.at("geometry").is_boolean()) throw ParseError("scenario.geometry: expected a bool");
        config.geometry = j.at("geometry").get<bool>();
    }
    if (j.contains("diagnostic_samples")) {
        config.diagnostic_samples = uint_of(j.at("diagnostic_samples"), "scenario.diagnostic_samples");
        if (config.diagnostic_samples == 0) {
            throw ParseError("scenario.diagnostic_samples: must be positive");
        }
    }
    if (j.contains("expected")) {
        config.expected = expected_from_json(j.at("expected"));
    }

    // Cross-field invariants.
    if ((config.metric == Metric::Line || config.metric == Metric::Circle) &&
        config.space.size() != 1) {
        throw ConfigError("scenario: line/circle metric requires a one-atom space");
    }
    if (config.metric == Metric::Circle && (config.set.lower < 0 || config.set.upper > 1)) {
        throw ConfigError("scenario: circle metric requires the feasible box inside [0,1]");
    }
    if (!config.initial.random) {
        require_on_space(config.initial.values, config.space, "scenario.initial");
        const MembershipReport membership =
            validate_membership(config.initial.values, config.set, config.space);
        if (!membership.valid) {
            std::string msg = "scenario.initial: not in the feasible set:";
            for (const MembershipViolation& v : membership.violations) {
                msg += " [" + v.describe() + "]";
            }
            throw ConfigError(msg);
        }
    }
    build_operator(config.pipeline, config.space, config.set); // surfaces ConfigError early
    return config;
}

// --- Runner helpers --------------------------------------------------------

void set_perturbation_seeds(OperatorSpec& spec, std::uint64_t seed) {
    if (auto* p = std::get_if<PerturbationSpec>(&spec.kind)) {
        p->seed = seed;
        return;
    }
    if (auto* c = std::get_if<CompositeSpec>(&spec.kind)) {
        for (OperatorSpec& stage : c->stages) set_perturbation_seeds(stage, seed);
    }
}

std::string orbit_point_text(const L1Function& f) {
    std::string out = "(";
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i > 0) out += ",";
        out += format_rational(f[i]);
    }
    out += ")";
    return out;
}

void evaluate_expected(const ScenarioConfig& config, const Operator& pipeline,
                       const L1Function& start, std::span<const L1Function> profile_points,
                       RunReport& report) {
    const ExpectedResults& expected = *config.expected;
    auto add = [&](std::string name, bool pass, std::string detail) {
        report.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    if (expected.orbit_prefix) {
        const auto& prefix = *expected.orbit_prefix;
        bool pass = report.trace.points.size() >= prefix.size();
        std::string detail;
        if (!pass) {
            detail = "orbit shorter than expected prefix";
        } else {
            for (std::size_t i = 0; i < prefix.size(); ++i) {
                if (report.trace.points[i] != prefix[i]) {
                    pass = false;
                    detail = "mismatch at step " + std::to_string(i) + ": got " +
                             orbit_point_text(report.trace.points[i]) + ", expected " +
                             orbit_point_text(prefix[i]);
                    break;
                }
            }
        }
        if (pass) detail = std::to_string(prefix.size()) + " orbit steps match exactly";
        add("orbit_prefix", pass, detail);
    }
    if (expected.preperiod) {
        const bool pass = report.trace.preperiod && *report.trace.preperiod == *expected.preperiod;
        add("preperiod", pass,
            "got " + (report.trace.preperiod ? std::to_string(*report.trace.preperiod)
                                             : std::string("none")) +
                ", expected " + std::to_string(*expected.preperiod));
    }
    if (expected.period) {
        const bool pass = report.trace.period && *report.trace.period == *expected.period;
        add("period", pass,
            "got " + (report.trace.period ? std::to_string(*report.trace.period)
                                          : std::string("none")) +
                ", expected " + std::to_string(*expected.period));
    }
    if (expected.stabilizes_within) {
        const bool pass = report.trace.period && *report.trace.period == 1 &&
                          report.trace.preperiod &&
                          *report.trace.preperiod <= *expected.stabilizes_within;
        std::string detail;
        if (report.trace.period) {
            detail = "period " + std::to_string(*report.trace.period) + " after " +
                     std::to_string(*report.trace.preperiod) + " steps (allowed " +
                     std::to_string(*expected.stabilizes_within) + ")";
        } else {
            detail = "no repeat within budget " + std::to_string(report.trace.budget);
        }
        add("stabilizes_within", pass, detail);
    }
    if (expected.fixed_point) {
        const L1Function& fp = *expected.fixed_point;
        const bool direct = pipeline.apply(fp) == fp;
        const bool reached = report.trace.final_point() == fp;
        add("fixed_point", direct && reached,
            std::string("direct application ") + (direct ? "holds" : "FAILS") +
                "; orbit final point " + orbit_point_text(report.trace.final_point()) +
                (reached ? " matches" : " differs"));
    }
    if (expected.displacement_min || expected.displacement_max ||
        expected.displacement_min_witness || expected.displacement_max_witness) {
        if (!report.profile) {
            add("displacement_extrema", false, "no profile grid configured");
        } else {
            bool pass = true;
            std::ostringstream detail;
            detail << "min " << format_rational(report.profile->min_value) << " at "
                   << orbit_point_text(report.profile->min_witness) << ", max "
                   << format_rational(report.profile->max_value) << " at "
                   << orbit_point_text(report.profile->max_witness);
            if (expected.displacement_min && report.profile->min_value != *expected.displacement_min)
                pass = false;
            if (expected.displacement_max && report.profile->max_value != *expected.displacement_max)
                pass = false;
            if (expected.displacement_min_witness &&
                report.profile->min_witness != *expected.displacement_min_witness)
                pass = false;
            if (expected.displacement_max_witness &&
                report.profile->max_witness != *expected.displacement_max_witness)
                pass = false;
            add("displacement_extrema", pass, detail.str());
        }
    }
    for (const EpsSearchExpectation& search : expected.eps_search) {
        const std::string name = "eps_search(" + format_rational(search.eps) + ")";
        if (profile_points.empty()) {
            add(name, false, "no profile grid configured");
            continue;
        }
        const auto found =
            epsilon_fixed_point_search(pipeline, config.metric, search.eps, profile_points);
        const bool pass = found.has_value() == search.expect_found;
        std::string detail = found ? "found " + orbit_point_text(*found) : "none on grid";
        detail += search.expect_found ? " (expected found)" : " (expected none)";
        add(name, pass, detail);
    }
    if (expected.afpp) {
        report.afpp = afpp_trial(config, expected.afpp->trials);
        const AfppTrialReport& trial = *report.afpp;
        bool pass = !trial.precondition_failure && trial.pass &&
                    trial.max_displacement <= expected.afpp->bound;
        std::string detail;
        if (trial.precondition_failure) {
            detail = *trial.precondition_failure;
        } else {
            detail = "max displacement " + format_rational(trial.max_displacement) + " over " +
                     std::to_string(trial.trials) + " seeds (bound " +
                     format_rational(expected.afpp->bound) + ", worst seed " +
                     std::to_string(trial.worst_seed) + ")";
        }
        add("afpp_bound", pass, detail);
    }
    if (expected.pigeonhole) {
        bool pass = true;
        std::size_t worst = 0;
        std::string offender;
        for (const Rational& d : expected.pigeonhole->translation_distances) {
            OperatorSpec varied = config.pipeline;
            if (substitute_parameter(varied, "d", d) == 0) {
                pass = false;
                offender = "pipeline has no translation stage";
                break;
            }
            const Operator op = build_operator(varied, config.space, config.set);
            const auto cycle = detect_cycle(op, start, config.max_steps);
            if (!cycle) {
                pass = false;
                offender = "no cycle within budget at d=" + format_rational(d);
                break;
            }
            const std::size_t entry = cycle->preperiod + cycle->period;
            if (entry > worst) worst = entry;
            if (entry > expected.pigeonhole->max_entry_steps) {
                pass = false;
                offender = "entry " + std::to_string(entry) + " at d=" + format_rational(d);
                break;
            }
        }
        std::string detail = pass ? "worst preperiod+period " + std::to_string(worst) +
                                        " <= " + std::to_string(expected.pigeonhole->max_entry_steps)
                                  : offender;
        add("pigeonhole_bound", pass, detail);
    }
    for (const RotationExpectation& rotation : expected.rotation_periods) {
        const std::string name =
            "rotation_period(" + std::to_string(rotation.p) + "/" + std::to_string(rotation.q) + ")";
        const std::uint64_t budget = std::max<std::uint64_t>(10000, config.max_steps);
        const auto period = rotation_period(rotation.p, rotation.q, budget);
        const bool pass = period && *period == rotation.expected_period;
        add(name, pass,
            "got " + (period ? std::to_string(*period) : std::string("none within budget")) +
                ", expected " + std::to_string(rotation.expected_period));
    }
}

} // namespace

// --- Public API -------------------------------------------------------------

ScenarioConfig parse_scenario_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read scenario file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

Operator build_pipeline(const ScenarioConfig& config) {
    return build_operator(config.pipeline, config.space, config.set);
}

L1Function resolve_initial(const ScenarioConfig& config) {
    if (!config.initial.random) {
        return config.initial.values;
    }
    Sampler sampler(config.space, config.set, derive_seed(config.seed, 0));
    return sampler.draw();
}

std::vector<OperatorSpec> pipeline_stages(const OperatorSpec& spec) {
    if (const auto* composite = std::get_if<CompositeSpec>(&spec.kind)) {
        return composite->stages;
    }
    return {spec};
}

std::vector<L1Function> profile_points(const ScenarioConfig& config, std::string* description) {
    std::string text;
    std::vector<L1Function> points;
    switch (config.profile_grid.kind) {
        case ProfileGrid::Kind::None:
            break;
        case ProfileGrid::Kind::Uniform: {
            std::ostringstream desc;
            desc << "multiples of 1/" << config.profile_grid.denominator << " in [0,1]";
            text = desc.str();
            points = scalar_grid(config.space, config.profile_grid.denominator);
            break;
        }
        case ProfileGrid::Kind::Explicit:
            text = std::to_string(config.profile_grid.points.size()) + " explicit points";
            for (const L1Function& p : config.profile_grid.points) {
                require_on_space(p, config.space, "profile_grid.points");
            }
            points = config.profile_grid.points;
            break;
        case ProfileGrid::Kind::Sampled: {
            text = std::to_string(config.profile_grid.sample_count) + " seeded samples";
            Sampler sampler(config.space, config.set, derive_seed(config.seed, 2));
            points.reserve(config.profile_grid.sample_count);
            for (std::size_t i = 0; i < config.profile_grid.sample_count; ++i) {
                points.push_back(sampler.draw());
            }
            break;
        }
    }
    if (description) *description = text;
    return points;
}

RunReport run_scenario(const ScenarioConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();

    RunReport report;
    report.scenario = config.name;
    validate_feasible_set(config.set, config.space);
    const Operator pipeline = build_pipeline(config);
    report.pipeline = pipeline.describe();
    const L1Function start = resolve_initial(config);

    const std::vector<OperatorSpec> stages = pipeline_stages(config.pipeline);
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const Operator stage_op = build_operator(stages[i], config.space, config.set);
        Sampler sampler(config.space, config.set, derive_seed(config.seed, 100 + i));
        StageDiagnostics diag;
        diag.stage = stages[i].kind_name();
        diag.nonexpansive =
            check_nonexpansive(stage_op, sampler, config.diagnostic_samples, config.metric);
        diag.idempotent = check_idempotent(stage_op, sampler.derive(1), config.diagnostic_samples);
        diag.deviation = max_deviation(stage_op, sampler.derive(2), config.diagnostic_samples);
        report.diagnostics.push_back(std::move(diag));
    }

    report.trace = iterate_orbit(pipeline, start, config.max_steps, config.stop);

    std::string grid_description;
    const std::vector<L1Function> grid = profile_points(config, &grid_description);
    if (!grid.empty()) {
        report.profile = displacement_profile(pipeline, config.metric, grid, grid_description);
    }

    if (config.geometry) {
        std::vector<L1Function> distinct;
        std::set<L1Function> seen;
        for (const L1Function& p : report.trace.points) {
            if (seen.insert(p).second) distinct.push_back(p);
        }
        report.geometry = chebyshev_estimate(distinct, config.space);
    }

    if (config.expected) {
        evaluate_expected(config, pipeline, start, grid, report);
    }
    report.expected_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                       [](const CheckResult& c) { return c.pass; });

    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return report;
}

AfppTrialReport afpp_trial(const ScenarioConfig& config, std::size_t trials) {
    if (trials == 0) throw DomainError("afpp_trial: need at least one trial");

    AfppTrialReport report;
    report.trials = trials;

    const std::vector<OperatorSpec> stages = pipeline_stages(config.pipeline);
    std::size_t perturbation_count = 0;
    for (const OperatorSpec& stage : stages) {
        if (std::holds_alternative<PerturbationSpec>(stage.kind)) ++perturbation_count;
    }
    if (perturbation_count != 1 ||
        !std::holds_alternative<PerturbationSpec>(stages.back().kind)) {
        throw ConfigError(
            "afpp_trial: pipeline must end in exactly one perturbation stage");
    }
    report.delta = std::get<PerturbationSpec>(stages.back().kind).delta;

    CompositeSpec unperturbed;
    unperturbed.stages.assign(stages.begin(), stages.end() - 1);
    const Operator phi =
        build_operator(OperatorSpec{std::move(unperturbed)}, config.space, config.set);

    const L1Function start = resolve_initial(config);
    const OrbitTrace trace = iterate_orbit(phi, start, config.max_steps);
    if (!trace.period || *trace.period != 1) {
        report.precondition_failure =
            "unperturbed pipeline has no fixed point within budget " +
            std::to_string(config.max_steps) +
            (trace.period ? " (entered a period-" + std::to_string(*trace.period) + " cycle)"
                          : "");
        return report;
    }
    report.fixed_point = trace.points[*trace.preperiod];
    if (phi.apply(report.fixed_point) != report.fixed_point) {
        report.precondition_failure = "detected point is not fixed under direct application";
        return report;
    }

    report.max_displacement = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t trial_seed = derive_seed(config.seed, i);
        OperatorSpec perturbed = config.pipeline;
        set_perturbation_seeds(perturbed, trial_seed);
        const Operator phi_hat = build_operator(perturbed, config.space, config.set);
        const Rational displacement =
            l1_distance(phi_hat.apply(report.fixed_point), report.fixed_point, config.space);
        if (i == 0 || displacement > report.max_displacement) {
            report.max_displacement = displacement;
            report.worst_seed = trial_seed;
        }
        if (displacement > report.delta) ++report.violations;
    }
    report.pass = report.violations == 0;
    return report;
}

std::size_t substitute_parameter(OperatorSpec& spec, const std::string& parameter,
                                 const Rational& value) {
    if (parameter != "d" && parameter != "step" && parameter != "delta") {
        throw ConfigError("unknown sweep parameter '" + parameter +
                          "' (expected d, step or delta)");
    }
    struct Visitor {
        const std::string& parameter;
        const Rational& value;

        std::size_t operator()(TranslationSpec& t) const {
            if (parameter != "d") return 0;
            t.distance = value;
            return 1;
        }
        std::size_t operator()(GridQuantizerSpec& g) const {
            if (parameter != "step") return 0;
            g.step = value;
            return 1;
        }
        std::size_t operator()(PerturbationSpec& p) const {
            if (parameter != "delta") return 0;
            p.delta = value;
            return 1;
        }
        std::size_t operator()(CompositeSpec& c) const {
            std::size_t count = 0;
            for (OperatorSpec& stage : c.stages) {
                count += substitute_parameter(stage, parameter, value);
            }
            return count;
        }
        std::size_t operator()(AveragingSpec&) const { return 0; }
        std::size_t operator()(ClipSpec&) const { return 0; }
        std::size_t operator()(CondExpSpec&) const { return 0; }
    };
    return std::visit(Visitor{parameter, value}, spec.kind);
}

// --- Report serialization ----------------------------------------------------

namespace {

json diagnostic_to_json(const DiagnosticReport& d) {
    json out;
    out["property"] = d.property;
    out["samples_used"] = d.samples_used;
    out["zero_distance_skipped"] = d.zero_distance_skipped;
    out["worst_ratio"] = d.worst_ratio ? json(format_rational(*d.worst_ratio)) : json(nullptr);
    if (d.worst_pair) {
        out["worst_pair"] =
            json::array({values_to_json(d.worst_pair->first), values_to_json(d.worst_pair->second)});
    }
    out["max_deviation"] = format_rational(d.max_deviation);
    if (d.witness) out["witness"] = values_to_json(*d.witness);
    out["pass"] = d.pass;
    return out;
}

} // namespace

std::string report_to_json_text(const RunReport& report) {
    json out;
    out["scenario"] = report.scenario;
    out["pipeline"] = report.pipeline;

    json orbit;
    json points = json::array();
    for (const L1Function& p : report.trace.points) points.push_back(values_to_json(p));
    orbit["points"] = points;
    json displacements = json::array();
    for (const Rational& d : report.trace.displacements) {
        displacements.push_back(format_rational(d));
    }
    orbit["displacements"] = displacements;
    orbit["preperiod"] = report.trace.preperiod ? json(*report.trace.preperiod) : json(nullptr);
    orbit["period"] = report.trace.period ? json(*report.trace.period) : json(nullptr);
    orbit["budget"] = report.trace.budget;
    orbit["stopped_by_displacement"] = report.trace.stopped_by_displacement;
    out["orbit"] = orbit;

    json diagnostics = json::array();
    for (const StageDiagnostics& d : report.diagnostics) {
        json stage;
        stage["stage"] = d.stage;
        stage["nonexpansive"] = diagnostic_to_json(d.nonexpansive);
        stage["idempotent"] = diagnostic_to_json(d.idempotent);
        stage["deviation"] = diagnostic_to_json(d.deviation);
        diagnostics.push_back(stage);
    }
    out["diagnostics"] = diagnostics;

    if (report.profile) {
        json profile;
        profile["metric"] = metric_name(report.profile->metric);
        profile["grid"] = report.profile->grid_description;
        profile["min"] = format_rational(report.profile->min_value);
        profile["min_witness"] = values_to_json(report.profile->min_witness);
        profile["max"] = format_rational(report.profile->max_value);
        profile["max_witness"] = values_to_json(report.profile->max_witness);
        profile["histogram"] = report.profile->histogram;
        profile["evaluations"] = report.profile->evaluations;
        out["profile"] = profile;
    }

    if (report.geometry) {
        json geometry;
        geometry["point_count"] = report.geometry->point_count;
        geometry["diameter"] = format_rational(report.geometry->diameter);
        geometry["diameter_witness"] = json::array(
            {report.geometry->diameter_witness.first, report.geometry->diameter_witness.second});
        geometry["radius_estimate"] = format_rational(report.geometry->radius_estimate);
        geometry["center_candidate"] = values_to_json(report.geometry->center_candidate);
        geometry["ratio"] =
            report.geometry->ratio ? json(format_rational(*report.geometry->ratio)) : json(nullptr);
        geometry["diametral_flag"] = report.geometry->diametral_flag;
        out["geometry"] = geometry;
    }

    if (report.afpp) {
        json afpp;
        afpp["trials"] = report.afpp->trials;
        afpp["delta"] = format_rational(report.afpp->delta);
        afpp["max_displacement"] = format_rational(report.afpp->max_displacement);
        afpp["worst_seed"] = report.afpp->worst_seed;
        afpp["fixed_point"] = values_to_json(report.afpp->fixed_point);
        afpp["violations"] = report.afpp->violations;
        if (report.afpp->precondition_failure) {
            afpp["precondition_failure"] = *report.afpp->precondition_failure;
        }
        afpp["pass"] = report.afpp->pass;
        out["afpp"] = afpp;
    }

    json checks = json::array();
    for (const CheckResult& c : report.checks) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    out["checks"] = checks;
    out["expected_pass"] = report.expected_pass;

    return out.dump(2) + "\n";
}

std::string operator_spec_to_json_text(const OperatorSpec& spec) {
    return spec_to_json(spec).dump(2) + "\n";
}

// --- Built-in paper cases -----------------------------------------------------

namespace {

Rational rat(const char* text) { return parse_rational(text); }

L1Function fn(std::initializer_list<const char*> values) {
    L1Function out;
    for (const char* v : values) out.push_back(rat(v));
    return out;
}

OperatorSpec quantized_translation_pipeline(const char* d) {
    return {CompositeSpec{{OperatorSpec{TranslationSpec{rat(d)}},
                           OperatorSpec{GridQuantizerSpec{rat("1/10")}}}}};
}

OperatorSpec hitl_pipeline(OperatorSpec coarsener) {
    return {CompositeSpec{{OperatorSpec{AveragingSpec{}},
                           OperatorSpec{ClipSpec{rat("0"), rat("1")}}, std::move(coarsener)}}};
}

ScenarioConfig scalar_base(const std::string& name, std::uint64_t seed) {
    ScenarioConfig config;
    config.name = name;
    config.space = MeasureSpace::counting(1);
    config.set = FeasibleSetSpec{rat("0"), rat("1"), std::nullopt};
    config.initial.values = fn({"0"});
    config.max_steps = 64;
    config.seed = seed;
    return config;
}

ScenarioConfig case_table1_orbit() {
    ScenarioConfig config = scalar_base("table1-orbit", 1);
    config.pipeline = quantized_translation_pipeline("3/5");
    config.metric = Metric::Line;
    config.geometry = true;
    ExpectedResults expected;
    expected.orbit_prefix =
        std::vector<L1Function>{fn({"0"}), fn({"0.6"}), fn({"0.2"}), fn({"0.8"}),
                                fn({"0.4"}), fn({"0"})};
    expected.preperiod = 0;
    expected.period = 5;
    config.expected = expected;
    return config;
}

ScenarioConfig case_translation_thresholds() {
    ScenarioConfig config = scalar_base("translation-thresholds", 1);
    config.pipeline = quantized_translation_pipeline("3/5");
    config.metric = Metric::Line;
    config.profile_grid.kind = ProfileGrid::Kind::Explicit;
    config.profile_grid.points = {fn({"0.25"}), fn({"0.35"})};
    ExpectedResults expected;
    expected.displacement_min = rat("0.55");
    expected.displacement_min_witness = fn({"0.25"});
    expected.displacement_max = rat("0.65");
    expected.displacement_max_witness = fn({"0.35"});
    config.expected = expected;
    return config;
}

ScenarioConfig case_translation_circle_bounds() {
    ScenarioConfig config = scalar_base("translation-circle-bounds", 1);
    config.pipeline = quantized_translation_pipeline("3/5");
    config.metric = Metric::Circle;
    config.profile_grid.kind = ProfileGrid::Kind::Uniform;
    config.profile_grid.denominator = 100;
    ExpectedResults expected;
    expected.displacement_min = rat("0.35");
    expected.displacement_max = rat("0.45");
    expected.eps_search = {{rat("0.3"), false}, {rat("0.4"), true}};
    config.expected = expected;
    return config;
}

ScenarioConfig case_hitl_two_point() {
    ScenarioConfig config;
    config.name = "hitl-two-point";
    config.space = MeasureSpace::counting(2);
    config.set = FeasibleSetSpec{rat("0"), rat("1"), rat("1")};
    config.pipeline = hitl_pipeline(OperatorSpec{GridQuantizerSpec{rat("1/10")}});
    config.initial.values = fn({"0.8", "0.2"});
    config.metric = Metric::L1;
    config.max_steps = 16;
    config.seed = 7;
    ExpectedResults expected;
    expected.orbit_prefix = std::vector<L1Function>{fn({"0.8", "0.2"}), fn({"0.5", "0.5"})};
    expected.preperiod = 1;
    expected.period = 1;
    expected.fixed_point = fn({"0.5", "0.5"});
    config.expected = expected;
    return config;
}

ScenarioConfig case_hitl_four_point() {
    ScenarioConfig config;
    config.name = "hitl-four-point";
    config.space = MeasureSpace::counting(4);
    config.set = FeasibleSetSpec{rat("0"), rat("1"), rat("2")};
    config.pipeline = hitl_pipeline(OperatorSpec{GridQuantizerSpec{rat("1/10")}});
    config.initial.random = true;
    config.metric = Metric::L1;
    config.max_steps = 16;
    config.seed = 2024;
    ExpectedResults expected;
    expected.stabilizes_within = 5;
    config.expected = expected;
    return config;
}

ScenarioConfig case_ce_four_point() {
    ScenarioConfig config;
    config.name = "ce-four-point";
    config.space = MeasureSpace::counting(4);
    config.set = FeasibleSetSpec{rat("0"), rat("1"), rat("2")};
    config.pipeline = hitl_pipeline(OperatorSpec{CondExpSpec{{{0, 1}, {2, 3}}}});
    config.initial.random = true;
    config.metric = Metric::L1;
    config.max_steps = 16;
    config.seed = 5;
    ExpectedResults expected;
    expected.period = 1;
    expected.stabilizes_within = 5;
    expected.fixed_point = fn({"1/2", "1/2", "1/2", "1/2"});
    config.expected = expected;
    return config;
}

ScenarioConfig case_afpp_perturbation() {
    ScenarioConfig config;
    config.name = "afpp-perturbation";
    config.space = MeasureSpace::counting(2);
    config.set = FeasibleSetSpec{rat("0"), rat("1"), rat("1")};
    config.pipeline = {CompositeSpec{{OperatorSpec{AveragingSpec{}},
                                      OperatorSpec{ClipSpec{rat("0"), rat("1")}},
                                      OperatorSpec{GridQuantizerSpec{rat("1/10")}},
                                      OperatorSpec{PerturbationSpec{rat("0.05"), 0}}}}};
    config.initial.values = fn({"0.8", "0.2"});
    config.metric = Metric::L1;
    config.max_steps = 32;
    config.seed = 99;
    ExpectedResults expected;
    expected.afpp = AfppExpectation{1000, rat("0.05")};
    config.expected = expected;
    return config;
}

ScenarioConfig case_rational_rotation() {
    ScenarioConfig config = scalar_base("rational-rotation", 3);
    config.pipeline = {TranslationSpec{rat("3/10")}};
    config.metric = Metric::Circle;
    ExpectedResults expected;
    expected.preperiod = 0;
    expected.period = 10;
    expected.rotation_periods = {{3, 10, 10}, {1, 2, 2}, {3, 1000, 1000}};
    config.expected = expected;
    return config;
}

ScenarioConfig case_pigeonhole_bound() {
    ScenarioConfig config = scalar_base("pigeonhole-bound", 4);
    config.pipeline = quantized_translation_pipeline("1/10");
    config.metric = Metric::Line;
    ExpectedResults expected;
    expected.preperiod = 0;
    expected.period = 10;
    PigeonholeExpectation pigeonhole;
    for (int k = 1; k <= 9; ++k) {
        pigeonhole.translation_distances.push_back(Rational(k, 10));
    }
    pigeonhole.max_entry_steps = 12;
    expected.pigeonhole = pigeonhole;
    config.expected = expected;
    return config;
}

} // namespace

const std::vector<std::string>& paper_case_names() {
    static const std::vector<std::string> names = {
        "table1-orbit",       "translation-thresholds", "translation-circle-bounds",
        "hitl-two-point",     "hitl-four-point",        "ce-four-point",
        "afpp-perturbation",  "rational-rotation",      "pigeonhole-bound",
    };
    return names;
}

ScenarioConfig paper_case(const std::string& name) {
    if (name == "table1-orbit") return case_table1_orbit();
    if (name == "translation-thresholds") return case_translation_thresholds();
    if (name == "translation-circle-bounds") return case_translation_circle_bounds();
    if (name == "hitl-two-point") return case_hitl_two_point();
    if (name == "hitl-four-point") return case_hitl_four_point();
    if (name == "ce-four-point") return case_ce_four_point();
    if (name == "afpp-perturbation") return case_afpp_perturbation();
    if (name == "rational-rotation") return case_rational_rotation();
    if (name == "pigeonhole-bound") return case_pigeonhole_bound();
    std::string known;
    for (const std::string& candidate : paper_case_names()) {
        if (!known.empty()) known += ", ";
        known += candidate;
    }
    throw ConfigError("unknown case '" + name + "' (known cases: " + known + ")");
}

} // namespace l1lab
