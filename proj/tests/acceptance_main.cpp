// Acceptance suite: every published number the library promises to
// reproduce, checked end to end at its stated (zero) tolerance.
// Prints one PASS/FAIL line per criterion; exits nonzero on any failure.

#include "l1lab/cli.hpp"
#include "l1lab/dynamics.hpp"
#include "l1lab/geometry.hpp"
#include "l1lab/scenario.hpp"

#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <vector>

using namespace l1lab;

namespace {

Rational rat(const char* text) { return parse_rational(text); }

L1Function fn(std::initializer_list<const char*> values) {
    L1Function out;
    for (const char* v : values) out.push_back(rat(v));
    return out;
}

const FeasibleSetSpec kUnitBox{Rational(0), Rational(1), std::nullopt};

Operator section3_pipeline(const MeasureSpace& scalar) {
    return build_operator(
        {CompositeSpec{{OperatorSpec{TranslationSpec{rat("0.6")}},
                        OperatorSpec{GridQuantizerSpec{rat("1/10")}}}}},
        scalar);
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome criterion_table1() {
    const RunReport report = run_scenario(paper_case("table1-orbit"));
    const std::vector<L1Function> expected = {fn({"0"}),   fn({"0.6"}), fn({"0.2"}),
                                              fn({"0.8"}), fn({"0.4"}), fn({"0"})};
    const bool orbit_ok = report.trace.points == expected;
    const bool cycle_ok = report.trace.preperiod == 0 && report.trace.period == 5;
    const bool cli_ok = cli::dispatch({"verify-paper", "--case", "table1-orbit"}) == 0;
    std::ostringstream detail;
    detail << "orbit 0,0.6,0.2,0.8,0.4,0 " << (orbit_ok ? "reproduced" : "WRONG")
           << "; preperiod/period "
           << (report.trace.preperiod ? std::to_string(*report.trace.preperiod) : "?") << "/"
           << (report.trace.period ? std::to_string(*report.trace.period) : "?")
           << "; verify-paper exit " << (cli_ok ? "0" : "nonzero");
    return {orbit_ok && cycle_ok && cli_ok && report.expected_pass, detail.str()};
}

Outcome criterion_line_thresholds() {
    const MeasureSpace scalar = MeasureSpace::counting(1);
    const Operator op = section3_pipeline(scalar);
    const Rational at25 = abs(op.apply(fn({"0.25"}))[0] - rat("0.25"));
    const Rational at35 = abs(op.apply(fn({"0.35"}))[0] - rat("0.35"));
    const bool registry_ok = run_scenario(paper_case("translation-thresholds")).expected_pass;
    std::ostringstream detail;
    detail << "|T(0.25)-0.25| = " << format_rational(at25) << ", |T(0.35)-0.35| = "
           << format_rational(at35);
    return {at25 == rat("0.55") && at35 == rat("0.65") && registry_ok, detail.str()};
}

Outcome criterion_circle_bounds() {
    const MeasureSpace scalar = MeasureSpace::counting(1);
    const Operator op = section3_pipeline(scalar);
    const std::vector<L1Function> grid = scalar_grid(scalar, 100);
    const DisplacementProfile profile = displacement_profile(op, Metric::Circle, grid);
    const bool extrema_ok = profile.min_value == rat("0.35") && profile.max_value == rat("0.45");
    const bool none_ok =
        !epsilon_fixed_point_search(op, Metric::Circle, rat("0.3"), grid).has_value();
    const auto witness = epsilon_fixed_point_search(op, Metric::Circle, rat("0.4"), grid);
    const bool found_ok =
        witness && circle_distance(op.apply(*witness)[0], (*witness)[0]) < rat("0.4");
    std::ostringstream detail;
    detail << "min " << format_rational(profile.min_value) << ", max "
           << format_rational(profile.max_value) << "; eps 0.3 "
           << (none_ok ? "none" : "FOUND") << ", eps 0.4 "
           << (witness ? "found at " + format_rational((*witness)[0]) : "NONE");
    return {extrema_ok && none_ok && found_ok, detail.str()};
}

Outcome criterion_hitl_stabilization() {
    const RunReport two_point = run_scenario(paper_case("hitl-two-point"));
    const bool two_ok = two_point.expected_pass &&
                        two_point.trace.points.size() >= 2 &&
                        two_point.trace.points[1] == fn({"0.5", "0.5"}) &&
                        two_point.trace.preperiod == 1 && two_point.trace.period == 1;

    std::size_t stabilized = 0;
    const Rational step(1, 10);
    for (std::uint64_t s = 1; s <= 100; ++s) {
        ScenarioConfig config = paper_case("hitl-four-point");
        config.seed = s;
        const Operator phi = build_pipeline(config);
        const OrbitTrace trace = iterate_orbit(phi, resolve_initial(config), config.max_steps);
        if (!(trace.period == 1 && trace.preperiod && *trace.preperiod <= 5)) continue;
        const L1Function& consensus = trace.final_point();
        bool constant_on_grid = true;
        for (const Rational& v : consensus) {
            if (v != consensus[0] || round_half_even(v, step) != v) constant_on_grid = false;
        }
        if (constant_on_grid) ++stabilized;
    }
    std::ostringstream detail;
    detail << "(0.8,0.2) -> (0.5,0.5) in one step "
           << (two_ok ? "confirmed" : "FAILED") << "; 4-atom consensus within 5 steps for "
           << stabilized << "/100 seeds";
    return {two_ok && stabilized == 100, detail.str()};
}

Outcome criterion_ce_fixed_point() {
    const ScenarioConfig base = paper_case("ce-four-point");
    const Operator phi = build_pipeline(base);
    const L1Function fstar = fn({"1/2", "1/2", "1/2", "1/2"});
    const bool direct_ok = phi.apply(fstar) == fstar;

    std::size_t converged = 0;
    for (std::uint64_t s = 1; s <= 50; ++s) {
        ScenarioConfig config = base;
        config.seed = s;
        const OrbitTrace trace =
            iterate_orbit(build_pipeline(config), resolve_initial(config), config.max_steps);
        if (trace.period == 1 && trace.final_point() == fstar) ++converged;
    }
    const bool registry_ok = run_scenario(base).expected_pass;
    std::ostringstream detail;
    detail << "Phi(1/2,1/2,1/2,1/2) " << (direct_ok ? "fixed exactly" : "NOT fixed") << "; "
           << converged << "/50 seeded starts converge";
    return {direct_ok && converged == 50 && registry_ok, detail.str()};
}

Outcome criterion_afpp_bound() {
    bool all_ok = true;
    std::ostringstream detail;
    for (const char* delta : {"0.05", "0.1"}) {
        // Grid-quantizer coarsener on the two-point space.
        ScenarioConfig grid_config = paper_case("afpp-perturbation");
        substitute_parameter(grid_config.pipeline, "delta", rat(delta));
        const AfppTrialReport grid_trial = afpp_trial(grid_config, 1000);

        // Conditional-expectation coarsener on the four-point space.
        ScenarioConfig ce_config = paper_case("ce-four-point");
        auto& stages = std::get<CompositeSpec>(ce_config.pipeline.kind).stages;
        stages.push_back(OperatorSpec{PerturbationSpec{rat(delta), 0}});
        ce_config.seed = 77;
        const AfppTrialReport ce_trial = afpp_trial(ce_config, 1000);

        const bool ok = grid_trial.pass && grid_trial.max_displacement <= rat(delta) &&
                        ce_trial.pass && ce_trial.max_displacement <= rat(delta) &&
                        !grid_trial.precondition_failure && !ce_trial.precondition_failure;
        all_ok = all_ok && ok;
        detail << "delta=" << delta << ": grid max "
               << format_rational(grid_trial.max_displacement) << ", cond_exp max "
               << format_rational(ce_trial.max_displacement) << "; ";
    }
    detail << "1000 seeds each";
    return {all_ok, detail.str()};
}

Outcome criterion_operator_suites() {
    const MeasureSpace four = MeasureSpace::counting(4);
    const Operator ce = build_operator({CondExpSpec{{{0, 1}, {2, 3}}}}, four);

    const DiagnosticReport ce_nonexp = check_nonexpansive(ce, Sampler(four, kUnitBox, 301), 1000);
    const DiagnosticReport ce_idem = check_idempotent(ce, Sampler(four, kUnitBox, 302), 1000);

    bool linear_ok = true;
    bool mass_ok = true;
    {
        Sampler sampler(four, kUnitBox, 303);
        SplitMix64 gen(304);
        for (int i = 0; i < 1000; ++i) {
            const L1Function f = sampler.draw();
            const L1Function g = sampler.draw();
            const Rational a(static_cast<std::int64_t>(gen.next() % 19) - 9, 5);
            const Rational b(static_cast<std::int64_t>(gen.next() % 19) - 9, 4);
            L1Function combo(4);
            const L1Function qf = ce.apply(f);
            const L1Function qg = ce.apply(g);
            L1Function expect(4);
            for (std::size_t k = 0; k < 4; ++k) {
                combo[k] = a * f[k] + b * g[k];
                expect[k] = a * qf[k] + b * qg[k];
            }
            if (ce.apply(combo) != expect) linear_ok = false;
            if (l1_norm(qf, four) != l1_norm(f, four)) mass_ok = false; // f >= 0 here
        }
    }

    const MeasureSpace scalar = MeasureSpace::counting(1);
    const Operator quantizer = build_operator({GridQuantizerSpec{rat("0.1")}}, scalar);
    const DiagnosticReport q_idem = check_idempotent(quantizer, Sampler(scalar, kUnitBox, 305), 1000);
    const DiagnosticReport q_dev =
        max_deviation(quantizer, Sampler(scalar, kUnitBox, 306), 1000,
                      scalar_grid(scalar, 200), rat("0.05"));
    const std::vector<std::pair<L1Function, L1Function>> witness = {{fn({"0.54"}), fn({"0.56"})}};
    const DiagnosticReport q_nonexp =
        check_nonexpansive(quantizer, Sampler(scalar, kUnitBox, 307), 1000, Metric::L1, witness);
    const Rational witness_ratio =
        l1_distance(quantizer.apply(fn({"0.54"})), quantizer.apply(fn({"0.56"})), scalar) /
        l1_distance(fn({"0.54"}), fn({"0.56"}), scalar);

    const bool pass = ce_nonexp.pass && ce_idem.pass && linear_ok && mass_ok && q_idem.pass &&
                      q_dev.pass && q_dev.max_deviation == rat("0.05") && !q_nonexp.pass &&
                      witness_ratio == Rational(5);
    std::ostringstream detail;
    detail << "cond_exp: ratio <= 1 " << (ce_nonexp.pass ? "ok" : "FAIL") << ", idempotent "
           << (ce_idem.pass ? "ok" : "FAIL") << ", linear " << (linear_ok ? "ok" : "FAIL")
           << ", mass " << (mass_ok ? "ok" : "FAIL")
           << "; quantizer: idempotent " << (q_idem.pass ? "ok" : "FAIL") << ", deviation "
           << format_rational(q_dev.max_deviation) << ", nonexpansiveness "
           << (!q_nonexp.pass ? "fails" : "UNEXPECTEDLY PASSES") << " (witness ratio "
           << format_rational(witness_ratio) << ")";
    return {pass, detail.str()};
}

Outcome criterion_almost_nonexpansive() {
    const MeasureSpace scalar = MeasureSpace::counting(1);
    const Operator t = build_operator({TranslationSpec{rat("0.6")}}, scalar);
    const Operator q = build_operator({GridQuantizerSpec{rat("0.1")}}, scalar);

    std::vector<std::pair<L1Function, L1Function>> grid_pairs;
    const std::vector<L1Function> grid = scalar_grid(scalar, 50);
    for (const L1Function& x : grid) {
        for (const L1Function& y : grid) grid_pairs.push_back({x, y});
    }
    const DiagnosticReport report =
        perturbation_estimate(t, q, rat("0.05"), Sampler(scalar, kUnitBox, 401), 500,
                              Metric::Circle, grid_pairs);
    std::ostringstream detail;
    detail << "largest circle-distance increase " << format_rational(report.max_deviation)
           << " <= 2*delta = 0.1 over " << report.samples_used << " pairs (500 seeded + "
           << grid_pairs.size() << " grid)";
    return {report.pass && report.max_deviation <= rat("0.1"), detail.str()};
}

Outcome criterion_pigeonhole() {
    const MeasureSpace scalar = MeasureSpace::counting(1);
    std::size_t worst = 0;
    bool all_ok = true;
    for (int k = 1; k <= 9; ++k) {
        const Operator op = build_operator(
            {CompositeSpec{{OperatorSpec{TranslationSpec{Rational(k, 10)}},
                            OperatorSpec{GridQuantizerSpec{rat("1/10")}}}}},
            scalar);
        const auto cycle = detect_cycle(op, fn({"0"}), 64);
        if (!cycle) {
            all_ok = false;
            break;
        }
        worst = std::max(worst, cycle->preperiod + cycle->period);
    }
    const bool registry_ok = run_scenario(paper_case("pigeonhole-bound")).expected_pass;
    std::ostringstream detail;
    detail << "worst preperiod+period " << worst << " <= 12 over d in {0.1,...,0.9}";
    return {all_ok && worst <= 12 && registry_ok, detail.str()};
}

Outcome criterion_rotation_periods() {
    const auto r1 = rotation_period(3, 10, 10000);
    const auto r2 = rotation_period(1, 2, 10000);
    const auto r3 = rotation_period(3, 1000, 10000);
    const bool pass = r1 == 10 && r2 == 2 && r3 == 1000;
    std::ostringstream detail;
    detail << "3/10 -> " << (r1 ? std::to_string(*r1) : "none") << ", 1/2 -> "
           << (r2 ? std::to_string(*r2) : "none") << ", 3/1000 -> "
           << (r3 ? std::to_string(*r3) : "none");
    return {pass, detail.str()};
}

Outcome criterion_geometry() {
    const MeasureSpace three = MeasureSpace::counting(3);
    const std::vector<L1Function> basis = {fn({"1", "0", "0"}), fn({"0", "1", "0"}),
                                           fn({"0", "0", "1"})};
    const GeometryReport equilateral = chebyshev_estimate(basis, three);
    const bool fixture_ok = equilateral.diameter == Rational(2) &&
                            equilateral.radius_estimate == Rational(4, 3) &&
                            equilateral.ratio == Rational(2, 3);

    std::size_t bounded = 0;
    for (std::uint64_t round = 0; round < 200; ++round) {
        SplitMix64 gen(derive_seed(505, round));
        const std::size_t dims = 1 + gen.next() % 4;
        const std::size_t count = 2 + gen.next() % 6;
        const MeasureSpace space = MeasureSpace::counting(dims);
        std::vector<L1Function> points;
        for (std::size_t i = 0; i < count; ++i) {
            L1Function p(dims);
            for (Rational& v : p) v = Rational(gen.next() % 1001, 1000);
            points.push_back(std::move(p));
        }
        const GeometryReport report = chebyshev_estimate(points, space);
        if (report.radius_estimate * 2 >= report.diameter &&
            report.radius_estimate <= report.diameter) {
            ++bounded;
        }
    }
    std::ostringstream detail;
    detail << "equilateral: diameter " << format_rational(equilateral.diameter) << ", radius "
           << format_rational(equilateral.radius_estimate) << ", ratio "
           << (equilateral.ratio ? format_rational(*equilateral.ratio) : "?") << "; bounds hold on "
           << bounded << "/200 random sets";
    return {fixture_ok && bounded == 200, detail.str()};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* label;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "Table 1 orbit reproduction", criterion_table1},
        {2, "line-metric displacement thresholds 0.55 / 0.65", criterion_line_thresholds},
        {3, "circle-metric uniform bounds and eps search", criterion_circle_bounds},
        {4, "HITL stabilization (2-atom exact, 4-atom over 100 seeds)", criterion_hitl_stabilization},
        {5, "conditional-expectation fixed point (alpha/4 vector)", criterion_ce_fixed_point},
        {6, "AFPP bound over 1000 seeds, both coarseners", criterion_afpp_bound},
        {7, "operator property suites (cond_exp, grid quantizer)", criterion_operator_suites},
        {8, "almost-nonexpansiveness up to 2*delta", criterion_almost_nonexpansive},
        {9, "pigeonhole cycle-entry bound", criterion_pigeonhole},
        {10, "rational rotation periods", criterion_rotation_periods},
        {11, "geometry diagnostics (diameter, Chebyshev estimate)", criterion_geometry},
    };

    std::cout << "==========================================================\n";
    std::cout << "Acceptance suite: " << criteria.size() << " criteria\n";
    std::cout << "==========================================================\n";

    int failed = 0;
    for (const Criterion& criterion : criteria) {
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failed;
        std::cout << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id << ": "
                  << criterion.label << "\n        " << outcome.detail << "\n";
    }

    std::cout << "==========================================================\n";
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
