#include "l1lab/operators.hpp"
#include "l1lab/errors.hpp"

#include <algorithm>
#include <sstream>

namespace l1lab {

namespace {

Rational clamp(const Rational& v, const Rational& lo, const Rational& hi) {
    if (v < lo) return lo;
    if (v > hi) return hi;
    return v;
}

} // namespace

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

struct Operator::Stage {
    struct Translation {
        Rational distance;
    };
    struct Averaging {};
    struct Clip {
        Rational lower;
        Rational upper;
    };
    struct CondExp {
        std::vector<std::vector<std::size_t>> blocks;
        std::vector<Rational> block_masses;
    };
    struct Grid {
        Rational step;
    };
    struct Perturb {
        Rational delta;
        std::uint64_t seed;
        std::optional<FeasibleSetSpec> bounds;
    };

    std::variant<Translation, Averaging, Clip, CondExp, Grid, Perturb> op;
    std::string name;
};

namespace {

using Stage = Operator::Stage;

void apply_stage(const Stage& stage, const MeasureSpace& space, L1Function& f) {
    struct Visitor {
        const MeasureSpace& space;
        L1Function& f;

        void operator()(const Stage::Translation& t) const {
            f[0] = mod_one(f[0] + t.distance);
        }

        void operator()(const Stage::Averaging&) const {
            Rational total = 0;
            for (std::size_t i = 0; i < f.size(); ++i) {
                total += space.atom(i).weight * f[i];
            }
            const Rational mean = total / space.total_mass();
            std::fill(f.begin(), f.end(), mean);
        }

        void operator()(const Stage::Clip& c) const {
            for (Rational& v : f) v = clamp(v, c.lower, c.upper);
        }

        void operator()(const Stage::CondExp& ce) const {
            for (std::size_t b = 0; b < ce.blocks.size(); ++b) {
                Rational total = 0;
                for (std::size_t i : ce.blocks[b]) {
                    total += space.atom(i).weight * f[i];
                }
                const Rational average = total / ce.block_masses[b];
                for (std::size_t i : ce.blocks[b]) f[i] = average;
            }
        }

        void operator()(const Stage::Grid& g) const {
            for (Rational& v : f) v = round_half_even(v, g.step);
        }

        void operator()(const Stage::Perturb& p) const {
            if (p.delta == 0) return;

            std::uint64_t digest = p.seed;
            for (const Rational& v : f) digest = mix_rational(digest, v);
            SplitMix64 gen(digest);

            std::vector<Rational> direction(f.size());
            bool all_zero = true;
            for (Rational& d : direction) {
                const std::int64_t k = static_cast<std::int64_t>(gen.next_below(2000)) - 1000;
                d = Rational(k, 1000);
                if (k != 0) all_zero = false;
            }
            if (all_zero) direction[0] = 1;

            Rational norm = 0;
            for (std::size_t i = 0; i < f.size(); ++i) {
                norm += space.atom(i).weight * abs(direction[i]);
            }
            const Rational scale = p.delta / norm;

            for (std::size_t i = 0; i < f.size(); ++i) {
                Rational r = scale * direction[i];
                if (p.bounds) {
                    // Shrink the step so the result stays inside the box;
                    // never grow it (so ||R||_1 <= delta is preserved even
                    // for inputs already outside the box).
                    const Rational clipped = clamp(f[i] + r, p.bounds->lower, p.bounds->upper) - f[i];
                    if (abs(clipped) <= abs(r)) r = clipped;
                }
                f[i] += r;
            }
        }
    };
    std::visit(Visitor{space, f}, stage.op);
}

void append_stages(const OperatorSpec& spec, const MeasureSpace& space,
                   const std::optional<FeasibleSetSpec>& set, std::vector<Stage>& out) {
    struct Visitor {
        const MeasureSpace& space;
        const std::optional<FeasibleSetSpec>& set;
        std::vector<Stage>& out;

        void operator()(const TranslationSpec& t) const {
            if (space.size() != 1) {
                throw ConfigError("translation requires a one-atom space, got " +
                                  std::to_string(space.size()) + " atoms");
            }
            if (t.distance <= 0 || t.distance >= 1) {
                throw ConfigError("translation distance " + format_rational(t.distance) +
                                  " outside (0,1)");
            }
            out.push_back({Stage::Translation{t.distance}, "translation"});
        }

        void operator()(const AveragingSpec&) const {
            out.push_back({Stage::Averaging{}, "averaging"});
        }

        void operator()(const ClipSpec& c) const {
            if (c.lower > c.upper) {
                throw ConfigError("clip: lower " + format_rational(c.lower) + " exceeds upper " +
                                  format_rational(c.upper));
            }
            out.push_back({Stage::Clip{c.lower, c.upper}, "clip"});
        }

        void operator()(const CondExpSpec& ce) const {
            if (ce.blocks.empty()) {
                throw ConfigError("cond_exp: empty partition");
            }
            std::vector<bool> covered(space.size(), false);
            std::vector<Rational> masses;
            for (const auto& block : ce.blocks) {
                if (block.empty()) throw ConfigError("cond_exp: empty block");
                Rational mass = 0;
                for (std::size_t i : block) {
                    if (i >= space.size()) {
                        throw ConfigError("cond_exp: atom index " + std::to_string(i) +
                                          " out of range");
                    }
                    if (covered[i]) {
                        throw ConfigError("cond_exp: atom index " + std::to_string(i) +
                                          " appears in two blocks");
                    }
                    covered[i] = true;
                    mass += space.atom(i).weight;
                }
                masses.push_back(mass);
            }
            for (std::size_t i = 0; i < covered.size(); ++i) {
                if (!covered[i]) {
                    throw ConfigError("cond_exp: atom index " + std::to_string(i) +
                                      " not covered by any block");
                }
            }
            out.push_back({Stage::CondExp{ce.blocks, std::move(masses)}, "cond_exp"});
        }

        void operator()(const GridQuantizerSpec& g) const {
            if (g.step <= 0) {
                throw ConfigError("grid_quantizer: step " + format_rational(g.step) +
                                  " must be positive");
            }
            out.push_back({Stage::Grid{g.step}, "grid_quantizer"});
        }

        void operator()(const PerturbationSpec& p) const {
            if (p.delta < 0) {
                throw ConfigError("perturbation: delta " + format_rational(p.delta) +
                                  " must be nonnegative");
            }
            out.push_back({Stage::Perturb{p.delta, p.seed, set}, "perturbation"});
        }

        void operator()(const CompositeSpec& c) const {
            for (const OperatorSpec& stage : c.stages) {
                append_stages(stage, space, set, out);
            }
        }
    };
    std::visit(Visitor{space, set, out}, spec.kind);
}

} // namespace

std::string OperatorSpec::kind_name() const {
    struct Visitor {
        std::string operator()(const TranslationSpec&) const { return "translation"; }
        std::string operator()(const AveragingSpec&) const { return "averaging"; }
        std::string operator()(const ClipSpec&) const { return "clip"; }
        std::string operator()(const CondExpSpec&) const { return "cond_exp"; }
        std::string operator()(const GridQuantizerSpec&) const { return "grid_quantizer"; }
        std::string operator()(const PerturbationSpec&) const { return "perturbation"; }
        std::string operator()(const CompositeSpec&) const { return "composite"; }
    };
    return std::visit(Visitor{}, kind);
}

Operator::Operator(OperatorSpec spec, MeasureSpace space, std::vector<Stage> stages)
    : spec_(std::move(spec)), space_(std::move(space)), stages_(std::move(stages)) {}

Operator::Operator(const Operator&) = default;
Operator::Operator(Operator&&) noexcept = default;
Operator& Operator::operator=(const Operator&) = default;
Operator& Operator::operator=(Operator&&) noexcept = default;
Operator::~Operator() = default;

std::string Operator::describe() const {
    if (stages_.empty()) return "identity";
    std::string out;
    for (const Stage& stage : stages_) {
        if (!out.empty()) out += " -> ";
        out += stage.name;
    }
    return out;
}

L1Function Operator::apply(const L1Function& f) const {
    require_on_space(f, space_, "apply");
    L1Function current = f;
    for (const Stage& stage : stages_) {
        apply_stage(stage, space_, current);
    }
    return current;
}

Operator build_operator(const OperatorSpec& spec, const MeasureSpace& space,
                        const std::optional<FeasibleSetSpec>& set) {
    std::vector<Operator::Stage> stages;
    append_stages(spec, space, set, stages);
    return Operator(spec, space, std::move(stages));
}

Operator compose(const std::vector<Operator>& ops) {
    if (ops.empty()) throw StructuralError("compose: empty operator list");
    std::vector<Operator::Stage> stages;
    CompositeSpec composite;
    for (const Operator& op : ops) {
        if (!(op.space() == ops.front().space())) {
            throw StructuralError("compose: operators live on different spaces");
        }
        composite.stages.push_back(op.spec());
        stages.insert(stages.end(), op.stages_.begin(), op.stages_.end());
    }
    return Operator(OperatorSpec{std::move(composite)}, ops.front().space(), std::move(stages));
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

Sampler::Sampler(MeasureSpace space, FeasibleSetSpec set, std::uint64_t seed, unsigned resolution)
    : space_(std::move(space)), set_(std::move(set)), seed_(seed), resolution_(resolution),
      gen_(seed) {
    if (resolution_ == 0) throw ConfigError("sampler resolution must be positive");
    validate_feasible_set(set_, space_);
}

L1Function Sampler::draw() {
    const Rational width = set_.upper - set_.lower;
    L1Function f(space_.size());
    for (Rational& v : f) {
        const std::uint64_t k = gen_.next_below(resolution_);
        v = set_.lower + width * Rational(k, resolution_);
    }
    if (set_.mass) {
        const Rational current = l1_norm(f, space_);
        if (current == 0) {
            const Rational constant = *set_.mass / space_.total_mass();
            std::fill(f.begin(), f.end(), constant);
        } else {
            // Positive scale, so the rescaled norm is exactly the mass.
            const Rational scale = *set_.mass / current;
            for (Rational& v : f) v *= scale;
        }
    }
    return f;
}

std::pair<L1Function, L1Function> Sampler::draw_pair() {
    L1Function a = draw();
    L1Function b = draw();
    return {std::move(a), std::move(b)};
}

Sampler Sampler::derive(std::uint64_t index) const {
    return Sampler(space_, set_, derive_seed(seed_, index), resolution_);
}

std::vector<L1Function> scalar_grid(const MeasureSpace& space, unsigned denominator) {
    if (space.size() != 1) {
        throw ConfigError("scalar_grid requires a one-atom space");
    }
    if (denominator == 0) throw ConfigError("scalar_grid: zero denominator");
    std::vector<L1Function> grid;
    grid.reserve(denominator + 1);
    for (unsigned k = 0; k <= denominator; ++k) {
        grid.push_back({Rational(k, denominator)});
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

std::string DiagnosticReport::summary() const {
    std::ostringstream out;
    out << property << ": " << (pass ? "pass" : "FAIL") << " (" << samples_used << " samples";
    if (zero_distance_skipped > 0) {
        out << ", " << zero_distance_skipped << " zero-distance skipped";
    }
    if (worst_ratio) {
        out << ", worst ratio " << format_rational(*worst_ratio);
    }
    if (property == "max_deviation" || property == "perturbation_estimate") {
        out << ", max " << format_rational(max_deviation);
    }
    out << ")";
    return out.str();
}

DiagnosticReport check_nonexpansive(const Operator& op, Sampler sampler, std::size_t pair_count,
                                    Metric metric,
                                    std::span<const std::pair<L1Function, L1Function>> witness_pairs) {
    if (pair_count == 0) throw DomainError("check_nonexpansive: need at least one pair");
    DiagnosticReport report;
    report.property = "nonexpansive";

    auto consider = [&](const L1Function& f, const L1Function& g) {
        const Rational before = metric_distance(metric, f, g, op.space());
        if (before == 0) {
            ++report.zero_distance_skipped;
            return;
        }
        const Rational after = metric_distance(metric, op.apply(f), op.apply(g), op.space());
        const Rational ratio = after / before;
        ++report.samples_used;
        if (!report.worst_ratio || ratio > *report.worst_ratio) {
            report.worst_ratio = ratio;
            report.worst_pair = {f, g};
        }
    };

    for (const auto& [f, g] : witness_pairs) consider(f, g);
    for (std::size_t i = 0; i < pair_count; ++i) {
        auto [f, g] = sampler.draw_pair();
        consider(f, g);
    }

    report.pass = !report.worst_ratio || *report.worst_ratio <= 1;
    return report;
}

DiagnosticReport check_idempotent(const Operator& op, Sampler sampler, std::size_t count) {
    if (count == 0) throw DomainError("check_idempotent: need at least one sample");
    DiagnosticReport report;
    report.property = "idempotent";
    report.pass = true;
    for (std::size_t i = 0; i < count; ++i) {
        const L1Function f = sampler.draw();
        const L1Function once = op.apply(f);
        const L1Function twice = op.apply(once);
        ++report.samples_used;
        if (once != twice) {
            const Rational gap = l1_distance(once, twice, op.space());
            if (report.pass || gap > report.max_deviation) {
                report.max_deviation = gap;
                report.witness = f;
            }
            report.pass = false;
        }
    }
    return report;
}

DiagnosticReport max_deviation(const Operator& op, Sampler sampler, std::size_t count,
                               std::span<const L1Function> extra_points,
                               const std::optional<Rational>& bound) {
    if (count == 0 && extra_points.empty()) {
        throw DomainError("max_deviation: need at least one sample");
    }
    DiagnosticReport report;
    report.property = "max_deviation";

    auto consider = [&](const L1Function& f) {
        const Rational deviation = l1_distance(op.apply(f), f, op.space());
        ++report.samples_used;
        if (!report.witness || deviation > report.max_deviation) {
            report.max_deviation = deviation;
            report.witness = f;
        }
    };

    for (const L1Function& f : extra_points) consider(f);
    for (std::size_t i = 0; i < count; ++i) consider(sampler.draw());

    report.pass = !bound || report.max_deviation <= *bound;
    return report;
}

DiagnosticReport perturbation_estimate(const Operator& t, const Operator& q,
                                       const Rational& delta, Sampler sampler,
                                       std::size_t pair_count, Metric metric,
                                       std::span<const std::pair<L1Function, L1Function>> extra_pairs) {
    if (!(t.space() == q.space())) {
        throw StructuralError("perturbation_estimate: t and q live on different spaces");
    }
    if (pair_count == 0 && extra_pairs.empty()) {
        throw DomainError("perturbation_estimate: need at least one pair");
    }
    DiagnosticReport report;
    report.property = "perturbation_estimate";
    const Rational allowance = 2 * delta;

    auto consider = [&](const L1Function& f, const L1Function& g) {
        const Rational before = metric_distance(metric, f, g, t.space());
        const Rational after =
            metric_distance(metric, q.apply(t.apply(f)), q.apply(t.apply(g)), t.space());
        const Rational increase = after - before;
        ++report.samples_used;
        if (!report.worst_pair || increase > report.max_deviation) {
            report.max_deviation = increase;
            report.worst_pair = {f, g};
        }
    };

    for (const auto& [f, g] : extra_pairs) consider(f, g);
    for (std::size_t i = 0; i < pair_count; ++i) {
        auto [f, g] = sampler.draw_pair();
        consider(f, g);
    }

    report.pass = report.max_deviation <= allowance;
    return report;
}

} // namespace l1lab
