#pragma once

#include "l1lab/measure.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace l1lab {

struct OperatorSpec;

/// x -> x + d (mod 1) on a one-atom space; d in (0,1). Output lies in [0,1).
struct TranslationSpec {
    Rational distance;
};

/// Replaces every coordinate by the mass-weighted mean (total mass preserved).
struct AveragingSpec {};

/// Pointwise clamp into [lower, upper]; 1-Lipschitz and idempotent.
struct ClipSpec {
    Rational lower;
    Rational upper;
};

/// Conditional expectation onto the partition given by atom-index blocks:
/// each block is replaced by its mass-weighted block average.
struct CondExpSpec {
    std::vector<std::vector<std::size_t>> blocks;
};

/// Coordinatewise rounding to the nearest multiple of step, ties to even.
/// Idempotent, per-coordinate error <= step/2, and NOT nonexpansive.
/// Values are kept as rounded (1.0 stays 1.0; no mod-1 reduction).
struct GridQuantizerSpec {
    Rational step;
};

/// Additive bounded noise: f -> f + R(f) with ||R(f)||_1 <= delta, R
/// deterministic in (f, seed). When box bounds are attached, R is clipped
/// coordinatewise so f + R stays inside them; the clip only ever shrinks R.
struct PerturbationSpec {
    Rational delta;
    std::uint64_t seed = 0;
};

/// Ordered stage list, applied left to right.
struct CompositeSpec {
    std::vector<OperatorSpec> stages;
};

struct OperatorSpec {
    std::variant<TranslationSpec, AveragingSpec, ClipSpec, CondExpSpec, GridQuantizerSpec,
                 PerturbationSpec, CompositeSpec>
        kind;

    /// "translation", "averaging", ... ("composite" for stage lists).
    std::string kind_name() const;
};

/// Executable operator bound to a measure space. Immutable; apply() is pure.
class Operator {
public:
    struct Stage; // bound stage form, defined in operators.cpp

    Operator(const Operator&);
    Operator(Operator&&) noexcept;
    Operator& operator=(const Operator&);
    Operator& operator=(Operator&&) noexcept;
    ~Operator();

    const MeasureSpace& space() const { return space_; }
    const OperatorSpec& spec() const { return spec_; }

    /// Short human-readable stage list, e.g. "averaging -> clip -> grid_quantizer".
    std::string describe() const;

    L1Function apply(const L1Function& f) const;

private:
    friend Operator build_operator(const OperatorSpec&, const MeasureSpace&,
                                   const std::optional<FeasibleSetSpec>&);
    friend Operator compose(const std::vector<Operator>& ops);

    Operator(OperatorSpec spec, MeasureSpace space, std::vector<Stage> stages);

    OperatorSpec spec_;
    MeasureSpace space_;
    std::vector<Stage> stages_;
};

/// Validate spec invariants against the space and produce an executable
/// operator. Perturbation stages pick up box bounds from `set` when given.
/// Throws ConfigError on invalid configuration (translation on a multi-atom
/// space, malformed partition, non-positive step, ...).
Operator build_operator(const OperatorSpec& spec, const MeasureSpace& space,
                        const std::optional<FeasibleSetSpec>& set = std::nullopt);

/// Left-to-right composition: apply(compose({A,B,C}), f) == C(B(A(f))).
/// All operators must live on the same space.
Operator compose(const std::vector<Operator>& ops);

/// Seeded draws from a feasible box, uniform on the grid
/// lower + k*(upper-lower)/resolution. When the set carries a mass
/// constraint the draw is projected by rescaling to that mass (the
/// projection can leave the box near extreme masses, matching the way
/// random starts are normalized in the scenarios).
class Sampler {
public:
    Sampler(MeasureSpace space, FeasibleSetSpec set, std::uint64_t seed,
            unsigned resolution = 1000);

    L1Function draw();
    std::pair<L1Function, L1Function> draw_pair();

    /// Independent sampler for sub-task `index`, deterministic in (seed, index).
    Sampler derive(std::uint64_t index) const;

    const MeasureSpace& space() const { return space_; }

private:
    MeasureSpace space_;
    FeasibleSetSpec set_;
    std::uint64_t seed_;
    unsigned resolution_;
    SplitMix64 gen_;
};

/// All values of a one-atom space at multiples of 1/denominator in [0,1].
std::vector<L1Function> scalar_grid(const MeasureSpace& space, unsigned denominator);

/// Outcome of a property sweep over sampled (pairs of) points.
struct DiagnosticReport {
    std::string property;
    std::size_t samples_used = 0;
    std::size_t zero_distance_skipped = 0;
    /// max over pairs of dist(op f, op g)/dist(f, g); empty when every
    /// sampled pair had zero input distance.
    std::optional<Rational> worst_ratio;
    std::optional<std::pair<L1Function, L1Function>> worst_pair;
    /// meaning depends on the property: deviation sup for max_deviation,
    /// largest bound slack violation for perturbation_estimate.
    Rational max_deviation = Rational(0);
    std::optional<L1Function> witness;
    bool pass = false;

    std::string summary() const;
};

/// worst_ratio over n sampled pairs plus any caller-supplied witness pairs;
/// pass iff every ratio <= 1. Pairs at distance zero are skipped and counted.
DiagnosticReport check_nonexpansive(
    const Operator& op, Sampler sampler, std::size_t pair_count, Metric metric = Metric::L1,
    std::span<const std::pair<L1Function, L1Function>> witness_pairs = {});

/// pass iff op(op(f)) == op(f) exactly for every sample.
DiagnosticReport check_idempotent(const Operator& op, Sampler sampler, std::size_t count);

/// max over samples (and extra_points) of l1_distance(op(f), f). When
/// `bound` is given the verdict is max <= bound, otherwise pass.
DiagnosticReport max_deviation(const Operator& op, Sampler sampler, std::size_t count,
                               std::span<const L1Function> extra_points = {},
                               const std::optional<Rational>& bound = std::nullopt);

/// Checks dist(q(t(f)), q(t(g))) <= dist(f, g) + 2*delta over sampled pairs
/// (and extra_pairs), in the chosen metric. `delta` is the deviation bound of
/// q, measured or known beforehand.
DiagnosticReport perturbation_estimate(
    const Operator& t, const Operator& q, const Rational& delta, Sampler sampler,
    std::size_t pair_count, Metric metric = Metric::L1,
    std::span<const std::pair<L1Function, L1Function>> extra_pairs = {});

} // namespace l1lab
