#pragma once

#include "l1lab/operators.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace l1lab {

/// When to stop recording an orbit. Exact repeats always end iteration
/// (the orbit is provably periodic from there on); DisplacementBelow
/// additionally stops once a step moves less than eps in L1.
struct StopCondition {
    enum class Kind { ExactRepeat, DisplacementBelow };
    Kind kind = Kind::ExactRepeat;
    Rational eps; // only for DisplacementBelow

    static StopCondition exact_repeat() { return {Kind::ExactRepeat, Rational(0)}; }
    static StopCondition displacement_below(Rational eps) {
        return {Kind::DisplacementBelow, std::move(eps)};
    }
};

/// Recorded iterates f0..fN with per-step L1 displacements. When an exact
/// repeat was found, preperiod r and period p satisfy points[r+p] == points[r]
/// with p minimal at the first repeating index.
struct OrbitTrace {
    std::vector<L1Function> points;
    std::vector<Rational> displacements;
    std::optional<std::size_t> preperiod;
    std::optional<std::size_t> period;
    std::size_t budget = 0;
    bool stopped_by_displacement = false;

    const L1Function& final_point() const { return points.back(); }
};

/// Iterate op from f0 for at most max_steps applications, using exact
/// rational equality throughout. Budget exhaustion is not an error: the
/// trace comes back with empty preperiod/period.
OrbitTrace iterate_orbit(const Operator& op, const L1Function& f0, std::size_t max_steps,
                         const StopCondition& stop = StopCondition::exact_repeat());

struct CycleResult {
    std::size_t preperiod;
    std::size_t period;
};

/// Exact cycle detection: first repeating index and minimal period there.
/// Succeeds within M+1 steps for any operator whose image has M values.
std::optional<CycleResult> detect_cycle(const Operator& op, const L1Function& f0,
                                        std::size_t max_steps);

/// Extremes (with witnesses) of x -> dist(op(x), x) over an evaluation set.
struct DisplacementProfile {
    Metric metric;
    std::string grid_description;
    Rational min_value;
    Rational max_value;
    L1Function min_witness;
    L1Function max_witness;
    std::vector<std::size_t> histogram; // equal-width buckets over [min, max]
    std::size_t evaluations = 0;
};

/// Evaluate the displacement of every grid point under the chosen metric.
/// Circle/line metrics require a one-atom space (ConfigError otherwise).
DisplacementProfile displacement_profile(const Operator& op, Metric metric,
                                         std::span<const L1Function> grid,
                                         std::string grid_description = {},
                                         std::size_t histogram_buckets = 10);

/// First candidate x with dist(op(x), x) < eps, or nothing. With an
/// exhaustive grid the "nothing" answer certifies absence on that grid.
std::optional<L1Function> epsilon_fixed_point_search(const Operator& op, Metric metric,
                                                     const Rational& eps,
                                                     std::span<const L1Function> candidates);

/// First-return time of x -> x + p/q (mod 1) started at 0; equals q for
/// coprime p < q. Empty when the budget ran out first.
/// Requires gcd(p, q) == 1 and p < q (p == 0 only with q == 1, the identity).
std::optional<std::size_t> rotation_period(std::uint64_t p, std::uint64_t q,
                                           std::uint64_t budget);

} // namespace l1lab
