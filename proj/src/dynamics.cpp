#include "l1lab/dynamics.hpp"
#include "l1lab/errors.hpp"

#include <map>
#include <numeric>
#include <sstream>

namespace l1lab {

OrbitTrace iterate_orbit(const Operator& op, const L1Function& f0, std::size_t max_steps,
                         const StopCondition& stop) {
    if (max_steps == 0) throw DomainError("iterate_orbit: max_steps must be positive");
    require_on_space(f0, op.space(), "iterate_orbit");

    OrbitTrace trace;
    trace.budget = max_steps;
    trace.points.push_back(f0);

    std::map<L1Function, std::size_t> first_index;
    first_index.emplace(f0, 0);

    for (std::size_t step = 0; step < max_steps; ++step) {
        const L1Function next = op.apply(trace.points.back());
        const Rational displacement = l1_distance(next, trace.points.back(), op.space());
        trace.points.push_back(next);
        trace.displacements.push_back(displacement);

        const auto [it, inserted] = first_index.emplace(next, trace.points.size() - 1);
        if (!inserted) {
            trace.preperiod = it->second;
            trace.period = trace.points.size() - 1 - it->second;
            return trace;
        }
        if (stop.kind == StopCondition::Kind::DisplacementBelow && displacement < stop.eps) {
            trace.stopped_by_displacement = true;
            return trace;
        }
    }
    return trace; // budget exhausted, markers stay empty
}

std::optional<CycleResult> detect_cycle(const Operator& op, const L1Function& f0,
                                        std::size_t max_steps) {
    const OrbitTrace trace = iterate_orbit(op, f0, max_steps, StopCondition::exact_repeat());
    if (trace.preperiod && trace.period) {
        return CycleResult{*trace.preperiod, *trace.period};
    }
    return std::nullopt;
}

DisplacementProfile displacement_profile(const Operator& op, Metric metric,
                                         std::span<const L1Function> grid,
                                         std::string grid_description,
                                         std::size_t histogram_buckets) {
    if (grid.empty()) throw DomainError("displacement_profile: empty evaluation set");
    if ((metric == Metric::Line || metric == Metric::Circle) && op.space().size() != 1) {
        throw ConfigError("displacement_profile: scalar metric on a multi-atom space");
    }

    DisplacementProfile profile;
    profile.metric = metric;
    profile.grid_description = std::move(grid_description);
    if (profile.grid_description.empty()) {
        std::ostringstream desc;
        desc << grid.size() << " points";
        profile.grid_description = desc.str();
    }

    std::vector<Rational> values;
    values.reserve(grid.size());
    for (const L1Function& x : grid) {
        const Rational d = metric_distance(metric, op.apply(x), x, op.space());
        values.push_back(d);
        ++profile.evaluations;
        if (values.size() == 1 || d < profile.min_value) {
            profile.min_value = d;
            profile.min_witness = x;
        }
        if (values.size() == 1 || d > profile.max_value) {
            profile.max_value = d;
            profile.max_witness = x;
        }
    }

    const Rational span = profile.max_value - profile.min_value;
    if (span == 0 || histogram_buckets <= 1) {
        profile.histogram.assign(1, values.size());
    } else {
        profile.histogram.assign(histogram_buckets, 0);
        const Rational width = span / Rational(histogram_buckets);
        for (const Rational& v : values) {
            std::size_t bucket = static_cast<std::size_t>(rational_floor((v - profile.min_value) / width));
            if (bucket >= histogram_buckets) bucket = histogram_buckets - 1; // v == max
            ++profile.histogram[bucket];
        }
    }
    return profile;
}

std::optional<L1Function> epsilon_fixed_point_search(const Operator& op, Metric metric,
                                                     const Rational& eps,
                                                     std::span<const L1Function> candidates) {
    if (eps <= 0) throw DomainError("epsilon_fixed_point_search: eps must be positive");
    for (const L1Function& x : candidates) {
        if (metric_distance(metric, op.apply(x), x, op.space()) < eps) {
            return x;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> rotation_period(std::uint64_t p, std::uint64_t q,
                                           std::uint64_t budget) {
    if (q == 0) throw DomainError("rotation_period: q must be positive");
    if (p == 0) {
        if (q != 1) throw DomainError("rotation_period: p and q must be coprime");
    } else {
        if (p >= q) throw DomainError("rotation_period: require p < q");
        if (std::gcd(p, q) != 1) throw DomainError("rotation_period: p and q must be coprime");
    }
    if (budget == 0) throw DomainError("rotation_period: budget must be positive");

    const Rational step(p, q);
    Rational x(0);
    for (std::uint64_t n = 1; n <= budget; ++n) {
        x = mod_one(x + step);
        if (x == 0) return n;
    }
    return std::nullopt;
}

} // namespace l1lab
