#include "l1lab/measure.hpp"
#include "l1lab/errors.hpp"

#include <set>
#include <sstream>

namespace l1lab {

MeasureSpace::MeasureSpace(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) {
        throw DomainError("measure space needs at least one atom");
    }
    std::set<std::string> seen;
    total_mass_ = 0;
    for (const Atom& atom : atoms_) {
        if (atom.weight <= 0) {
            throw DomainError("atom '" + atom.label + "' has non-positive weight " +
                              format_rational(atom.weight));
        }
        if (!seen.insert(atom.label).second) {
            throw DomainError("duplicate atom label '" + atom.label + "'");
        }
        total_mass_ += atom.weight;
    }
}

MeasureSpace MeasureSpace::counting(std::size_t atom_count) {
    std::vector<Rational> weights(atom_count, Rational(1));
    return from_weights(weights);
}

MeasureSpace MeasureSpace::from_weights(const std::vector<Rational>& weights) {
    std::vector<Atom> atoms;
    atoms.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        atoms.push_back(Atom{std::to_string(i), weights[i]});
    }
    return MeasureSpace(std::move(atoms));
}

void require_on_space(const L1Function& f, const MeasureSpace& space, const char* where) {
    if (f.size() != space.size()) {
        std::ostringstream msg;
        msg << where << ": function has " << f.size() << " values but the space has "
            << space.size() << " atoms";
        throw StructuralError(msg.str());
    }
}

void validate_feasible_set(const FeasibleSetSpec& set, const MeasureSpace& space) {
    if (set.lower > set.upper) {
        throw ConfigError("feasible set: lower bound " + format_rational(set.lower) +
                          " exceeds upper bound " + format_rational(set.upper));
    }
    if (set.mass) {
        if (*set.mass < 0) {
            throw ConfigError("feasible set: mass " + format_rational(*set.mass) +
                              " is negative, but the L1 norm cannot be");
        }
        const Rational lo = set.lower * space.total_mass();
        const Rational hi = set.upper * space.total_mass();
        if (*set.mass < lo || *set.mass > hi) {
            throw ConfigError("feasible set: mass " + format_rational(*set.mass) +
                              " unreachable in box [" + format_rational(set.lower) + ", " +
                              format_rational(set.upper) + "] (range [" + format_rational(lo) +
                              ", " + format_rational(hi) + "])");
        }
    }
}

Rational l1_norm(const L1Function& f, const MeasureSpace& space) {
    require_on_space(f, space, "l1_norm");
    Rational total = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        total += space.atom(i).weight * abs(f[i]);
    }
    return total;
}

Rational l1_distance(const L1Function& f, const L1Function& g, const MeasureSpace& space) {
    require_on_space(f, space, "l1_distance");
    require_on_space(g, space, "l1_distance");
    Rational total = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        total += space.atom(i).weight * abs(f[i] - g[i]);
    }
    return total;
}

Rational circle_distance(const Rational& a, const Rational& b) {
    if (a < 0 || a > 1 || b < 0 || b > 1) {
        throw DomainError("circle_distance: inputs must lie in [0,1], got " +
                          format_rational(a) + " and " + format_rational(b));
    }
    const Rational gap = abs(a - b);
    const Rational around = Rational(1) - gap;
    return gap < around ? gap : around;
}

L1Function convex_combination(const Rational& lambda, const L1Function& f, const L1Function& g) {
    if (lambda < 0 || lambda > 1) {
        throw DomainError("convex_combination: lambda " + format_rational(lambda) +
                          " outside [0,1]");
    }
    if (f.size() != g.size()) {
        throw StructuralError("convex_combination: operands have different lengths");
    }
    L1Function out(f.size());
    const Rational complement = Rational(1) - lambda;
    for (std::size_t i = 0; i < f.size(); ++i) {
        out[i] = lambda * f[i] + complement * g[i];
    }
    return out;
}

std::string MembershipViolation::describe() const {
    std::ostringstream msg;
    switch (kind) {
        case Kind::BelowLower:
            msg << "atom " << atom_index << ": value " << format_rational(actual)
                << " below lower bound " << format_rational(bound);
            break;
        case Kind::AboveUpper:
            msg << "atom " << atom_index << ": value " << format_rational(actual)
                << " above upper bound " << format_rational(bound);
            break;
        case Kind::MassMismatch:
            msg << "mass " << format_rational(actual) << " differs from required "
                << format_rational(bound);
            break;
    }
    return msg.str();
}

MembershipReport validate_membership(const L1Function& f, const FeasibleSetSpec& set,
                                     const MeasureSpace& space) {
    require_on_space(f, space, "validate_membership");
    MembershipReport report;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < set.lower) {
            report.violations.push_back(
                {MembershipViolation::Kind::BelowLower, i, f[i], set.lower});
        } else if (f[i] > set.upper) {
            report.violations.push_back(
                {MembershipViolation::Kind::AboveUpper, i, f[i], set.upper});
        }
    }
    report.actual_mass = l1_norm(f, space);
    if (set.mass && report.actual_mass != *set.mass) {
        report.violations.push_back(
            {MembershipViolation::Kind::MassMismatch, 0, report.actual_mass, *set.mass});
    }
    report.valid = report.violations.empty();
    return report;
}

Rational metric_distance(Metric metric, const L1Function& f, const L1Function& g,
                         const MeasureSpace& space) {
    switch (metric) {
        case Metric::L1:
            return l1_distance(f, g, space);
        case Metric::Line:
            if (space.size() != 1) {
                throw ConfigError("line metric requires a one-atom space");
            }
            require_on_space(f, space, "metric_distance");
            require_on_space(g, space, "metric_distance");
            return abs(f[0] - g[0]);
        case Metric::Circle:
            if (space.size() != 1) {
                throw ConfigError("circle metric requires a one-atom space");
            }
            require_on_space(f, space, "metric_distance");
            require_on_space(g, space, "metric_distance");
            return circle_distance(f[0], g[0]);
    }
    throw DomainError("unknown metric");
}

const char* metric_name(Metric metric) {
    switch (metric) {
        case Metric::Line: return "line";
        case Metric::Circle: return "circle";
        case Metric::L1: return "L1";
    }
    return "?";
}

Metric parse_metric(std::string_view name) {
    if (name == "line") return Metric::Line;
    if (name == "circle") return Metric::Circle;
    if (name == "L1" || name == "l1") return Metric::L1;
    throw ParseError("unknown metric '" + std::string(name) + "' (expected line, circle or L1)");
}

} // namespace l1lab
