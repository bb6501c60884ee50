#pragma once

#include "l1lab/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace l1lab {

/// One point of a finite measure space: a label and a strictly positive mass.
struct Atom {
    std::string label;
    Rational weight;

    bool operator==(const Atom&) const = default;
};

/// A finite measure space (Omega, mu): an ordered list of weighted atoms.
/// The sigma-algebra is implicitly the full power set; coarser structure
/// enters only through partition operators.
class MeasureSpace {
public:
    /// Throws DomainError on an empty atom list, a non-positive weight,
    /// or a duplicate label.
    explicit MeasureSpace(std::vector<Atom> atoms);

    /// n atoms of unit weight, labelled "0", "1", ...
    static MeasureSpace counting(std::size_t atom_count);

    /// Atoms with the given weights, labelled "0", "1", ...
    static MeasureSpace from_weights(const std::vector<Rational>& weights);

    std::size_t size() const { return atoms_.size(); }
    const Atom& atom(std::size_t i) const { return atoms_[i]; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    /// mu(Omega), the total mass.
    const Rational& total_mass() const { return total_mass_; }

    bool operator==(const MeasureSpace&) const = default;

private:
    std::vector<Atom> atoms_;
    Rational total_mass_;
};

/// A function in L1(mu) on a finite space: one exact value per atom,
/// in atom order. Plain value semantics; never mutated in place.
using L1Function = std::vector<Rational>;

/// Throws StructuralError unless f has one value per atom of space.
void require_on_space(const L1Function& f, const MeasureSpace& space, const char* where);

/// The box-with-mass feasible set {f : lower <= f <= upper, ||f||_1 = mass},
/// the mass constraint being optional.
struct FeasibleSetSpec {
    Rational lower;
    Rational upper;
    std::optional<Rational> mass;
};

/// Throws ConfigError if lower > upper or the mass is unreachable inside the box.
void validate_feasible_set(const FeasibleSetSpec& set, const MeasureSpace& space);

/// weighted L1 norm: sum_i weight_i * |f_i|. Exact.
Rational l1_norm(const L1Function& f, const MeasureSpace& space);

/// l1_norm(f - g). Exact, symmetric, satisfies the triangle inequality.
Rational l1_distance(const L1Function& f, const L1Function& g, const MeasureSpace& space);

/// Wrap-around distance on [0,1] with 1 identified with 0:
/// min(|a-b|, 1-|a-b|). Throws DomainError if an input leaves [0,1].
Rational circle_distance(const Rational& a, const Rational& b);

/// lambda*f + (1-lambda)*g pointwise; lambda must lie in [0,1].
L1Function convex_combination(const Rational& lambda, const L1Function& f, const L1Function& g);

/// A single pointwise-bound or mass violation found by validate_membership.
struct MembershipViolation {
    enum class Kind { BelowLower, AboveUpper, MassMismatch };
    Kind kind;
    std::size_t atom_index; // unused for MassMismatch
    Rational actual;
    Rational bound;

    std::string describe() const;
};

struct MembershipReport {
    bool valid;
    std::vector<MembershipViolation> violations;
    Rational actual_mass;
};

/// Report every pointwise-bound violation and any mass mismatch, exactly.
MembershipReport validate_membership(const L1Function& f, const FeasibleSetSpec& set,
                                     const MeasureSpace& space);

/// Distance notions selectable per scenario. Line and Circle apply the
/// scalar metric to one-atom spaces; L1 is the weighted norm metric.
enum class Metric { Line, Circle, L1 };

/// Distance under the chosen metric. Line/Circle require a one-atom space
/// (ConfigError otherwise); Circle additionally requires values in [0,1].
Rational metric_distance(Metric metric, const L1Function& f, const L1Function& g,
                         const MeasureSpace& space);

const char* metric_name(Metric metric);
Metric parse_metric(std::string_view name);

} // namespace l1lab
