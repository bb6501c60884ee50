#pragma once

#include "l1lab/measure.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace l1lab {

/// Diameter, Chebyshev-radius upper bound and diametral probe of a finite
/// point set. The radius is minimized over a finite candidate list only, so
/// it is a certified upper bound on the radius over the convex hull; it
/// always satisfies diameter/2 <= radius_estimate <= diameter.
struct GeometryReport {
    std::size_t point_count = 0;
    Rational diameter;
    std::pair<std::size_t, std::size_t> diameter_witness; // indices into the input
    Rational radius_estimate;
    L1Function center_candidate;
    std::optional<Rational> ratio; // radius/diameter; empty when diameter is 0
    bool diametral_flag = false;   // every candidate attains the diameter
};

/// Exact maximum pairwise L1 distance with an attaining index pair.
/// Throws DomainError on an empty list.
std::pair<Rational, std::pair<std::size_t, std::size_t>> diameter(
    std::span<const L1Function> points, const MeasureSpace& space);

/// Radius estimate over the candidate set {points} ∪ {barycenter} ∪
/// {pairwise midpoints} ∪ extra_candidates.
GeometryReport chebyshev_estimate(std::span<const L1Function> points, const MeasureSpace& space,
                                  std::span<const L1Function> extra_candidates = {});

/// The exact identity ||m - g|| = ||f - g|| / 2 for the midpoint m of f and g.
struct MidpointReport {
    L1Function midpoint;
    Rational full_distance; // ||f - g||
    Rational half_distance; // ||m - g||
    bool identity_holds = false;
};

MidpointReport midpoint_probe(const L1Function& f, const L1Function& g,
                              const MeasureSpace& space);

} // namespace l1lab
