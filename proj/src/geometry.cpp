#include "l1lab/geometry.hpp"
#include "l1lab/errors.hpp"

namespace l1lab {

std::pair<Rational, std::pair<std::size_t, std::size_t>> diameter(
    std::span<const L1Function> points, const MeasureSpace& space) {
    if (points.empty()) throw DomainError("diameter: empty point set");
    Rational best = 0;
    std::pair<std::size_t, std::size_t> witness{0, 0};
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const Rational d = l1_distance(points[i], points[j], space);
            if (d > best) {
                best = d;
                witness = {i, j};
            }
        }
    }
    return {best, witness};
}

GeometryReport chebyshev_estimate(std::span<const L1Function> points, const MeasureSpace& space,
                                  std::span<const L1Function> extra_candidates) {
    if (points.empty()) throw DomainError("chebyshev_estimate: empty point set");

    GeometryReport report;
    report.point_count = points.size();
    auto [diam, witness] = diameter(points, space);
    report.diameter = diam;
    report.diameter_witness = witness;

    // points, barycenter, pairwise midpoints, then caller extras
    std::vector<L1Function> candidates(points.begin(), points.end());
    L1Function barycenter(space.size(), Rational(0));
    for (const L1Function& p : points) {
        require_on_space(p, space, "chebyshev_estimate");
        for (std::size_t i = 0; i < p.size(); ++i) barycenter[i] += p[i];
    }
    const Rational inv_count(1, static_cast<unsigned>(points.size()));
    for (Rational& v : barycenter) v *= inv_count;
    candidates.push_back(std::move(barycenter));
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            candidates.push_back(convex_combination(Rational(1, 2), points[i], points[j]));
        }
    }
    candidates.insert(candidates.end(), extra_candidates.begin(), extra_candidates.end());

    bool first = true;
    bool all_diametral = true;
    for (const L1Function& c : candidates) {
        Rational farthest = 0;
        for (const L1Function& p : points) {
            const Rational d = l1_distance(c, p, space);
            if (d > farthest) farthest = d;
        }
        if (farthest < report.diameter) all_diametral = false;
        if (first || farthest < report.radius_estimate) {
            report.radius_estimate = farthest;
            report.center_candidate = c;
            first = false;
        }
    }
    report.diametral_flag = all_diametral;
    if (report.diameter != 0) {
        report.ratio = report.radius_estimate / report.diameter;
    }
    return report;
}

MidpointReport midpoint_probe(const L1Function& f, const L1Function& g,
                              const MeasureSpace& space) {
    require_on_space(f, space, "midpoint_probe");
    require_on_space(g, space, "midpoint_probe");
    MidpointReport report;
    report.midpoint = convex_combination(Rational(1, 2), f, g);
    report.full_distance = l1_distance(f, g, space);
    report.half_distance = l1_distance(report.midpoint, g, space);
    report.identity_holds = report.half_distance * 2 == report.full_distance;
    return report;
}

} // namespace l1lab
