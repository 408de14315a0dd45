#include "liqsurf/selection.hpp"

#include <algorithm>
#include <cmath>

namespace liqsurf {

void SelectionParams::validate() const
{
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("threshold T must be in (0, 1)");
    }
    if (min_separation && !(*min_separation >= 0.0)) {
        throw ConfigError("min_separation must be >= 0");
    }
    if (n_phases && *n_phases < 1) {
        throw ConfigError("n_phases must be a positive integer");
    }
}

double SelectionParams::separation_for(const VesselRegion& v) const
{
    return min_separation ? *min_separation : std::max(3.0, 0.02 * v.height());
}

bool ranks_before(const ScoredCurve& a, const ScoredCurve& b) noexcept
{
    if (a.score != b.score) {
        return a.score > b.score;
    }
    if (a.curve.center_row != b.curve.center_row) {
        return a.curve.center_row < b.curve.center_row;
    }
    return a.curve.h < b.curve.h;
}

std::vector<ScoredCurve> suppress_duplicates(std::vector<ScoredCurve> curves, double min_separation)
{
    std::stable_sort(curves.begin(), curves.end(), [](const ScoredCurve& a, const ScoredCurve& b) {
        if (a.vessel_boundary != b.vessel_boundary) {
            return a.vessel_boundary;
        }
        return ranks_before(a, b);
    });
    std::vector<ScoredCurve> kept;
    for (auto& c : curves) {
        const bool clear = std::all_of(kept.begin(), kept.end(), [&](const ScoredCurve& k) {
            return std::abs(k.curve.center_row - c.curve.center_row) >= min_separation;
        });
        if (clear || c.vessel_boundary) {
            kept.push_back(std::move(c));
        }
    }
    return kept;
}

DetectionReport select(const std::vector<ScoredCurve>& scored, const SelectionParams& p, double min_separation)
{
    p.validate();
    if (scored.empty()) {
        throw ParameterError("no scored candidates to select from");
    }
    DetectionReport r;
    const auto eligible = [&](const ScoredCurve& c) { return !p.require_consistency || c.consistent; };

    for (const auto& c : scored) {
        if (eligible(c)) {
            r.best_score = std::max(r.best_score, c.score);
        }
    }

    std::vector<ScoredCurve> pool;
    for (const auto& c : scored) {
        if (c.vessel_boundary) {
            pool.push_back(c);
        } else if (eligible(c) && (p.n_phases || c.score >= p.threshold * r.best_score)) {
            pool.push_back(c);
        }
    }
    // An image where no curve has a positive score accepts nothing.
    if (r.best_score <= 0.0) {
        std::erase_if(pool, [](const ScoredCurve& c) { return !c.vessel_boundary; });
    }

    auto kept = suppress_duplicates(std::move(pool), min_separation);
    for (auto& c : kept) {
        (c.vessel_boundary ? r.boundaries : r.accepted).push_back(std::move(c));
    }
    if (p.n_phases && r.accepted.size() > static_cast<std::size_t>(*p.n_phases)) {
        r.accepted.resize(static_cast<std::size_t>(*p.n_phases));
    }
    const auto by_row = [](const ScoredCurve& a, const ScoredCurve& b) {
        if (a.curve.center_row != b.curve.center_row) {
            return a.curve.center_row < b.curve.center_row;
        }
        return ranks_before(a, b);
    };
    std::sort(r.accepted.begin(), r.accepted.end(), by_row);
    std::sort(r.boundaries.begin(), r.boundaries.end(), by_row);
    return r;
}

} // namespace liqsurf
