#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liqsurf/scoring.hpp"

namespace liqsurf {

struct SelectionParams {
    double threshold = 0.4;
    /// Minimum centre-row distance between accepted curves. Unset means
    /// max(3, 2% of the vessel height).
    std::optional<double> min_separation;
    /// Known number of phase boundaries; picks the top N instead of thresholding.
    std::optional<int> n_phases;
    /// Only curves passing the consistency check compete.
    bool require_consistency = false;

    void validate() const;
    double separation_for(const VesselRegion& v) const;
};

struct DetectionReport {
    std::string image_id;
    /// Interior surfaces, top to bottom.
    std::vector<ScoredCurve> accepted;
    /// Ceiling and floor lines that passed selection (reported apart from `accepted`).
    std::vector<ScoredCurve> boundaries;
    int ceiling_row = 0;
    int floor_row = 0;
    double best_score = 0.0;
    std::string config_fingerprint;
};

/// Descending score order, ties to the smaller centre row, then smaller h.
bool ranks_before(const ScoredCurve& a, const ScoredCurve& b) noexcept;

/// Walks `curves` from best to worst and drops any curve whose centre row lies
/// closer than `min_separation` to one already kept. Vessel boundary lines are
/// kept first, whatever their score.
std::vector<ScoredCurve> suppress_duplicates(std::vector<ScoredCurve> curves, double min_separation);

/// Threshold or known-N selection over one image's scored candidates,
/// ceiling and floor lines included. Throws ParameterError on empty input.
DetectionReport select(const std::vector<ScoredCurve>& scored, const SelectionParams& p, double min_separation);

} // namespace liqsurf
