#pragma once

#include <string>
#include <vector>

#include "liqsurf/config.hpp"
#include "liqsurf/image.hpp"
#include "liqsurf/selection.hpp"
#include "liqsurf/vessel.hpp"

namespace liqsurf {

/// Ceiling line on the top vessel row and floor line just below the bottom
/// row (on the bottom row when that is the last image row).
std::vector<CandidateCurve> boundary_lines(const VesselRegion& v);

/// Scores every scan candidate plus the two boundary lines. Each ellipse
/// contributes its better half. Returned curves carry parameters only: points,
/// normals and local scores are dropped to keep the list small. Order is scan
/// order regardless of `cfg.threads`.
std::vector<ScoredCurve> score_candidates(const ImagePlanes& planes, const VesselRegion& v, const DetectorConfig& cfg);

/// Full pipeline for one image.
DetectionReport detect(const RgbImage& image, const VesselRegion& v, const DetectorConfig& cfg,
                       const std::string& image_id);

/// Regenerates the sample points of a parameter-only curve.
CandidateCurve rebuild_curve(const CandidateCurve& c);

} // namespace liqsurf
