#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "liqsurf/candidates.hpp"
#include "liqsurf/image.hpp"
#include "liqsurf/vessel.hpp"

namespace liqsurf {

enum class Method { M1, M2, M3, Interior };

enum class Equation {
    U_minus_D,
    rel_U_minus_D,
    abs_U_minus_D,
    abs_rel_U_minus_D,
    global_rel_U_minus_D,
    I,
    I_cos_theta_phi,
    diff_IA,
    rel_diff_IA,
    norm_diff_IA,
    interior_minus_ring,
};

enum class PlaneKind { Gray, Edge, GradientSize, RgbAveraged };

enum class Aggregation { Average, Percentile65, AsIs };

/// Height of the band examined on each side of a curve point.
struct RegionHeight {
    enum class Mode { OnePixel, FractionOfVessel };
    Mode mode = Mode::OnePixel;
    double fraction = 0.0;

    /// Rows per side: 1, or round(fraction * vessel height) but at least 1.
    int rows(const VesselRegion& v) const;
};

struct Indicator {
    Method method = Method::M1;
    Equation equation = Equation::rel_U_minus_D;
    PlaneKind plane = PlaneKind::Gray;
    Aggregation aggregation = Aggregation::Average;
    RegionHeight region;

    /// Throws ConfigError for combinations no scoring method supports.
    void validate() const;
};

std::string_view to_string(Method m) noexcept;
std::string_view to_string(Equation e) noexcept;
std::string_view to_string(PlaneKind p) noexcept;
std::string_view to_string(Aggregation a) noexcept;
Method method_from_string(std::string_view s);
Equation equation_from_string(std::string_view s);
PlaneKind plane_from_string(std::string_view s);
Aggregation aggregation_from_string(std::string_view s);

/// What the scorers see around one curve point. U averages the window pixels
/// strictly above the curve, D the ones on or below it, I is the pixel on the
/// curve. theta is the curve normal and phi the grayscale gradient direction,
/// both in the curve's angle convention (x right, y up).
struct LocalSample {
    double U = 0.0;
    double D = 0.0;
    double I = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    bool phi_valid = false;
};

/// Precomputed pixel planes an indicator may read. The gray plane and its
/// gradient are always present; the others only when the indicator needs them.
struct ImagePlanes {
    GrayImage gray;
    GradientField gray_gradient;
    std::optional<Channels> rgb;
    std::optional<GrayImage> edge;
    std::optional<GrayImage> gradient_size;

    static ImagePlanes prepare(const RgbImage& img, const Indicator& ind, const CannyParams& canny);
    static ImagePlanes prepare(const GrayImage& gray, const Indicator& ind, const CannyParams& canny);

    /// Throws ConfigError when the plane was not prepared (RgbAveraged has no single plane).
    const GrayImage& plane(PlaneKind kind) const;
};

struct ScoredCurve {
    CandidateCurve curve;
    std::vector<double> local_scores;
    double score = 0.0;
    bool consistent = false;
    Half ellipse_score_source = Half::Line;
    /// Ceiling or floor line of the vessel rather than an interior candidate.
    bool vessel_boundary = false;
};

struct ConsistencyParams {
    bool enabled = true;
    double fraction = 0.85;
    double min_change = 0.10;
};

/// Method 1 samples, one per retained curve point. The window spans columns
/// x-1..x+1 and `region_rows` rows on each side: rows y-k..y+k-1 around the
/// point's pixel row y. A window pixel counts towards U when it lies strictly
/// above the curve in its own column. Points whose window touches a pixel the
/// vessel does not admit are dropped. Throws ParameterError("curve
/// unsampleable") when no point survives.
std::vector<LocalSample> local_samples_m1(const CandidateCurve& curve, const GrayImage& plane,
                                          const VesselRegion& vessel, int region_rows,
                                          const GradientField* gradient = nullptr);

/// `mean_U`, `mean_D` are only read by global_rel_U_minus_D. Degenerate
/// denominators give 0.
double local_score(const LocalSample& s, Equation eq, double mean_U = 0.0, double mean_D = 0.0);

/// Average: |mean|. Percentile65: the larger of the highest positive value
/// that 65% of the scores reach and the magnitude of the mirrored negative
/// value. AsIs: the magnitude of the single score.
double aggregate(std::span<const double> scores, Aggregation mode);

/// Sign-consistency rule on relative changes: true when the 15th-percentile
/// score exceeds +min_change or the 85th-percentile score is below -min_change
/// (for fraction = 0.85).
bool consistent_scores(std::span<const double> rel_scores, double fraction = 0.85, double min_change = 0.10);

/// Consistency check on the grayscale relative intensity change. Unsampleable
/// curves fail.
bool consistency_check(const CandidateCurve& curve, const GrayImage& gray, const VesselRegion& vessel,
                       double fraction = 0.85, double min_change = 0.10, int region_rows = 1);

/// Scores one candidate. Returns nullopt when the curve keeps fewer than half
/// of its points (or cannot be evaluated by the method at all, e.g. a line
/// under the interior-ring indicator).
std::optional<ScoredCurve> score_curve(const CandidateCurve& curve, const ImagePlanes& planes,
                                       const VesselRegion& vessel, const Indicator& indicator,
                                       const ConsistencyParams& consistency = {});

/// Higher-scoring half of one ellipse; Upper wins ties. With the check
/// enabled an inconsistent half counts as score 0.
ScoredCurve score_ellipse(const ScoredCurve& upper, const ScoredCurve& lower, bool consistency_enabled = true);

} // namespace liqsurf
