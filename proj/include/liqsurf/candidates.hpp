#pragma once

#include <cmath>
#include <string_view>
#include <vector>

#include "liqsurf/vessel.hpp"

namespace liqsurf {

enum class Half { Upper, Lower, Line };

std::string_view to_string(Half half) noexcept;
Half half_from_string(std::string_view name);

/// Sub-pixel sample on a curve; x is always an integer column.
struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
};

/// Row of the pixel a real-valued y falls on (nearest, halves round down the image).
inline int pixel_row(double y) noexcept { return static_cast<int>(std::floor(y + 0.5)); }

/// One hypothesis for a surface outline: a straight line (h == 0) or the upper
/// or lower half of a horizontal ellipse whose major axis spans
/// [x_left, x_right] on `center_row`. `h` is the vertical semi-axis.
///
/// `normals` holds, per point, the angle of the curve normal in radians using
/// the mathematical convention (x right, y up), oriented to point up the
/// image: a line has pi/2 everywhere, both halves have angles in [0, pi].
struct CandidateCurve {
    int center_row = 0;
    int x_left = 0;
    int x_right = 1;
    int h = 0;
    Half half = Half::Line;
    std::vector<CurvePoint> points;
    std::vector<double> normals;

    int width() const noexcept { return x_right - x_left + 1; }
};

struct ScanParams {
    double max_height_fraction = 0.30;
    int height_step = 1;
    double narrow_fraction = 0.2;
    int row_step = 1;

    void validate() const;
};

struct HalfPoints {
    std::vector<CurvePoint> points;
    std::vector<double> normals;
};

/// One sample per column of [x_left, x_right]. h == 0 always yields the line.
HalfPoints ellipse_half_points(int center_row, int x_left, int x_right, int h, Half half);

CandidateCurve make_candidate(int center_row, int x_left, int x_right, int h, Half half);

/// Every sample lands on a pixel inside the vessel.
bool within_vessel(const CandidateCurve& c, const VesselRegion& v) noexcept;

/// Largest semi-axis scanned for a row of the given width.
int max_half_height(int width, double max_height_fraction) noexcept;

/// Candidates centred on one row: the line, then Upper and Lower halves for
/// each scanned height. Halves leaving the vessel are dropped.
std::vector<CandidateCurve> candidates_for_row(const VesselRegion& v, const ScanParams& p, int row);

/// All candidates of the scan, rows top to bottom.
std::vector<CandidateCurve> enumerate_candidates(const VesselRegion& v, const ScanParams& p);

/// Rows visited by the scan (scannable rows thinned by `row_step`).
std::vector<int> scan_rows(const VesselRegion& v, const ScanParams& p);

/// Apparent height w * sin(phi) of a round surface of width w seen from angle phi.
double view_height(double w, double phi);

} // namespace liqsurf
