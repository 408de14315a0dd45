#include "liqsurf/candidates.hpp"

#include <numbers>
#include <string>

namespace liqsurf {

std::string_view to_string(Half half) noexcept
{
    switch (half) {
    case Half::Upper:
        return "upper";
    case Half::Lower:
        return "lower";
    case Half::Line:
        return "line";
    }
    return "line";
}

Half half_from_string(std::string_view name)
{
    if (name == "upper") {
        return Half::Upper;
    }
    if (name == "lower") {
        return Half::Lower;
    }
    if (name == "line") {
        return Half::Line;
    }
    throw ParameterError("unknown curve half: " + std::string(name));
}

void ScanParams::validate() const
{
    if (!(max_height_fraction > 0.0 && max_height_fraction <= 1.0)) {
        throw ParameterError("max_height_fraction must be in (0, 1]");
    }
    if (height_step < 1 || row_step < 1) {
        throw ParameterError("scan steps must be >= 1");
    }
    if (!(narrow_fraction >= 0.0 && narrow_fraction < 1.0)) {
        throw ParameterError("narrow_fraction must be in [0, 1)");
    }
}

HalfPoints ellipse_half_points(int center_row, int x_left, int x_right, int h, Half half)
{
    if (x_left >= x_right) {
        throw ParameterError("curve needs x_left < x_right");
    }
    if (h < 0) {
        throw ParameterError("ellipse height must be >= 0");
    }
    HalfPoints out;
    const auto n = static_cast<std::size_t>(x_right - x_left + 1);
    out.points.reserve(n);
    out.normals.reserve(n);
    const double cy = center_row;
    if (h == 0 || half == Half::Line) {
        for (int x = x_left; x <= x_right; ++x) {
            out.points.push_back({static_cast<double>(x), cy});
            out.normals.push_back(std::numbers::pi / 2.0);
        }
        return out;
    }
    const double a = 0.5 * (x_right - x_left);
    const double cx = 0.5 * (x_left + x_right);
    const double b = h;
    const double sign = half == Half::Upper ? 1.0 : -1.0;
    for (int x = x_left; x <= x_right; ++x) {
        const double dx = x - cx;
        const double t = dx / a;
        const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        const double up = sign * b * s; // height above the centre line
        out.points.push_back({static_cast<double>(x), cy - up});
        // Implicit-form gradient (dx / a^2, up / b^2) is the outward normal;
        // the lower half is flipped so every normal points up the image.
        const double nx = sign * dx / (a * a);
        const double ny = sign * up / (b * b);
        out.normals.push_back(std::atan2(ny, nx));
    }
    return out;
}

CandidateCurve make_candidate(int center_row, int x_left, int x_right, int h, Half half)
{
    if (h == 0) {
        half = Half::Line;
    } else if (half == Half::Line) {
        throw ParameterError("a line candidate must have h == 0");
    }
    auto hp = ellipse_half_points(center_row, x_left, x_right, h, half);
    CandidateCurve c;
    c.center_row = center_row;
    c.x_left = x_left;
    c.x_right = x_right;
    c.h = h;
    c.half = half;
    c.points = std::move(hp.points);
    c.normals = std::move(hp.normals);
    return c;
}

bool within_vessel(const CandidateCurve& c, const VesselRegion& v) noexcept
{
    for (const auto& p : c.points) {
        if (!v.contains(static_cast<int>(p.x), pixel_row(p.y))) {
            return false;
        }
    }
    return true;
}

int max_half_height(int width, double max_height_fraction) noexcept
{
    return static_cast<int>(std::floor(max_height_fraction * width + 1e-9));
}

std::vector<int> scan_rows(const VesselRegion& v, const ScanParams& p)
{
    p.validate();
    const auto rows = scannable_rows(v, p.narrow_fraction);
    std::vector<int> out;
    for (std::size_t i = 0; i < rows.size(); i += static_cast<std::size_t>(p.row_step)) {
        out.push_back(rows[i]);
    }
    return out;
}

std::vector<CandidateCurve> candidates_for_row(const VesselRegion& v, const ScanParams& p, int row)
{
    std::vector<CandidateCurve> out;
    const auto& e = v.extent(row);
    if (e.x_left >= e.x_right) {
        return out;
    }
    out.push_back(make_candidate(row, e.x_left, e.x_right, 0, Half::Line));
    const int h_max = max_half_height(e.width(), p.max_height_fraction);
    for (int h = 1; h <= h_max; h += p.height_step) {
        for (Half half : {Half::Upper, Half::Lower}) {
            auto c = make_candidate(row, e.x_left, e.x_right, h, half);
            if (within_vessel(c, v)) {
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<CandidateCurve> enumerate_candidates(const VesselRegion& v, const ScanParams& p)
{
    std::vector<CandidateCurve> out;
    for (int row : scan_rows(v, p)) {
        auto row_candidates = candidates_for_row(v, p, row);
        std::move(row_candidates.begin(), row_candidates.end(), std::back_inserter(out));
    }
    return out;
}

double view_height(double w, double phi)
{
    if (!(w > 0.0)) {
        throw ParameterError("view_height needs w > 0");
    }
    if (!(phi >= 0.0 && phi <= std::numbers::pi / 2.0 + 1e-12)) {
        throw ParameterError("view angle must be in [0, pi/2]");
    }
    return w * std::sin(phi);
}

} // namespace liqsurf
