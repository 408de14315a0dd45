#include "liqsurf/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace liqsurf {

namespace {

template <typename E, std::size_t N>
E enum_from_string(std::string_view s, const std::array<std::pair<std::string_view, E>, N>& table,
                   const char* what)
{
    for (const auto& [name, value] : table) {
        if (name == s) {
            return value;
        }
    }
    throw ConfigError(std::string("unknown ") + what + ": " + std::string(s));
}

template <typename E, std::size_t N>
std::string_view enum_to_string(E v, const std::array<std::pair<std::string_view, E>, N>& table)
{
    for (const auto& [name, value] : table) {
        if (value == v) {
            return name;
        }
    }
    return "?";
}

constexpr std::array<std::pair<std::string_view, Method>, 4> kMethods{{
    {"m1", Method::M1},
    {"m2", Method::M2},
    {"m3", Method::M3},
    {"interior", Method::Interior},
}};

constexpr std::array<std::pair<std::string_view, Equation>, 11> kEquations{{
    {"u_minus_d", Equation::U_minus_D},
    {"rel_u_minus_d", Equation::rel_U_minus_D},
    {"abs_u_minus_d", Equation::abs_U_minus_D},
    {"abs_rel_u_minus_d", Equation::abs_rel_U_minus_D},
    {"global_rel_u_minus_d", Equation::global_rel_U_minus_D},
    {"i", Equation::I},
    {"i_cos_theta_phi", Equation::I_cos_theta_phi},
    {"diff_ia", Equation::diff_IA},
    {"rel_diff_ia", Equation::rel_diff_IA},
    {"norm_diff_ia", Equation::norm_diff_IA},
    {"interior_minus_ring", Equation::interior_minus_ring},
}};

constexpr std::array<std::pair<std::string_view, PlaneKind>, 4> kPlanes{{
    {"gray", PlaneKind::Gray},
    {"edge", PlaneKind::Edge},
    {"gradient_size", PlaneKind::GradientSize},
    {"rgb_averaged", PlaneKind::RgbAveraged},
}};

constexpr std::array<std::pair<std::string_view, Aggregation>, 3> kAggregations{{
    {"average", Aggregation::Average},
    {"percentile65", Aggregation::Percentile65},
    {"as_is", Aggregation::AsIs},
}};

bool is_m1_equation(Equation e)
{
    return e == Equation::U_minus_D || e == Equation::rel_U_minus_D || e == Equation::abs_U_minus_D ||
           e == Equation::abs_rel_U_minus_D || e == Equation::global_rel_U_minus_D;
}

double safe_ratio(double num, double den)
{
    return den > 0.0 ? num / den : 0.0;
}

// 1-based rank ceil(p * n), clamped to [1, n]; the epsilon keeps exact
// products such as 0.35 * 100 from rounding up a rank.
std::size_t rank_of(double p, std::size_t n)
{
    const double r = std::ceil(p * static_cast<double>(n) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(r, 1.0)), 1, n);
}

struct M1Result {
    std::vector<LocalSample> samples;
    std::size_t total = 0;
};

// Row of the curve locus in column px, extended flat past the endpoints.
int locus_row(const std::vector<int>& rows, int x_left, int px)
{
    const int idx = std::clamp(px - x_left, 0, static_cast<int>(rows.size()) - 1);
    return rows[static_cast<std::size_t>(idx)];
}

M1Result sample_m1(const CandidateCurve& curve, const GrayImage& plane, const VesselRegion& vessel, int k,
                   const GradientField* gradient)
{
    M1Result out;
    out.total = curve.points.size();
    std::vector<int> rows(curve.points.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        rows[i] = pixel_row(curve.points[i].y);
    }
    out.samples.reserve(curve.points.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const int x = static_cast<int>(curve.points[i].x);
        const int y = rows[i];
        double sum_u = 0.0;
        double sum_d = 0.0;
        int n_u = 0;
        int n_d = 0;
        bool dropped = false;
        for (int py = y - k; py <= y + k - 1 && !dropped; ++py) {
            for (int px = x - 1; px <= x + 1; ++px) {
                if (!vessel.admits(px, py)) {
                    dropped = true;
                    break;
                }
                const double v = plane.at(px, py);
                if (py < locus_row(rows, curve.x_left, px)) {
                    sum_u += v;
                    ++n_u;
                } else {
                    sum_d += v;
                    ++n_d;
                }
            }
        }
        if (dropped || n_u == 0 || n_d == 0) {
            continue;
        }
        LocalSample s;
        s.U = sum_u / n_u;
        s.D = sum_d / n_d;
        s.I = plane.at(x, y);
        s.theta = curve.normals[i];
        if (gradient != nullptr && gradient->is_valid(x, y)) {
            // Image-frame direction (y down) mirrored into the curve frame (y up).
            s.phi = -gradient->direction.at(x, y);
            s.phi_valid = true;
        }
        out.samples.push_back(s);
    }
    return out;
}

bool keeps_enough(std::size_t retained, std::size_t total)
{
    return retained > 0 && 2 * retained >= total;
}

std::vector<double> m1_local_scores(const std::vector<LocalSample>& samples, Equation eq)
{
    double mean_u = 0.0;
    double mean_d = 0.0;
    if (eq == Equation::global_rel_U_minus_D) {
        for (const auto& s : samples) {
            mean_u += s.U;
            mean_d += s.D;
        }
        mean_u /= static_cast<double>(samples.size());
        mean_d /= static_cast<double>(samples.size());
    }
    std::vector<double> scores;
    scores.reserve(samples.size());
    for (const auto& s : samples) {
        scores.push_back(local_score(s, eq, mean_u, mean_d));
    }
    return scores;
}

struct PlaneScore {
    std::vector<double> local_scores;
    double score = 0.0;
};

std::optional<PlaneScore> score_m1(const CandidateCurve& curve, const GrayImage& plane, const VesselRegion& vessel,
                                   const Indicator& ind)
{
    const auto res = sample_m1(curve, plane, vessel, ind.region.rows(vessel), nullptr);
    if (!keeps_enough(res.samples.size(), res.total)) {
        return std::nullopt;
    }
    PlaneScore ps;
    ps.local_scores = m1_local_scores(res.samples, ind.equation);
    ps.score = aggregate(ps.local_scores, ind.aggregation);
    return ps;
}

std::optional<PlaneScore> score_m2(const CandidateCurve& curve, const GrayImage& plane, const GradientField& grad,
                                   const VesselRegion& vessel, const Indicator& ind)
{
    PlaneScore ps;
    ps.local_scores.reserve(curve.points.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const int x = static_cast<int>(curve.points[i].x);
        const int y = pixel_row(curve.points[i].y);
        if (!vessel.admits(x, y)) {
            continue;
        }
        LocalSample s;
        s.I = plane.at(x, y);
        s.theta = curve.normals[i];
        if (grad.is_valid(x, y)) {
            s.phi = -grad.direction.at(x, y);
            s.phi_valid = true;
        }
        ps.local_scores.push_back(local_score(s, ind.equation));
    }
    if (!keeps_enough(ps.local_scores.size(), curve.points.size())) {
        return std::nullopt;
    }
    ps.score = aggregate(ps.local_scores, ind.aggregation);
    return ps;
}

std::optional<PlaneScore> score_m3(const CandidateCurve& curve, const GrayImage& plane, const VesselRegion& vessel,
                                   const Indicator& ind)
{
    double sum_i = 0.0;
    double sum_a = 0.0;
    std::size_t n = 0;
    for (const auto& p : curve.points) {
        const int x = static_cast<int>(p.x);
        const int y = pixel_row(p.y);
        if (!vessel.admits(x, y) || !vessel.admits(x, y - 1)) {
            continue;
        }
        sum_i += plane.at(x, y);
        sum_a += plane.at(x, y - 1);
        ++n;
    }
    if (!keeps_enough(n, curve.points.size())) {
        return std::nullopt;
    }
    const double mean_i = sum_i / static_cast<double>(n);
    const double mean_a = sum_a / static_cast<double>(n);
    const double diff = std::abs(mean_i - mean_a);
    double score = diff;
    if (ind.equation == Equation::rel_diff_IA) {
        score = safe_ratio(diff, std::max(mean_i, mean_a));
    } else if (ind.equation == Equation::norm_diff_IA) {
        score = safe_ratio(diff, mean_i + mean_a);
    }
    return PlaneScore{{score}, score};
}

// Mean inside the full ellipse against the mean of the one-pixel ring just
// outside it.
std::optional<PlaneScore> score_interior(const CandidateCurve& curve, const GrayImage& plane,
                                         const VesselRegion& vessel)
{
    if (curve.h <= 0) {
        return std::nullopt;
    }
    const double a = 0.5 * (curve.x_right - curve.x_left);
    const double cx = 0.5 * (curve.x_left + curve.x_right);
    const double cy = curve.center_row;
    const double b = curve.h;
    double sum_in = 0.0;
    double sum_ring = 0.0;
    std::size_t n_in = 0;
    std::size_t n_ring = 0;
    for (int py = curve.center_row - curve.h - 1; py <= curve.center_row + curve.h + 1; ++py) {
        for (int px = curve.x_left - 1; px <= curve.x_right + 1; ++px) {
            if (!vessel.admits(px, py)) {
                continue;
            }
            const double u = (px - cx) / a;
            const double v = (py - cy) / b;
            const double d = u * u + v * v;
            if (d < 1.0) {
                sum_in += plane.at(px, py);
                ++n_in;
                continue;
            }
            const double uo = (px - cx) / (a + 1.0);
            const double vo = (py - cy) / (b + 1.0);
            if (uo * uo + vo * vo < 1.0) {
                sum_ring += plane.at(px, py);
                ++n_ring;
            }
        }
    }
    if (n_in == 0 || n_ring == 0) {
        return std::nullopt;
    }
    const double score = std::abs(sum_in / static_cast<double>(n_in) - sum_ring / static_cast<double>(n_ring));
    return PlaneScore{{score}, score};
}

std::optional<PlaneScore> score_on_plane(const CandidateCurve& curve, const GrayImage& plane,
                                         const ImagePlanes& planes, const VesselRegion& vessel,
                                         const Indicator& ind)
{
    switch (ind.method) {
    case Method::M1:
        return score_m1(curve, plane, vessel, ind);
    case Method::M2:
        return score_m2(curve, plane, planes.gray_gradient, vessel, ind);
    case Method::M3:
        return score_m3(curve, plane, vessel, ind);
    case Method::Interior:
        return score_interior(curve, plane, vessel);
    }
    return std::nullopt;
}

} // namespace

std::string_view to_string(Method m) noexcept { return enum_to_string(m, kMethods); }
std::string_view to_string(Equation e) noexcept { return enum_to_string(e, kEquations); }
std::string_view to_string(PlaneKind p) noexcept { return enum_to_string(p, kPlanes); }
std::string_view to_string(Aggregation a) noexcept { return enum_to_string(a, kAggregations); }
Method method_from_string(std::string_view s) { return enum_from_string(s, kMethods, "method"); }
Equation equation_from_string(std::string_view s) { return enum_from_string(s, kEquations, "equation"); }
PlaneKind plane_from_string(std::string_view s) { return enum_from_string(s, kPlanes, "plane"); }
Aggregation aggregation_from_string(std::string_view s) { return enum_from_string(s, kAggregations, "aggregation"); }

int RegionHeight::rows(const VesselRegion& v) const
{
    if (mode == Mode::OnePixel) {
        return 1;
    }
    return std::max(1, static_cast<int>(std::lround(fraction * v.height())));
}

void Indicator::validate() const
{
    const bool one_pixel = region.mode == RegionHeight::Mode::OnePixel;
    if (!one_pixel && !(region.fraction > 0.0 && region.fraction < 1.0)) {
        throw ConfigError("region fraction must be in (0, 1)");
    }
    switch (method) {
    case Method::M1:
        if (!is_m1_equation(equation)) {
            throw ConfigError("method m1 needs a U/D equation, got " + std::string(to_string(equation)));
        }
        if (aggregation == Aggregation::AsIs) {
            throw ConfigError("method m1 aggregates with average or percentile65");
        }
        return;
    case Method::M2:
        if (equation != Equation::I && equation != Equation::I_cos_theta_phi) {
            throw ConfigError("method m2 needs equation i or i_cos_theta_phi, got " + std::string(to_string(equation)));
        }
        if (aggregation == Aggregation::AsIs) {
            throw ConfigError("method m2 aggregates with average or percentile65");
        }
        break;
    case Method::M3:
        if (equation != Equation::diff_IA && equation != Equation::rel_diff_IA && equation != Equation::norm_diff_IA) {
            throw ConfigError("method m3 needs a diff_ia equation, got " + std::string(to_string(equation)));
        }
        if (aggregation != Aggregation::AsIs) {
            throw ConfigError("method m3 scores are used as is");
        }
        break;
    case Method::Interior:
        if (equation != Equation::interior_minus_ring) {
            throw ConfigError("interior method needs equation interior_minus_ring");
        }
        if (aggregation != Aggregation::AsIs) {
            throw ConfigError("interior scores are used as is");
        }
        break;
    }
    if (!one_pixel) {
        throw ConfigError("vessel-fraction regions only apply to method m1");
    }
}

ImagePlanes ImagePlanes::prepare(const GrayImage& gray, const Indicator& ind, const CannyParams& canny)
{
    ind.validate();
    if (ind.plane == PlaneKind::RgbAveraged) {
        throw ConfigError("rgb_averaged indicator needs a colour image");
    }
    ImagePlanes p;
    p.gray = gray;
    p.gray_gradient = sobel_gradient(gray);
    if (ind.plane == PlaneKind::Edge) {
        p.edge = to_gray_plane(canny_edges(gray, canny));
    } else if (ind.plane == PlaneKind::GradientSize) {
        p.gradient_size = p.gray_gradient.magnitude;
    }
    return p;
}

ImagePlanes ImagePlanes::prepare(const RgbImage& img, const Indicator& ind, const CannyParams& canny)
{
    if (ind.plane != PlaneKind::RgbAveraged) {
        return prepare(to_grayscale(img), ind, canny);
    }
    ind.validate();
    ImagePlanes p;
    p.gray = to_grayscale(img);
    p.gray_gradient = sobel_gradient(p.gray);
    p.rgb = split_channels(img);
    return p;
}

const GrayImage& ImagePlanes::plane(PlaneKind kind) const
{
    switch (kind) {
    case PlaneKind::Gray:
        return gray;
    case PlaneKind::Edge:
        if (edge) {
            return *edge;
        }
        break;
    case PlaneKind::GradientSize:
        if (gradient_size) {
            return *gradient_size;
        }
        break;
    case PlaneKind::RgbAveraged:
        break;
    }
    throw ConfigError("image plane '" + std::string(to_string(kind)) + "' was not prepared for this indicator");
}

std::vector<LocalSample> local_samples_m1(const CandidateCurve& curve, const GrayImage& plane,
                                          const VesselRegion& vessel, int region_rows, const GradientField* gradient)
{
    if (region_rows < 1) {
        throw ParameterError("region height must be >= 1");
    }
    auto res = sample_m1(curve, plane, vessel, region_rows, gradient);
    if (res.samples.empty()) {
        throw ParameterError("curve unsampleable");
    }
    return std::move(res.samples);
}

double local_score(const LocalSample& s, Equation eq, double mean_U, double mean_D)
{
    switch (eq) {
    case Equation::U_minus_D:
        return s.U - s.D;
    case Equation::rel_U_minus_D:
        return safe_ratio(s.U - s.D, std::max(s.U, s.D));
    case Equation::abs_U_minus_D:
        return std::abs(s.U - s.D);
    case Equation::abs_rel_U_minus_D:
        return safe_ratio(std::abs(s.U - s.D), std::max(s.U, s.D));
    case Equation::global_rel_U_minus_D:
        return safe_ratio(s.U - s.D, std::max(mean_U, mean_D));
    case Equation::I:
        return s.I;
    case Equation::I_cos_theta_phi:
        return s.phi_valid ? s.I * std::cos(s.theta - s.phi) : 0.0;
    default:
        throw ParameterError("equation " + std::string(to_string(eq)) + " has no per-point form");
    }
}

double aggregate(std::span<const double> scores, Aggregation mode)
{
    if (scores.empty()) {
        throw ParameterError("cannot aggregate an empty score list");
    }
    switch (mode) {
    case Aggregation::Average: {
        double sum = 0.0;
        for (double s : scores) {
            sum += s;
        }
        return std::abs(sum / static_cast<double>(scores.size()));
    }
    case Aggregation::Percentile65: {
        std::vector<double> sorted(scores.begin(), scores.end());
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const std::size_t r = rank_of(0.35, n);
        const double positive = sorted[r - 1];     // reached by >= 65% from above
        const double negative = sorted[n - r];     // mirrored: >= 65% at or below it
        return std::max({positive, -negative, 0.0});
    }
    case Aggregation::AsIs:
        if (scores.size() != 1) {
            throw ParameterError("as-is aggregation expects exactly one score");
        }
        return std::abs(scores.front());
    }
    return 0.0;
}

bool consistent_scores(std::span<const double> rel_scores, double fraction, double min_change)
{
    if (rel_scores.empty()) {
        return false;
    }
    std::vector<double> sorted(rel_scores.begin(), rel_scores.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t r = rank_of(1.0 - fraction, n);
    const double low = sorted[r - 1];
    const double high = sorted[n - r];
    return low > min_change || high < -min_change;
}

bool consistency_check(const CandidateCurve& curve, const GrayImage& gray, const VesselRegion& vessel,
                       double fraction, double min_change, int region_rows)
{
    const auto res = sample_m1(curve, gray, vessel, std::max(1, region_rows), nullptr);
    if (res.samples.empty()) {
        return false;
    }
    const auto rel = m1_local_scores(res.samples, Equation::rel_U_minus_D);
    return consistent_scores(rel, fraction, min_change);
}

std::optional<ScoredCurve> score_curve(const CandidateCurve& curve, const ImagePlanes& planes,
                                       const VesselRegion& vessel, const Indicator& indicator,
                                       const ConsistencyParams& consistency)
{
    std::optional<PlaneScore> ps;
    if (indicator.plane == PlaneKind::RgbAveraged) {
        if (!planes.rgb) {
            throw ConfigError("rgb_averaged indicator needs the colour channels prepared");
        }
        PlaneScore sum;
        for (const GrayImage* channel : {&planes.rgb->red, &planes.rgb->green, &planes.rgb->blue}) {
            auto one = score_on_plane(curve, *channel, planes, vessel, indicator);
            if (!one) {
                return std::nullopt;
            }
            if (sum.local_scores.empty()) {
                sum.local_scores.assign(one->local_scores.size(), 0.0);
            }
            for (std::size_t i = 0; i < sum.local_scores.size(); ++i) {
                sum.local_scores[i] += one->local_scores[i] / 3.0;
            }
            sum.score += one->score / 3.0;
        }
        ps = std::move(sum);
    } else {
        ps = score_on_plane(curve, planes.plane(indicator.plane), planes, vessel, indicator);
    }
    if (!ps) {
        return std::nullopt;
    }

    ScoredCurve out;
    out.curve = curve;
    out.score = ps->score;
    out.ellipse_score_source = curve.half;

    const int check_rows = indicator.method == Method::M1 ? indicator.region.rows(vessel) : 1;
    const bool reuse = indicator.method == Method::M1 && indicator.plane == PlaneKind::Gray &&
                       indicator.equation == Equation::rel_U_minus_D;
    out.consistent = reuse ? consistent_scores(ps->local_scores, consistency.fraction, consistency.min_change)
                           : consistency_check(curve, planes.gray, vessel, consistency.fraction,
                                               consistency.min_change, check_rows);
    out.local_scores = std::move(ps->local_scores);
    return out;
}

ScoredCurve score_ellipse(const ScoredCurve& upper, const ScoredCurve& lower, bool consistency_enabled)
{
    const auto effective = [&](const ScoredCurve& c) {
        return (!consistency_enabled || c.consistent) ? c.score : 0.0;
    };
    ScoredCurve out = effective(lower) > effective(upper) ? lower : upper;
    out.ellipse_score_source = out.curve.half;
    return out;
}

} // namespace liqsurf
