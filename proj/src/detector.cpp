#include "liqsurf/detector.hpp"

#include <algorithm>
#include <thread>

namespace liqsurf {

namespace {

void strip(ScoredCurve& s)
{
    s.local_scores = {};
    s.curve.points = {};
    s.curve.normals = {};
}

std::vector<ScoredCurve> score_row(const ImagePlanes& planes, const VesselRegion& v, const DetectorConfig& cfg,
                                   int row)
{
    std::vector<ScoredCurve> out;
    // Halves of the same height are emitted next to each other, upper first.
    std::optional<ScoredCurve> upper;
    const auto take_upper = [&]() {
        if (upper) {
            out.push_back(std::move(*upper));
            upper.reset();
        }
    };
    for (const auto& c : candidates_for_row(v, cfg.scan, row)) {
        if (c.half == Half::Line && row == v.row_top()) {
            continue; // scored as the ceiling
        }
        if (upper && (c.half != Half::Lower || c.h != upper->curve.h)) {
            take_upper();
        }
        auto s = score_curve(c, planes, v, cfg.indicator, cfg.consistency);
        if (!s) {
            continue;
        }
        strip(*s);
        if (c.half == Half::Upper) {
            upper = std::move(s);
        } else if (c.half == Half::Lower && upper) {
            out.push_back(score_ellipse(*upper, *s, cfg.consistency.enabled));
            upper.reset();
        } else {
            out.push_back(std::move(*s));
        }
    }
    take_upper();
    return out;
}

} // namespace

std::vector<CandidateCurve> boundary_lines(const VesselRegion& v)
{
    std::vector<CandidateCurve> out;
    const auto& top = v.extent(v.row_top());
    if (top.x_left < top.x_right) {
        out.push_back(make_candidate(v.row_top(), top.x_left, top.x_right, 0, Half::Line));
    }
    const auto& bottom = v.extent(v.row_bottom());
    const int floor_row = v.row_bottom() + 1 < v.image_height() ? v.row_bottom() + 1 : v.row_bottom();
    if (bottom.x_left < bottom.x_right && (floor_row != v.row_top() || out.empty())) {
        out.push_back(make_candidate(floor_row, bottom.x_left, bottom.x_right, 0, Half::Line));
    }
    return out;
}

CandidateCurve rebuild_curve(const CandidateCurve& c)
{
    return make_candidate(c.center_row, c.x_left, c.x_right, c.h, c.half);
}

std::vector<ScoredCurve> score_candidates(const ImagePlanes& planes, const VesselRegion& v, const DetectorConfig& cfg)
{
    std::vector<ScoredCurve> out;
    for (const auto& b : boundary_lines(v)) {
        // Boundaries are reported even when the indicator cannot score a line.
        auto s = score_curve(b, planes, v, cfg.indicator, cfg.consistency);
        if (!s) {
            s = ScoredCurve{};
            s->curve = b;
            s->ellipse_score_source = Half::Line;
        }
        strip(*s);
        s->vessel_boundary = true;
        out.push_back(std::move(*s));
    }

    const auto rows = scan_rows(v, cfg.scan);
    const auto n_threads = static_cast<std::size_t>(std::clamp<int>(cfg.threads, 1, std::max<int>(1, rows.size())));
    std::vector<std::vector<ScoredCurve>> per_row(rows.size());
    if (n_threads == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            per_row[i] = score_row(planes, v, cfg, rows[i]);
        }
    } else {
        std::vector<std::jthread> workers;
        std::vector<std::exception_ptr> errors(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) {
            workers.emplace_back([&, t]() {
                try {
                    for (std::size_t i = t; i < rows.size(); i += n_threads) {
                        per_row[i] = score_row(planes, v, cfg, rows[i]);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        workers.clear();
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    for (auto& r : per_row) {
        std::move(r.begin(), r.end(), std::back_inserter(out));
    }
    return out;
}

DetectionReport detect(const RgbImage& image, const VesselRegion& v, const DetectorConfig& cfg,
                       const std::string& image_id)
{
    cfg.validate();
    if (image.width() != v.image_width() || image.height() != v.image_height()) {
        throw ParameterError("vessel region was built for a " + std::to_string(v.image_width()) + "x" +
                             std::to_string(v.image_height()) + " image, got " + std::to_string(image.width()) +
                             "x" + std::to_string(image.height()));
    }
    const auto planes = ImagePlanes::prepare(image, cfg.indicator, cfg.canny);
    const auto scored = score_candidates(planes, v, cfg);
    if (scored.empty()) {
        throw ParameterError("vessel too narrow: no candidate could be scored");
    }
    auto sel = cfg.selection;
    sel.require_consistency = cfg.consistency.enabled;
    auto report = select(scored, sel, sel.separation_for(v));
    report.image_id = image_id;
    const auto bounds = floor_ceiling(v);
    report.ceiling_row = bounds.ceiling_row;
    report.floor_row = bounds.floor_row;
    report.config_fingerprint = cfg.fingerprint();
    return report;
}

} // namespace liqsurf
