#include "liqsurf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "liqsurf/detector.hpp"
#include "liqsurf/image_io.hpp"
#include "liqsurf/report_io.hpp"

namespace liqsurf {

using json = nlohmann::ordered_json;

namespace {

double fraction(int num, int den) { return den > 0 ? static_cast<double>(num) / den : 0.0; }

struct LoadedImage {
    std::string id;
    RgbImage image;
    VesselRegion vessel;
    GroundTruth truth;
};

LoadedImage load_entry(const CorpusEntry& e)
{
    auto image = read_image(e.image);
    auto vessel = read_vessel(e.mask, image.width(), image.height());
    auto truth = truth_from_json(read_text_file(e.truth));
    if (truth.image_id != e.id) {
        throw ParameterError("ground truth " + e.truth.string() + " is for image '" + truth.image_id + "'");
    }
    return {e.id, std::move(image), std::move(vessel), std::move(truth)};
}

json tally_json(const ImageTally& t)
{
    return json{
        {"image_id", t.image_id},
        {"liquid_air", t.liquid_air},
        {"liquid_liquid", t.liquid_liquid},
        {"emulsive", t.emulsive},
        {"missed_liquid_air", t.missed_liquid_air},
        {"missed_liquid_liquid", t.missed_liquid_liquid},
        {"missed_emulsive", t.missed_emulsive},
        {"detections", t.detections},
        {"false_matches", t.false_matches},
        {"wrong_shape", t.wrong_shape},
        {"double_recognitions", t.double_recognitions},
    };
}

} // namespace

void MatchRule::validate() const
{
    if (!(row_tolerance >= 0.0) || !(height_tolerance_fraction >= 0.0) || !(height_tolerance_min >= 0.0)) {
        throw ParameterError("match tolerances must be >= 0");
    }
}

double MatchRule::height_tolerance(double truth_h) const
{
    return std::max(height_tolerance_min, height_tolerance_fraction * truth_h);
}

ImageTally match_detections(const DetectionReport& report, const GroundTruth& truth, const MatchRule& rule)
{
    rule.validate();
    if (report.image_id != truth.image_id) {
        throw ParameterError("report for image '" + report.image_id + "' compared with truth for '" +
                             truth.image_id + "'");
    }
    ImageTally t;
    t.image_id = truth.image_id;
    t.detections = static_cast<int>(report.accepted.size());

    std::vector<const ScoredCurve*> order;
    for (const auto& a : report.accepted) {
        order.push_back(&a);
    }
    std::stable_sort(order.begin(), order.end(), [](const ScoredCurve* a, const ScoredCurve* b) {
        return ranks_before(*a, *b);
    });

    const auto n = truth.surfaces.size();
    std::vector<bool> matched(n, false);
    std::vector<int> extra(n, 0);
    for (const auto* d : order) {
        // Nearest unmatched surface in range; ties go to the upper surface.
        std::optional<std::size_t> best;
        std::optional<std::size_t> taken;
        for (std::size_t i = 0; i < n; ++i) {
            const double dist = std::abs(d->curve.center_row - truth.surfaces[i].center_row);
            if (dist > rule.row_tolerance) {
                continue;
            }
            auto& slot = matched[i] ? taken : best;
            if (!slot || dist < std::abs(d->curve.center_row - truth.surfaces[*slot].center_row)) {
                slot = i;
            }
        }
        if (best) {
            matched[*best] = true;
            const auto& s = truth.surfaces[*best];
            if (std::abs(d->curve.h - s.h) > rule.height_tolerance(s.h)) {
                ++t.wrong_shape;
            }
        } else if (taken) {
            ++extra[*taken];
        } else {
            ++t.false_matches;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = truth.surfaces[i];
        const bool air = s.type == SurfaceType::LiquidAir;
        (air ? t.liquid_air : t.liquid_liquid) += 1;
        if (!matched[i]) {
            (air ? t.missed_liquid_air : t.missed_liquid_liquid) += 1;
        }
        if (s.emulsion) {
            ++t.emulsive;
            t.missed_emulsive += matched[i] ? 0 : 1;
        }
        t.double_recognitions += extra[i] > 0 ? 1 : 0;
    }
    return t;
}

EvalReport aggregate_eval(const std::vector<ImageTally>& tallies, const MatchRule& rule)
{
    if (tallies.empty()) {
        throw ParameterError("cannot aggregate an empty evaluation");
    }
    EvalReport r;
    r.rule = rule;
    r.per_image = tallies;
    r.images = static_cast<int>(tallies.size());
    for (const auto& t : tallies) {
        r.liquid_air += t.liquid_air;
        r.liquid_liquid += t.liquid_liquid;
        r.emulsive += t.emulsive;
        r.missed_liquid_air += t.missed_liquid_air;
        r.missed_liquid_liquid += t.missed_liquid_liquid;
        r.missed_emulsive += t.missed_emulsive;
        r.false_matches += t.false_matches;
        r.wrong_shape += t.wrong_shape;
        r.double_recognitions += t.double_recognitions;
    }
    const int total = r.liquid_air + r.liquid_liquid;
    r.miss_all = fraction(r.missed_liquid_air + r.missed_liquid_liquid, total);
    r.miss_liquid_air = fraction(r.missed_liquid_air, r.liquid_air);
    r.miss_liquid_liquid = fraction(r.missed_liquid_liquid, r.liquid_liquid);
    r.false_per_image = fraction(r.false_matches, r.images);
    r.wrong_shape_fraction = fraction(r.wrong_shape, total);
    r.double_recognition_fraction = fraction(r.double_recognitions, total);
    r.emulsive_miss_fraction = fraction(r.missed_emulsive, r.emulsive);
    return r;
}

std::string format_percent(double fraction, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, 100.0 * fraction);
    return buf;
}

std::string eval_to_json(const EvalReport& r)
{
    json per_image = json::array();
    for (const auto& t : r.per_image) {
        per_image.push_back(tally_json(t));
    }
    const json j{
        {"schema_version", kEvalSchemaVersion},
        {"images", r.images},
        {"surfaces", {{"liquid_air", r.liquid_air}, {"liquid_liquid", r.liquid_liquid}, {"emulsive", r.emulsive}}},
        {"miss_all", r.miss_all},
        {"miss_liquid_air", r.miss_liquid_air},
        {"miss_liquid_liquid", r.miss_liquid_liquid},
        {"false_per_image", r.false_per_image},
        {"wrong_shape_fraction", r.wrong_shape_fraction},
        {"double_recognition_fraction", r.double_recognition_fraction},
        {"emulsive_miss_fraction", r.emulsive_miss_fraction},
        {"match_rule",
         {{"row_tolerance", r.rule.row_tolerance},
          {"height_tolerance_fraction", r.rule.height_tolerance_fraction},
          {"height_tolerance_min", r.rule.height_tolerance_min},
          {"wrong_shape_note", "height tolerance is a stand-in for visual shape judgement"}}},
        {"per_image", per_image},
    };
    return j.dump(2) + "\n";
}

std::string eval_table(const EvalReport& r)
{
    std::ostringstream s;
    char line[256];
    std::snprintf(line, sizeof line, "%-28s %8s\n", "metric", "value");
    s << line;
    const auto row = [&](const char* name, const std::string& value) {
        std::snprintf(line, sizeof line, "%-28s %8s\n", name, value.c_str());
        s << line;
    };
    row("images", std::to_string(r.images));
    row("liquid-air surfaces", std::to_string(r.liquid_air));
    row("liquid-liquid surfaces", std::to_string(r.liquid_liquid));
    row("missed, all (%)", format_percent(r.miss_all));
    row("missed liquid-air (%)", format_percent(r.miss_liquid_air));
    row("missed liquid-liquid (%)", format_percent(r.miss_liquid_liquid));
    row("false matches per image (%)", format_percent(r.false_per_image));
    row("wrong shape (%)", format_percent(r.wrong_shape_fraction));
    row("double recognition (%)", format_percent(r.double_recognition_fraction));
    row("emulsion missed (%)", format_percent(r.emulsive_miss_fraction));
    return s.str();
}

EvalReport evaluate_corpus(const std::filesystem::path& dir, const DetectorConfig& cfg, const MatchRule& rule)
{
    cfg.validate();
    rule.validate();
    const auto manifest = read_manifest(dir);
    std::vector<ImageTally> tallies;
    for (const auto& e : manifest.entries) {
        const auto img = load_entry(e);
        const auto report = detect(img.image, img.vessel, cfg, img.id);
        tallies.push_back(match_detections(report, img.truth, rule));
    }
    return aggregate_eval(tallies, rule);
}

std::vector<SweepRow> sweep_corpus(const std::filesystem::path& dir, const DetectorConfig& cfg, const MatchRule& rule,
                                   std::vector<double> thresholds)
{
    if (thresholds.empty()) {
        throw ParameterError("empty threshold range");
    }
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    for (double t : thresholds) {
        if (!(t > 0.0 && t < 1.0)) {
            throw ConfigError("sweep thresholds must lie in (0, 1)");
        }
    }
    cfg.validate();
    rule.validate();
    const auto manifest = read_manifest(dir);
    std::vector<std::vector<ImageTally>> tallies(thresholds.size());
    for (const auto& e : manifest.entries) {
        const auto img = load_entry(e);
        const auto planes = ImagePlanes::prepare(img.image, cfg.indicator, cfg.canny);
        const auto scored = score_candidates(planes, img.vessel, cfg);
        std::set<std::pair<int, int>> previous;
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            auto sel = cfg.selection;
            sel.threshold = thresholds[k];
            sel.require_consistency = cfg.consistency.enabled;
            auto report = select(scored, sel, sel.separation_for(img.vessel));
            report.image_id = img.id;
            std::set<std::pair<int, int>> current;
            for (const auto& a : report.accepted) {
                current.insert({a.curve.center_row, a.curve.h});
            }
            if (k > 0 && !std::includes(previous.begin(), previous.end(), current.begin(), current.end())) {
                throw Error("acceptance sets not nested in T for image " + img.id);
            }
            previous = std::move(current);
            tallies[k].push_back(match_detections(report, img.truth, rule));
        }
    }
    std::vector<SweepRow> rows;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        rows.push_back({thresholds[k], aggregate_eval(tallies[k], rule)});
    }
    return rows;
}

std::string sweep_table(const std::vector<SweepRow>& rows)
{
    std::ostringstream s;
    char line[128];
    std::snprintf(line, sizeof line, "%6s %10s %14s\n", "T", "miss (%)", "false/image");
    s << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%6.3f %10s %14.3f\n", r.threshold, format_percent(r.eval.miss_all).c_str(),
                      r.eval.false_per_image);
        s << line;
    }
    return s.str();
}

} // namespace liqsurf
