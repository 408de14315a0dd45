#include "liqsurf/report_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "liqsurf/detector.hpp"

namespace liqsurf {

using json = nlohmann::ordered_json;

namespace {

json curve_json(const ScoredCurve& s)
{
    return json{
        {"center_row", s.curve.center_row},
        {"x_left", s.curve.x_left},
        {"x_right", s.curve.x_right},
        {"h", s.curve.h},
        {"half", to_string(s.curve.half)},
        {"score", s.score},
        {"consistent", s.consistent},
    };
}

ScoredCurve curve_from_json(const json& j, bool boundary)
{
    ScoredCurve s;
    s.curve.center_row = j.at("center_row").get<int>();
    s.curve.x_left = j.at("x_left").get<int>();
    s.curve.x_right = j.at("x_right").get<int>();
    s.curve.h = j.at("h").get<int>();
    s.curve.half = half_from_string(j.at("half").get<std::string>());
    s.score = j.at("score").get<double>();
    s.consistent = j.at("consistent").get<bool>();
    s.ellipse_score_source = s.curve.half;
    s.vessel_boundary = boundary;
    return s;
}

void draw_curve(RgbImage& img, const CandidateCurve& parameters, Rgb colour)
{
    const auto c = rebuild_curve(parameters);
    int prev_row = 0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const int x = static_cast<int>(c.points[i].x);
        const int y = pixel_row(c.points[i].y);
        // Fill the vertical run to the previous column so steep ends stay connected.
        const int from = i == 0 ? y : std::min(y, prev_row + (y > prev_row ? 1 : 0));
        const int to = i == 0 ? y : std::max(y, prev_row - (y < prev_row ? 1 : 0));
        for (int yy = from; yy <= to; ++yy) {
            if (img.contains(x, yy)) {
                img.at(x, yy) = colour;
            }
        }
        prev_row = y;
    }
}

} // namespace

std::string report_to_json(const DetectionReport& r)
{
    json accepted = json::array();
    for (const auto& s : r.accepted) {
        accepted.push_back(curve_json(s));
    }
    json boundaries = json::array();
    for (const auto& s : r.boundaries) {
        boundaries.push_back(curve_json(s));
    }
    const json j{
        {"schema_version", kReportSchemaVersion},
        {"image_id", r.image_id},
        {"config_fingerprint", r.config_fingerprint},
        {"ceiling_row", r.ceiling_row},
        {"floor_row", r.floor_row},
        {"best_score", r.best_score},
        {"accepted", accepted},
        {"boundaries", boundaries},
    };
    return j.dump(2) + "\n";
}

DetectionReport report_from_json(const std::string& text)
{
    try {
        const auto j = json::parse(text);
        if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
            throw ParameterError("unsupported report schema_version");
        }
        DetectionReport r;
        r.image_id = j.at("image_id").get<std::string>();
        r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        r.ceiling_row = j.at("ceiling_row").get<int>();
        r.floor_row = j.at("floor_row").get<int>();
        r.best_score = j.at("best_score").get<double>();
        for (const auto& c : j.at("accepted")) {
            r.accepted.push_back(curve_from_json(c, false));
        }
        for (const auto& c : j.at("boundaries")) {
            r.boundaries.push_back(curve_from_json(c, true));
        }
        return r;
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed detection report: ") + e.what());
    }
}

RgbImage annotate(const RgbImage& image, const VesselRegion& v, const DetectionReport& r)
{
    RgbImage out = image;
    const Rgb white{255, 255, 255};
    const Rgb black{0, 0, 0};
    for (int y = v.row_top(); y <= v.row_bottom(); ++y) {
        for (int x = v.extent(y).x_left; x <= v.extent(y).x_right; ++x) {
            const bool edge = !v.contains(x - 1, y) || !v.contains(x + 1, y) || !v.contains(x, y - 1) ||
                              !v.contains(x, y + 1);
            if (edge) {
                out.at(x, y) = white;
            }
        }
    }
    for (const auto& b : r.boundaries) {
        draw_curve(out, b.curve, white);
    }
    for (const auto& a : r.accepted) {
        draw_curve(out, a.curve, black);
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        out << text;
        if (!out.flush()) {
            throw IoError("cannot write " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot write " + path.string());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace liqsurf
