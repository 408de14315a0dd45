#include "liqsurf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <json.hpp>

#include "liqsurf/candidates.hpp"
#include "liqsurf/image_io.hpp"
#include "liqsurf/report_io.hpp"

namespace liqsurf {

using json = nlohmann::ordered_json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Projected surface ellipse; same parametrisation as the scan candidates.
struct SurfaceGeom {
    int cy = 0;
    int x_left = 0;
    int x_right = 0;
    double cx = 0.0;
    double a = 1.0;
    double b = 0.0;

    double rise(int px) const
    {
        const double t = (px - cx) / a;
        return b * std::sqrt(std::max(0.0, 1.0 - t * t));
    }
    /// First row of the lower phase in column px.
    int upper_row(int px) const { return px < x_left || px > x_right ? cy : pixel_row(cy - rise(px)); }
    int lower_row(int px) const { return px < x_left || px > x_right ? cy : pixel_row(cy + rise(px)); }
};

SurfaceGeom geom_of(const TruthSurface& s)
{
    SurfaceGeom g;
    g.cy = s.center_row;
    g.x_left = s.x_left;
    g.x_right = s.x_right;
    g.cx = 0.5 * (s.x_left + s.x_right);
    g.a = 0.5 * (s.x_right - s.x_left);
    g.b = s.h;
    return g;
}

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

double lerp(double a, double b, double t) { return a + (b - a) * t; }

double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng) { return uniform_int(rng, 0, 1) == 1; }

json spec_to_json(const SceneSpec& s)
{
    json profile = json::array();
    for (const auto& p : s.profile) {
        profile.push_back({{"row", p.row}, {"half_width", p.half_width}});
    }
    json phases = json::array();
    for (const auto& p : s.phases) {
        phases.push_back({{"fill_fraction", p.fill_fraction}, {"intensity", p.intensity}, {"noise_sigma", p.noise_sigma}});
    }
    json glare = json::array();
    for (const auto& g : s.glare) {
        glare.push_back(
            {{"row", g.row}, {"width", g.width}, {"half_height", g.half_height}, {"intensity", g.intensity}});
    }
    json emulsion = nullptr;
    if (s.emulsion) {
        emulsion = {{"surface_index", s.emulsion->surface_index}, {"band_height", s.emulsion->band_height}};
    }
    return json{
        {"width", s.width},
        {"height", s.height},
        {"vessel_kind", s.vessel_kind},
        {"profile", profile},
        {"view_angle", s.view_angle},
        {"background", s.background},
        {"tablecloth", s.tablecloth},
        {"wall_intensity", s.wall_intensity},
        {"wall_thickness", s.wall_thickness},
        {"air_intensity", s.air_intensity},
        {"air_noise_sigma", s.air_noise_sigma},
        {"phases", phases},
        {"rim_contrast", s.rim_contrast},
        {"highlight", s.highlight},
        {"emulsion", emulsion},
        {"glare", glare},
    };
}

std::string index_id(std::size_t i, int n)
{
    int digits = 3;
    for (int m = n - 1; m >= 1000; m /= 10) {
        ++digits;
    }
    auto id = std::to_string(i);
    return std::string(static_cast<std::size_t>(std::max(0, digits - static_cast<int>(id.size()))), '0') + id;
}

} // namespace

std::string_view to_string(SurfaceType t) noexcept
{
    return t == SurfaceType::LiquidAir ? "liquid_air" : "liquid_liquid";
}

SurfaceType surface_type_from_string(std::string_view s)
{
    if (s == "liquid_air") {
        return SurfaceType::LiquidAir;
    }
    if (s == "liquid_liquid") {
        return SurfaceType::LiquidLiquid;
    }
    throw ParameterError("unknown surface type: " + std::string(s));
}

VesselRegion vessel_from_spec(const SceneSpec& spec)
{
    if (spec.profile.size() < 2) {
        throw ParameterError("vessel profile needs at least two control points");
    }
    const double cx = 0.5 * (spec.width - 1);
    std::vector<RowExtent> extents;
    for (std::size_t i = 0; i + 1 < spec.profile.size(); ++i) {
        const auto& p = spec.profile[i];
        const auto& q = spec.profile[i + 1];
        if (q.row <= p.row) {
            throw ParameterError("vessel profile rows must increase");
        }
        const int last = i + 2 == spec.profile.size() ? q.row : q.row - 1;
        for (int y = p.row; y <= last; ++y) {
            const double hw = lerp(p.half_width, q.half_width, double(y - p.row) / (q.row - p.row));
            extents.push_back({static_cast<int>(std::ceil(cx - hw - 1e-9)), static_cast<int>(std::floor(cx + hw + 1e-9))});
        }
    }
    return VesselRegion(spec.profile.front().row, std::move(extents), spec.width, spec.height);
}

std::vector<TruthSurface> truth_surfaces(const SceneSpec& spec)
{
    const auto v = vessel_from_spec(spec);
    std::vector<TruthSurface> out;
    for (std::size_t i = 0; i < spec.phases.size(); ++i) {
        TruthSurface s;
        s.center_row = v.row_bottom() - static_cast<int>(std::lround(spec.phases[i].fill_fraction * (v.height() - 1)));
        const auto& e = v.extent(s.center_row);
        s.x_left = e.x_left;
        s.x_right = e.x_right;
        s.view_height = view_height(e.width(), spec.view_angle);
        // Drawn with a whole-pixel semi-axis, like the scan candidates.
        s.h = std::round(0.5 * s.view_height);
        s.type = i == 0 ? SurfaceType::LiquidAir : SurfaceType::LiquidLiquid;
        s.emulsion = spec.emulsion && spec.emulsion->surface_index == static_cast<int>(i);
        out.push_back(s);
    }
    return out;
}

void SceneSpec::validate() const
{
    if (width < 16 || height < 16) {
        throw ParameterError("scene must be at least 16x16");
    }
    if (!in_range(view_angle, 0.0, std::numbers::pi / 3.0 + 1e-12)) {
        throw ParameterError("view angle must be in [0, pi/3]");
    }
    for (const double v : {background, tablecloth, wall_intensity, air_intensity}) {
        if (!in_range(v, 0.0, 255.0)) {
            throw ParameterError("intensities must be in [0, 255]");
        }
    }
    if (air_noise_sigma < 0.0 || wall_thickness < 1) {
        throw ParameterError("noise sigma must be >= 0 and wall thickness >= 1");
    }
    for (const auto& p : profile) {
        if (!(p.half_width >= 1.0)) {
            throw ParameterError("vessel half width must be >= 1");
        }
    }
    const auto v = vessel_from_spec(*this);
    if (v.row_top() - wall_thickness < 0 || v.row_bottom() + wall_thickness >= height) {
        throw ParameterError("vessel wall does not fit vertically in the image");
    }
    for (const auto& e : v.extents()) {
        if (e.x_left - wall_thickness < 0 || e.x_right + wall_thickness >= width) {
            throw ParameterError("vessel wall does not fit horizontally in the image");
        }
    }
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const auto& p = phases[i];
        if (!(p.fill_fraction > 0.0 && p.fill_fraction < 1.0)) {
            throw ParameterError("fill fractions must be in (0, 1)");
        }
        if (i > 0 && !(p.fill_fraction < phases[i - 1].fill_fraction)) {
            throw ParameterError("fill fractions must strictly decrease from the top phase down");
        }
        if (!in_range(p.intensity, 0.0, 255.0) || p.noise_sigma < 0.0) {
            throw ParameterError("phase intensity must be in [0, 255] and noise sigma >= 0");
        }
    }
    for (const auto& s : truth_surfaces(*this)) {
        if (s.center_row - std::ceil(s.h) <= v.row_top() || s.center_row >= v.row_bottom()) {
            throw ParameterError("surface at row " + std::to_string(s.center_row) + " does not fit in the vessel");
        }
    }
    if (emulsion && (emulsion->surface_index < 0 || emulsion->surface_index >= static_cast<int>(phases.size()) ||
                     emulsion->band_height < 1)) {
        throw ParameterError("emulsion band must name an existing surface and have height >= 1");
    }
    for (const auto& g : glare) {
        if (!v.covers_row(g.row) || g.width < 2 || g.width > v.extent(g.row).width() || g.half_height < 0) {
            throw ParameterError("glare mark must lie inside the vessel and be narrower than it");
        }
        if (!in_range(g.intensity, -255.0, 255.0)) {
            throw ParameterError("glare intensity must be in [-255, 255]");
        }
    }
}

RenderedScene render(const SceneSpec& spec, std::uint64_t seed)
{
    spec.validate();
    const auto v = vessel_from_spec(spec);
    const auto surfaces = truth_surfaces(spec);
    std::vector<SurfaceGeom> geoms;
    for (const auto& s : surfaces) {
        geoms.push_back(geom_of(s));
    }

    RenderedScene out;
    out.mask = v.rasterize();
    Plane<double> value(spec.width, spec.height, spec.background);
    Plane<double> sigma(spec.width, spec.height, spec.air_noise_sigma);

    for (int y = v.row_bottom() + spec.wall_thickness + 1; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            value.at(x, y) = spec.tablecloth;
        }
    }
    const int t = spec.wall_thickness;
    for (int y = std::max(0, v.row_top() - t); y <= std::min(spec.height - 1, v.row_bottom() + t); ++y) {
        for (int x = 0; x < spec.width; ++x) {
            if (out.mask.at(x, y) != 0) {
                continue;
            }
            bool near = false;
            for (int dy = -t; dy <= t && !near; ++dy) {
                for (int dx = -t; dx <= t; ++dx) {
                    if (out.mask.contains(x + dx, y + dy) && out.mask.at(x + dx, y + dy) != 0) {
                        near = true;
                        break;
                    }
                }
            }
            if (near) {
                value.at(x, y) = spec.wall_intensity;
            }
        }
    }

    // Region 0 is the air, region i > 0 the i-th liquid phase.
    const auto region_intensity = [&](std::size_t r) {
        return r == 0 ? spec.air_intensity : spec.phases[r - 1].intensity;
    };
    const auto region_sigma = [&](std::size_t r) {
        return r == 0 ? spec.air_noise_sigma : spec.phases[r - 1].noise_sigma;
    };
    for (int y = v.row_top(); y <= v.row_bottom(); ++y) {
        for (int x = v.extent(y).x_left; x <= v.extent(y).x_right; ++x) {
            std::size_t region = 0;
            for (const auto& g : geoms) {
                if (y >= g.upper_row(x)) {
                    ++region;
                }
            }
            double val = region_intensity(region);
            if (spec.emulsion) {
                const auto k = static_cast<std::size_t>(spec.emulsion->surface_index);
                const double band = spec.emulsion->band_height;
                const double top = geoms[k].upper_row(x) - 0.5 * band;
                const double f = (y + 0.5 - top) / band;
                if ((region == k || region == k + 1) && f > 0.0 && f < 1.0) {
                    val = lerp(region_intensity(k), region_intensity(k + 1), f);
                }
            }
            value.at(x, y) = val;
            sigma.at(x, y) = region_sigma(region);
        }
    }

    for (const auto& g : geoms) {
        if (g.b < 1.0) {
            continue;
        }
        for (int x = g.x_left; x <= g.x_right; ++x) {
            if (v.contains(x, g.lower_row(x))) {
                value.at(x, g.lower_row(x)) += spec.rim_contrast;
            }
            if (v.contains(x, g.upper_row(x))) {
                value.at(x, g.upper_row(x)) += spec.highlight;
            }
        }
    }

    for (const auto& mark : spec.glare) {
        const double cx = 0.5 * (v.extent(mark.row).x_left + v.extent(mark.row).x_right);
        const double a = 0.5 * (mark.width - 1);
        const double b = mark.half_height;
        EdgeMap drawn(spec.width, spec.height);
        const int steps = static_cast<int>(std::ceil(8.0 * (a + b))) + 8;
        for (int i = 0; i < steps; ++i) {
            const double th = 2.0 * std::numbers::pi * i / steps;
            const int px = static_cast<int>(std::lround(cx + a * std::cos(th)));
            const int py = pixel_row(mark.row + b * std::sin(th));
            if (v.contains(px, py) && drawn.at(px, py) == 0) {
                drawn.at(px, py) = 1;
                value.at(px, py) += mark.intensity;
            }
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    out.image = RgbImage(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            const double z = noise(rng);
            const double pv = std::clamp(std::round(value.at(x, y) + sigma.at(x, y) * z), 0.0, 255.0);
            const auto g8 = static_cast<std::uint8_t>(pv);
            out.image.at(x, y) = {g8, g8, g8};
        }
    }

    out.truth.ceiling_row = v.row_top();
    out.truth.floor_row = v.row_bottom();
    out.truth.surfaces = surfaces;
    return out;
}

const std::vector<std::string>& corpus_profiles()
{
    static const std::vector<std::string> names{"easy", "emulsive", "glare", "empty"};
    return names;
}

SceneSpec random_scene(std::string_view profile, std::mt19937_64& rng)
{
    if (std::find(corpus_profiles().begin(), corpus_profiles().end(), profile) == corpus_profiles().end()) {
        throw ParameterError("unknown corpus profile: " + std::string(profile));
    }
    const bool empty = profile == "empty";
    SceneSpec s;
    s.background = uniform(rng, 8.0, 20.0);
    s.tablecloth = uniform(rng, 24.0, 34.0);
    s.wall_intensity = uniform(rng, 110.0, 140.0);
    s.air_intensity = uniform(rng, 40.0, 70.0);
    s.view_angle = uniform(rng, 0.0, 25.0) * kDeg;

    const int top = uniform_int(rng, 22, 34);
    const int bottom = uniform_int(rng, 205, 222);
    const double hw = uniform(rng, 50.0, 74.0);
    const int kind = uniform_int(rng, 0, 2);
    int zone_top = top;
    if (kind == 0) {
        s.vessel_kind = "cylinder";
        s.profile = {{top, hw}, {bottom, hw}};
    } else if (kind == 1) {
        s.vessel_kind = "beaker";
        s.profile = {{top, hw}, {bottom, hw * uniform(rng, 0.88, 0.95)}};
    } else {
        s.vessel_kind = "bottle";
        const double neck = hw * uniform(rng, 0.3, 0.4);
        const int n = uniform_int(rng, 14, 22);
        const int sh = uniform_int(rng, 14, 22);
        s.profile = {{top, neck}, {top + n, neck}, {top + n + sh, hw}, {bottom, hw}};
        zone_top = top + n + sh;
    }
    const int height = bottom - top + 1;
    const double sigma = empty ? uniform(rng, 0.0, 2.0) : uniform(rng, 1.0, 5.0);
    s.air_noise_sigma = sigma;
    if (empty) {
        return s;
    }

    // Surfaces stay clear of the shoulder, the floor and each other.
    const double b_max = hw * std::sin(s.view_angle);
    const int upper = zone_top + static_cast<int>(std::ceil(b_max + 6.0 + 0.04 * height));
    const int lower = bottom - static_cast<int>(std::ceil(0.12 * height));
    const int gap = static_cast<int>(std::ceil(std::max(0.15 * height, b_max + 10.0)));
    const int n_phases = profile == "emulsive" ? 2 : uniform_int(rng, 1, 2);

    std::vector<int> rows;
    if (n_phases == 1) {
        rows.push_back(uniform_int(rng, upper, lower));
    } else {
        const int r1 = uniform_int(rng, upper, lower - gap);
        rows = {r1, uniform_int(rng, r1 + gap, lower)};
    }

    double above = s.air_intensity;
    for (int i = 0; i < n_phases; ++i) {
        PhaseSpec p;
        p.fill_fraction = static_cast<double>(bottom - rows[static_cast<std::size_t>(i)]) / (height - 1);
        p.noise_sigma = sigma;
        if (i == 0) {
            p.intensity = above + uniform(rng, 50.0, 100.0);
        } else {
            const double c = uniform(rng, 40.0, 80.0);
            const bool brighter = above + c <= 220.0 && (above - c < 30.0 || coin(rng));
            p.intensity = brighter ? above + c : above - c;
        }
        above = p.intensity;
        s.phases.push_back(p);
    }
    s.rim_contrast = uniform(rng, 5.0, 10.0);
    s.highlight = uniform(rng, 0.0, 5.0);

    if (profile == "emulsive") {
        const int lo = static_cast<int>(std::ceil(0.02 * height));
        s.emulsion = EmulsionBand{1, uniform_int(rng, lo, static_cast<int>(std::ceil(0.06 * height)))};
    }
    if (profile == "glare") {
        const auto v = vessel_from_spec(s);
        const int count = uniform_int(rng, 1, 3);
        for (int i = 0; i < count; ++i) {
            GlareMark g;
            g.row = uniform_int(rng, zone_top + 8, bottom - 8);
            g.width = std::max(2, static_cast<int>(std::lround(v.extent(g.row).width() * uniform(rng, 0.3, 0.6))));
            g.half_height = uniform_int(rng, 2, 8);
            g.intensity = uniform(rng, 90.0, 140.0);
            s.glare.push_back(g);
        }
    }
    return s;
}

std::uint64_t image_seed(std::uint64_t seed, std::size_t index)
{
    // splitmix64 finaliser over (seed, index)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string truth_to_json(const GroundTruth& t)
{
    json surfaces = json::array();
    for (const auto& s : t.surfaces) {
        surfaces.push_back({
            {"center_row", s.center_row},
            {"x_left", s.x_left},
            {"x_right", s.x_right},
            {"h", s.h},
            {"view_height", s.view_height},
            {"half", "upper"},
            {"type", to_string(s.type)},
            {"emulsion", s.emulsion},
        });
    }
    const json j{
        {"schema_version", kCorpusSchemaVersion},
        {"image_id", t.image_id},
        {"ceiling_row", t.ceiling_row},
        {"floor_row", t.floor_row},
        {"surfaces", surfaces},
    };
    return j.dump(2) + "\n";
}

GroundTruth truth_from_json(const std::string& text)
{
    try {
        const auto j = json::parse(text);
        if (j.at("schema_version").get<int>() != kCorpusSchemaVersion) {
            throw ParameterError("unsupported ground truth schema_version");
        }
        GroundTruth t;
        t.image_id = j.at("image_id").get<std::string>();
        t.ceiling_row = j.at("ceiling_row").get<int>();
        t.floor_row = j.at("floor_row").get<int>();
        for (const auto& s : j.at("surfaces")) {
            TruthSurface ts;
            ts.center_row = s.at("center_row").get<int>();
            ts.x_left = s.at("x_left").get<int>();
            ts.x_right = s.at("x_right").get<int>();
            ts.h = s.at("h").get<double>();
            ts.view_height = s.at("view_height").get<double>();
            ts.type = surface_type_from_string(s.at("type").get<std::string>());
            ts.emulsion = s.value("emulsion", false);
            t.surfaces.push_back(ts);
        }
        return t;
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed ground truth: ") + e.what());
    }
}

CorpusManifest generate_corpus(const std::filesystem::path& dir, int n, std::string_view profile, std::uint64_t seed)
{
    if (n < 1) {
        throw ParameterError("corpus size must be >= 1");
    }
    if (std::find(corpus_profiles().begin(), corpus_profiles().end(), profile) == corpus_profiles().end()) {
        throw ParameterError("unknown corpus profile: " + std::string(profile));
    }
    std::error_code ec;
    for (const char* sub : {"images", "masks", "truth"}) {
        std::filesystem::create_directories(dir / sub, ec);
        if (ec) {
            throw IoError("cannot create " + (dir / sub).string() + ": " + ec.message());
        }
    }
    std::filesystem::remove(dir / "manifest.json", ec);

    CorpusManifest manifest;
    manifest.profile = std::string(profile);
    manifest.seed = seed;
    json images = json::array();
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const auto id = index_id(idx, n);
        const auto s = image_seed(seed, idx);
        std::mt19937_64 rng(s);
        const auto spec = random_scene(profile, rng);
        auto scene = render(spec, rng());
        scene.truth.image_id = id;

        CorpusEntry e{id, "images/" + id + ".png", "masks/" + id + ".png", "truth/" + id + ".json"};
        write_png(dir / e.image, scene.image);
        write_png(dir / e.mask, scene.mask);
        write_text_file(dir / e.truth, truth_to_json(scene.truth));
        images.push_back({
            {"id", id},
            {"image", e.image.generic_string()},
            {"mask", e.mask.generic_string()},
            {"truth", e.truth.generic_string()},
            {"seed", s},
            {"n_surfaces", scene.truth.surfaces.size()},
            {"emulsion", spec.emulsion.has_value()},
            {"spec", spec_to_json(spec)},
        });
        manifest.entries.push_back(std::move(e));
    }
    const json j{
        {"schema_version", kCorpusSchemaVersion},
        {"profile", manifest.profile},
        {"seed", seed},
        {"count", n},
        {"images", images},
    };
    write_text_file(dir / "manifest.json", j.dump(2) + "\n");
    return manifest;
}

CorpusManifest read_manifest(const std::filesystem::path& dir)
{
    const auto path = dir / "manifest.json";
    if (!std::filesystem::exists(path)) {
        throw IoError("no manifest.json in " + dir.string());
    }
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParameterError("malformed manifest: " + std::string(e.what()));
    }
    if (!j.is_object() || j.value("schema_version", 0) != kCorpusSchemaVersion || !j.contains("images") ||
        !j["images"].is_array()) {
        throw ParameterError("malformed manifest: expected schema_version " + std::to_string(kCorpusSchemaVersion) +
                             " and an images array");
    }
    CorpusManifest m;
    m.profile = j.value("profile", "");
    m.seed = j.value("seed", std::uint64_t{0});
    std::vector<std::string> problems;
    std::size_t index = 0;
    for (const auto& item : j["images"]) {
        const auto label = "entry " + std::to_string(index++);
        const auto field = [&](const char* key) -> std::string {
            if (!item.is_object() || !item.contains(key) || !item[key].is_string()) {
                problems.push_back(label + ": missing field '" + key + "'");
                return {};
            }
            return item[key].get<std::string>();
        };
        CorpusEntry e;
        e.id = field("id");
        const auto image = field("image");
        const auto mask = field("mask");
        const auto truth = field("truth");
        if (image.empty() || mask.empty() || truth.empty() || e.id.empty()) {
            continue;
        }
        e.image = dir / image;
        e.mask = dir / mask;
        e.truth = dir / truth;
        for (const auto* p : {&e.image, &e.mask, &e.truth}) {
            if (!std::filesystem::exists(*p)) {
                problems.push_back(label + " (" + e.id + "): missing file " + p->string());
            }
        }
        m.entries.push_back(std::move(e));
    }
    if (!problems.empty()) {
        std::string msg = "malformed manifest:";
        for (const auto& p : problems) {
            msg += "\n  " + p;
        }
        throw ParameterError(msg);
    }
    if (m.entries.empty()) {
        throw ParameterError("corpus " + dir.string() + " is empty");
    }
    return m;
}

} // namespace liqsurf
