#include <doctest.h>

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "helpers.hpp"
#include "liqsurf/candidates.hpp"
#include "liqsurf/report_io.hpp"
#include "liqsurf/synth.hpp"

using namespace liqsurf;

namespace {

SceneSpec two_phase(double phi_deg)
{
    SceneSpec s;
    s.profile = {{20, 75.0}, {230, 75.0}};
    s.view_angle = phi_deg * std::numbers::pi / 180.0;
    s.phases = {{0.7, 155.0, 0.0}, {0.3, 255.0, 0.0}};
    return s;
}

// Least-squares fit of y = c - b * sqrt(1 - t^2) to the first liquid row of
// every column, t running from -1 to 1 across the surface.
std::pair<double, double> refit(const RenderedScene& sc, const TruthSurface& s, double liquid)
{
    const double a = 0.5 * (s.x_right - s.x_left);
    const double cx = 0.5 * (s.x_left + s.x_right);
    double n = 0;
    double sx = 0;
    double sy = 0;
    double sxx = 0;
    double sxy = 0;
    for (int x = s.x_left; x <= s.x_right; ++x) {
        const double t = (x - cx) / a;
        const double u = std::sqrt(std::max(0.0, 1.0 - t * t));
        int y = s.center_row - static_cast<int>(s.h) - 3;
        while (sc.image.at(x, y).r != static_cast<std::uint8_t>(liquid)) {
            ++y;
        }
        n += 1;
        sx += u;
        sy += y;
        sxx += u * u;
        sxy += u * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double c = (sy - slope * sx) / n;
    return {c, -slope};
}

} // namespace

TEST_SUITE("synth")
{
    TEST_CASE("flat noise-free scene has exact step edges")
    {
        const auto sc = render(two_phase(0.0), 1);
        REQUIRE(sc.truth.surfaces.size() == 2);
        const auto v = VesselRegion::from_mask(sc.mask);
        for (const auto& s : sc.truth.surfaces) {
            CHECK(s.h == 0.0);
            CHECK(s.center_row == v.row_bottom() - std::lround((s.type == SurfaceType::LiquidAir ? 0.7 : 0.3) *
                                                                (v.height() - 1)));
            for (int x = s.x_left; x <= s.x_right; ++x) {
                CHECK(sc.image.at(x, s.center_row).r != sc.image.at(x, s.center_row - 1).r);
                CHECK(sc.image.at(x, s.center_row).r == sc.image.at(x, s.center_row + 1).r);
            }
        }
        CHECK(sc.truth.surfaces[0].type == SurfaceType::LiquidAir);
        CHECK(sc.truth.surfaces[1].type == SurfaceType::LiquidLiquid);
    }

    TEST_CASE("tilted view height and refit")
    {
        const auto s = two_phase(20.0);
        const auto sc = render(s, 1);
        const auto& t = sc.truth.surfaces[0];
        CHECK(t.x_right - t.x_left + 1 == 150);
        CHECK(t.view_height == doctest::Approx(150.0 * std::sin(20.0 * std::numbers::pi / 180.0)).epsilon(1e-12));
        CHECK(std::abs(t.view_height - 51.3) < 0.05);
        CHECK(std::abs(t.h - 0.5 * t.view_height) <= 0.5);

        for (double phi : {0.0, 5.0, 12.0, 20.0, 30.0}) {
            const auto scene = render(two_phase(phi), 3);
            for (std::size_t i = 0; i < 2; ++i) {
                const auto& surf = scene.truth.surfaces[i];
                const auto [c, b] = refit(scene, surf, i == 0 ? 155.0 : 255.0);
                CHECK(std::abs(c - surf.center_row) <= 1.0);
                CHECK(std::abs(b - surf.h) <= 1.0);
            }
        }
    }

    TEST_CASE("empty vessel has no surfaces")
    {
        SceneSpec s;
        s.profile = {{30, 60.0}, {200, 60.0}};
        const auto sc = render(s, 4);
        CHECK(sc.truth.surfaces.empty());
        CHECK(sc.truth.ceiling_row == 30);
        CHECK(sc.truth.floor_row == 200);
    }

    TEST_CASE("rendering is deterministic per seed")
    {
        std::mt19937_64 rng(12);
        const auto spec = random_scene("glare", rng);
        CHECK(render(spec, 77).image == render(spec, 77).image);
        CHECK_FALSE(render(spec, 77).image == render(spec, 78).image);
        CHECK(image_seed(5, 0) != image_seed(5, 1));
        CHECK(image_seed(5, 3) == image_seed(5, 3));
    }

    TEST_CASE("random scenes stay within their profiles")
    {
        std::mt19937_64 rng(31);
        for (int i = 0; i < 200; ++i) {
            const auto s = random_scene("easy", rng);
            CHECK_NOTHROW(s.validate());
            CHECK(s.view_angle <= 25.0 * std::numbers::pi / 180.0 + 1e-12);
            CHECK(s.air_noise_sigma <= 5.0);
            CHECK(!s.phases.empty());
            CHECK(s.phases.size() <= 2);
            CHECK_FALSE(s.emulsion.has_value());
            CHECK(s.glare.empty());
            double above = s.air_intensity;
            for (const auto& p : s.phases) {
                CHECK(std::abs(p.intensity - above) >= 40.0);
                above = p.intensity;
            }
        }
        CHECK(random_scene("empty", rng).phases.empty());
        CHECK(!random_scene("glare", rng).glare.empty());
        CHECK_THROWS_AS(random_scene("hard", rng), ParameterError);
    }

    TEST_CASE("spec validation")
    {
        auto s = two_phase(0.0);
        s.view_angle = 1.2;
        CHECK_THROWS_AS(s.validate(), ParameterError);
        s = two_phase(0.0);
        s.phases[1].fill_fraction = 0.8;
        CHECK_THROWS_AS(s.validate(), ParameterError);
        s = two_phase(0.0);
        s.phases[0].intensity = 300;
        CHECK_THROWS_AS(s.validate(), ParameterError);
        s = two_phase(0.0);
        s.profile = {{1, 75.0}, {230, 75.0}};
        CHECK_THROWS_AS(s.validate(), ParameterError);
        s = two_phase(0.0);
        s.emulsion = EmulsionBand{2, 4};
        CHECK_THROWS_AS(s.validate(), ParameterError);
    }

    TEST_CASE("truth JSON round trip")
    {
        auto t = render(two_phase(12.0), 2).truth;
        t.image_id = "x";
        t.surfaces[1].emulsion = true;
        const auto back = truth_from_json(truth_to_json(t));
        CHECK(truth_to_json(back) == truth_to_json(t));
        CHECK(back.surfaces[1].emulsion);
        CHECK_THROWS(truth_from_json("{\"schema_version\": 9}"));
    }

    TEST_CASE("corpus generation")
    {
        const auto a = testutil::temp_dir("corpus_a");
        const auto b = testutil::temp_dir("corpus_b");
        const auto m = generate_corpus(a, 12, "easy", 2024);
        generate_corpus(b, 12, "easy", 2024);
        CHECK(m.entries.size() == 12);
        CHECK(m.entries[3].id == "003");
        CHECK(read_text_file(a / "manifest.json") == read_text_file(b / "manifest.json"));
        CHECK(read_text_file(a / "truth/011.json") == read_text_file(b / "truth/011.json"));
        CHECK(read_manifest(a).entries.size() == 12);

        const auto e = testutil::temp_dir("corpus_emulsive");
        generate_corpus(e, 20, "emulsive", 3);
        const auto j = nlohmann::json::parse(read_text_file(e / "manifest.json"));
        for (const auto& img : j["images"]) {
            CHECK(img["n_surfaces"] == 2);
            CHECK(img["emulsion"] == true);
            const auto& spec = img["spec"];
            const auto& prof = spec["profile"];
            const int height = prof.back()["row"].get<int>() - prof.front()["row"].get<int>() + 1;
            CHECK(spec["emulsion"]["band_height"].get<int>() >= 0.02 * height);
        }

        CHECK_THROWS_AS(generate_corpus(testutil::temp_dir("corpus_bad"), 0, "easy", 1), ParameterError);
        CHECK_THROWS_AS(read_manifest(testutil::temp_dir("corpus_none")), IoError);
        std::filesystem::remove(a / "truth/004.json");
        CHECK_THROWS_AS(read_manifest(a), ParameterError);
    }
}
