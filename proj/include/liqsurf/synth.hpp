#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "liqsurf/image.hpp"
#include "liqsurf/vessel.hpp"

namespace liqsurf {

inline constexpr int kCorpusSchemaVersion = 1;

enum class SurfaceType { LiquidAir, LiquidLiquid };

std::string_view to_string(SurfaceType t) noexcept;
SurfaceType surface_type_from_string(std::string_view s);

/// Vessel half width at a row; the outline is interpolated linearly between
/// control points and mirrored about the image's vertical centre line.
struct ProfilePoint {
    int row = 0;
    double half_width = 0.0;
};

struct PhaseSpec {
    /// Height of the phase's top surface above the floor, as a fraction of
    /// the interior height.
    double fill_fraction = 0.5;
    double intensity = 128.0;
    double noise_sigma = 0.0;
};

/// Replaces the sharp boundary of one surface with a linear ramp.
struct EmulsionBand {
    int surface_index = 0;
    int band_height = 4;
};

/// Bright elliptical outline centred on the vessel axis.
struct GlareMark {
    int row = 0;
    int width = 0;
    int half_height = 0;
    double intensity = 100.0;
};

struct SceneSpec {
    int width = 200;
    int height = 250;
    std::string vessel_kind = "cylinder";
    std::vector<ProfilePoint> profile;
    /// Elevation of the camera above the surface plane, radians.
    double view_angle = 0.0;
    double background = 15.0;
    double tablecloth = 28.0;
    double wall_intensity = 125.0;
    int wall_thickness = 2;
    double air_intensity = 55.0;
    double air_noise_sigma = 0.0;
    /// Liquid phases, top to bottom.
    std::vector<PhaseSpec> phases;
    /// Brightness added along the far (lower) half of each surface ellipse.
    double rim_contrast = 0.0;
    /// Brightness added along the near (upper) half.
    double highlight = 0.0;
    std::optional<EmulsionBand> emulsion;
    std::vector<GlareMark> glare;

    /// Throws ParameterError describing the first problem found.
    void validate() const;
};

struct TruthSurface {
    int center_row = 0;
    int x_left = 0;
    int x_right = 0;
    /// Vertical semi-axis of the projected ellipse, view_height / 2 rounded
    /// to whole pixels.
    double h = 0.0;
    /// Full apparent height, view_height(w, phi).
    double view_height = 0.0;
    SurfaceType type = SurfaceType::LiquidAir;
    bool emulsion = false;
};

struct GroundTruth {
    std::string image_id;
    int ceiling_row = 0;
    int floor_row = 0;
    /// Top to bottom.
    std::vector<TruthSurface> surfaces;
};

struct RenderedScene {
    RgbImage image;
    EdgeMap mask;
    GroundTruth truth;
};

/// Vessel interior described by the spec's profile.
VesselRegion vessel_from_spec(const SceneSpec& spec);

/// Surfaces implied by the spec's phases, top to bottom (no image needed).
std::vector<TruthSurface> truth_surfaces(const SceneSpec& spec);

/// Deterministic for a given (spec, seed).
RenderedScene render(const SceneSpec& spec, std::uint64_t seed);

/// Corpus difficulty profiles: easy, emulsive, glare, empty.
const std::vector<std::string>& corpus_profiles();

/// Random scene of the named profile.
SceneSpec random_scene(std::string_view profile, std::mt19937_64& rng);

/// Seed of image `index` in a corpus seeded with `seed`.
std::uint64_t image_seed(std::uint64_t seed, std::size_t index);

std::string truth_to_json(const GroundTruth& t);
GroundTruth truth_from_json(const std::string& text);

struct CorpusEntry {
    std::string id;
    std::filesystem::path image;
    std::filesystem::path mask;
    std::filesystem::path truth;
};

struct CorpusManifest {
    std::string profile;
    std::uint64_t seed = 0;
    std::vector<CorpusEntry> entries;
};

/// Writes images/NNN.png, masks/NNN.png, truth/NNN.json and finally
/// manifest.json under `dir`. Throws ParameterError for n < 1 or an unknown
/// profile and IoError when the directory cannot be written.
CorpusManifest generate_corpus(const std::filesystem::path& dir, int n, std::string_view profile, std::uint64_t seed);

/// Throws IoError when the manifest is missing and ParameterError listing the
/// offending entries when it is malformed or references missing files.
CorpusManifest read_manifest(const std::filesystem::path& dir);

} // namespace liqsurf
