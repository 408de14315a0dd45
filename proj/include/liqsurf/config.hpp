#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liqsurf/candidates.hpp"
#include "liqsurf/image.hpp"
#include "liqsurf/scoring.hpp"
#include "liqsurf/selection.hpp"

namespace liqsurf {

/// One row of the indicator tables: scoring setup plus its threshold and
/// whether the consistency check was applied.
struct Preset {
    std::string name;
    std::string description;
    Indicator indicator;
    double threshold = 0.4;
    bool consistency = false;
};

/// Presets shipped in data/presets.ini, in entry order.
const std::vector<Preset>& presets();

/// Accepts "entry22", "entry02" or "entry2". Throws ConfigError for unknown names.
const Preset& find_preset(std::string_view name);

struct DetectorConfig {
    /// Preset the indicator came from; empty once indicator fields were overridden.
    std::string preset = "entry22";
    Indicator indicator;
    ScanParams scan;
    SelectionParams selection;
    ConsistencyParams consistency;
    CannyParams canny;
    /// Worker threads for candidate scoring. Not part of the fingerprint:
    /// results do not depend on it.
    int threads = 1;

    void validate() const;
    /// Stable key = value text covering every field that affects results.
    std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    std::string fingerprint() const;
};

DetectorConfig config_from_preset(std::string_view name);

/// INI-style text: an optional top-level `preset = entryNN` followed by
/// [indicator], [scan], [selection], [consistency], [canny] and [run]
/// sections. The preset (or `preset_override`, when given) is applied first,
/// then every explicit key. Unknown keys are errors.
DetectorConfig parse_config(std::string_view text, const std::optional<std::string>& preset_override = {});

DetectorConfig load_config(const std::filesystem::path& path,
                           const std::optional<std::string>& preset_override = {});

/// Config text that parse_config reads back to the same configuration.
std::string to_config_text(const DetectorConfig& cfg);

} // namespace liqsurf
