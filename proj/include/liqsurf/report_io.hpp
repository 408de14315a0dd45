#pragma once

#include <filesystem>
#include <string>

#include "liqsurf/image.hpp"
#include "liqsurf/selection.hpp"
#include "liqsurf/vessel.hpp"

namespace liqsurf {

inline constexpr int kReportSchemaVersion = 1;

/// Pretty-printed JSON, newline terminated. Byte-identical for equal reports.
std::string report_to_json(const DetectionReport& r);

/// Reads back what report_to_json wrote (curve parameters only).
DetectionReport report_from_json(const std::string& text);

/// Copy of `image` with the vessel outline and boundary lines in white and
/// accepted curves in black.
RgbImage annotate(const RgbImage& image, const VesselRegion& v, const DetectionReport& r);

/// Writes `text` to `path` through a temporary file renamed into place.
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

} // namespace liqsurf
