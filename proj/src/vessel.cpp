#include "liqsurf/vessel.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "liqsurf/image_io.hpp"

namespace liqsurf {

VesselRegion::VesselRegion(int row_top, std::vector<RowExtent> extents, int image_width, int image_height)
    : row_top_(row_top), extents_(std::move(extents)), image_width_(image_width), image_height_(image_height)
{
    if (extents_.empty()) {
        throw ParameterError("no vessel region");
    }
    if (row_top_ < 0 || row_bottom() >= image_height_) {
        throw ParameterError("vessel rows outside image bounds");
    }
    for (const auto& e : extents_) {
        if (e.x_left > e.x_right) {
            throw ParameterError("vessel extent has x_left > x_right");
        }
        if (e.x_left < 0 || e.x_right >= image_width_) {
            throw ParameterError("vessel extent outside image bounds");
        }
        max_width_ = std::max(max_width_, e.width());
    }
}

VesselRegion VesselRegion::from_mask(const EdgeMap& mask)
{
    std::vector<RowExtent> extents;
    int row_top = -1;
    int last_row = -1;
    for (int y = 0; y < mask.height(); ++y) {
        int lo = -1;
        int hi = -1;
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y) != 0) {
                if (lo < 0) {
                    lo = x;
                }
                hi = x;
            }
        }
        if (lo < 0) {
            continue;
        }
        if (row_top < 0) {
            row_top = y;
        } else if (y != last_row + 1) {
            throw ParameterError("vessel mask rows are not contiguous (empty row " + std::to_string(last_row + 1) + ")");
        }
        last_row = y;
        extents.push_back({lo, hi});
    }
    if (extents.empty()) {
        throw ParameterError("no vessel region");
    }
    return VesselRegion(row_top, std::move(extents), mask.width(), mask.height());
}

VesselRegion VesselRegion::from_extent_table(std::string_view text, int image_width, int image_height)
{
    std::map<int, RowExtent> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        int row = 0;
        RowExtent e;
        if (!(fields >> row)) {
            continue;
        }
        if (!(fields >> e.x_left >> e.x_right)) {
            throw ParameterError("extent table line " + std::to_string(line_no) + ": expected `row x_left x_right`");
        }
        std::string rest;
        if (fields >> rest) {
            throw ParameterError("extent table line " + std::to_string(line_no) + ": trailing fields");
        }
        if (!rows.emplace(row, e).second) {
            throw ParameterError("extent table: duplicate row " + std::to_string(row));
        }
    }
    if (rows.empty()) {
        throw ParameterError("no vessel region");
    }
    std::vector<RowExtent> extents;
    int expected = rows.begin()->first;
    for (const auto& [row, e] : rows) {
        if (row != expected) {
            throw ParameterError("extent table rows are not contiguous (missing row " + std::to_string(expected) + ")");
        }
        extents.push_back(e);
        ++expected;
    }
    return VesselRegion(rows.begin()->first, std::move(extents), image_width, image_height);
}

EdgeMap VesselRegion::rasterize() const
{
    EdgeMap mask(image_width_, image_height_);
    for (int y = row_top(); y <= row_bottom(); ++y) {
        const auto& e = extent(y);
        for (int x = e.x_left; x <= e.x_right; ++x) {
            mask.at(x, y) = 1;
        }
    }
    return mask;
}

std::vector<int> scannable_rows(const VesselRegion& v, double narrow_fraction)
{
    if (!(narrow_fraction >= 0.0 && narrow_fraction < 1.0)) {
        throw ParameterError("narrow_fraction must be in [0, 1)");
    }
    const double min_width = narrow_fraction * v.max_width();
    std::vector<int> rows;
    for (int y = v.row_top(); y <= v.row_bottom(); ++y) {
        if (v.extent(y).width() >= min_width) {
            rows.push_back(y);
        }
    }
    return rows;
}

VesselBounds floor_ceiling(const VesselRegion& v)
{
    return {v.row_top(), v.row_bottom()};
}

VesselRegion read_vessel(const std::filesystem::path& path, int image_width, int image_height)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".bmp") {
        const auto mask = read_mask(path);
        if (mask.width() != image_width || mask.height() != image_height) {
            throw ParameterError("vessel mask size " + std::to_string(mask.width()) + "x" +
                                 std::to_string(mask.height()) + " does not match image size " +
                                 std::to_string(image_width) + "x" + std::to_string(image_height));
        }
        return VesselRegion::from_mask(mask);
    }
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read vessel file: " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return VesselRegion::from_extent_table(buf.str(), image_width, image_height);
}

} // namespace liqsurf
