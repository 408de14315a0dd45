#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "liqsurf/image.hpp"

namespace liqsurf {

struct RowExtent {
    int x_left = 0;
    int x_right = 0;

    int width() const noexcept { return x_right - x_left + 1; }
    bool operator==(const RowExtent&) const = default;
};

/// Interior of the vessel as one horizontal extent per row over a contiguous
/// row span. Immutable once built.
class VesselRegion {
public:
    VesselRegion(int row_top, std::vector<RowExtent> extents, int image_width, int image_height);

    /// Nonzero mask pixels are interior. Rows with holes use their outermost
    /// interior columns; the interior rows must form one contiguous span.
    static VesselRegion from_mask(const EdgeMap& mask);

    /// Plain-text table, one `row x_left x_right` triple per line; `#` starts a comment.
    static VesselRegion from_extent_table(std::string_view text, int image_width, int image_height);

    int row_top() const noexcept { return row_top_; }
    int row_bottom() const noexcept { return row_top_ + static_cast<int>(extents_.size()) - 1; }
    int height() const noexcept { return static_cast<int>(extents_.size()); }
    int max_width() const noexcept { return max_width_; }
    int image_width() const noexcept { return image_width_; }
    int image_height() const noexcept { return image_height_; }

    bool covers_row(int y) const noexcept { return y >= row_top() && y <= row_bottom(); }
    const RowExtent& extent(int y) const { return extents_.at(static_cast<std::size_t>(y - row_top_)); }
    const std::vector<RowExtent>& extents() const noexcept { return extents_; }

    bool contains(int x, int y) const noexcept
    {
        if (!covers_row(y)) {
            return false;
        }
        const auto& e = extents_[static_cast<std::size_t>(y - row_top_)];
        return x >= e.x_left && x <= e.x_right;
    }

    /// Whether a scoring window may use pixel (x, y): it must be inside the
    /// image and within the horizontal extent of the nearest vessel row. Rows
    /// above the ceiling and below the floor are admitted so the vessel top
    /// and bottom can be scored against what lies outside them.
    bool admits(int x, int y) const noexcept
    {
        if (x < 0 || y < 0 || x >= image_width_ || y >= image_height_) {
            return false;
        }
        const int ry = y < row_top() ? row_top() : (y > row_bottom() ? row_bottom() : y);
        const auto& e = extents_[static_cast<std::size_t>(ry - row_top_)];
        return x >= e.x_left && x <= e.x_right;
    }

    EdgeMap rasterize() const;

    bool operator==(const VesselRegion&) const = default;

private:
    int row_top_ = 0;
    std::vector<RowExtent> extents_;
    int max_width_ = 0;
    int image_width_ = 0;
    int image_height_ = 0;
};

/// Rows whose width is at least `narrow_fraction * max_width`, top to bottom.
std::vector<int> scannable_rows(const VesselRegion& v, double narrow_fraction);

struct VesselBounds {
    int ceiling_row = 0;
    int floor_row = 0;
};

/// Top and bottom interior rows; always reported as phase boundaries.
VesselBounds floor_ceiling(const VesselRegion& v);

/// `.png` / `.bmp` are read as masks, anything else as an extent table.
VesselRegion read_vessel(const std::filesystem::path& path, int image_width, int image_height);

} // namespace liqsurf
