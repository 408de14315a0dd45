#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "liqsurf/errors.hpp"

namespace liqsurf {

/// Row-major 2D pixel buffer. (x, y) is (column, row) with y growing downwards.
template <typename T>
class Plane {
public:
    using value_type = T;

    Plane() = default;
    Plane(int width, int height, T fill = T{})
        : width_(width), height_(height)
    {
        if (width < 0 || height < 0) {
            throw ParameterError("negative image dimensions");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t size() const noexcept { return data_.size(); }

    bool contains(int x, int y) const noexcept
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    T& at(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& at(int x, int y) const noexcept { return data_[index(x, y)]; }

    /// Pixel lookup with edge-replicated padding.
    const T& clamped(int x, int y) const noexcept
    {
        x = x < 0 ? 0 : (x >= width_ ? width_ - 1 : x);
        y = y < 0 ? 0 : (y >= height_ ? height_ - 1 : y);
        return data_[index(x, y)];
    }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    bool operator==(const Plane&) const = default;

private:
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const Rgb&) const = default;
};

using RgbImage = Plane<Rgb>;
/// Real-valued intensity, nominally 0 (black) to 255 (white).
using GrayImage = Plane<double>;
/// Binary plane, every value is 0 or 1.
using EdgeMap = Plane<std::uint8_t>;

/// Sobel gradient. Direction is atan2(Gy, Gx) in image coordinates (y down)
/// and is only meaningful where `valid` is set, i.e. where magnitude > 0.
struct GradientField {
    Plane<double> magnitude;
    Plane<double> direction;
    Plane<std::uint8_t> valid;

    int width() const noexcept { return magnitude.width(); }
    int height() const noexcept { return magnitude.height(); }
    bool is_valid(int x, int y) const noexcept { return valid.at(x, y) != 0; }
};

struct Channels {
    GrayImage red;
    GrayImage green;
    GrayImage blue;
};

/// Canny knobs. Unset thresholds are derived from the image: high is the 90th
/// percentile of the nonzero smoothed gradient magnitudes, low is 0.4 * high.
struct CannyParams {
    double sigma = 1.4;
    std::optional<double> low;
    std::optional<double> high;
    double auto_percentile = 0.90;
    double auto_low_ratio = 0.4;
};

/// BT.601 luma.
GrayImage to_grayscale(const RgbImage& img);

Channels split_channels(const RgbImage& img);

GrayImage gaussian_blur(const GrayImage& img, double sigma);

GradientField sobel_gradient(const GrayImage& img);

EdgeMap canny_edges(const GrayImage& img, double low, double high, double sigma);

EdgeMap canny_edges(const GrayImage& img, const CannyParams& params);

/// (low, high) hysteresis thresholds `canny_edges(img, params)` would use.
std::pair<double, double> canny_thresholds(const GrayImage& img, const CannyParams& params);

/// Binary plane as a real-valued plane (0.0 / 1.0) for scoring.
GrayImage to_gray_plane(const EdgeMap& edges);

} // namespace liqsurf
