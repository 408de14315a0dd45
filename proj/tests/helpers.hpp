#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "liqsurf/image.hpp"
#include "liqsurf/vessel.hpp"

namespace testutil {

inline liqsurf::GrayImage bands(int w, int h, int boundary_row, double above, double below)
{
    liqsurf::GrayImage g(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            g.at(x, y) = y < boundary_row ? above : below;
        }
    }
    return g;
}

inline liqsurf::GrayImage random_gray(int w, int h, std::mt19937_64& rng, double lo = 0.0, double hi = 255.0)
{
    std::uniform_real_distribution<double> d(lo, hi);
    liqsurf::GrayImage g(w, h);
    for (auto& v : g.data()) {
        v = d(rng);
    }
    return g;
}

inline liqsurf::RgbImage gray_to_rgb(const liqsurf::GrayImage& g)
{
    liqsurf::RgbImage out(g.width(), g.height());
    for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) {
            const auto v = static_cast<std::uint8_t>(std::clamp(std::lround(g.at(x, y)), 0L, 255L));
            out.at(x, y) = {v, v, v};
        }
    }
    return out;
}

inline liqsurf::VesselRegion rectangle(int top, int bottom, int left, int right, int w, int h)
{
    return liqsurf::VesselRegion(top, std::vector<liqsurf::RowExtent>(static_cast<std::size_t>(bottom - top + 1), {left, right}),
                                 w, h);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name)
{
    const auto p = std::filesystem::temp_directory_path() / ("liqsurf_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace testutil
