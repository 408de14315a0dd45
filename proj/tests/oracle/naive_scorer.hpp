#pragma once

// Straight-loop reference scorer for the equivalence tests. It works on raw
// row-major arrays and re-derives curves, windows and ranks on its own.

#include <optional>
#include <string>
#include <vector>

namespace oracle {

struct Raster {
    int w = 0;
    int h = 0;
    std::vector<double> px;

    double at(int x, int y) const { return px[static_cast<std::size_t>(y * w + x)]; }
};

struct Vessel {
    int img_w = 0;
    int img_h = 0;
    int top = 0;
    std::vector<int> left;
    std::vector<int> right;

    int bottom() const { return top + static_cast<int>(left.size()) - 1; }
    bool inside(int x, int y) const;
    bool admits(int x, int y) const;
};

struct Curve {
    int row = 0;
    int x0 = 0;
    int x1 = 0;
    int h = 0;
    int half = 0; // 0 line, 1 upper, 2 lower
};

struct Setup {
    std::string method;      // m1 m2 m3 interior
    std::string equation;    // as in the preset file
    std::string aggregation; // average percentile65 as_is
    double region_fraction = 0.0;
};

struct Planes {
    Raster gray;
    // Plane the indicator reads when it is not an RGB average.
    Raster plane;
    bool rgb = false;
    Raster red;
    Raster green;
    Raster blue;
};

struct Result {
    double score = 0.0;
    bool consistent = false;
};

/// Plain 3x3 Sobel with clamped reads; returns gx, gy rasters.
void sobel(const Raster& g, Raster& gx, Raster& gy);

std::optional<Result> score(const Curve& c, const Planes& planes, const Vessel& v, const Setup& s);

/// Integer-rank percentile65 and consistency rule, for direct checks.
double percentile65(std::vector<double> v);
bool consistent(std::vector<double> v);

/// Curve normal angle (y up) from the tangent direction.
double normal_angle(const Curve& c, int x);

} // namespace oracle
