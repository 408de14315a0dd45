#include "liqsurf/image.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace liqsurf {

namespace {

void require_nonempty(int width, int height)
{
    if (width <= 0 || height <= 0) {
        throw ParameterError("empty image");
    }
}

std::vector<double> gaussian_kernel(double sigma)
{
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
        kernel[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& v : kernel) {
        v /= sum;
    }
    return kernel;
}

struct SobelRaw {
    Plane<double> gx;
    Plane<double> gy;
};

SobelRaw sobel_raw(const GrayImage& img)
{
    const int w = img.width();
    const int h = img.height();
    SobelRaw out{Plane<double>(w, h), Plane<double>(w, h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double tl = img.clamped(x - 1, y - 1);
            const double tc = img.clamped(x, y - 1);
            const double tr = img.clamped(x + 1, y - 1);
            const double ml = img.clamped(x - 1, y);
            const double mr = img.clamped(x + 1, y);
            const double bl = img.clamped(x - 1, y + 1);
            const double bc = img.clamped(x, y + 1);
            const double br = img.clamped(x + 1, y + 1);
            out.gx.at(x, y) = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            out.gy.at(x, y) = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
        }
    }
    return out;
}

// Percentile over the nonzero entries: ascending sort, 1-based rank ceil(p * n).
double nonzero_percentile(std::span<const double> values, double p)
{
    std::vector<double> nz;
    nz.reserve(values.size());
    for (double v : values) {
        if (v > 0.0) {
            nz.push_back(v);
        }
    }
    if (nz.empty()) {
        return 0.0;
    }
    const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(nz.size())));
    const std::size_t idx = std::clamp<std::size_t>(rank, 1, nz.size()) - 1;
    std::nth_element(nz.begin(), nz.begin() + static_cast<std::ptrdiff_t>(idx), nz.end());
    return nz[idx];
}

} // namespace

GrayImage to_grayscale(const RgbImage& img)
{
    require_nonempty(img.width(), img.height());
    GrayImage out(img.width(), img.height());
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = 0.299 * src[i].r + 0.587 * src[i].g + 0.114 * src[i].b;
    }
    return out;
}

Channels split_channels(const RgbImage& img)
{
    require_nonempty(img.width(), img.height());
    Channels ch{GrayImage(img.width(), img.height()), GrayImage(img.width(), img.height()),
                GrayImage(img.width(), img.height())};
    auto src = img.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        ch.red.data()[i] = src[i].r;
        ch.green.data()[i] = src[i].g;
        ch.blue.data()[i] = src[i].b;
    }
    return ch;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma)
{
    require_nonempty(img.width(), img.height());
    if (!(sigma > 0.0)) {
        throw ParameterError("gaussian sigma must be > 0");
    }
    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = img.width();
    const int h = img.height();

    GrayImage tmp(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * img.clamped(x + k, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * tmp.clamped(x, y + k);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

GradientField sobel_gradient(const GrayImage& img)
{
    if (img.width() < 3 || img.height() < 3) {
        throw ParameterError("image too small for gradient");
    }
    const auto raw = sobel_raw(img);
    const int w = img.width();
    const int h = img.height();
    GradientField g{Plane<double>(w, h), Plane<double>(w, h), Plane<std::uint8_t>(w, h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = raw.gx.at(x, y);
            const double gy = raw.gy.at(x, y);
            const double mag = std::sqrt(gx * gx + gy * gy);
            g.magnitude.at(x, y) = mag;
            if (mag > 0.0) {
                g.direction.at(x, y) = std::atan2(gy, gx);
                g.valid.at(x, y) = 1;
            }
        }
    }
    return g;
}

std::pair<double, double> canny_thresholds(const GrayImage& img, const CannyParams& params)
{
    if (params.low && params.high) {
        return {*params.low, *params.high};
    }
    const auto grad = sobel_gradient(gaussian_blur(img, params.sigma));
    const double high = params.high ? *params.high
                                    : nonzero_percentile(grad.magnitude.data(), params.auto_percentile);
    const double low = params.low ? *params.low : params.auto_low_ratio * high;
    return {low, high};
}

EdgeMap canny_edges(const GrayImage& img, const CannyParams& params)
{
    const auto [low, high] = canny_thresholds(img, params);
    return canny_edges(img, low, high, params.sigma);
}

EdgeMap canny_edges(const GrayImage& img, double low, double high, double sigma)
{
    if (!(low >= 0.0) || !(high >= low)) {
        throw ParameterError("canny thresholds must satisfy 0 <= low <= high");
    }
    if (!(sigma > 0.0)) {
        throw ParameterError("canny sigma must be > 0");
    }
    if (img.width() < 3 || img.height() < 3) {
        throw ParameterError("image too small for gradient");
    }
    const int w = img.width();
    const int h = img.height();
    const auto raw = sobel_raw(gaussian_blur(img, sigma));

    Plane<double> mag(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = raw.gx.at(x, y);
            const double gy = raw.gy.at(x, y);
            mag.at(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }

    // Non-maximum suppression. The step (dx, dy) is the gradient direction
    // quantised to 4 sectors and folded so that dy >= 0 (dx > 0 when dy == 0);
    // the strict/non-strict pair keeps exactly one pixel of a symmetric ridge.
    Plane<double> thin(w, h);
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double m = mag.at(x, y);
            if (m <= 0.0) {
                continue;
            }
            double angle = std::atan2(raw.gy.at(x, y), raw.gx.at(x, y));
            if (angle < 0.0) {
                angle += M_PI;
            }
            int dx = 0;
            int dy = 0;
            if (angle < M_PI / 8.0 || angle >= 7.0 * M_PI / 8.0) {
                dx = 1;
            } else if (angle < 3.0 * M_PI / 8.0) {
                dx = 1;
                dy = 1;
            } else if (angle < 5.0 * M_PI / 8.0) {
                dy = 1;
            } else {
                dx = -1;
                dy = 1;
            }
            const double before = mag.at(x - dx, y - dy);
            const double after = mag.at(x + dx, y + dy);
            if (m > before && m >= after) {
                thin.at(x, y) = m;
            }
        }
    }

    // Hysteresis, 8-connected flood from strong pixels through weak ones.
    EdgeMap edges(w, h);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (thin.at(x, y) >= high && thin.at(x, y) > 0.0 && edges.at(x, y) == 0) {
                edges.at(x, y) = 1;
                stack.emplace_back(x, y);
                while (!stack.empty()) {
                    const auto [cx, cy] = stack.back();
                    stack.pop_back();
                    for (int oy = -1; oy <= 1; ++oy) {
                        for (int ox = -1; ox <= 1; ++ox) {
                            const int nx = cx + ox;
                            const int ny = cy + oy;
                            if (!edges.contains(nx, ny) || edges.at(nx, ny) != 0) {
                                continue;
                            }
                            const double v = thin.at(nx, ny);
                            if (v > 0.0 && v >= low) {
                                edges.at(nx, ny) = 1;
                                stack.emplace_back(nx, ny);
                            }
                        }
                    }
                }
            }
        }
    }
    return edges;
}

GrayImage to_gray_plane(const EdgeMap& edges)
{
    GrayImage out(edges.width(), edges.height());
    auto src = edges.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] != 0 ? 1.0 : 0.0;
    }
    return out;
}

} // namespace liqsurf
