#include "liqsurf/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <string>
#include <vector>

namespace liqsurf {

namespace {

cv::Mat load(const std::filesystem::path& path, int flags)
{
    if (!std::filesystem::is_regular_file(path)) {
        throw IoError("cannot read image: " + path.string());
    }
    cv::Mat m;
    try {
        m = cv::imread(path.string(), flags);
    } catch (const cv::Exception& e) {
        throw IoError("cannot decode image " + path.string() + ": " + e.what());
    }
    if (m.empty()) {
        throw IoError("cannot decode image: " + path.string());
    }
    if (m.depth() != CV_8U) {
        throw IoError("unsupported bit depth (8-bit expected): " + path.string());
    }
    return m;
}

void store(const std::filesystem::path& path, const cv::Mat& m)
{
    bool ok = false;
    try {
        // Fixed compression level so identical pixels give identical bytes.
        ok = cv::imwrite(path.string(), m, {cv::IMWRITE_PNG_COMPRESSION, 6});
    } catch (const cv::Exception& e) {
        throw IoError("cannot write image " + path.string() + ": " + e.what());
    }
    if (!ok) {
        throw IoError("cannot write image: " + path.string());
    }
}

} // namespace

RgbImage read_image(const std::filesystem::path& path)
{
    const cv::Mat m = load(path, cv::IMREAD_COLOR);
    RgbImage img(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < m.cols; ++x) {
            img.at(x, y) = Rgb{row[x][2], row[x][1], row[x][0]};
        }
    }
    return img;
}

EdgeMap read_mask(const std::filesystem::path& path)
{
    const cv::Mat m = load(path, cv::IMREAD_GRAYSCALE);
    EdgeMap mask(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<std::uint8_t>(y);
        for (int x = 0; x < m.cols; ++x) {
            mask.at(x, y) = row[x] != 0 ? 1 : 0;
        }
    }
    return mask;
}

void write_png(const std::filesystem::path& path, const RgbImage& img)
{
    cv::Mat m(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width(); ++x) {
            const Rgb p = img.at(x, y);
            row[x] = cv::Vec3b(p.b, p.g, p.r);
        }
    }
    store(path, m);
}

void write_png(const std::filesystem::path& path, const EdgeMap& mask)
{
    cv::Mat m(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < mask.height(); ++y) {
        auto* row = m.ptr<std::uint8_t>(y);
        for (int x = 0; x < mask.width(); ++x) {
            row[x] = mask.at(x, y) != 0 ? 255 : 0;
        }
    }
    store(path, m);
}

} // namespace liqsurf
