#include <cstring>
#include <random>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "liqsurf/config.hpp"
#include "liqsurf/detector.hpp"
#include "liqsurf/evaluation.hpp"
#include "liqsurf/image_io.hpp"
#include "liqsurf/report_io.hpp"
#include "liqsurf/synth.hpp"

namespace py = pybind11;
using namespace liqsurf;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

RgbImage to_rgb(const U8Array& a)
{
    if (a.ndim() == 2) {
        RgbImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
        auto v = a.unchecked<2>();
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                img.at(x, y) = {v(y, x), v(y, x), v(y, x)};
            }
        }
        return img;
    }
    if (a.ndim() != 3 || a.shape(2) != 3) {
        throw ParameterError("image must be HxW or HxWx3 uint8");
    }
    RgbImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    auto v = a.unchecked<3>();
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            img.at(x, y) = {v(y, x, 0), v(y, x, 1), v(y, x, 2)};
        }
    }
    return img;
}

VesselRegion to_vessel(const U8Array& mask)
{
    if (mask.ndim() != 2) {
        throw ParameterError("vessel mask must be HxW");
    }
    EdgeMap m(static_cast<int>(mask.shape(1)), static_cast<int>(mask.shape(0)));
    auto v = mask.unchecked<2>();
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            m.at(x, y) = v(y, x) != 0 ? 1 : 0;
        }
    }
    return VesselRegion::from_mask(m);
}

py::array_t<std::uint8_t> rgb_array(const RgbImage& img)
{
    py::array_t<std::uint8_t> out({img.height(), img.width(), 3});
    auto v = out.mutable_unchecked<3>();
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const auto& p = img.at(x, y);
            v(y, x, 0) = p.r;
            v(y, x, 1) = p.g;
            v(y, x, 2) = p.b;
        }
    }
    return out;
}

py::array_t<std::uint8_t> mask_array(const EdgeMap& m)
{
    py::array_t<std::uint8_t> out({m.height(), m.width()});
    std::memcpy(out.mutable_data(), m.data().data(), m.size());
    return out;
}

DetectorConfig resolve(const std::optional<std::string>& preset, const std::optional<std::string>& config, int threads)
{
    auto cfg = parse_config(config.value_or(""), preset);
    cfg.threads = threads;
    cfg.validate();
    return cfg;
}

} // namespace

PYBIND11_MODULE(_liqsurf, m)
{
    m.doc() = "Liquid surface detection in axisymmetric transparent vessels";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    m.def("view_height", &view_height, py::arg("w"), py::arg("phi"),
          "Apparent height w * sin(phi) of a round surface seen from elevation phi.");

    m.def("presets", []() {
        py::list out;
        for (const auto& p : presets()) {
            py::dict d;
            d["name"] = p.name;
            d["description"] = p.description;
            d["method"] = std::string(to_string(p.indicator.method));
            d["equation"] = std::string(to_string(p.indicator.equation));
            d["plane"] = std::string(to_string(p.indicator.plane));
            d["aggregation"] = std::string(to_string(p.indicator.aggregation));
            d["threshold"] = p.threshold;
            d["consistency"] = p.consistency;
            out.append(d);
        }
        return out;
    });

    m.def(
        "detect_json",
        [](const U8Array& image, const U8Array& mask, std::optional<std::string> preset,
           std::optional<std::string> config, int threads, const std::string& image_id) {
            const auto img = to_rgb(image);
            const auto v = to_vessel(mask);
            const auto cfg = resolve(preset, config, threads);
            py::gil_scoped_release release;
            return report_to_json(detect(img, v, cfg, image_id));
        },
        py::arg("image"), py::arg("mask"), py::arg("preset") = py::none(), py::arg("config") = py::none(),
        py::arg("threads") = 1, py::arg("image_id") = "image");

    m.def(
        "detect_file_json",
        [](const std::string& image_path, const std::string& vessel_path, std::optional<std::string> preset,
           std::optional<std::string> config, int threads) {
            const auto img = read_image(image_path);
            const auto v = read_vessel(vessel_path, img.width(), img.height());
            const auto cfg = resolve(preset, config, threads);
            py::gil_scoped_release release;
            return report_to_json(detect(img, v, cfg, std::filesystem::path(image_path).stem().string()));
        },
        py::arg("image_path"), py::arg("vessel_path"), py::arg("preset") = py::none(), py::arg("config") = py::none(),
        py::arg("threads") = 1);

    m.def(
        "score_curve",
        [](const U8Array& image, const U8Array& mask, int center_row, int x_left, int x_right, int h,
           const std::string& half, const std::string& preset) {
            const auto img = to_rgb(image);
            const auto v = to_vessel(mask);
            const auto cfg = config_from_preset(preset);
            const auto planes = ImagePlanes::prepare(img, cfg.indicator, cfg.canny);
            const auto s = score_curve(make_candidate(center_row, x_left, x_right, h, half_from_string(half)), planes,
                                       v, cfg.indicator, cfg.consistency);
            if (!s) {
                return py::object(py::none());
            }
            py::dict d;
            d["score"] = s->score;
            d["consistent"] = s->consistent;
            d["local_scores"] = s->local_scores;
            return py::object(d);
        },
        py::arg("image"), py::arg("mask"), py::arg("center_row"), py::arg("x_left"), py::arg("x_right"),
        py::arg("h") = 0, py::arg("half") = "line", py::arg("preset") = "entry22",
        "Score of one candidate curve, or None when too few of its points can be sampled.");

    m.def(
        "render_random",
        [](const std::string& profile, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            const auto spec = random_scene(profile, rng);
            const auto sc = render(spec, rng());
            return py::make_tuple(rgb_array(sc.image), mask_array(sc.mask), truth_to_json(sc.truth));
        },
        py::arg("profile"), py::arg("seed"));

    m.def(
        "generate_corpus",
        [](const std::string& dir, int n, const std::string& profile, std::uint64_t seed) {
            std::vector<std::string> ids;
            for (const auto& e : generate_corpus(dir, n, profile, seed).entries) {
                ids.push_back(e.id);
            }
            return ids;
        },
        py::arg("directory"), py::arg("n"), py::arg("profile") = "easy", py::arg("seed") = 1);

    m.def(
        "evaluate_corpus_json",
        [](const std::string& dir, std::optional<std::string> preset, std::optional<std::string> config, int threads,
           double row_tolerance) {
            const auto cfg = resolve(preset, config, threads);
            MatchRule rule;
            rule.row_tolerance = row_tolerance;
            py::gil_scoped_release release;
            return eval_to_json(evaluate_corpus(dir, cfg, rule));
        },
        py::arg("directory"), py::arg("preset") = py::none(), py::arg("config") = py::none(), py::arg("threads") = 1,
        py::arg("row_tolerance") = 2.0);
}
