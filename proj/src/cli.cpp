#include "liqsurf/cli.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liqsurf/config.hpp"
#include "liqsurf/detector.hpp"
#include "liqsurf/evaluation.hpp"
#include "liqsurf/image_io.hpp"
#include "liqsurf/report_io.hpp"
#include "liqsurf/synth.hpp"

namespace liqsurf {

namespace {

struct ConfigFlags {
    std::string config_path;
    std::string preset;
    int threads = 0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f)
{
    cmd->add_option("--config", f.config_path, "Detector config file");
    cmd->add_option("--preset", f.preset, "Indicator preset, e.g. entry22");
    cmd->add_option("--threads", f.threads, "Worker threads for candidate scoring")->check(CLI::PositiveNumber);
}

DetectorConfig resolve_config(const ConfigFlags& f)
{
    std::optional<std::string> preset;
    if (!f.preset.empty()) {
        preset = f.preset;
    }
    DetectorConfig cfg = f.config_path.empty() ? parse_config("", preset) : load_config(f.config_path, preset);
    if (f.threads > 0) {
        cfg.threads = f.threads;
    }
    cfg.validate();
    return cfg;
}

struct MatchFlags {
    double row_tol = 2.0;
    double height_tol = 0.2;
};

void add_match_flags(CLI::App* cmd, MatchFlags& m)
{
    cmd->add_option("--row-tol", m.row_tol, "Row tolerance for a match, pixels")->check(CLI::NonNegativeNumber);
    cmd->add_option("--height-tol", m.height_tol, "Height tolerance as a fraction of truth h (min 2 px)")
        ->check(CLI::NonNegativeNumber);
}

MatchRule to_rule(const MatchFlags& m)
{
    MatchRule r;
    r.row_tolerance = m.row_tol;
    r.height_tolerance_fraction = m.height_tol;
    return r;
}

void emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
}

} // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"Liquid surface and phase boundary detection in transparent vessels", "liqsurf"};
    app.require_subcommand(1);

    ConfigFlags detect_cfg;
    std::string image_path;
    std::string vessel_path;
    std::string out_path;
    std::string annotate_path;
    auto* detect_cmd = app.add_subcommand("detect", "Detect liquid surfaces in one image");
    detect_cmd->add_option("image", image_path, "Input image (PNG or BMP)")->required();
    detect_cmd->add_option("--vessel", vessel_path, "Vessel mask (.png/.bmp) or row extent table")->required();
    detect_cmd->add_option("--out", out_path, "Write the report JSON here instead of stdout");
    detect_cmd->add_option("--annotate", annotate_path, "Write an annotated PNG here");
    add_config_flags(detect_cmd, detect_cfg);

    ConfigFlags eval_cfg;
    MatchFlags eval_match;
    std::string corpus_dir;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate the detector on a synthetic corpus");
    eval_cmd->add_option("corpus", corpus_dir, "Corpus directory")->required();
    eval_cmd->add_option("--out", eval_out, "Write the evaluation JSON here");
    add_config_flags(eval_cmd, eval_cfg);
    add_match_flags(eval_cmd, eval_match);

    std::string synth_dir;
    std::string profile = "easy";
    int count = 10;
    std::uint64_t seed = 1;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
    synth_cmd->add_option("out_dir", synth_dir, "Output directory")->required();
    synth_cmd->add_option("--profile", profile, "Difficulty profile")
        ->check(CLI::IsMember(corpus_profiles()));
    synth_cmd->add_option("--n", count, "Number of images")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", seed, "Random seed");

    ConfigFlags sweep_cfg;
    MatchFlags sweep_match;
    std::string sweep_dir;
    std::vector<double> thresholds{0.3, 0.4, 0.5};
    std::string sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep the threshold T over a corpus");
    sweep_cmd->add_option("corpus", sweep_dir, "Corpus directory")->required();
    sweep_cmd->add_option("--t", thresholds, "Threshold values in (0, 1)")->delimiter(',')->expected(1, -1);
    sweep_cmd->add_option("--out", sweep_out, "Write the evaluation JSON of every T here, one document after another");
    add_config_flags(sweep_cmd, sweep_cfg);
    add_match_flags(sweep_cmd, sweep_match);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (detect_cmd->parsed()) {
            const auto cfg = resolve_config(detect_cfg);
            const auto image = read_image(image_path);
            const auto vessel = read_vessel(vessel_path, image.width(), image.height());
            const auto id = std::filesystem::path(image_path).stem().string();
            const auto report = detect(image, vessel, cfg, id);
            if (!annotate_path.empty()) {
                write_png(annotate_path, annotate(image, vessel, report));
            }
            emit(report_to_json(report), out_path);
        } else if (eval_cmd->parsed()) {
            const auto cfg = resolve_config(eval_cfg);
            const auto report = evaluate_corpus(corpus_dir, cfg, to_rule(eval_match));
            if (!eval_out.empty()) {
                write_text_file(eval_out, eval_to_json(report));
            }
            std::cout << eval_table(report);
        } else if (synth_cmd->parsed()) {
            const auto m = generate_corpus(synth_dir, count, profile, seed);
            std::cout << "wrote " << m.entries.size() << " images to " << synth_dir << "\n";
        } else if (sweep_cmd->parsed()) {
            const auto cfg = resolve_config(sweep_cfg);
            const auto rows = sweep_corpus(sweep_dir, cfg, to_rule(sweep_match), thresholds);
            if (!sweep_out.empty()) {
                std::string lines;
                for (const auto& r : rows) {
                    lines += eval_to_json(r.eval);
                }
                write_text_file(sweep_out, lines);
            }
            std::cout << sweep_table(rows);
        }
    } catch (const ConfigError& e) {
        std::cerr << "liqsurf: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "liqsurf: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

} // namespace liqsurf
