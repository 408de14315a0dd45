#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "liqsurf/config.hpp"
#include "liqsurf/selection.hpp"
#include "liqsurf/synth.hpp"

namespace liqsurf {

inline constexpr int kEvalSchemaVersion = 1;

struct MatchRule {
    double row_tolerance = 2.0;
    /// Height tolerance is max(height_tolerance_min, fraction * truth h).
    double height_tolerance_fraction = 0.2;
    double height_tolerance_min = 2.0;

    void validate() const;
    double height_tolerance(double truth_h) const;
};

struct ImageTally {
    std::string image_id;
    int liquid_air = 0;
    int liquid_liquid = 0;
    int emulsive = 0;
    int missed_liquid_air = 0;
    int missed_liquid_liquid = 0;
    int missed_emulsive = 0;
    int detections = 0;
    int false_matches = 0;
    int wrong_shape = 0;
    /// Truth surfaces matched by more than one detection.
    int double_recognitions = 0;

    int surfaces() const noexcept { return liquid_air + liquid_liquid; }
    int missed() const noexcept { return missed_liquid_air + missed_liquid_liquid; }
};

/// Greedy best-score-first matching of interior detections to truth surfaces.
/// Throws ParameterError when the image ids differ.
ImageTally match_detections(const DetectionReport& report, const GroundTruth& truth, const MatchRule& rule);

struct EvalReport {
    int images = 0;
    int liquid_air = 0;
    int liquid_liquid = 0;
    int emulsive = 0;
    int missed_liquid_air = 0;
    int missed_liquid_liquid = 0;
    int missed_emulsive = 0;
    int false_matches = 0;
    int wrong_shape = 0;
    int double_recognitions = 0;

    double miss_all = 0.0;
    double miss_liquid_air = 0.0;
    double miss_liquid_liquid = 0.0;
    double false_per_image = 0.0;
    double wrong_shape_fraction = 0.0;
    double double_recognition_fraction = 0.0;
    double emulsive_miss_fraction = 0.0;

    MatchRule rule;
    std::vector<ImageTally> per_image;
};

/// Fractions with an empty denominator are reported as 0. Throws
/// ParameterError for an empty tally list.
EvalReport aggregate_eval(const std::vector<ImageTally>& tallies, const MatchRule& rule = {});

/// Percentage with `decimals` digits, e.g. 1/147 -> "0.7".
std::string format_percent(double fraction, int decimals = 1);

std::string eval_to_json(const EvalReport& r);

/// Human-readable summary, one column per table metric.
std::string eval_table(const EvalReport& r);

/// Runs the detector over every corpus image. Images are processed in
/// manifest order; `cfg.threads` parallelises candidate scoring.
EvalReport evaluate_corpus(const std::filesystem::path& dir, const DetectorConfig& cfg, const MatchRule& rule);

struct SweepRow {
    double threshold = 0.0;
    EvalReport eval;
};

/// Scores each image once and selects at every threshold. Throws Error when
/// acceptance sets are not nested as T grows.
std::vector<SweepRow> sweep_corpus(const std::filesystem::path& dir, const DetectorConfig& cfg, const MatchRule& rule,
                                   std::vector<double> thresholds);

std::string sweep_table(const std::vector<SweepRow>& rows);

} // namespace liqsurf
