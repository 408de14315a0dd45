"""Liquid surface and phase boundary detection in transparent vessels."""

import json

from ._liqsurf import (
    ConfigError,
    Error,
    IoError,
    ParameterError,
    detect_file_json,
    detect_json,
    evaluate_corpus_json,
    generate_corpus,
    presets,
    render_random,
    score_curve,
    view_height,
)

__all__ = [
    "ConfigError",
    "Error",
    "IoError",
    "ParameterError",
    "detect",
    "detect_file",
    "evaluate_corpus",
    "generate_corpus",
    "presets",
    "render",
    "score_curve",
    "view_height",
]


def detect(image, mask, preset=None, config=None, threads=1, image_id="image"):
    """Detect surfaces in an HxW or HxWx3 uint8 array; `mask` marks the vessel interior."""
    return json.loads(detect_json(image, mask, preset, config, threads, image_id))


def detect_file(image_path, vessel_path, preset=None, config=None, threads=1):
    return json.loads(detect_file_json(str(image_path), str(vessel_path), preset, config, threads))


def render(profile="easy", seed=1):
    """Random synthetic scene: (image, mask, ground truth dict)."""
    image, mask, truth = render_random(profile, seed)
    return image, mask, json.loads(truth)


def evaluate_corpus(directory, preset=None, config=None, threads=1, row_tolerance=2.0):
    return json.loads(evaluate_corpus_json(str(directory), preset, config, threads, row_tolerance))
