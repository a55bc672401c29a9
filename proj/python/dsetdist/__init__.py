"""Distances between wireless datasets and their correlation with transfer performance."""

import json
import os

import numpy as np

from ._dsetdist import (
    Error,
    InsufficientDataError,
    ParseError,
    ShapeError,
    ValidationError,
    distance,
    distance_matrix,
    load_dataset,
    metric_names,
    performance,
    save_dataset,
    set_thread_count,
)
from . import _dsetdist

__all__ = [
    "Error",
    "InsufficientDataError",
    "ParseError",
    "ShapeError",
    "ValidationError",
    "bench",
    "distance",
    "distance_matrix",
    "embed",
    "load_dataset",
    "metric_names",
    "performance",
    "save_dataset",
    "scene_dataset",
    "set_thread_count",
]


def bench(config, base_dir=None, timestamp=False):
    """Run a benchmark from a config dict or a path to a JSON file; returns the report dict."""
    if isinstance(config, (str, os.PathLike)):
        path = os.fspath(config)
        with open(path, encoding="utf-8") as f:
            config = json.load(f)
        if base_dir is None:
            base_dir = os.path.dirname(os.path.abspath(path))
    text = _dsetdist.bench_json(json.dumps(config), base_dir or "", timestamp)
    return json.loads(text)


def embed(datasets, labels=None, dims=2, supervised=False, n_neighbors=32,
          point_metric="euclidean", epochs=200, seed=0):
    """Joint graph embedding; returns one coordinate array per input dataset."""
    coords, offsets = _dsetdist.embed(
        [np.asarray(x, dtype=np.float64) for x in datasets], labels, dims, supervised,
        n_neighbors, point_metric, epochs, seed)
    return [coords[offsets[i]:offsets[i + 1]] for i in range(len(offsets) - 1)]


def scene_dataset(area, scene=None, preprocess="angle_delay", labels="beam"):
    """Features and labels of one area of a generated scene."""
    return _dsetdist.scene_dataset(area, json.dumps(scene or {}), preprocess, labels)
