"""Bundled and file-backed benchmark graphs.

Karate ships with the package. Dolphin and football are looked up as
``<name>.txt`` / ``<name>_groundtruth.txt`` in ``ENTROPIC_DATA`` or the
repository ``data/`` directory; :class:`DatasetUnavailable` is raised when
the files are absent.
"""

from __future__ import annotations

import os
from importlib.resources import files
from pathlib import Path

from .graph import DirectedWeightedGraph, directed_flag, parse_edge_list, read_ground_truth

BUNDLED = ("karate",)
FILE_BACKED = ("dolphins", "football")


class DatasetUnavailable(FileNotFoundError):
    pass


def _search_dirs() -> list[Path]:
    dirs = []
    env = os.environ.get("ENTROPIC_DATA")
    if env:
        dirs.append(Path(env))
    dirs.append(Path(__file__).resolve().parents[2] / "data")
    dirs.append(Path.cwd() / "data")
    return dirs


def dataset_paths(name: str) -> tuple[Path, Path]:
    if name in BUNDLED:
        root = files("entropic") / "data"
        return Path(str(root / f"{name}.txt")), Path(str(root / f"{name}_groundtruth.txt"))
    for d in _search_dirs():
        g, t = d / f"{name}.txt", d / f"{name}_groundtruth.txt"
        if g.is_file() and t.is_file():
            return g, t
    raise DatasetUnavailable(f"dataset {name!r} not found; place {name}.txt and {name}_groundtruth.txt under data/ or $ENTROPIC_DATA")


def load(name: str) -> tuple[DirectedWeightedGraph, dict[str, int]]:
    """Graph and ground-truth labels of a named dataset."""
    gpath, tpath = dataset_paths(name)
    text = gpath.read_text(encoding="utf-8")
    # all named datasets are undirected unless the file says otherwise
    directed = directed_flag(text) or False
    return parse_edge_list(text, directed=directed), read_ground_truth(tpath)


def karate() -> tuple[DirectedWeightedGraph, dict[str, int]]:
    return load("karate")
