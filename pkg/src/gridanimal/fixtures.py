"""Committed curve and tunnel fixtures shipped with the package."""
from __future__ import annotations

from importlib import resources

from .curves import LatticeCurve
from .voxel import Box

# two independent curve pairs for the 3D construction
CURVE_PAIRS = {
    "a": ("curve444_a", "curve774_a"),
    "b": ("curve444_b", "curve774_b"),
}


def data_text(name: str) -> str:
    return resources.files("gridanimal").joinpath("data", f"{name}.json").read_text()


def load_curve(name: str) -> LatticeCurve:
    return LatticeCurve.from_json(data_text(name))


def load_pair(key: str = "a") -> tuple[LatticeCurve, LatticeCurve]:
    first, white = CURVE_PAIRS[key]
    return load_curve(first), load_curve(white)


def load_tunnel(name: str) -> tuple[LatticeCurve, Box]:
    from .construction import load_tunnel as parse

    return parse(data_text(name))
