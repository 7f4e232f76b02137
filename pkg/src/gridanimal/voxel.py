"""Integer-lattice cube model.

A cube is named by an integer triple ``(a, b, c)`` and occupies
``[a-1, a] x [b-1, b] x [c-1, c]``.  Every box in this package is an
*inclusive range of cube indices*; the real-valued span is derived from it
here and nowhere else.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, NamedTuple

import numpy as np


class EmptySet(ValueError):
    pass


class BadMirrorPlane(ValueError):
    pass


class Cube(NamedTuple):
    a: int
    b: int
    c: int


FACE_OFFSETS = tuple(
    v for v in product((-1, 0, 1), repeat=3) if sum(map(abs, v)) == 1
)
EDGE_OFFSETS = tuple(
    v for v in product((-1, 0, 1), repeat=3) if 1 <= sum(map(abs, v)) <= 2
)
VERTEX_OFFSETS = tuple(v for v in product((-1, 0, 1), repeat=3) if any(v))

_OFFSETS = {"face": FACE_OFFSETS, "edge": EDGE_OFFSETS, "vertex": VERTEX_OFFSETS}


def cube_span(q) -> tuple[tuple[int, int], ...]:
    """Real intervals covered by cube ``q`` (works for squares too)."""
    return tuple((x - 1, x) for x in q)


def cube_center(q) -> tuple[float, ...]:
    return tuple(x - 0.5 for x in q)


def neighbors(q, mode: str = "face") -> set[tuple[int, int, int]]:
    """Cubes adjacent to ``q``.

    ``mode`` is ``"face"`` (6 cubes sharing a square), ``"edge"`` (18 cubes
    sharing at least an edge) or ``"vertex"`` (all 26 cubes meeting ``q``).
    """
    try:
        offsets = _OFFSETS[mode]
    except KeyError:
        raise ValueError(f"unknown adjacency mode {mode!r}") from None
    a, b, c = q
    return {(a + dx, b + dy, c + dz) for dx, dy, dz in offsets}


@dataclass(frozen=True)
class Box:
    """Inclusive range of lattice indices per axis (any dimension)."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(int(x) for x in self.lo))
        object.__setattr__(self, "hi", tuple(int(x) for x in self.hi))
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi differ in dimension")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError(f"empty box {self.lo}..{self.hi}")

    @classmethod
    def from_dims(cls, *dims: int) -> "Box":
        """Box with indices ``1..n`` per axis, i.e. span ``[0, n]``."""
        return cls(tuple(1 for _ in dims), tuple(dims))

    @classmethod
    def from_span(cls, lo, hi) -> "Box":
        """Box covering the real span ``[lo, hi]`` (integer corners)."""
        return cls(tuple(x + 1 for x in lo), tuple(hi))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(h - l + 1 for l, h in zip(self.lo, self.hi))

    @property
    def span(self) -> tuple[tuple[int, int], ...]:
        return tuple((l - 1, h) for l, h in zip(self.lo, self.hi))

    def __len__(self) -> int:
        return int(np.prod(self.shape))

    def __contains__(self, q) -> bool:
        return all(l <= x <= h for x, l, h in zip(q, self.lo, self.hi))

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(product(*(range(l, h + 1) for l, h in zip(self.lo, self.hi))))

    def contains_box(self, other: "Box") -> bool:
        return all(a <= b for a, b in zip(self.lo, other.lo)) and all(
            a >= b for a, b in zip(self.hi, other.hi)
        )

    def on_boundary(self, q) -> bool:
        return any(x == l or x == h for x, l, h in zip(q, self.lo, self.hi))

    def expand(self, k: int = 1) -> "Box":
        return Box(tuple(x - k for x in self.lo), tuple(x + k for x in self.hi))

    def __str__(self) -> str:
        return ",".join(map(str, self.lo)) + ".." + ",".join(map(str, self.hi))

    @classmethod
    def parse(cls, text: str) -> "Box":
        """Parse ``"lo1,lo2,lo3..hi1,hi2,hi3"``."""
        lo, sep, hi = text.partition("..")
        if not sep:
            raise ValueError(f"box must look like 'lo..hi', got {text!r}")
        return cls(tuple(int(x) for x in lo.split(",")), tuple(int(x) for x in hi.split(",")))


def bounding_box(cubes: Iterable) -> Box:
    cubes = list(cubes)
    if not cubes:
        raise EmptySet("bounding box of an empty set")
    arr = np.asarray(cubes, dtype=np.int64)
    return Box(tuple(arr.min(axis=0).tolist()), tuple(arr.max(axis=0).tolist()))


def mirror_index(c: int, plane: float) -> int:
    """Index of the cube mirrored through the plane ``coord = plane``."""
    if (2 * plane) % 2 != 1:
        raise BadMirrorPlane(f"plane {plane} does not map cube centers to cube centers")
    # (c' - 0.5) = 2*plane - (c - 0.5)
    return int(round(2 * plane + 1 - c))


class CubeSet:
    """Immutable finite set of lattice cubes (or squares, in 2D).

    Iteration is lexicographic so every serialization is canonical.
    """

    __slots__ = ("_cubes", "_sorted")

    def __init__(self, cubes: Iterable = ()):
        self._cubes = frozenset(tuple(int(x) for x in q) for q in cubes)
        self._sorted = None
        dims = {len(q) for q in self._cubes}
        if len(dims) > 1:
            raise ValueError("mixed dimensions in CubeSet")

    @property
    def dim(self) -> int:
        for q in self._cubes:
            return len(q)
        return 3

    @property
    def cubes(self) -> frozenset:
        return self._cubes

    def sorted(self) -> list[tuple[int, ...]]:
        if self._sorted is None:
            self._sorted = sorted(self._cubes)
        return self._sorted

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self._cubes)

    def __contains__(self, q) -> bool:
        return tuple(q) in self._cubes

    def __eq__(self, other) -> bool:
        if isinstance(other, CubeSet):
            return self._cubes == other._cubes
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._cubes)

    def __repr__(self) -> str:
        return f"CubeSet(<{len(self)} cubes>)"

    def __or__(self, other: "CubeSet") -> "CubeSet":
        return CubeSet(self._cubes | CubeSet(other)._cubes)

    def __sub__(self, other) -> "CubeSet":
        return CubeSet(self._cubes - CubeSet(other)._cubes)

    def __and__(self, other) -> "CubeSet":
        return CubeSet(self._cubes & CubeSet(other)._cubes)

    def toggle(self, q) -> "CubeSet":
        q = tuple(q)
        return CubeSet(self._cubes ^ {q})

    def bounding_box(self) -> Box:
        return bounding_box(self._cubes)

    def translate(self, offset) -> "CubeSet":
        return CubeSet(tuple(x + d for x, d in zip(q, offset)) for q in self._cubes)

    def neighbors_in(self, q, mode: str = "face") -> set:
        return neighbors(q, mode) & self._cubes

    # --- derived cell complex ------------------------------------------------
    def vertices(self) -> set[tuple[int, ...]]:
        """Lattice points lying on some member cube."""
        out = set()
        for q in self._cubes:
            for d in product((0, 1), repeat=len(q)):
                out.add(tuple(x - 1 + e for x, e in zip(q, d)))
        return out

    def squares(self) -> set[tuple[int, int, int, int]]:
        """Unit squares on member cubes, named ``(axis, x, y, z)``.

        The square normal to ``axis`` at lattice coordinate ``x[axis]``; the
        other two coordinates are the cube indices spanning it.
        """
        out = set()
        for q in self._cubes:
            for ax in range(3):
                for side in (-1, 0):
                    p = list(q)
                    p[ax] += side
                    out.add((ax, *p))
        return out

    def edges(self) -> set[tuple[int, int, int, int]]:
        """Unit edges named ``(axis, x, y, z)``: parallel to ``axis``,
        with ``x[axis]`` the cube index along it and lattice coords elsewhere."""
        out = set()
        for q in self._cubes:
            for ax in range(3):
                others = [i for i in range(3) if i != ax]
                for d in product((-1, 0), repeat=2):
                    p = list(q)
                    p[others[0]] += d[0]
                    p[others[1]] += d[1]
                    out.add((ax, *p))
        return out

    # --- dense grids ---------------------------------------------------------
    def to_grid(self, box: Box | None = None, pad: int = 1) -> tuple[np.ndarray, tuple[int, ...]]:
        """Dense ``uint8`` occupancy over ``box`` widened by ``pad``.

        Returns the array and the index of the cube stored at ``[0, 0, 0]``.
        Cubes outside the box are dropped.
        """
        if box is None:
            box = self.bounding_box() if self._cubes else Box((1,) * self.dim, (1,) * self.dim)
        box = box.expand(pad)
        grid = np.zeros(box.shape, dtype=np.uint8)
        if self._cubes:
            arr = np.asarray(self.sorted(), dtype=np.int64) - np.asarray(box.lo)
            keep = np.all((arr >= 0) & (arr < np.asarray(box.shape)), axis=1)
            arr = arr[keep]
            grid[tuple(arr.T)] = 1
        return grid, box.lo

    @classmethod
    def from_grid(cls, grid: np.ndarray, origin) -> "CubeSet":
        idx = np.argwhere(grid) + np.asarray(origin)
        return cls(map(tuple, idx.tolist()))

    # --- interchange ---------------------------------------------------------
    def to_json(self) -> str:
        key = "cubes" if self.dim == 3 else "squares"
        rows = ",\n".join("  " + json.dumps(list(q)) for q in self.sorted())
        return "{\"%s\": [\n%s\n]}\n" % (key, rows)

    @classmethod
    def from_json(cls, text: str) -> "CubeSet":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("expected a JSON object")
        for key, dim in (("cubes", 3), ("squares", 2)):
            if key in data:
                rows = data[key]
                if not isinstance(rows, list) or any(
                    not isinstance(r, list) or len(r) != dim or not all(isinstance(x, int) for x in r)
                    for r in rows
                ):
                    raise ValueError(f"{key!r} must be a list of integer {dim}-tuples")
                return cls(rows)
        raise ValueError("expected a 'cubes' or 'squares' key")

    def to_ascii(self, box: Box | None = None) -> str:
        return layered_ascii(lambda q: "#" if q in self._cubes else ".", box or self.bounding_box())


def mirror_z(s: CubeSet, plane_z: float) -> CubeSet:
    """Reflect ``s`` through the horizontal plane ``z = plane_z``."""
    return CubeSet(q[:-1] + (mirror_index(q[-1], plane_z),) for q in s)


def layered_ascii(char_of, box: Box) -> str:
    """One character grid per layer of the last axis; rows run from high y
    to low y."""
    lines = []
    if box.dim == 2:
        layers = [None]
    else:
        layers = range(box.lo[2], box.hi[2] + 1)
    for z in layers:
        lines.append("# layer" if z is None else f"# z = {z}")
        for y in range(box.hi[1], box.lo[1] - 1, -1):
            row = []
            for x in range(box.lo[0], box.hi[0] + 1):
                row.append(char_of((x, y) if z is None else (x, y, z)))
            lines.append("".join(row))
        lines.append("")
    return "\n".join(lines)


def parse_layered_ascii(text: str, box: Box) -> dict:
    """Inverse of :func:`layered_ascii`: cube -> character."""
    out = {}
    blocks = [b for b in text.strip("\n").split("\n\n") if b.strip()]
    layers = [None] if box.dim == 2 else list(range(box.lo[2], box.hi[2] + 1))
    if len(blocks) != len(layers):
        raise ValueError("layer count does not match box")
    for z, block in zip(layers, blocks):
        rows = block.splitlines()[1:]
        for y, row in zip(range(box.hi[1], box.lo[1] - 1, -1), rows):
            for x, ch in zip(range(box.lo[0], box.hi[0] + 1), row):
                out[(x, y) if z is None else (x, y, z)] = ch
    return out
