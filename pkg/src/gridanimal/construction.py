"""The expansion pipeline producing the blocked animal, its 2D analogue, and
knotted-tunnel (Furch-style) balls.

Coordinates: a point with half-integer coordinates ``p`` corresponds to the
cube whose index is ``2p`` (the doubling map).  Everything here is written
for dimension 2 or 3; the last axis is the vertical one.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable

import numpy as np

from .curves import CurveConstraints, LatticeCurve, is_valid_filling_curve
from .topology import is_animal
from .voxel import Box, CubeSet, layered_ascii, mirror_index

__all__ = [
    "Color",
    "ColoredBox",
    "DualComplex",
    "ConstructionRecord",
    "Layout",
    "LAYOUT_3D",
    "LAYOUT_2D",
    "PipelineAssertFailed",
    "phi",
    "phi_point",
    "phi_points",
    "phi_box",
    "psi",
    "first_red_curve",
    "expand_first",
    "extend_and_second_curve",
    "black_dual_complex",
    "expand_second",
    "doubling",
    "build_animal",
    "build_2d_example",
    "red_path_ends",
    "build_furch",
    "straight_tunnel",
    "trefoil_tunnel",
]


class PipelineAssertFailed(AssertionError):
    pass


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise PipelineAssertFailed(msg)


class Color(enum.IntEnum):
    WHITE = 0
    BLACK = 1
    RED = 2


_GLYPH = {Color.WHITE: "w", Color.BLACK: "k", Color.RED: "r"}


class ColoredBox:
    """Every cube of ``box`` carries a colour; cubes outside are white."""

    def __init__(self, box: Box, colors: np.ndarray | None = None):
        self.box = box
        self.colors = np.zeros(box.shape, dtype=np.int8) if colors is None else colors

    def _idx(self, q):
        return tuple(x - l for x, l in zip(q, self.box.lo))

    def __getitem__(self, q) -> Color:
        q = tuple(q)
        if q not in self.box:
            return Color.WHITE
        return Color(int(self.colors[self._idx(q)]))

    def __setitem__(self, q, color: Color) -> None:
        q = tuple(q)
        if q not in self.box:
            raise PipelineAssertFailed(f"cube {q} outside {self.box}")
        self.colors[self._idx(q)] = int(color)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.box.shape

    def cubes(self, *colors: Color) -> CubeSet:
        mask = np.isin(self.colors, [int(c) for c in colors])
        return CubeSet.from_grid(mask, self.box.lo)

    def count(self, color: Color) -> int:
        return int(np.count_nonzero(self.colors == int(color)))

    def copy(self) -> "ColoredBox":
        return ColoredBox(self.box, self.colors.copy())

    def to_ascii(self) -> str:
        return layered_ascii(lambda q: _GLYPH[self[q]], self.box)


# --------------------------------------------------------------------------
# Doubling maps
# --------------------------------------------------------------------------

def phi_point(p) -> tuple[int, ...] | None:
    """Cube named by the doubled point, or None off the half-integer grid."""
    out = []
    for x in p:
        d = Fraction(x) * 2
        if d.denominator != 1:
            return None
        out.append(int(d))
    return tuple(out)


def phi_points(points: Iterable) -> CubeSet:
    return CubeSet(q for q in map(phi_point, points) if q is not None)


def phi(x) -> CubeSet:
    """Doubling map on a point iterable or on the closed polyhedron of a CubeSet."""
    if isinstance(x, CubeSet):
        return CubeSet(q for c in x for q in product(*[range(2 * a - 2, 2 * a + 1) for a in c]))
    return phi_points(x)


def phi_box(box: Box) -> Box:
    """Cubes whose doubled preimage lies in the polyhedron of ``box``."""
    return Box(tuple(2 * (l - 1) for l in box.lo), tuple(2 * h for h in box.hi))


def psi(q, b1: Box | None = None) -> CubeSet:
    """The 5^d block obtained by doubling the interior of phi(q)."""
    b1 = b1 or Box.from_dims(*([4] * len(q)))
    if tuple(q) not in b1:
        raise ValueError(f"{q} is not a cube of {b1}")
    return CubeSet(product(*[range(4 * a - 5, 4 * a) for a in q]))


def _curve_points(cubes, head=None, tail=None) -> list[tuple]:
    """Doubled cube indices of all half-integer points on the polyline
    through the cube centres (plus optional end extensions)."""
    cs = [tuple(2 * x - 1 for x in q) for q in cubes]
    pts = []
    if head is not None:
        pts.append(phi_point(head))
    for i, c in enumerate(cs):
        pts.append(c)
        if i + 1 < len(cs):
            pts.append(tuple((a + b) // 2 for a, b in zip(c, cs[i + 1])))
    if tail is not None:
        pts.append(phi_point(tail))
    return pts


def red_path_ends(red: CubeSet) -> tuple[tuple, tuple]:
    """Ends of the face-dual graph of ``red``; asserts it is a path."""
    _check(len(red) >= 2, "fewer than two red cubes")
    ends = []
    for q in red:
        deg = len(_face_nbrs(q) & red.cubes)
        _check(deg in (1, 2), f"red cube {q} has {deg} red neighbours")
        if deg == 1:
            ends.append(q)
    _check(len(ends) == 2, f"red dual graph has {len(ends)} ends")
    seen = {ends[0]}
    stack = [ends[0]]
    while stack:
        q = stack.pop()
        for r in _face_nbrs(q) & red.cubes:
            if r not in seen:
                seen.add(r)
                stack.append(r)
    _check(len(seen) == len(red), "red dual graph is not connected")
    return ends[0], ends[1]


def _face_nbrs(q) -> set:
    out = set()
    for ax in range(len(q)):
        for s in (-1, 1):
            r = list(q)
            r[ax] += s
            out.add(tuple(r))
    return out


# --------------------------------------------------------------------------
# Layout constants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Layout:
    """Sizes and curve constraints for one dimension of the construction."""

    dim: int
    side: int                 # first box is side^dim
    start: tuple
    end: tuple
    second: tuple | None
    penultimate: tuple | None
    white_dims: tuple         # the white box (last axis vertical)
    white_start: tuple
    white_end: tuple
    white_second: tuple | None
    white_penultimate: tuple | None
    allow_uturns: bool

    @property
    def b1(self) -> Box:
        return Box.from_dims(*([self.side] * self.dim))

    @property
    def white_box(self) -> Box:
        return Box.from_dims(*self.white_dims)

    def first_constraints(self, seed: int = 0, time_limit: float = 300.0) -> CurveConstraints:
        return CurveConstraints(self.b1, self.start, self.end, self.second, self.penultimate,
                                seed, time_limit, self.allow_uturns)

    def white_constraints(self, seed: int = 0, time_limit: float = 300.0) -> CurveConstraints:
        return CurveConstraints(self.white_box, self.white_start, self.white_end, self.white_second,
                                self.white_penultimate, seed, time_limit, self.allow_uturns)


LAYOUT_3D = Layout(
    dim=3, side=4,
    start=(3, 2, 1), end=(3, 2, 4), second=(3, 2, 2), penultimate=(3, 2, 3),
    white_dims=(7, 7, 4),
    white_start=(5, 3, 1), white_end=(2, 6, 4), white_second=(5, 3, 2), white_penultimate=(2, 6, 3),
    allow_uturns=False,
)

# In the plane a second/penultimate constraint on the same column cannot be
# met, and the white box's end must sit on an odd column for parity.
LAYOUT_2D = Layout(
    dim=2, side=4,
    start=(3, 1), end=(3, 4), second=None, penultimate=None,
    white_dims=(7, 4),
    white_start=(5, 1), white_end=(3, 4), white_second=None, white_penultimate=None,
    allow_uturns=True,
)


def _check_curve(c: LatticeCurve, k: CurveConstraints, name: str) -> None:
    ok = is_valid_filling_curve(c, k.dims, k.allow_uturns)
    _check(bool(ok), f"{name}: {ok.diagnostic}")
    _check(c.start == tuple(k.start) and c.end == tuple(k.end), f"{name}: wrong endpoints")
    if k.second is not None:
        _check(c.cubes[1] == tuple(k.second), f"{name}: wrong second cube")
    if k.penultimate is not None:
        _check(c.cubes[-2] == tuple(k.penultimate), f"{name}: wrong penultimate cube")


# --------------------------------------------------------------------------
# Pipeline stages
# --------------------------------------------------------------------------

def first_red_curve(c: LatticeCurve, layout: Layout = LAYOUT_3D) -> LatticeCurve:
    """Attach vertical half-unit extensions to the bottom and top faces."""
    _check_curve(c, layout.first_constraints(), "first curve")
    head = tuple(Fraction(2 * x - 1, 2) for x in c.start[:-1]) + (Fraction(0),)
    tail = tuple(Fraction(2 * x - 1, 2) for x in c.end[:-1]) + (Fraction(layout.side),)
    return LatticeCurve(c.cubes, head, tail)


def expand_first(curve: LatticeCurve, layout: Layout = LAYOUT_3D) -> ColoredBox:
    b2 = ColoredBox(phi_box(layout.b1))
    b2.colors[...] = Color.BLACK
    for q in _curve_points(curve.cubes, curve.head, curve.tail):
        b2[q] = Color.RED
    a, b = red_path_ends(b2.cubes(Color.RED))
    _check({a, b} == {phi_point(curve.head), phi_point(curve.tail)}, "red path ends are not the extension points")
    return b2


def extend_and_second_curve(b2: ColoredBox, c774: LatticeCurve, first: LatticeCurve,
                            layout: Layout = LAYOUT_3D) -> tuple[ColoredBox, LatticeCurve]:
    _check_curve(c774, layout.white_constraints(), "white-box curve")
    d = layout.dim
    top_b2 = b2.box.hi[-1]
    wz = layout.white_dims[-1]
    hi = b2.box.hi[:-1] + (top_b2 + wz + 1,)
    box = Box(b2.box.lo, hi)
    out = ColoredBox(box)
    sl = tuple(slice(0, s) for s in b2.shape)
    out.colors[sl] = b2.colors
    shift = (0,) * (d - 1) + (top_b2,)
    white = Box(tuple(1 + s for s in shift), tuple(w + s for w, s in zip(layout.white_dims, shift)))
    _check(white.lo[:-1] == tuple(l + 1 for l in box.lo[:-1]) and white.hi[:-1] == tuple(h - 1 for h in box.hi[:-1]),
           "white box does not fit inside the extension rim")
    for q in Box(box.lo[:-1] + (top_b2 + 1,), box.hi):
        out[q] = Color.WHITE if q in white else Color.BLACK
    # the white box stays white here; its curve only becomes red cubes in
    # the next expansion
    moved = c774.translate(shift)
    # pi as a cube path in B2, continued into the white box
    pi_cubes = _order_path(b2.cubes(Color.RED), phi_point(first.head))
    cubes = pi_cubes + list(moved.cubes)
    _check(sum(abs(a - b) for a, b in zip(pi_cubes[-1], moved.cubes[0])) == 1,
           "white-box curve does not continue the first red path")
    end = moved.cubes[-1]
    tail = tuple(Fraction(2 * x - 1, 2) for x in end[:-1]) + (Fraction(end[-1]),)
    second = LatticeCurve(tuple(cubes), None, tail)
    ends = red_path_ends(out.cubes(Color.RED))
    _check(set(ends) == {pi_cubes[0], pi_cubes[-1]}, "red dual graph ends moved")
    return out, second


def _order_path(cubes: CubeSet, start) -> list:
    order = [tuple(start)]
    seen = {order[0]}
    while True:
        nxt = [r for r in _face_nbrs(order[-1]) & cubes.cubes if r not in seen]
        if not nxt:
            break
        order.append(nxt[0])
        seen.add(nxt[0])
    _check(len(order) == len(cubes), "red cubes are not a single path")
    return order


@dataclass(frozen=True)
class DualComplex:
    """Dual graph of a cube set plus one square per edge (3D) or vertex (2D)
    shared by four member cubes."""

    vertices: frozenset
    edges: frozenset    # frozensets of 2 cubes
    squares: frozenset  # frozensets of 4 cubes

    def __contains__(self, point2) -> bool:
        """Membership of a doubled point (integer tuple)."""
        support = _support(point2)
        n = len(support)
        key = frozenset(support)
        if n == 1:
            return support[0] in self.vertices
        if n == 2:
            return key in self.edges
        if n == 4:
            return key in self.squares
        return False


def _support(point2) -> list[tuple]:
    """Cubes whose closures contain the point with doubled coordinates
    ``point2`` in their relative interior sense: odd -> one index, even ->
    the two adjacent indices."""
    axes = [((x + 1) // 2,) if x % 2 else (x // 2, x // 2 + 1) for x in point2]
    return [tuple(c) for c in product(*axes)]


def black_dual_complex(blacks: CubeSet) -> DualComplex:
    cubes = blacks.cubes
    d = blacks.dim
    edges, squares = set(), set()
    for q in cubes:
        for ax in range(d):
            r = list(q)
            r[ax] += 1
            if tuple(r) in cubes:
                edges.add(frozenset((q, tuple(r))))
        for a1 in range(d):
            for a2 in range(a1 + 1, d):
                block = []
                for u, v in product((0, 1), repeat=2):
                    r = list(q)
                    r[a1] += u
                    r[a2] += v
                    block.append(tuple(r))
                if all(r in cubes for r in block):
                    squares.add(frozenset(block))
        if d == 3:
            block = [tuple(x + o for x, o in zip(q, off)) for off in product((0, 1), repeat=3)]
            _check(not all(r in cubes for r in block), f"eight black cubes share a vertex at {q}")
    return DualComplex(frozenset(cubes), frozenset(edges), frozenset(squares))


def b3_box(b2p: ColoredBox) -> Box:
    """Stated box of the second expansion: odd-index centres plus one layer."""
    return Box(tuple(2 * l - 1 for l in b2p.box.lo), tuple(2 * h - 1 for h in b2p.box.hi))


def expand_second(b2p: ColoredBox, dual: DualComplex, second: LatticeCurve) -> ColoredBox:
    literal = phi_box(b2p.box)
    stated = b3_box(b2p)
    _check(literal.contains_box(stated), "stated box is not inside the literal image")
    b3 = ColoredBox(stated)
    red = set(_curve_points(second.cubes, second.head, second.tail))
    colored = []
    for x in literal:
        if x in red:
            colored.append((x, Color.RED))
        elif x in dual:
            colored.append((x, Color.BLACK))
    for x, col in colored:
        _check(x in stated, f"coloured cube {x} outside {stated}")
        b3[x] = col
    return b3


def doubling(b3: ColoredBox, mirror_cube: tuple) -> tuple[ColoredBox, float]:
    """Reflect below the bottom layer; the fixed middle layer is white except
    ``mirror_cube``."""
    lo_z = b3.box.lo[-1]
    plane = lo_z - 1.5
    mid = lo_z - 1
    bottom = mirror_index(b3.box.hi[-1], plane)
    box = Box(b3.box.lo[:-1] + (bottom,), b3.box.hi)
    out = ColoredBox(box)
    nz = b3.shape[-1]
    out.colors[..., -nz:] = b3.colors
    out.colors[..., :nz] = b3.colors[..., ::-1]
    _check(mirror_cube[-1] == mid, "mirror cube is not on the middle layer")
    out[mirror_cube] = Color.RED
    reds = {q for q in _face_nbrs(mirror_cube) if out[q] == Color.RED}
    up = mirror_cube[:-1] + (mid + 1,)
    down = mirror_cube[:-1] + (mid - 1,)
    _check(reds == {up, down}, f"mirror cube has red neighbours {sorted(reds)}")
    return out, plane


@dataclass
class ConstructionRecord:
    dim: int
    curve_first: LatticeCurve
    curve_white: LatticeCurve
    first_red: LatticeCurve
    second_red: LatticeCurve
    stages: dict
    animal: CubeSet
    named: dict
    mirror_plane: float
    dual: DualComplex = field(repr=False, default=None)

    @property
    def b3(self) -> ColoredBox:
        return self.stages["B3"]

    @property
    def final(self) -> ColoredBox:
        return self.stages["B3'"]

    def summary(self) -> dict:
        fb = self.final
        return {
            "dim": self.dim,
            "stages": {k: list(v.shape) for k, v in self.stages.items()},
            "bounding_box": {"lo": list(self.animal.bounding_box().lo), "hi": list(self.animal.bounding_box().hi)},
            "named": {k: list(v) for k, v in self.named.items()},
            "counts": {
                "animal": len(self.animal),
                "red": fb.count(Color.RED),
                "black": fb.count(Color.BLACK),
            },
        }


def _run_pipeline(c_first: LatticeCurve, c_white: LatticeCurve, layout: Layout) -> ConstructionRecord:
    first = first_red_curve(c_first, layout)
    b2 = expand_first(first, layout)
    b2p, second = extend_and_second_curve(b2, c_white, first, layout)
    dual = black_dual_complex(b2p.cubes(Color.BLACK))
    b3 = expand_second(b2p, dual, second)
    start2 = tuple(2 * x - 1 for x in second.cubes[0])
    mirror_cube = start2[:-1] + (start2[-1] - 1,)
    final, plane = doubling(b3, mirror_cube)
    animal = final.cubes(Color.BLACK, Color.RED)
    red_path_ends(final.cubes(Color.RED))
    bb = animal.bounding_box()
    _check(bb == final.box, f"animal bounding box {bb} differs from {final.box}")
    tail2 = phi_point(second.tail)
    _check(b3[tail2] == Color.RED, "end of second red curve is not red")
    named = {
        "phi_p1_ext": phi_point(first.head),
        "phi_q1_ext": phi_point(first.tail),
        "phi_q2_ext": tail2,
        "mirror_red": mirror_cube,
    }
    stages = {"B1": _b1_stage(c_first, layout), "B2": b2, "B2'": b2p, "B3": b3, "B3'": final}
    return ConstructionRecord(layout.dim, c_first, c_white, first, second, stages, animal, named, plane, dual)


def _b1_stage(c: LatticeCurve, layout: Layout) -> ColoredBox:
    box = ColoredBox(layout.b1)
    box.colors[...] = Color.BLACK
    for q in c.cubes:
        box[q] = Color.RED
    return box


EXPECTED_3D = {
    "phi_p1_ext": (5, 3, 0),
    "phi_q1_ext": (5, 3, 8),
    "phi_q2_ext": (3, 11, 24),
    "mirror_red": (9, 5, -2),
}


def build_animal(curve444: LatticeCurve, curve774: LatticeCurve) -> ConstructionRecord:
    rec = _run_pipeline(curve444, curve774, LAYOUT_3D)
    for k, v in EXPECTED_3D.items():
        _check(rec.named[k] == v, f"{k} = {rec.named[k]}, expected {v}")
    _check(rec.final.box == Box((-1, -1, -29), (15, 15, 25)), f"final box {rec.final.box}")
    return rec


def build_2d_example(curve44: LatticeCurve | None = None, curve74: LatticeCurve | None = None) -> ConstructionRecord:
    from .fixtures import load_curve

    curve44 = curve44 or load_curve("curve44_2d")
    curve74 = curve74 or load_curve("curve74_2d")
    rec = _run_pipeline(curve44, curve74, LAYOUT_2D)
    from .topology import is_animal_2d

    _check(bool(is_animal_2d(rec.animal)), "2D construction is not a disk")
    return rec


# --------------------------------------------------------------------------
# Knotted-tunnel balls
# --------------------------------------------------------------------------

class TunnelError(ValueError):
    pass


def build_furch(tunnel: LatticeCurve, box: Box, plug: str = "end") -> CubeSet:
    """Solid ``box`` minus the tunnel cubes, keeping the plug end cube."""
    cubes = tunnel.cubes
    if len(cubes) < 2:
        raise TunnelError("tunnel needs at least two cubes")
    if any(q not in box for q in cubes):
        raise TunnelError("tunnel leaves the box")
    if not (box.on_boundary(cubes[0]) and box.on_boundary(cubes[-1])):
        raise TunnelError("tunnel ends must touch the box boundary")
    pos = {q: i for i, q in enumerate(cubes)}
    for i, q in enumerate(cubes):
        for r in _face_nbrs(q):
            j = pos.get(r)
            if j is not None and abs(i - j) != 1:
                raise TunnelError(f"tunnel cubes {q} and {r} touch out of order")
    if plug not in ("start", "end"):
        raise ValueError("plug must be 'start' or 'end'")
    keep = cubes[-1] if plug == "end" else cubes[0]
    removed = set(cubes) - {keep}
    out = CubeSet(q for q in box if q not in removed)
    _check(bool(is_animal(out)), "tunnel complement is not a ball")
    return out


def straight_tunnel(n: int = 5) -> tuple[LatticeCurve, Box]:
    m = (n + 1) // 2
    return LatticeCurve(tuple((m, m, z) for z in range(1, n + 1))), Box.from_dims(n, n, n)


def _unit_trefoil() -> list[tuple[int, int, int]]:
    """Closure of a three-crossing two-strand braid, cut open on the outer
    closing loop; unit-lattice vertices in path order."""
    s1 = [(0, 0, 0), (0, 0, 1), (1, 0, 1), (2, 0, 1), (2, 0, 2), (2, 0, 3)]
    s2 = [(2, 0, 0), (2, 1, 0), (1, 1, 0), (1, 1, 1), (1, 1, 2), (0, 1, 2), (0, 0, 2), (0, 0, 3)]
    h, top = 3, 9
    pieces = {}
    for k in range(3):
        for strand in (s1, s2):
            moved = [(x, y, z + h * k) for x, y, z in strand]
            pieces[moved[0]] = moved
    inner = [(2, 0, top), (2, 0, top + 1), (3, 0, top + 1)] + [(4, 0, z) for z in range(top + 1, -2, -1)]
    inner += [(3, 0, -1), (2, 0, -1), (2, 0, 0)]
    outer_top = [(0, 0, top), (0, 0, top + 1), (0, 0, top + 2)] + [(x, 0, top + 2) for x in range(1, 7)]
    outer_top += [(6, 0, z) for z in range(top + 1, 4, -1)]
    outer_bot = [(6, 0, z) for z in range(4, -3, -1)] + [(x, 0, -2) for x in range(5, -1, -1)] + [(0, 0, -1), (0, 0, 0)]
    pieces[inner[0]] = inner
    # walk: from the cut (6,0,4) down the outer loop, then follow braid pieces
    path = list(outer_bot)
    while path[-1] != (0, 0, top):
        nxt = pieces[path[-1]]
        path.extend(nxt[1:])
    path.extend(outer_top[1:])
    return path


def trefoil_tunnel() -> tuple[LatticeCurve, Box]:
    unit = _unit_trefoil()
    xmax = 7  # both ends run out in +x to the box face
    unit = [(xmax, 0, unit[0][2])] + unit + [(xmax, 0, unit[-1][2])]
    off = (2, 2, 6)
    pts = []
    for i, p in enumerate(unit):
        q = tuple(2 * x + o for x, o in zip(p, off))
        pts.append(q)
        if i + 1 < len(unit):
            nxt = tuple(2 * x + o for x, o in zip(unit[i + 1], off))
            pts.append(tuple((a + b) // 2 for a, b in zip(q, nxt)))
    lo = tuple(min(c) - 1 for c in zip(*pts))
    hi = tuple(max(c) + 1 for c in zip(*pts))
    hi = (max(p[0] for p in pts),) + hi[1:]
    return LatticeCurve(tuple(pts)), Box(lo, hi)


def tunnel_json(tunnel: LatticeCurve, box: Box) -> str:
    return tunnel.to_json(box)


def load_tunnel(text: str) -> tuple[LatticeCurve, Box]:
    doc = json.loads(text)
    box = Box(doc["box"]["lo"], doc["box"]["hi"])
    return LatticeCurve.from_json(text), box
