"""Topological decision procedures for grid complexes.

The 3-ball test is: nonempty, face-connected, every lattice vertex has a disk
or sphere link, and the boundary surface is one connected 2-sphere.  For a
compact connected 3-manifold in R^3 this characterises the ball (Alexander).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable

import numpy as np
from scipy import ndimage

from . import _kernels
from .voxel import CubeSet

__all__ = [
    "LinkType",
    "Diagnostic",
    "AnimalCheck",
    "ManifoldCheck",
    "PatchComplex",
    "QuadSurface",
    "classify_vertex_link",
    "brute_force_link_oracle",
    "link_table",
    "is_manifold",
    "is_animal",
    "is_animal_grid",
    "is_animal_2d",
    "is_disk_2complex",
    "euler_characteristic",
    "boundary_surface",
]


class LinkType(enum.IntEnum):
    EMPTY = 0
    DISK = 1
    SPHERE = 2
    SINGULAR = 3


class Diagnostic(str, enum.Enum):
    EMPTY = "Empty"
    DISCONNECTED = "Disconnected"
    NOT_MANIFOLD = "NotManifold"
    BOUNDARY_NOT_SPHERE = "BoundaryNotSphere"
    BALL = "Ball"


def euler_characteristic(*counts: int) -> int:
    """Alternating sum ``c0 - c1 + c2 - ...`` of cell counts."""
    return sum(c if i % 2 == 0 else -c for i, c in enumerate(counts))


# --------------------------------------------------------------------------
# Vertex links.  Octant bit = dx + 2*dy + 4*dz, d = 1 for the cube on the
# positive side of the vertex.  The link of the vertex is the subcomplex of
# the octahedron {+-x, +-y, +-z} spanned by the occupied octants' triangles.
# --------------------------------------------------------------------------

def _octant_triangle(bit: int) -> tuple[int, int, int]:
    dx, dy, dz = bit & 1, (bit >> 1) & 1, (bit >> 2) & 1
    # octahedron vertex ids: 0:+x 1:-x 2:+y 3:-y 4:+z 5:-z
    return (0 if dx else 1, 2 if dy else 3, 4 if dz else 5)


def _fan_order(v: int) -> list[int]:
    """Octants around octahedron vertex ``v`` in cyclic order."""
    axis, negative = divmod(v, 2)
    others = [a for a in range(3) if a != axis]
    cycle = [(0, 0), (1, 0), (1, 1), (0, 1)]
    out = []
    for p, q in cycle:
        bits = [0, 0, 0]
        bits[axis] = 0 if negative else 1
        bits[others[0]] = p
        bits[others[1]] = q
        out.append(bits[0] + 2 * bits[1] + 4 * bits[2])
    return out


def classify_vertex_link(mask: int) -> LinkType:
    """Classify the link of a lattice vertex from its 8-bit octant mask."""
    return LinkType(int(link_table()[mask]))


def _classify_octahedral(mask: int) -> LinkType:
    octs = [b for b in range(8) if mask >> b & 1]
    if not octs:
        return LinkType.EMPTY
    if len(octs) == 8:
        return LinkType.SPHERE
    tris = [_octant_triangle(b) for b in octs]
    verts = {v for t in tris for v in t}
    edges = {frozenset(e) for t in tris for e in combinations(t, 2)}
    # every octahedron edge lies in exactly two octants, so <= 2 holds here;
    # kept as an explicit check for symmetry with the oracle.
    for e in edges:
        if sum(1 for t in tris if e <= set(t)) > 2:
            return LinkType.SINGULAR
    # connectivity through shared vertices
    comp = {octs[0]}
    grow = True
    while grow:
        grow = False
        for b in octs:
            if b not in comp and any(set(_octant_triangle(b)) & set(_octant_triangle(c)) for c in comp):
                comp.add(b)
                grow = True
    if len(comp) != len(octs):
        return LinkType.SINGULAR
    for v in verts:
        ring = [b in octs for b in _fan_order(v)]
        if all(ring):
            continue
        # occupied entries must form one contiguous arc of the 4-cycle
        starts = sum(1 for i in range(4) if ring[i] and not ring[i - 1])
        if starts != 1:
            return LinkType.SINGULAR
    if euler_characteristic(len(verts), len(edges), len(tris)) != 1:
        return LinkType.SINGULAR
    return LinkType.DISK


@lru_cache(maxsize=None)
def link_table() -> np.ndarray:
    """256-entry lookup table ``mask -> LinkType`` (read-only)."""
    table = np.array([_classify_octahedral(m) for m in range(256)], dtype=np.uint8)
    table.setflags(write=False)
    return table


def brute_force_link_oracle(mask: int) -> LinkType:
    """Independent link classifier on the barycentric subdivision.

    Decides from the number of components, the Euler characteristic and the
    shape of the boundary graph only.
    """
    octs = [b for b in range(8) if mask >> b & 1]
    if not octs:
        return LinkType.EMPTY
    # simplices of the link, each a frozenset of octahedron vertices
    tris = []
    for b in octs:
        dx, dy, dz = b & 1, (b >> 1) & 1, (b >> 2) & 1
        tris.append(frozenset({("x", dx), ("y", dy), ("z", dz)}))
    sub = []  # subdivided triangles: chains vertex < edge < triangle
    for t in tris:
        for v in t:
            for w in t - {v}:
                sub.append((frozenset({v}), frozenset({v, w}), t))
    sub_edges: dict[frozenset, int] = {}
    verts = set()
    for tri in sub:
        verts.update(tri)
        for a, b in combinations(tri, 2):
            key = frozenset({a, b})
            sub_edges[key] = sub_edges.get(key, 0) + 1
    chi = len(verts) - len(sub_edges) + len(sub)

    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for tri in sub:
        r = find(tri[0])
        for v in tri[1:]:
            parent[find(v)] = r
    if len({find(v) for v in verts}) != 1:
        return LinkType.SINGULAR
    if any(n > 2 for n in sub_edges.values()):
        return LinkType.SINGULAR
    boundary = [tuple(e) for e, n in sub_edges.items() if n == 1]
    if not boundary:
        return LinkType.SPHERE if chi == 2 else LinkType.SINGULAR
    degree: dict = {}
    for a, b in boundary:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    if any(d != 2 for d in degree.values()):
        return LinkType.SINGULAR
    bparent = {v: v for v in degree}

    def bfind(x):
        while bparent[x] != x:
            x = bparent[x]
        return x

    for a, b in boundary:
        ra, rb = bfind(a), bfind(b)
        if ra != rb:
            bparent[ra] = rb
    cycles = len({bfind(v) for v in degree})
    return LinkType.DISK if cycles == 1 and chi == 1 else LinkType.SINGULAR


# --------------------------------------------------------------------------
# Patches on the boundary of a single cube
# --------------------------------------------------------------------------

CORNERS = tuple(product((0, 1), repeat=3))
FACES = tuple((ax, side) for ax in range(3) for side in (0, 1))


def face_corners(face) -> frozenset:
    ax, side = face
    return frozenset(c for c in CORNERS if c[ax] == side)


def face_edges(face) -> set[frozenset]:
    cs = face_corners(face)
    return {frozenset((a, b)) for a, b in combinations(cs, 2) if sum(x != y for x, y in zip(a, b)) == 1}


CUBE_EDGES = tuple(
    sorted(
        (frozenset((a, b)) for a, b in combinations(CORNERS, 2) if sum(x != y for x, y in zip(a, b)) == 1),
        key=lambda e: sorted(e),
    )
)


@dataclass(frozen=True)
class PatchComplex:
    """Subcomplex of the boundary of one cube, in local corner coordinates.

    ``squares`` holds ``(axis, side)`` pairs; ``edges`` holds frozensets of
    two corners; ``vertices`` holds corners in ``{0,1}^3``.
    """

    squares: frozenset = frozenset()
    edges: frozenset = frozenset()
    vertices: frozenset = frozenset()

    @classmethod
    def closed(cls, squares) -> "PatchComplex":
        squares = frozenset(squares)
        edges = frozenset(e for f in squares for e in face_edges(f))
        verts = frozenset(c for f in squares for c in face_corners(f))
        return cls(squares, edges, verts)

    def euler_characteristic(self) -> int:
        return euler_characteristic(len(self.vertices), len(self.edges), len(self.squares))


def is_disk_2complex(p: PatchComplex) -> bool:
    if not p.squares:
        return False
    sq_edges = set().union(*(face_edges(f) for f in p.squares))
    sq_verts = set().union(*(face_corners(f) for f in p.squares))
    if not set(p.edges) <= sq_edges or not set(p.vertices) <= sq_verts:
        return False  # a bare edge or vertex: not pure
    # connectivity through shared corners
    squares = list(p.squares)
    seen = {squares[0]}
    stack = [squares[0]]
    while stack:
        f = stack.pop()
        for g in squares:
            if g not in seen and face_corners(f) & face_corners(g):
                seen.add(g)
                stack.append(g)
    if len(seen) != len(squares):
        return False
    for e in sq_edges:
        if sum(1 for f in squares if e in face_edges(f)) > 2:
            return False
    for v in sq_verts:
        around = [f for f in FACES if v in face_corners(f)]
        inside = [f for f in around if f in p.squares]
        if 0 < len(inside) < len(around):
            # the faces at a cube corner pairwise share an edge, so any
            # subset is one fan; check adjacency explicitly anyway
            if len(inside) == 2 and not (face_edges(inside[0]) & face_edges(inside[1])):
                return False
    return euler_characteristic(len(sq_verts), len(sq_edges), len(squares)) == 1


# --------------------------------------------------------------------------
# Boundary surface
# --------------------------------------------------------------------------

@dataclass
class QuadSurface:
    """Boundary squares of a cube set.

    Each quad is ``(cube, axis, sign)``: the face of member ``cube`` on side
    ``sign`` of ``axis`` whose neighbour across it is absent.
    """

    quads: list = field(default_factory=list)

    def corners(self, quad) -> list[tuple[int, int, int]]:
        """Corner lattice points, counter-clockwise seen from outside."""
        cube, ax, sign = quad
        u, v = (ax + 1) % 3, (ax + 2) % 3
        base = [x - 1 for x in cube]
        if sign > 0:
            base[ax] += 1
        loop = [(0, 0), (1, 0), (1, 1), (0, 1)]
        if sign < 0:
            loop = loop[::-1]
        out = []
        for du, dv in loop:
            p = list(base)
            p[u] += du
            p[v] += dv
            out.append(tuple(p))
        return out

    def cells(self):
        verts, edges = set(), set()
        for quad in self.quads:
            cs = self.corners(quad)
            verts.update(cs)
            for i in range(4):
                edges.add(frozenset((cs[i], cs[(i + 1) % 4])))
        return verts, edges

    def euler_characteristic(self) -> int:
        verts, edges = self.cells()
        return euler_characteristic(len(verts), len(edges), len(self.quads))

    def components(self) -> int:
        """Connected components of the surface (quads glued along edges)."""
        by_edge: dict = {}
        for i, quad in enumerate(self.quads):
            cs = self.corners(quad)
            for k in range(4):
                by_edge.setdefault(frozenset((cs[k], cs[(k + 1) % 4])), []).append(i)
        parent = list(range(len(self.quads)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for ids in by_edge.values():
            for j in ids[1:]:
                parent[find(j)] = find(ids[0])
        return len({find(i) for i in range(len(self.quads))})

    def to_obj(self) -> str:
        verts, _ = self.cells()
        order = sorted(verts)
        index = {v: i + 1 for i, v in enumerate(order)}
        lines = [f"# {len(order)} vertices, {len(self.quads)} quads"]
        lines += [f"v {x} {y} {z}" for x, y, z in order]
        lines += ["f " + " ".join(str(index[c]) for c in self.corners(q)) for q in self.quads]
        return "\n".join(lines) + "\n"


def boundary_surface(s: CubeSet) -> QuadSurface:
    quads = []
    cubes = s.cubes
    for q in s:
        for ax in range(3):
            for sign in (-1, 1):
                r = list(q)
                r[ax] += sign
                if tuple(r) not in cubes:
                    quads.append((q, ax, sign))
    return QuadSurface(quads)


# --------------------------------------------------------------------------
# Manifold and ball tests
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifoldCheck:
    ok: bool
    offending: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class AnimalCheck:
    ok: bool
    diagnostic: Diagnostic
    offending: tuple = ()
    boundary_chi: int | None = None
    boundary_components: int | None = None

    def __bool__(self) -> bool:
        return self.ok


_FACE_STRUCT = ndimage.generate_binary_structure(3, 1)


def _singular_vertices(grid: np.ndarray, origin) -> tuple:
    masks = _kernels.vertex_masks(grid)
    bad = np.argwhere(link_table()[masks] == LinkType.SINGULAR)
    return tuple(tuple(int(x) for x in row) for row in (bad + np.asarray(origin)).tolist())


def is_manifold(s: CubeSet) -> ManifoldCheck:
    grid, origin = s.to_grid(pad=1)
    bad = _singular_vertices(grid, origin)
    return ManifoldCheck(not bad, bad)


def is_animal_grid(grid: np.ndarray, origin=(0, 0, 0)) -> AnimalCheck:
    """Ball test on a dense occupancy grid whose outer layer is empty."""
    if not grid.any():
        return AnimalCheck(False, Diagnostic.EMPTY)
    _, ncomp = ndimage.label(grid, structure=_FACE_STRUCT)
    if ncomp != 1:
        return AnimalCheck(False, Diagnostic.DISCONNECTED)
    bad = _singular_vertices(grid, origin)
    if bad:
        return AnimalCheck(False, Diagnostic.NOT_MANIFOLD, bad)
    v, e, f = _kernels.boundary_counts(grid)
    chi = euler_characteristic(v, e, f)
    # for a connected manifold in R^3 the boundary components correspond
    # one-to-one with the components of the complement
    _, holes = ndimage.label(grid == 0, structure=_FACE_STRUCT)
    if chi != 2 or holes != 1:
        return AnimalCheck(False, Diagnostic.BOUNDARY_NOT_SPHERE, (), chi, holes)
    return AnimalCheck(True, Diagnostic.BALL, (), chi, holes)


def is_animal(s: CubeSet | Iterable) -> AnimalCheck:
    if not isinstance(s, CubeSet):
        s = CubeSet(s)
    if not len(s):
        return AnimalCheck(False, Diagnostic.EMPTY)
    if s.dim == 2:
        return is_animal_2d(s)
    grid, origin = s.to_grid(pad=1)
    return is_animal_grid(grid, origin)


# --------------------------------------------------------------------------
# Two dimensions: squares (a, b) = [a-1, a] x [b-1, b]
# --------------------------------------------------------------------------

def is_animal_2d(s) -> AnimalCheck:
    """Disk test for a finite set of unit squares in the plane."""
    squares = {tuple(q) for q in s}
    if not squares:
        return AnimalCheck(False, Diagnostic.EMPTY)
    start = next(iter(squares))
    seen = {start}
    stack = [start]
    while stack:
        a, b = stack.pop()
        for n in ((a + 1, b), (a - 1, b), (a, b + 1), (a, b - 1)):
            if n in squares and n not in seen:
                seen.add(n)
                stack.append(n)
    if len(seen) != len(squares):
        return AnimalCheck(False, Diagnostic.DISCONNECTED)
    verts, edges = set(), set()
    for a, b in squares:
        for dx, dy in product((0, 1), repeat=2):
            verts.add((a - 1 + dx, b - 1 + dy))
        edges.update({(0, a, b - 1), (0, a, b), (1, a - 1, b), (1, a, b)})
    bad = []
    for x, y in sorted(verts):
        ll, lr = (x, y) in squares, (x + 1, y) in squares
        ul, ur = (x, y + 1) in squares, (x + 1, y + 1) in squares
        if (ll and ur and not lr and not ul) or (lr and ul and not ll and not ur):
            bad.append((x, y))
    if bad:
        return AnimalCheck(False, Diagnostic.NOT_MANIFOLD, tuple(bad))
    chi = euler_characteristic(len(verts), len(edges), len(squares))
    # connected planar surface with boundary: chi = 2 - #boundary cycles
    if chi != 1:
        return AnimalCheck(False, Diagnostic.BOUNDARY_NOT_SPHERE, (), chi, 2 - chi)
    return AnimalCheck(True, Diagnostic.BALL, (), chi, 1)
