"""Cube toggles: local disk test, legal moves, exhaustive blocking check,
constructive ball decomposition, and small reconfiguration searches."""
from __future__ import annotations

import json
import math
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from . import _kernels
from .construction import Color, ConstructionRecord, psi, red_path_ends
from .topology import (
    CORNERS,
    FACES,
    PatchComplex,
    face_corners,
    face_edges,
    CUBE_EDGES,
    is_animal,
    is_animal_2d,
    is_animal_grid,
    is_disk_2complex,
)
from .voxel import Box, CubeSet

__all__ = [
    "toggle",
    "LocalPatches",
    "local_patches",
    "necessary_move_ok",
    "ToggleChecker",
    "is_legal_move",
    "legal_moves",
    "TheoremReport",
    "verify_theorem_blocked",
    "DecompositionReport",
    "verify_construction_decomposition",
    "MoveSequence",
    "Exhausted",
    "BudgetExceeded",
    "transform_search",
    "greedy_reduce",
]


def toggle(a: CubeSet, q) -> CubeSet:
    return a.toggle(q)


# --------------------------------------------------------------------------
# Local patches on the boundary of one cube
# --------------------------------------------------------------------------

NEIGHBOR_OFFSETS = tuple(o for o in product((-1, 0, 1), repeat=3) if any(o))


def _contains(offset, cell_corners) -> bool:
    """Does the neighbour at ``offset`` contain every listed local corner?"""
    for ax, o in enumerate(offset):
        if o == 0:
            continue
        side = 1 if o > 0 else 0
        if any(c[ax] != side for c in cell_corners):
            return False
    return True


def _holders():
    """For each boundary cell of a cube, the neighbour offsets containing it."""
    sq = {f: [i for i, o in enumerate(NEIGHBOR_OFFSETS) if _contains(o, face_corners(f))
              and sum(map(abs, o)) == 1] for f in FACES}
    ed = {e: [i for i, o in enumerate(NEIGHBOR_OFFSETS) if _contains(o, e)
              and o[_edge_axis(e)] == 0] for e in CUBE_EDGES}
    vx = {c: [i for i, o in enumerate(NEIGHBOR_OFFSETS) if _contains(o, (c,))] for c in CORNERS}
    return sq, ed, vx


def _edge_axis(e) -> int:
    a, b = tuple(e)
    return next(i for i in range(3) if a[i] != b[i])


_SQ_HOLD, _ED_HOLD, _VX_HOLD = _holders()


@dataclass(frozen=True)
class LocalPatches:
    q: tuple
    q_plus: PatchComplex
    q_minus: PatchComplex


def _patches_from_code(code: int) -> tuple[PatchComplex, PatchComplex]:
    def build(present):
        sq = frozenset(f for f, hs in _SQ_HOLD.items() if any(present(i) for i in hs))
        ed = frozenset(e for e, hs in _ED_HOLD.items() if any(present(i) for i in hs))
        vx = frozenset(c for c, hs in _VX_HOLD.items() if any(present(i) for i in hs))
        return PatchComplex(sq, ed, vx)

    plus = build(lambda i: code >> i & 1)
    minus = build(lambda i: not code >> i & 1)
    return plus, minus


def neighborhood_code(a: CubeSet, q) -> int:
    code = 0
    for i, o in enumerate(NEIGHBOR_OFFSETS):
        if tuple(x + d for x, d in zip(q, o)) in a:
            code |= 1 << i
    return code


def local_patches(a: CubeSet, q) -> LocalPatches:
    plus, minus = _patches_from_code(neighborhood_code(a, q))
    return LocalPatches(tuple(q), plus, minus)


@lru_cache(maxsize=1 << 18)
def _necessary_from_code(code: int) -> bool:
    plus, minus = _patches_from_code(code)
    return is_disk_2complex(plus) and is_disk_2complex(minus)


def necessary_move_ok(a: CubeSet, q) -> bool:
    """Both boundary patches of ``q`` are disks (required for a legal toggle)."""
    return _necessary_from_code(neighborhood_code(a, q))


def grid_codes(grid: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """26-neighbourhood codes of grid cells ``idx`` (shape (n, 3))."""
    codes = np.zeros(len(idx), dtype=np.int64)
    for bit, o in enumerate(NEIGHBOR_OFFSETS):
        nb = idx + np.asarray(o)
        codes |= grid[nb[:, 0], nb[:, 1], nb[:, 2]].astype(np.int64) << bit
    return codes


# --------------------------------------------------------------------------
# Toggle checking
# --------------------------------------------------------------------------

class ToggleChecker:
    """Exact animality of ``toggle(a, q)`` for many ``q`` against one ``a``.

    The corner-vertex links and the change of the boundary Euler
    characteristic are computed locally; any candidate surviving both is
    settled by the full oracle on the flipped grid.
    """

    def __init__(self, a: CubeSet, region: Box):
        box = region
        if len(a):
            bb = a.bounding_box()
            box = Box(tuple(map(min, bb.lo, region.lo)), tuple(map(max, bb.hi, region.hi)))
        self.a = a
        self.region = region
        self.grid, self.origin = a.to_grid(box, pad=2)
        base = is_animal_grid(self.grid, self.origin) if len(a) else None
        self.base_ok = bool(base)
        v, e, f = _kernels.boundary_counts(self.grid)
        self.base_chi = v - e + f

    def index(self, cubes) -> np.ndarray:
        return np.asarray(cubes, dtype=np.int64).reshape(-1, 3) - np.asarray(self.origin)

    def local(self, cubes):
        from .topology import link_table

        return _kernels.toggle_scan(self.grid, link_table(), self.index(cubes))

    def full(self, q) -> bool:
        """Oracle on the flipped grid (no local shortcut)."""
        i = tuple(self.index([q])[0])
        g = self.grid.copy()
        g[i] ^= 1
        return bool(is_animal_grid(g, self.origin))

    def check(self, cubes) -> list[bool]:
        cubes = [tuple(q) for q in cubes]
        if not cubes:
            return []
        links_ok, dchi = self.local(cubes)
        out = []
        for q, ok, d in zip(cubes, links_ok, dchi):
            if not ok or self.base_chi + int(d) != 2:
                out.append(False)
            else:
                out.append(self.full(q))
        return out

    def necessary(self, cubes) -> list[bool]:
        codes = grid_codes(self.grid, self.index(cubes))
        return [_necessary_from_code(int(c)) for c in codes]


def is_legal_move(a: CubeSet, q) -> bool:
    if a.dim == 2:
        return bool(is_animal_2d(a.toggle(q)))
    if not necessary_move_ok(a, q):
        return False
    return bool(is_animal(a.toggle(q)))


def _legal_2d(a: CubeSet, region: Box) -> list:
    return [q for q in region if is_animal_2d(a.toggle(q))]


def legal_moves(a: CubeSet, region: Box) -> list:
    """Cubes of ``region`` whose toggle keeps an animal (sorted)."""
    if a.dim == 2 or region.dim == 2:
        return _legal_2d(a, region)
    cubes = list(region)
    ok = ToggleChecker(a, region).check(cubes)
    return [q for q, k in zip(cubes, ok) if k]


# --------------------------------------------------------------------------
# Exhaustive blocking check
# --------------------------------------------------------------------------

@dataclass
class TheoremReport:
    box: Box
    verdicts: list            # (cube, in_a, necessary_ok, oracle_animal)
    sample: list              # (cube, incremental verdict, full-recompute verdict)
    elapsed: float = 0.0

    @property
    def theorem_holds(self) -> bool:
        return not any(v[3] for v in self.verdicts)

    @property
    def necessary_all_false(self) -> bool:
        return not any(v[2] for v in self.verdicts)

    @property
    def sample_agrees(self) -> bool:
        return all(a == b for _, a, b in self.sample)

    @property
    def ok(self) -> bool:
        return self.theorem_holds and self.necessary_all_false and self.sample_agrees

    def counts(self) -> dict:
        return {
            "cubes": len(self.verdicts),
            "in_animal": sum(1 for v in self.verdicts if v[1]),
            "necessary_ok": sum(1 for v in self.verdicts if v[2]),
            "oracle_animal": sum(1 for v in self.verdicts if v[3]),
            "sample_size": len(self.sample),
            "sample_mismatches": sum(1 for _, a, b in self.sample if a != b),
        }

    def to_json(self) -> str:
        head = {
            "box": {"lo": list(self.box.lo), "hi": list(self.box.hi)},
            "theorem_holds": self.theorem_holds,
            "necessary_all_false": self.necessary_all_false,
            "sample_agrees": self.sample_agrees,
            "counts": self.counts(),
        }
        rows = ",\n".join(
            "  " + json.dumps([list(q), int(i), int(n), int(o)]) for q, i, n, o in self.verdicts
        )
        srows = ",\n".join("  " + json.dumps([list(q), int(a), int(b)]) for q, a, b in self.sample)
        body = json.dumps(head, sort_keys=True)[:-1]
        return body + ', "verdicts": [\n' + rows + '\n], "sample": [\n' + srows + "\n]}\n"


CHUNK = 2048


def _theorem_chunk(args):
    a, box, cubes = args
    chk = ToggleChecker(a, box)
    oracle = chk.check(cubes)
    nec = chk.necessary(cubes)
    return [(q, q in a, n, o) for q, n, o in zip(cubes, nec, oracle)]


def _full_job(args):
    a, q = args
    return bool(is_animal(a.toggle(q)))


def verify_theorem_blocked(
    a: CubeSet,
    box: Box | None = None,
    workers: int = 1,
    sample_fraction: float = 0.01,
    seed: int = 0,
) -> TheoremReport:
    """Evaluate every cube of ``box``: necessary condition and oracle.

    Work is split into fixed-size chunks in cube order, so the report does
    not depend on the number of workers.  A seeded sample is re-decided by
    a from-scratch oracle on a freshly built set.
    """
    t0 = time.perf_counter()
    box = box or a.bounding_box()
    cubes = list(box)
    jobs = [(a, box, cubes[i:i + CHUNK]) for i in range(0, len(cubes), CHUNK)]
    rng = np.random.default_rng(seed)
    k = max(1, math.ceil(sample_fraction * len(cubes))) if sample_fraction > 0 else 0
    picks = sorted(rng.choice(len(cubes), size=min(k, len(cubes)), replace=False).tolist()) if k else []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_theorem_chunk, jobs))
            full = list(pool.map(_full_job, [(a, cubes[i]) for i in picks], chunksize=8))
    else:
        parts = [_theorem_chunk(j) for j in jobs]
        full = [_full_job((a, cubes[i])) for i in picks]
    verdicts = [v for part in parts for v in part]
    sample = [(cubes[i], verdicts[i][3], f) for i, f in zip(picks, full)]
    return TheoremReport(box, verdicts, sample, time.perf_counter() - t0)


# --------------------------------------------------------------------------
# Constructive decomposition of A
# --------------------------------------------------------------------------

@dataclass
class DecompositionReport:
    checks: dict = field(default_factory=dict)
    steps: list = field(default_factory=list)   # (label, removed, all_non_black, is_ball)
    leftover_box: Box | None = None
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name: str, value: bool) -> None:
        self.checks[name] = bool(value)
        if not value:
            self.failures.append(name)

    def to_json(self) -> str:
        doc = {
            "ok": self.ok,
            "checks": self.checks,
            "failures": self.failures,
            "drilling_steps": [
                {"step": s, "removed": n, "non_black": nb, "ball": b} for s, n, nb, b in self.steps
            ],
            "leftover_box": None if self.leftover_box is None else
            {"lo": list(self.leftover_box.lo), "hi": list(self.leftover_box.hi)},
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _cells(s: CubeSet) -> set:
    return {("v",) + v for v in s.vertices()} | {("e",) + e for e in s.edges()} | {("s",) + f for f in s.squares()}


def _drill_block(q, entry, exit_=None) -> set:
    """Inner 3^3 of psi(q) plus the 3x3 layers on the given sides."""
    centre = tuple(4 * x - 3 for x in q)
    out = set()
    for o in product((-1, 0, 1), repeat=3):
        out.add(tuple(c + d for c, d in zip(centre, o)))
    for direction in [d for d in (entry, exit_) if d is not None]:
        ax = next(i for i, d in enumerate(direction) if d)
        sign = direction[ax]
        for o in product((-1, 0, 1), repeat=3):
            if o[ax] != 0:
                continue
            p = list(c + d for c, d in zip(centre, o))
            p[ax] += 2 * sign
            out.add(tuple(p))
    return out


def verify_construction_decomposition(rec: ConstructionRecord) -> DecompositionReport:
    rep = DecompositionReport()
    final = rec.final
    b3 = rec.b3
    red = final.cubes(Color.RED)
    lo_z = b3.box.lo[-1]
    black = final.cubes(Color.BLACK)
    k_plus = CubeSet(q for q in black if q[-1] >= lo_z)
    k_minus = CubeSet(q for q in black if q[-1] < lo_z)

    try:
        red_path_ends(red)
        rep.record("red_dual_graph_is_path", True)
    except AssertionError:
        rep.record("red_dual_graph_is_path", False)
    rep.record("red_is_ball", bool(is_animal(red)))
    rep.record("k_plus_is_ball", bool(is_animal(k_plus)))
    rep.record("k_minus_is_ball", bool(is_animal(k_minus)))
    rep.record("parts_cover_animal", (red | k_plus | k_minus) == rec.animal
               and len(red) + len(k_plus) + len(k_minus) == len(rec.animal))

    top = rec.named["phi_q2_ext"]
    above = top[:-1] + (top[-1] + 1,)
    square = _cells(CubeSet([top])) & _cells(CubeSet([above]))
    rep.record("red_meets_k_plus_in_one_square", _cells(red) & _cells(k_plus) == square)
    mtop = top[:-1] + (int(round(2 * rec.mirror_plane + 1 - top[-1])),)
    mabove = mtop[:-1] + (mtop[-1] - 1,)
    msquare = _cells(CubeSet([mtop])) & _cells(CubeSet([mabove]))
    rep.record("red_meets_k_minus_in_one_square", _cells(red) & _cells(k_minus) == msquare)

    # drilling: start from the solid box and carve along the first red curve
    running = set(b3.box)
    grid_box = b3.box
    not_black = lambda cubes: all(b3[q] != Color.BLACK for q in cubes)

    def is_ball(cubes) -> bool:
        g, o = CubeSet(cubes).to_grid(grid_box, pad=1)
        return bool(is_animal_grid(g, o))

    # the tunnel opens through the bottom face and leaves upwards
    path = rec.curve_first.cubes
    down, up = (0, 0, -1), (0, 0, 1)
    for i, q in enumerate(path):
        entry = down if i == 0 else tuple(a - b for a, b in zip(path[i - 1], q))
        exit_ = up if i == len(path) - 1 else None
        block = _drill_block(q, entry, exit_)
        nb = not_black(block)
        running -= block
        rep.steps.append((f"drill {q}", len(block), nb, is_ball(running)))
    rep.record("drilling_removes_only_non_black", all(s[2] for s in rep.steps))
    rep.record("drilling_keeps_ball", all(s[3] for s in rep.steps))
    rest = {q for q in running if b3[q] != Color.BLACK}
    if rest:
        rep.leftover_box = CubeSet(rest).bounding_box()
    running -= rest
    ball = is_ball(running)
    rep.steps.append(("remove white box image", len(rest), True, ball))
    rep.record("final_removal_keeps_ball", ball)
    rep.record("drilled_set_equals_k_plus", CubeSet(running) == k_plus)
    return rep


# --------------------------------------------------------------------------
# Reconfiguration
# --------------------------------------------------------------------------

@dataclass
class MoveSequence:
    start: CubeSet
    moves: list          # ("add" | "remove", cube)
    region: Box | None = None

    @property
    def end(self) -> CubeSet:
        s = self.start
        for _, q in self.moves:
            s = s.toggle(q)
        return s

    def replay(self) -> bool:
        """Every intermediate set is an animal inside the region."""
        s = self.start
        oracle = is_animal_2d if s.dim == 2 else is_animal
        for kind, q in self.moves:
            if (kind == "remove") != (q in s):
                return False
            if self.region is not None and q not in self.region:
                return False
            s = s.toggle(q)
            if not oracle(s):
                return False
        return True

    def to_json(self) -> str:
        doc = {"start_size": len(self.start), "moves": [[k, list(q)] for k, q in self.moves]}
        return json.dumps(doc) + "\n"


@dataclass(frozen=True)
class Exhausted:
    explored: int
    max_frontier: int


@dataclass(frozen=True)
class BudgetExceeded:
    explored: int


def transform_search(start: CubeSet, goal: CubeSet, region: Box, budget: int = 10**6):
    """Breadth-first search over animals inside ``region``."""
    key = lambda s: tuple(s.sorted())
    start_key, goal_key = key(start), key(goal)
    parent = {start_key: None}
    frontier = deque([start])
    max_frontier = 1
    explored = 0
    while frontier:
        max_frontier = max(max_frontier, len(frontier))
        s = frontier.popleft()
        sk = key(s)
        explored += 1
        if sk == goal_key:
            moves = []
            while parent[sk] is not None:
                prev, q = parent[sk]
                moves.append(("remove" if q in set(prev) else "add", q))
                sk = prev
            return MoveSequence(start, moves[::-1], region)
        if explored >= budget:
            return BudgetExceeded(explored)
        for q in legal_moves(s, region):
            t = s.toggle(q)
            tk = key(t)
            if tk not in parent:
                parent[tk] = (sk, q)
                frontier.append(t)
    return Exhausted(explored, max_frontier)


def greedy_reduce(a: CubeSet, region: Box | None = None) -> tuple[CubeSet, MoveSequence]:
    """Remove the lexicographically first legally removable cube until stuck."""
    region = region or a.bounding_box()
    s = a
    moves = []
    while True:
        members = [q for q in s if q in region]
        if len(members) <= 1:
            break
        if s.dim == 2:
            pick = next((q for q in members if is_animal_2d(s.toggle(q))), None)
        else:
            chk = ToggleChecker(s, region)
            links_ok, dchi = chk.local(members)
            pick = None
            for q, ok, d in zip(members, links_ok, dchi):
                if ok and chk.base_chi + int(d) == 2 and chk.full(q):
                    pick = q
                    break
        if pick is None:
            break
        moves.append(("remove", pick))
        s = s.toggle(pick)
    return s, MoveSequence(a, moves, region)
