"""Box-filling lattice curves and a constrained Hamiltonian path searcher."""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .voxel import Box, layered_ascii

__all__ = [
    "LatticeCurve",
    "CurveConstraints",
    "CurveCheck",
    "SearchStats",
    "NotFound",
    "SearchTimeout",
    "InfeasibleConstraints",
    "first_uturn",
    "has_uturn",
    "is_valid_filling_curve",
    "parity_feasible",
    "search_filling_curve",
    "search_with_stats",
    "hamiltonian_paths",
]


class NotFound(Exception):
    """The whole search space was explored without a solution."""


class SearchTimeout(Exception):
    pass


class InfeasibleConstraints(ValueError):
    pass


def _step(p, q) -> tuple[int, ...]:
    return tuple(b - a for a, b in zip(p, q))


@dataclass(frozen=True)
class LatticeCurve:
    """Ordered cube sequence; optional real end points extend it outward."""

    cubes: tuple
    head: tuple | None = None  # extension point before cubes[0]
    tail: tuple | None = None  # extension point after cubes[-1]

    def __post_init__(self):
        object.__setattr__(self, "cubes", tuple(tuple(int(x) for x in q) for q in self.cubes))
        if len(set(self.cubes)) != len(self.cubes):
            raise ValueError("curve repeats a cube")
        for p, q in zip(self.cubes, self.cubes[1:]):
            if sum(abs(d) for d in _step(p, q)) != 1:
                raise ValueError(f"non-unit step {p} -> {q}")

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    @property
    def dim(self) -> int:
        return len(self.cubes[0]) if self.cubes else 0

    @property
    def start(self):
        return self.cubes[0]

    @property
    def end(self):
        return self.cubes[-1]

    def centers(self) -> list[tuple[float, ...]]:
        return [tuple(x - 0.5 for x in q) for q in self.cubes]

    def reversed(self) -> "LatticeCurve":
        return LatticeCurve(self.cubes[::-1], self.tail, self.head)

    def translate(self, offset) -> "LatticeCurve":
        return LatticeCurve(tuple(tuple(a + b for a, b in zip(q, offset)) for q in self.cubes))

    def to_json(self, box: Box | None = None) -> str:
        doc: dict = {}
        if box is not None:
            doc["box"] = {"lo": list(box.lo), "hi": list(box.hi)}
        rows = ",\n    ".join(json.dumps(list(q)) for q in self.cubes)
        head = json.dumps(doc)[1:-1]
        prefix = "{" + (head + ", " if head else "")
        return prefix + '"cubes": [\n    ' + rows + "\n  ]}\n"

    @classmethod
    def from_json(cls, text: str) -> "LatticeCurve":
        try:
            doc = json.loads(text)
            cubes = doc["cubes"]
            if not cubes or not all(isinstance(q, list) and all(isinstance(x, int) for x in q) for q in cubes):
                raise ValueError("cubes must be a nonempty list of integer lists")
            return cls(tuple(tuple(q) for q in cubes))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise ValueError(f"malformed curve file: {exc}") from exc

    def to_ascii(self, box: Box | None = None) -> str:
        """Layered ASCII; each cell shows the direction to the next cube.

        ``>``/``<`` along x, ``^``/``v`` along y, ``u``/``d`` along z,
        ``S`` and ``E`` at the ends, ``.`` for cubes off the curve.
        """
        box = box or Box.from_span(
            [min(c) for c in zip(*self.cubes)], [max(c) for c in zip(*self.cubes)]
        )
        glyph: dict = {}
        names = {(1, 0, 0): ">", (-1, 0, 0): "<", (0, 1, 0): "^", (0, -1, 0): "v", (0, 0, 1): "u", (0, 0, -1): "d"}
        for i, q in enumerate(self.cubes):
            if i == 0:
                glyph[q] = "S"
            elif i == len(self.cubes) - 1:
                glyph[q] = "E"
            else:
                d = _step(q, self.cubes[i + 1]) + (0,) * (3 - self.dim)
                glyph[q] = names[d[:3]]
        return layered_ascii(lambda q: glyph.get(tuple(q), "."), box)


@dataclass(frozen=True)
class CurveConstraints:
    dims: Box
    start: tuple
    end: tuple
    second: tuple | None = None
    penultimate: tuple | None = None
    seed: int = 0
    time_limit: float = 300.0
    allow_uturns: bool = False

    def validate(self) -> None:
        for name in ("start", "end", "second", "penultimate"):
            q = getattr(self, name)
            if q is not None and tuple(q) not in self.dims:
                raise InfeasibleConstraints(f"{name} {q} outside {self.dims}")
        if tuple(self.start) == tuple(self.end) and len(self.dims) > 1:
            raise InfeasibleConstraints("start equals end")
        for a, b, what in ((self.start, self.second, "second"), (self.penultimate, self.end, "penultimate")):
            if a is not None and b is not None and sum(abs(d) for d in _step(a, b)) != 1:
                raise InfeasibleConstraints(f"{what} is not face-adjacent to its endpoint")


@dataclass(frozen=True)
class CurveCheck:
    ok: bool
    diagnostic: str = "ok"

    def __bool__(self) -> bool:
        return self.ok


def first_uturn(cubes: Sequence) -> int | None:
    """Index i of the first window cubes[i..i+3] that is a U-turn."""
    for i in range(len(cubes) - 3):
        d1 = _step(cubes[i], cubes[i + 1])
        d3 = _step(cubes[i + 2], cubes[i + 3])
        if all(a == -b for a, b in zip(d1, d3)):
            return i
    return None


def has_uturn(c: LatticeCurve | Sequence) -> bool:
    cubes = c.cubes if isinstance(c, LatticeCurve) else list(c)
    return first_uturn(cubes) is not None


def is_valid_filling_curve(c: LatticeCurve, box: Box, allow_uturns: bool = False) -> CurveCheck:
    cubes = list(c.cubes)
    if len(set(cubes)) != len(cubes):
        return CurveCheck(False, "repeated cube")
    outside = [q for q in cubes if q not in box]
    if outside:
        return CurveCheck(False, f"cube {outside[0]} outside box")
    if len(cubes) != len(box):
        return CurveCheck(False, f"visits {len(cubes)} of {len(box)} cubes")
    for p, q in zip(cubes, cubes[1:]):
        if sum(abs(d) for d in _step(p, q)) != 1:
            return CurveCheck(False, f"non-face step {p} -> {q}")
    if not allow_uturns:
        i = first_uturn(cubes)
        if i is not None:
            return CurveCheck(False, f"U-turn at index {i}: {cubes[i:i + 4]}")
    return CurveCheck(True)


def parity_feasible(k: CurveConstraints) -> bool:
    n = len(k.dims)
    n_even = sum(1 for q in k.dims if sum(q) % 2 == 0)
    n_odd = n - n_even
    cs, ce = sum(k.start) % 2, sum(k.end) % 2
    if n % 2 == 0:
        return n_even == n_odd and cs != ce
    major = 0 if n_even > n_odd else 1
    return abs(n_even - n_odd) == 1 and cs == ce == major


# --------------------------------------------------------------------------
# Search
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Graph:
    cells: tuple
    index: dict
    edges: np.ndarray
    inc_ptr: np.ndarray
    inc_idx: np.ndarray
    squares: np.ndarray
    esq_ptr: np.ndarray
    esq_idx: np.ndarray

    def edge_id(self, u: int, v: int) -> int:
        for p in range(self.inc_ptr[u], self.inc_ptr[u + 1]):
            k = int(self.inc_idx[p])
            if v in (int(self.edges[k, 0]), int(self.edges[k, 1])):
                return k
        raise KeyError((u, v))


def _csr(lists: list[list[int]]):
    ptr = np.zeros(len(lists) + 1, dtype=np.int32)
    ptr[1:] = np.cumsum([len(x) for x in lists])
    idx = np.array([y for x in lists for y in x], dtype=np.int32)
    return ptr, idx


@lru_cache(maxsize=32)
def _grid_graph(box: Box) -> _Graph:
    cells = tuple(box)
    index = {q: i for i, q in enumerate(cells)}
    d = box.dim
    edges, eid = [], {}
    for i, q in enumerate(cells):
        for ax in range(d):
            r = list(q)
            r[ax] += 1
            j = index.get(tuple(r))
            if j is not None:
                eid[(i, j)] = eid[(j, i)] = len(edges)
                edges.append((i, j))
    squares = []
    for q in cells:
        for a1 in range(d):
            for a2 in range(a1 + 1, d):
                corners = [list(q) for _ in range(4)]
                corners[1][a1] += 1
                corners[2][a1] += 1
                corners[2][a2] += 1
                corners[3][a2] += 1
                ids = [index.get(tuple(c)) for c in corners]
                if None not in ids:
                    squares.append([eid[(ids[m], ids[(m + 1) % 4])] for m in range(4)])
    inc = [[] for _ in cells]
    for k, (u, v) in enumerate(edges):
        inc[u].append(k)
        inc[v].append(k)
    esq = [[] for _ in edges]
    for s, sq in enumerate(squares):
        for k in sq:
            esq[k].append(s)
    inc_ptr, inc_idx = _csr(inc)
    esq_ptr, esq_idx = _csr(esq)
    return _Graph(
        cells,
        index,
        np.array(edges, dtype=np.int32).reshape(-1, 2),
        inc_ptr,
        inc_idx,
        np.array(squares, dtype=np.int32).reshape(-1, 4),
        esq_ptr,
        esq_idx,
    )


@dataclass
class SearchStats:
    restarts: int = 0
    nodes: int = 0
    winning_restart: int | None = None
    elapsed: float = 0.0
    backend: str = _kernels.BACKEND
    log: list = field(default_factory=list)


BASE_NODE_LIMIT = 300
LIMIT_GROWTH = 1.25


def _restart_limit(r: int, base: int) -> int:
    return int(base * LIMIT_GROWTH**r)


def _priorities(seed: int, restart: int, n_edges: int, n_cells: int):
    rng = np.random.default_rng([seed, restart])
    return rng.permutation(n_edges).astype(np.int32), rng.permutation(n_cells).astype(np.int32)


def _run_restart(k: CurveConstraints, restart: int, limit: int, time_left: float, backend: str | None = None):
    kern = _kernels.load(backend) if backend else _kernels
    g = _grid_graph(k.dims)
    n = len(g.cells)
    s, t = g.index[tuple(k.start)], g.index[tuple(k.end)]
    target = np.full(n, 2, dtype=np.int32)
    target[s] = target[t] = 1
    forced = []
    if k.second is not None:
        forced.append(g.edge_id(s, g.index[tuple(k.second)]))
    if k.penultimate is not None:
        forced.append(g.edge_id(g.index[tuple(k.penultimate)], t))
    epri, vpri = _priorities(k.seed, restart, len(g.edges), n)
    status, nodes, state = kern.edge_search(
        n, g.edges, g.inc_ptr, g.inc_idx, g.squares, g.esq_ptr, g.esq_idx,
        target, np.array(forced, dtype=np.int32), epri, vpri, s, t,
        limit, time_left, not k.allow_uturns,
    )
    path = None
    if status == _kernels.FOUND:
        path = _walk(g, state, s, t)
    return status, nodes, path


def _walk(g: _Graph, state: np.ndarray, s: int, t: int) -> tuple:
    nxt: dict = {}
    for k in np.flatnonzero(state == 1):
        u, v = int(g.edges[k, 0]), int(g.edges[k, 1])
        nxt.setdefault(u, []).append(v)
        nxt.setdefault(v, []).append(u)
    path, prev = [s], -1
    while path[-1] != t:
        x = path[-1]
        y = next(w for w in nxt[x] if w != prev)
        prev = x
        path.append(y)
    return tuple(g.cells[i] for i in path)


def _restart_job(args):
    return _run_restart(*args)


def search_with_stats(
    k: CurveConstraints,
    workers: int = 1,
    base_limit: int = BASE_NODE_LIMIT,
    backend: str | None = None,
) -> tuple[LatticeCurve, SearchStats]:
    """Seeded restarts with growing node limits.

    A restart that finishes under its node limit has explored the entire
    space, so its failure proves NotFound.  With several workers, restarts
    run in batches and the lowest-index success wins, which gives the same
    curve as the sequential run.
    """
    k.validate()
    if len(k.dims) > 1 and not parity_feasible(k):
        raise InfeasibleConstraints("endpoint colours violate the bipartite parity condition")
    stats = SearchStats(backend=backend or _kernels.BACKEND)
    t0 = time.perf_counter()
    if len(k.dims) == 1:
        return LatticeCurve((tuple(k.start),)), stats
    r = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while True:
            left = k.time_limit - (time.perf_counter() - t0)
            if left <= 0:
                raise SearchTimeout(f"no curve after {stats.restarts} restarts")
            batch = [(k, r + i, _restart_limit(r + i, base_limit), left, backend) for i in range(workers)]
            results = list(pool.map(_restart_job, batch)) if pool else [_restart_job(batch[0])]
            for i, (status, nodes, path) in enumerate(results):
                stats.restarts += 1
                stats.nodes += nodes
                stats.log.append((r + i, status, nodes))
                if status == _kernels.FOUND:
                    curve = LatticeCurve(path)
                    check = is_valid_filling_curve(curve, k.dims, k.allow_uturns)
                    if not check:
                        raise AssertionError(f"searcher produced an invalid curve: {check.diagnostic}")
                    stats.winning_restart = r + i
                    stats.elapsed = time.perf_counter() - t0
                    return curve, stats
                if status == _kernels.EXHAUSTED:
                    stats.elapsed = time.perf_counter() - t0
                    raise NotFound(f"search space exhausted in restart {r + i} ({nodes} nodes)")
                if status == _kernels.TIMED_OUT:
                    raise SearchTimeout(f"no curve after {stats.restarts} restarts")
            r += workers
    finally:
        if pool:
            pool.shutdown()


def search_filling_curve(k: CurveConstraints, workers: int = 1) -> LatticeCurve:
    return search_with_stats(k, workers)[0]


# --------------------------------------------------------------------------
# Brute-force oracle
# --------------------------------------------------------------------------

def hamiltonian_paths(box: Box, start=None) -> Iterator[tuple]:
    """Every Hamiltonian path of the box's face-adjacency graph (as cube
    tuples), by plain backtracking.  Meant for tiny boxes only."""
    cells = list(box)
    nbrs = {q: [r for r in cells if sum(abs(a - b) for a, b in zip(q, r)) == 1] for q in cells}
    starts = [tuple(start)] if start is not None else cells

    def extend(path, seen):
        if len(path) == len(cells):
            yield tuple(path)
            return
        for r in nbrs[path[-1]]:
            if r not in seen:
                seen.add(r)
                path.append(r)
                yield from extend(path, seen)
                path.pop()
                seen.discard(r)

    for s in starts:
        yield from extend([s], {s})
