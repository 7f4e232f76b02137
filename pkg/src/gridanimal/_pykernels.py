"""Pure-Python/numpy implementations of the hot kernels.

``_ckernels.pyx`` mirrors these function by function; results must agree
exactly (the search in particular visits nodes in the same order).
"""
from __future__ import annotations

import sys
import time

import numpy as np

FOUND, EXHAUSTED, NODE_LIMIT, TIMED_OUT = 1, 0, 2, 3
UNK, IN, OUT = 0, 1, 2


def vertex_masks(grid: np.ndarray) -> np.ndarray:
    """Octant mask of every interior lattice vertex of a 3D occupancy grid.

    ``out[i, j, k]`` describes the vertex shared by cubes ``grid[i:i+2,
    j:j+2, k:k+2]``; bit ``dx + 2*dy + 4*dz``.
    """
    g = (grid != 0).astype(np.uint8)
    m = np.zeros(tuple(s - 1 for s in g.shape), dtype=np.uint8)
    for dz in (0, 1):
        for dy in (0, 1):
            for dx in (0, 1):
                sl = g[dx : g.shape[0] - 1 + dx, dy : g.shape[1] - 1 + dy, dz : g.shape[2] - 1 + dz]
                m |= sl << (dx + 2 * dy + 4 * dz)
    return m


def boundary_counts(grid: np.ndarray) -> tuple[int, int, int]:
    """(vertices, edges, squares) of the boundary surface of a padded grid."""
    g = (grid != 0).astype(np.int8)
    m = vertex_masks(g)
    nv = int(np.count_nonzero((m != 0) & (m != 255)))
    ne = 0
    for ax in range(3):
        o = [a for a in range(3) if a != ax]
        s = None
        for d0 in (0, 1):
            for d1 in (0, 1):
                idx = [slice(None)] * 3
                idx[o[0]] = slice(d0, g.shape[o[0]] - 1 + d0)
                idx[o[1]] = slice(d1, g.shape[o[1]] - 1 + d1)
                part = g[tuple(idx)]
                s = part.copy() if s is None else s + part
        ne += int(np.count_nonzero((s > 0) & (s < 4)))
    nf = sum(int(np.count_nonzero(np.diff(g, axis=ax))) for ax in range(3))
    return nv, ne, nf


def _mixed_vertex(g, i, j, k) -> int:
    s = int(g[i:i + 2, j:j + 2, k:k + 2].sum())
    return 1 if 0 < s < 8 else 0


def toggle_scan(grid: np.ndarray, table: np.ndarray, cands: np.ndarray):
    """Local effect of toggling each candidate cube of a padded grid.

    Returns ``(links_ok, dchi)``: whether all 8 corner vertex links stay
    non-singular after the flip, and the change of the boundary Euler
    characteristic.  Candidates must lie at least one cell from the border.
    """
    g = (grid != 0).astype(np.int32)
    n = len(cands)
    ok = np.ones(n, dtype=np.uint8)
    dchi = np.zeros(n, dtype=np.int64)
    for t in range(n):
        i, j, k = (int(x) for x in cands[t])
        # corner links after the flip
        for vi in (i - 1, i):
            for vj in (j - 1, j):
                for vk in (k - 1, k):
                    mask = 0
                    for dz in (0, 1):
                        for dy in (0, 1):
                            for dx in (0, 1):
                                if g[vi + dx, vj + dy, vk + dz]:
                                    mask |= 1 << (dx + 2 * dy + 4 * dz)
                    mask ^= 1 << ((i - vi) + 2 * (j - vj) + 4 * (k - vk))
                    if table[mask] == 3:
                        ok[t] = 0
        before = _local_chi(g, i, j, k)
        g[i, j, k] ^= 1
        after = _local_chi(g, i, j, k)
        g[i, j, k] ^= 1
        dchi[t] = after - before
    return ok, dchi


def _local_chi(g, i, j, k) -> int:
    """V - E + F over the boundary cells that lie on cube (i,j,k)."""
    v = 0
    for vi in (i - 1, i):
        for vj in (j - 1, j):
            for vk in (k - 1, k):
                v += _mixed_vertex(g, vi, vj, vk)
    e = 0
    # edges parallel to x: surrounded by cubes (i, j-1..j+?, ...)
    for ej in (j - 1, j):
        for ek in (k - 1, k):
            s = g[i, ej, ek] + g[i, ej + 1, ek] + g[i, ej, ek + 1] + g[i, ej + 1, ek + 1]
            e += 1 if 0 < s < 4 else 0
    for ei in (i - 1, i):
        for ek in (k - 1, k):
            s = g[ei, j, ek] + g[ei + 1, j, ek] + g[ei, j, ek + 1] + g[ei + 1, j, ek + 1]
            e += 1 if 0 < s < 4 else 0
    for ei in (i - 1, i):
        for ej in (j - 1, j):
            s = g[ei, ej, k] + g[ei + 1, ej, k] + g[ei, ej + 1, k] + g[ei + 1, ej + 1, k]
            e += 1 if 0 < s < 4 else 0
    c = int(g[i, j, k])
    nbrs = (g[i - 1, j, k], g[i + 1, j, k], g[i, j - 1, k], g[i, j + 1, k], g[i, j, k - 1], g[i, j, k + 1])
    # count in Python ints: numpy bools would add as logical or
    f = sum(1 for x in nbrs if int(x) != c)
    return v - e + f


# --------------------------------------------------------------------------
# Hamiltonian path search by edge-state propagation
# --------------------------------------------------------------------------

def edge_search(
    nverts: int,
    edges: np.ndarray,
    inc_ptr: np.ndarray,
    inc_idx: np.ndarray,
    squares: np.ndarray,
    esq_ptr: np.ndarray,
    esq_idx: np.ndarray,
    target: np.ndarray,
    forced: np.ndarray,
    epri: np.ndarray,
    vpri: np.ndarray,
    start: int,
    end: int,
    node_limit: int,
    time_limit: float,
    square_rule: bool,
):
    """Search for a Hamiltonian start-end path; returns (status, nodes, state).

    Every edge is UNK, IN or OUT.  Propagation enforces vertex degrees
    (``target``), at most two IN edges per unit square when
    ``square_rule`` is set (that is exactly U-turn freedom), and forbids
    closing cycles or joining start and end prematurely.  Branching picks
    the deficient vertex with fewest unknown edges and tries its
    lowest-priority unknown edge IN, then OUT.
    """
    N = nverts
    E = len(edges)
    eu = [int(x) for x in edges[:, 0]]
    ev = [int(x) for x in edges[:, 1]]
    inc = [[int(x) for x in inc_idx[inc_ptr[v]:inc_ptr[v + 1]]] for v in range(N)]
    esq = [[int(x) for x in esq_idx[esq_ptr[k]:esq_ptr[k + 1]]] for k in range(E)]
    sq = [[int(x) for x in row] for row in squares]
    target = [int(x) for x in target]
    epri = [int(x) for x in epri]
    vpri = [int(x) for x in vpri]
    # incident edges in priority order, so "first UNK" is the min-priority one
    inc_sorted = [sorted(inc[v], key=lambda k: epri[k]) for v in range(N)]

    st = [UNK] * E
    nin = [0] * N
    nunk = [len(inc[v]) for v in range(N)]
    sqin = [0] * len(sq)
    squnk = [4] * len(sq)
    oe = list(range(N))
    total = 0
    trail: list = []
    nodes = 0
    t0 = time.perf_counter()
    timed_out = False

    def setedge(k, val, queue):
        nonlocal total
        if st[k] != UNK:
            return st[k] == val
        st[k] = val
        u, v = eu[k], ev[k]
        trail.append((0, k, 0))
        nunk[u] -= 1
        nunk[v] -= 1
        for s in esq[k]:
            squnk[s] -= 1
        if val == IN:
            nin[u] += 1
            nin[v] += 1
            total += 1
            for s in esq[k]:
                sqin[s] += 1
            if nin[u] > target[u] or nin[v] > target[v]:
                return False
            a, b = oe[u], oe[v]
            if a == v:
                return False
            trail.append((1, a, oe[a]))
            trail.append((1, b, oe[b]))
            oe[a] = b
            oe[b] = a
            if ((a == start and b == end) or (a == end and b == start)) and total != N - 1:
                return False
            for kk in inc[a]:
                if (eu[kk] == b or ev[kk] == b) and st[kk] == UNK:
                    queue.append((0, kk))
        queue.append((1, u))
        queue.append((1, v))
        if square_rule:
            for s in esq[k]:
                queue.append((2, s))
        return True

    def undo(mark):
        nonlocal total
        while len(trail) > mark:
            kind, x, y = trail.pop()
            if kind == 1:
                oe[x] = y
                continue
            k = x
            u, v = eu[k], ev[k]
            val = st[k]
            st[k] = UNK
            nunk[u] += 1
            nunk[v] += 1
            for s in esq[k]:
                squnk[s] += 1
            if val == IN:
                nin[u] -= 1
                nin[v] -= 1
                total -= 1
                for s in esq[k]:
                    sqin[s] -= 1

    def propagate(queue):
        while queue:
            kind, x = queue.pop()
            if kind == 0:
                if not setedge(x, OUT, queue):
                    return False
            elif kind == 1:
                v = x
                if nin[v] == target[v]:
                    for k in inc[v]:
                        if st[k] == UNK and not setedge(k, OUT, queue):
                            return False
                elif nin[v] + nunk[v] < target[v]:
                    return False
                elif nin[v] + nunk[v] == target[v]:
                    for k in inc[v]:
                        if st[k] == UNK and not setedge(k, IN, queue):
                            return False
            else:
                s = x
                if sqin[s] > 2:
                    return False
                if sqin[s] == 2 and squnk[s] > 0:
                    for k in sq[s]:
                        if st[k] == UNK and not setedge(k, OUT, queue):
                            return False
        return True

    def connected():
        seen = [False] * N
        seen[0] = True
        stack = [0]
        c = 1
        while stack:
            x = stack.pop()
            for k in inc[x]:
                if st[k] != OUT:
                    y = ev[k] if eu[k] == x else eu[k]
                    if not seen[y]:
                        seen[y] = True
                        c += 1
                        stack.append(y)
        return c == N

    def rec():
        nonlocal nodes, timed_out
        nodes += 1
        if nodes > node_limit:
            return False
        if (nodes & 1023) == 0 and time.perf_counter() - t0 > time_limit:
            timed_out = True
            return False
        if total == N - 1:
            return True
        if not connected():
            return False
        best = -1
        bkey = None
        for v in range(N):
            if nin[v] < target[v]:
                key = (nunk[v], vpri[v])
                if best < 0 or key < bkey:
                    best, bkey = v, key
        if best < 0:
            return False
        k = -1
        for kk in inc_sorted[best]:
            if st[kk] == UNK:
                k = kk
                break
        if k < 0:
            return False
        for val in (IN, OUT):
            mark = len(trail)
            q: list = []
            if setedge(k, val, q) and propagate(q) and rec():
                return True
            undo(mark)
            if nodes > node_limit or timed_out:
                return False
        return False

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * E + 1000))
    try:
        q: list = []
        ok = all(setedge(int(k), IN, q) for k in forced) and propagate(q)
        if ok:
            q = [(1, v) for v in range(N)]
            ok = propagate(q)
        found = ok and (N == 1 or rec())
    finally:
        sys.setrecursionlimit(old)
    state = np.array(st, dtype=np.uint8)
    if found:
        return FOUND, nodes, state
    if timed_out:
        return TIMED_OUT, nodes, state
    if nodes > node_limit:
        return NODE_LIMIT, nodes, state
    return EXHAUSTED, nodes, state
