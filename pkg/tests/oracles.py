"""Independent reference computations used by the tests.

Nothing here imports the pipeline or topology code; the helpers work from
first principles (polyline geometry, explicit cell enumeration, union-find)
so that agreement with the package is meaningful.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

HALF = Fraction(1, 2)


# --------------------------------------------------------------------------
# geometry on the half-integer grid
# --------------------------------------------------------------------------

def centre(q):
    return tuple(Fraction(x) - HALF for x in q)


def on_segment(p, a, b) -> bool:
    """p on the closed axis-parallel (or degenerate) segment ab."""
    for x, u, v in zip(p, a, b):
        if u == v:
            if x != u:
                return False
        elif not (min(u, v) <= x <= max(u, v)):
            return False
    return sum(1 for u, v in zip(a, b) if u != v) <= 1


def on_polyline(p, pts) -> bool:
    return any(on_segment(p, a, b) for a, b in zip(pts, pts[1:]))


def half_points_of_polyline(pts) -> set:
    """All points with half-integer coordinates on an axis-parallel polyline."""
    out = set()
    for a, b in zip(pts, pts[1:]):
        ax = [i for i in range(len(a)) if a[i] != b[i]]
        if not ax:
            out.add(a)
            continue
        i = ax[0]
        lo, hi = sorted((a[i], b[i]))
        x = lo
        while x <= hi:
            p = list(a)
            p[i] = x
            out.add(tuple(p))
            x += HALF
    return out


# --------------------------------------------------------------------------
# reference construction of the 3D animal
# --------------------------------------------------------------------------

def reference_animal(c444, c774):
    """Colour of every cube of the final box: 'k', 'r' or 'w'.

    Curves are given as lists of cube tuples.  Returns (colours dict,
    b3 colours dict).
    """
    # first red curve and B2 over 0..8
    s, e = c444[0], c444[-1]
    p1 = [(Fraction(s[0]) - HALF, Fraction(s[1]) - HALF, Fraction(0))]
    p1 += [centre(q) for q in c444]
    p1 += [(Fraction(e[0]) - HALF, Fraction(e[1]) - HALF, Fraction(4))]
    red1 = {tuple(int(2 * x) for x in p) for p in half_points_of_polyline(p1)}
    b2 = {}
    for q in product(range(0, 9), repeat=3):
        b2[q] = "r" if q in red1 else "k"
    for q in product(range(0, 9), range(0, 9), range(9, 14)):
        inside_w = 1 <= q[0] <= 7 and 1 <= q[1] <= 7 and 9 <= q[2] <= 12
        b2[q] = "w" if inside_w else "k"

    # order the red cubes of B2 by walking from the bottom end
    reds = [q for q, c in b2.items() if c == "r"]
    start = min(reds, key=lambda q: q[2])
    order, seen = [start], {start}
    while True:
        x = order[-1]
        nxt = [y for y in reds if y not in seen and sum(abs(u - v) for u, v in zip(x, y)) == 1]
        if not nxt:
            break
        assert len(nxt) == 1
        order.append(nxt[0])
        seen.add(nxt[0])

    p2 = [centre(q) for q in order]
    p2 += [centre((q[0], q[1], q[2] + 8)) for q in c774]
    last = c774[-1]
    p2 += [(Fraction(last[0]) - HALF, Fraction(last[1]) - HALF, Fraction(12))]

    # black dual complex as an explicit set of half-grid points
    blacks = {q for q, c in b2.items() if c == "k"}
    dual = set()
    for q in blacks:
        dual.add(centre(q))
        for ax in range(3):
            r = list(q)
            r[ax] += 1
            if tuple(r) in blacks:
                a, b = centre(q), centre(tuple(r))
                dual.add(tuple((u + v) / 2 for u, v in zip(a, b)))
        for ax in range(3):
            o = [i for i in range(3) if i != ax]
            four = []
            for d0, d1 in product((0, 1), repeat=2):
                r = list(q)
                r[o[0]] += d0
                r[o[1]] += d1
                four.append(tuple(r))
            if all(f in blacks for f in four):
                cs = [centre(f) for f in four]
                for t0, t1 in product((0, HALF, 1), repeat=2):
                    p = list(cs[0])
                    p[o[0]] += t0
                    p[o[1]] += t1
                    dual.add(tuple(p))

    red2 = {tuple(int(2 * x) for x in p) for p in half_points_of_polyline(p2)}
    b3 = {}
    for q in product(range(-1, 16), range(-1, 16), range(-1, 26)):
        p = tuple(Fraction(x, 2) for x in q)
        if q in red2:
            b3[q] = "r"
        elif p in dual:
            b3[q] = "k"
        else:
            b3[q] = "w"

    final = {}
    for q in product(range(-1, 16), range(-1, 16), range(-29, 26)):
        z = q[2]
        if z >= -1:
            final[q] = b3[q]
        elif z == -2:
            final[q] = "r" if q == (9, 5, -2) else "w"
        else:
            final[q] = b3[(q[0], q[1], -4 - z)]
    return final, b3


# --------------------------------------------------------------------------
# boundary cell counting
# --------------------------------------------------------------------------

def boundary_chi(cubes) -> int:
    """V - E + F of the boundary surface by direct enumeration of cells."""
    cubes = set(map(tuple, cubes))
    faces = set()
    for q in cubes:
        for ax in range(3):
            for side in (0, 1):
                r = list(q)
                r[ax] += 1 if side else -1
                if tuple(r) not in cubes:
                    faces.add((q, ax, side))
    edges, verts = set(), set()
    for q, ax, side in faces:
        # face lies in plane x_ax = q[ax] - 1 + side
        o = [i for i in range(3) if i != ax]
        corners = []
        for d0, d1 in product((0, 1), repeat=2):
            v = [0, 0, 0]
            v[ax] = q[ax] - 1 + side
            v[o[0]] = q[o[0]] - 1 + d0
            v[o[1]] = q[o[1]] - 1 + d1
            corners.append(tuple(v))
        verts.update(corners)
        a, b, c, d = corners  # (0,0) (0,1) (1,0) (1,1)
        for u, v in ((a, b), (a, c), (b, d), (c, d)):
            edges.add(frozenset((u, v)))
    return len(verts) - len(edges) + len(faces)


def face_components(cubes) -> int:
    cubes = set(map(tuple, cubes))
    parent = {q: q for q in cubes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for q in cubes:
        for ax in range(len(q)):
            r = list(q)
            r[ax] += 1
            r = tuple(r)
            if r in cubes:
                parent[find(q)] = find(r)
    return len({find(q) for q in cubes})


# --------------------------------------------------------------------------
# knot type of a closed lattice polygon
# --------------------------------------------------------------------------

def alexander_polynomial(points):
    """Alexander polynomial (normalized, as a sympy Poly in t) of the closed
    polygon through ``points``, from a generic projection."""
    import sympy

    a, b = 0.3137, 0.1731   # generic projection direction (-a, -b, 1)
    pts = [tuple(float(x) for x in p) for p in points]
    n = len(pts)
    segs = [(pts[i], pts[(i + 1) % n]) for i in range(n)]

    def proj(p):
        return (p[0] + a * p[2], p[1] + b * p[2])

    crossings = []  # (over_seg, over_t, under_seg, under_t, sign)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            p, r = proj(segs[i][0]), proj(segs[i][1])
            q, s = proj(segs[j][0]), proj(segs[j][1])
            d1 = (r[0] - p[0], r[1] - p[1])
            d2 = (s[0] - q[0], s[1] - q[1])
            den = d1[0] * d2[1] - d1[1] * d2[0]
            if abs(den) < 1e-12:
                continue
            w = (q[0] - p[0], q[1] - p[1])
            t1 = (w[0] * d2[1] - w[1] * d2[0]) / den
            t2 = (w[0] * d1[1] - w[1] * d1[0]) / den
            if not (1e-9 < t1 < 1 - 1e-9 and 1e-9 < t2 < 1 - 1e-9):
                continue
            z1 = segs[i][0][2] + t1 * (segs[i][1][2] - segs[i][0][2])
            z2 = segs[j][0][2] + t2 * (segs[j][1][2] - segs[j][0][2])
            if z1 > z2:
                over, ot, under, ut, do, du = i, t1, j, t2, d1, d2
            else:
                over, ot, under, ut, do, du = j, t2, i, t1, d2, d1
            sign = 1 if do[0] * du[1] - do[1] * du[0] > 0 else -1
            crossings.append((over, ot, under, ut, sign))
    m = len(crossings)
    if m == 0:
        return sympy.Poly(1, sympy.Symbol("t"))
    events = sorted((c[2], c[3]) for c in crossings)

    def arc(seg, tt):
        return sum(1 for e in events if e < (seg, tt)) % m

    t = sympy.Symbol("t")
    mat = sympy.zeros(m, m)
    for row, (over, ot, under, ut, sign) in enumerate(crossings):
        e = events.index((under, ut))
        i, j, k = e % m, (e + 1) % m, arc(over, ot)
        row_vals = ((k, 1 - t), (i, t), (j, -1)) if sign > 0 else ((k, t - 1), (i, 1), (j, -t))
        for col, val in row_vals:
            mat[row, col] += val
    det = sympy.expand(mat[:-1, :-1].det())
    if det == 0:
        return sympy.Poly(0, t)
    poly = sympy.Poly(det, t)
    low = min(mon[0] for mon in poly.monoms())
    poly = sympy.Poly(sympy.expand(det / t**low), t)
    if poly.LC() < 0:
        poly = -poly
    return poly


def close_tunnel(cubes, box_hi_x):
    """Close a tunnel whose two ends sit on the face x = box_hi_x."""
    s, e = cubes[0], cubes[-1]
    out = box_hi_x + 3
    return list(cubes) + [(out, e[1], e[2]), (out, s[1], s[2])]
