from fractions import Fraction
from itertools import permutations, product

import numpy as np
import pytest

from gridanimal.construction import (
    LAYOUT_3D,
    Color,
    PipelineAssertFailed,
    TunnelError,
    black_dual_complex,
    build_animal,
    build_furch,
    expand_first,
    extend_and_second_curve,
    first_red_curve,
    phi,
    phi_point,
    psi,
    red_path_ends,
    straight_tunnel,
    trefoil_tunnel,
)
from gridanimal.curves import LatticeCurve
from gridanimal.fixtures import load_curve, load_pair, load_tunnel
from gridanimal.topology import is_animal
from gridanimal.voxel import Box, CubeSet, mirror_z

from oracles import alexander_polynomial, close_tunnel, reference_animal

F = Fraction


def test_phi_points_and_polyhedra():
    assert phi_point((F(5, 2), F(3, 2), 0)) == (5, 3, 0)
    assert phi_point((F(1, 3), 0, 0)) is None
    assert phi([(F(5, 2), F(3, 2), 0), (F(1, 3), 0, 0)]) == CubeSet([(5, 3, 0)])
    assert phi(CubeSet(Box.from_dims(4, 4, 4))) == CubeSet(Box((0, 0, 0), (8, 8, 8)))
    assert phi(CubeSet([(1, 1, 1)])) == CubeSet(Box((0, 0, 0), (2, 2, 2)))


def test_psi():
    block = psi((3, 2, 1))
    assert block.bounding_box() == Box((7, 3, -1), (11, 7, 3))
    assert len(block) == 125
    assert len(psi((1, 1, 1)) & psi((2, 1, 1))) == 25
    for q in Box.from_dims(4, 4, 4):
        centre = tuple(4 * x - 3 for x in q)
        assert all(c % 4 == 1 for c in centre)
        assert psi(q).bounding_box() == Box(tuple(c - 2 for c in centre), tuple(c + 2 for c in centre))
    assert tuple(4 * x - 3 for x in (3, 2, 1)) == (9, 5, 1)
    with pytest.raises(ValueError):
        psi((5, 1, 1))


@pytest.fixture(scope="module", params=["a", "b"])
def pair(request):
    return load_pair(request.param)


def test_first_red_curve(pair):
    c = first_red_curve(pair[0])
    assert c.head == (F(5, 2), F(3, 2), 0) and c.tail == (F(5, 2), F(3, 2), 4)
    assert c.cubes[0] == (3, 2, 1)
    # straight continuation at both ends
    assert tuple(b - a for a, b in zip(c.cubes[0], c.cubes[1])) == (0, 0, 1)
    assert tuple(b - a for a, b in zip(c.cubes[-2], c.cubes[-1])) == (0, 0, 1)


def test_first_red_curve_rejects_bad_curve():
    bad = load_curve("curve774_a")
    with pytest.raises(PipelineAssertFailed):
        first_red_curve(bad)


def test_expand_first(pair):
    b2 = expand_first(first_red_curve(pair[0]))
    assert b2.box == Box((0, 0, 0), (8, 8, 8))
    assert b2[(5, 3, 0)] == Color.RED and b2[(5, 3, 8)] == Color.RED
    assert b2[(0, 0, 0)] == Color.BLACK
    assert set(red_path_ends(b2.cubes(Color.RED))) == {(5, 3, 0), (5, 3, 8)}
    # 64 centres, 63 midpoints and two half-unit extensions
    assert b2.count(Color.RED) == 129


def _direction_class(curve: LatticeCurve, i: int) -> str:
    cubes = curve.cubes
    up = (0, 0, 1)
    d_in = up if i == 0 else tuple(b - a for a, b in zip(cubes[i - 1], cubes[i]))
    d_out = up if i == len(cubes) - 1 else tuple(b - a for a, b in zip(cubes[i], cubes[i + 1]))
    return "straight" if d_in == d_out else "bend"


def _canonical(block: np.ndarray) -> bytes:
    best = None
    for perm in permutations(range(3)):
        t = block.transpose(perm)
        for flips in product((False, True), repeat=3):
            u = t
            for ax, f in enumerate(flips):
                if f:
                    u = np.flip(u, ax)
            key = u.tobytes()
            if best is None or key < best:
                best = key
    return best


def test_local_patterns_depend_only_on_bend(rec_a):
    b3 = rec_a.b3
    patterns = {"straight": set(), "bend": set()}
    for i, q in enumerate(rec_a.curve_first.cubes):
        cells = sorted(psi(q))
        arr = np.array([int(b3[c]) for c in cells], dtype=np.int8).reshape(5, 5, 5)
        patterns[_direction_class(rec_a.curve_first, i)].add(_canonical(arr))
    assert len(patterns["straight"]) == 1
    assert len(patterns["bend"]) == 1
    assert patterns["straight"] != patterns["bend"]


def test_white_box_patterns(rec_a):
    # each white-box cube expands to a 3x3x3 block whose colours depend only
    # on whether the curve passes straight or bends there
    b3 = rec_a.b3
    c = rec_a.curve_white
    found = {"straight": set(), "bend": set()}
    for i, q in enumerate(c.cubes):
        if i == 0 or i == len(c.cubes) - 1:
            continue
        centre = (2 * q[0] - 1, 2 * q[1] - 1, 2 * (q[2] + 8) - 1)
        cells = sorted(product(*[range(x - 1, x + 2) for x in centre]))
        arr = np.array([int(b3[x]) for x in cells], dtype=np.int8).reshape(3, 3, 3)
        found[_direction_class(c, i)].add(_canonical(arr))
    assert len(found["straight"]) == 1 and len(found["bend"]) == 1


def test_extension_and_second_curve(pair):
    first = first_red_curve(pair[0])
    b2 = expand_first(first)
    b2p, second = extend_and_second_curve(b2, pair[1], first)
    assert b2p.box == Box((0, 0, 0), (8, 8, 13))
    assert all(b2p[(a, b, 13)] == Color.BLACK for a in range(9) for b in range(9))
    w = Box((1, 1, 9), (7, 7, 12))
    assert all(b2p[q] == Color.WHITE for q in w)
    assert b2p.count(Color.WHITE) == len(list(w))
    moved = pair[1].translate((0, 0, 8))
    assert moved.cubes[0] == (5, 3, 9) and moved.cubes[-1] == (2, 6, 12)
    assert tuple(x - F(1, 2) for x in second.cubes[0]) == (F(9, 2), F(5, 2), F(-1, 2))
    assert second.tail == (F(3, 2), F(11, 2), 12)
    assert second.cubes[-len(moved.cubes):] == moved.cubes


def test_black_dual_complex_small_cases():
    two = black_dual_complex(CubeSet([(1, 1, 1), (5, 5, 5)]))
    assert len(two.vertices) == 2 and not two.edges and not two.squares
    patch = black_dual_complex(CubeSet([(1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 1)]))
    assert (len(patch.vertices), len(patch.edges), len(patch.squares)) == (4, 4, 1)
    # seven cubes: a 2x2 patch, a two-cube arm and one loose cube
    seven = CubeSet([(1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 1), (3, 1, 1), (4, 1, 1), (6, 4, 1)])
    dual = black_dual_complex(seven)
    assert (len(dual.vertices), len(dual.edges), len(dual.squares)) == (7, 6, 1)
    with pytest.raises(PipelineAssertFailed):
        black_dual_complex(CubeSet(Box.from_dims(2, 2, 2)))


def test_dual_membership_of_doubled_points():
    dual = black_dual_complex(CubeSet([(1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 1)]))
    assert (1, 1, 1) in dual          # centre of (1,1,1)
    assert (2, 1, 1) in dual          # midpoint of an edge
    assert (2, 2, 1) in dual          # centre of the square
    assert (2, 2, 2) not in dual
    assert (5, 1, 1) not in dual


def test_second_expansion(rec_a):
    b3 = rec_a.b3
    assert b3.box == Box((-1, -1, -1), (15, 15, 25))
    assert b3[(3, 11, 24)] == Color.RED
    psi_w = Box((0, 0, 17), (14, 14, 24))
    for q in psi_w:
        if all(x % 2 for x in q):
            assert b3[q] == Color.RED, q
    for q in Box((-1, -1, 17), (15, 15, 25)):
        if q not in psi_w:
            assert b3[q] == Color.BLACK, q


def test_doubling(rec_a):
    fin = rec_a.final
    assert fin[(9, 5, -2)] == Color.RED and fin[(0, 0, -2)] == Color.WHITE
    reds = {q for q in [(9, 5, -1), (9, 5, -3), (8, 5, -2), (10, 5, -2), (9, 4, -2), (9, 6, -2)] if fin[q] == Color.RED}
    assert reds == {(9, 5, -1), (9, 5, -3)}
    a = rec_a.animal
    assert a.bounding_box() == Box((-1, -1, -29), (15, 15, 25))
    colored = len(rec_a.b3.cubes(Color.RED, Color.BLACK))
    assert len(a) == 2 * colored + 1 == 8231
    assert mirror_z(a, rec_a.mirror_plane) == a
    assert rec_a.mirror_plane == -2.5
    assert set(red_path_ends(fin.cubes(Color.RED))) == {(3, 11, 24), (3, 11, -28)}


def test_named_cubes(rec_a, rec_b):
    for rec in (rec_a, rec_b):
        assert rec.named == {
            "phi_p1_ext": (5, 3, 0),
            "phi_q1_ext": (5, 3, 8),
            "phi_q2_ext": (3, 11, 24),
            "mirror_red": (9, 5, -2),
        }


@pytest.mark.parametrize("key", ["a", "b"])
def test_matches_reference_construction(key, rec_a, rec_b):
    rec = rec_a if key == "a" else rec_b
    c1, c2 = load_pair(key)
    final, b3 = reference_animal(list(c1.cubes), list(c2.cubes))
    glyph = {Color.WHITE: "w", Color.BLACK: "k", Color.RED: "r"}
    for q, c in final.items():
        assert glyph[rec.final[q]] == c, q
    assert sum(c != "w" for c in final.values()) == 2 * sum(c != "w" for c in b3.values()) + 1


def test_pipeline_deterministic(rec_a):
    again = build_animal(*load_pair("a"))
    assert again.summary() == rec_a.summary()
    assert again.animal.to_json() == rec_a.animal.to_json()
    assert again.final.to_ascii() == rec_a.final.to_ascii()


def test_animal_is_ball(rec_a, rec_b):
    assert is_animal(rec_a.animal) and is_animal(rec_b.animal)


def test_pair_swap_rejected():
    c444, c774 = load_pair("a")
    with pytest.raises(PipelineAssertFailed):
        build_animal(c774, c444)


def test_2d_example(rec_2d):
    s = rec_2d.summary()
    assert [s["stages"][k] for k in ("B1", "B2", "B2'", "B3", "B3'")] == [[4, 4], [9, 9], [9, 14], [17, 27], [17, 55]]
    from gridanimal.topology import is_animal_2d

    assert is_animal_2d(rec_2d.animal)
    assert rec_2d.animal.bounding_box().shape == (17, 55)


def test_stage_ascii(rec_a):
    text = rec_a.stages["B2"].to_ascii()
    assert text.count("# z =") == 9
    assert set(text) <= set("# z=-0123456789krw.\n")


def test_furch_straight():
    tunnel, box = straight_tunnel()
    s = build_furch(tunnel, box)
    assert is_animal(s)
    assert len(s) == 125 - 4
    assert build_furch(tunnel, box, plug="start") != s


def test_furch_trefoil():
    tunnel, box = load_tunnel("tunnel_trefoil")
    ref_tunnel, ref_box = trefoil_tunnel()
    assert tunnel.cubes == ref_tunnel.cubes and box == ref_box
    closed = close_tunnel(tunnel.cubes, box.hi[0])
    assert str(alexander_polynomial(closed).as_expr()) == "t**2 - t + 1"
    s = build_furch(tunnel, box)
    assert is_animal(s)
    assert len(s) == len(list(box)) - len(tunnel.cubes) + 1


def test_furch_preconditions():
    box = Box.from_dims(5, 5, 5)
    with pytest.raises(TunnelError):
        build_furch(LatticeCurve(((3, 3, 2), (3, 3, 3))), box)
    touching = LatticeCurve(((1, 1, 1), (2, 1, 1), (2, 2, 1), (1, 2, 1), (1, 3, 1)))
    with pytest.raises(TunnelError):
        build_furch(touching, box)
    with pytest.raises(TunnelError):
        build_furch(LatticeCurve(((3, 3, 5), (3, 3, 6))), box)
