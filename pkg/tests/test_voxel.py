import pytest
from hypothesis import given, strategies as st

from gridanimal.voxel import (
    BadMirrorPlane,
    Box,
    CubeSet,
    EmptySet,
    bounding_box,
    cube_span,
    layered_ascii,
    mirror_z,
    neighbors,
    parse_layered_ascii,
)

cube = st.tuples(*[st.integers(-20, 20)] * 3)
cube_sets = st.frozensets(cube, min_size=1, max_size=30).map(CubeSet)


def test_cube_span():
    assert cube_span((1, 1, 1)) == ((0, 1),) * 3
    assert cube_span((0, 0, 0)) == ((-1, 0),) * 3
    assert cube_span((3, 2, 4)) == ((2, 3), (1, 2), (3, 4))


@pytest.mark.parametrize("mode,n", [("face", 6), ("edge", 18), ("vertex", 26)])
def test_neighbor_counts(mode, n):
    assert len(neighbors((0, 0, 0), mode)) == n
    assert len(neighbors((5, 5, 5), mode)) == n


def test_face_neighbors_are_unit_steps():
    assert (1, 0, 0) in neighbors((0, 0, 0)) and (-1, 0, 0) in neighbors((0, 0, 0))
    assert all(sum(map(abs, q)) == 1 for q in neighbors((0, 0, 0)))


def test_unknown_mode():
    with pytest.raises(ValueError):
        neighbors((0, 0, 0), "diagonal")


@given(cube, cube, st.sampled_from(["face", "edge", "vertex"]))
def test_neighbors_symmetric(p, q, mode):
    assert (q in neighbors(p, mode)) == (p in neighbors(q, mode))


def test_bounding_box():
    assert bounding_box([(1, 1, 1)]) == Box((1, 1, 1), (1, 1, 1))
    b = bounding_box([(0, 0, 0), (8, 8, 8)])
    assert b == Box((0, 0, 0), (8, 8, 8))
    assert b.span == ((-1, 8),) * 3
    with pytest.raises(EmptySet):
        bounding_box([])
    with pytest.raises(EmptySet):
        CubeSet().bounding_box()


def test_bounding_box_of_animal(animal_a):
    b = animal_a.bounding_box()
    assert b == Box((-1, -1, -29), (15, 15, 25))
    assert b.span == ((-2, 15), (-2, 15), (-30, 25))


@given(cube_sets, cube_sets)
def test_bounding_box_monotone(s, t):
    assert (s | t).bounding_box().contains_box(s.bounding_box())


def test_mirror_z_examples():
    assert mirror_z(CubeSet([(9, 5, -1)]), -2.5) == CubeSet([(9, 5, -3)])
    assert mirror_z(CubeSet([(9, 5, -2)]), -2.5) == CubeSet([(9, 5, -2)])
    assert mirror_z(CubeSet([(3, 11, 24)]), -2.5) == CubeSet([(3, 11, -28)])
    with pytest.raises(BadMirrorPlane):
        mirror_z(CubeSet([(0, 0, 0)]), -2.0)


@given(cube_sets, st.integers(-10, 10))
def test_mirror_involution(s, k):
    plane = k + 0.5
    assert mirror_z(mirror_z(s, plane), plane) == s


def test_box_basics():
    b = Box.from_dims(4, 4, 4)
    assert b.lo == (1, 1, 1) and b.hi == (4, 4, 4)
    assert len(list(b)) == 64 and b.shape == (4, 4, 4)
    assert Box.from_span((-2, -2, -30), (15, 15, 25)) == Box((-1, -1, -29), (15, 15, 25))
    assert Box.parse("-1,-1,-29..15,15,25") == Box((-1, -1, -29), (15, 15, 25))
    assert list(b)[:2] == [(1, 1, 1), (1, 1, 2)]
    with pytest.raises(ValueError):
        Box.parse("1,2,3")
    with pytest.raises(ValueError):
        Box((2, 1, 1), (1, 1, 1))


@given(cube_sets)
def test_json_roundtrip_and_canonical(s):
    text = s.to_json()
    assert CubeSet.from_json(text) == s
    assert CubeSet(reversed(s.sorted())).to_json() == text


def test_json_rejects_garbage():
    for bad in ['[]', '{"cubes": [[1, 2]]}', '{"cubes": [["a", 1, 2]]}', '{"x": 1}']:
        with pytest.raises(ValueError):
            CubeSet.from_json(bad)


def test_json_2d_key():
    s = CubeSet([(1, 2), (2, 2)])
    assert '"squares"' in s.to_json()
    assert CubeSet.from_json(s.to_json()) == s


@given(cube_sets)
def test_ascii_roundtrip(s):
    box = s.bounding_box()
    chars = parse_layered_ascii(s.to_ascii(), box)
    assert {q for q, c in chars.items() if c == "#"} == set(s)


def test_ascii_layout():
    text = CubeSet([(1, 2, 1)]).to_ascii(Box((1, 1, 1), (2, 2, 1)))
    assert text.splitlines()[:3] == ["# z = 1", "#.", ".."]
    assert layered_ascii(lambda q: "x", Box((1, 1), (2, 1))).splitlines()[0] == "# layer"


def test_cells_of_single_cube():
    s = CubeSet([(1, 1, 1)])
    assert len(s.vertices()) == 8
    assert len(s.edges()) == 12
    assert len(s.squares()) == 6


@given(cube_sets, cube)
def test_toggle_involution(s, q):
    assert s.toggle(q).toggle(q) == s
    assert (q in s.toggle(q)) != (q in s)


@given(cube_sets)
def test_grid_roundtrip(s):
    g, origin = s.to_grid()
    assert CubeSet.from_grid(g, origin) == s
