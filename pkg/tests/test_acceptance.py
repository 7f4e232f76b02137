"""One test per acceptance criterion, with the stated time limits."""
import itertools
import subprocess
import sys
import time

import pytest

from gridanimal.construction import LAYOUT_3D, Color, build_2d_example, build_animal
from gridanimal.curves import (
    CurveConstraints,
    NotFound,
    has_uturn,
    hamiltonian_paths,
    is_valid_filling_curve,
    parity_feasible,
    search_filling_curve,
)
from gridanimal.fixtures import load_pair
from gridanimal.moves import (
    Exhausted,
    MoveSequence,
    legal_moves,
    necessary_move_ok,
    transform_search,
    verify_construction_decomposition,
    verify_theorem_blocked,
)
from gridanimal.topology import brute_force_link_oracle, is_animal, is_animal_2d, link_table
from gridanimal.voxel import Box, CubeSet

from walks import random_animals


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


PAIRS = ["a", "b"]


@pytest.mark.parametrize("pair", PAIRS)
def test_criterion_1_build(pair):
    with Timer() as t:
        rec = build_animal(*load_pair(pair))
    assert t.elapsed < 10
    assert rec.animal.bounding_box() == Box((-1, -1, -29), (15, 15, 25))
    for q in [(5, 3, 0), (5, 3, 8)]:
        assert rec.stages["B2"][q] == Color.RED
    assert rec.b3[(3, 11, 24)] == Color.RED
    fin = rec.final
    assert fin[(9, 5, -2)] == Color.RED
    assert fin[(9, 5, -1)] == Color.RED and fin[(9, 5, -3)] == Color.RED


@pytest.mark.parametrize("pair", PAIRS)
def test_criterion_2_ball_and_decomposition(pair):
    with Timer() as t:
        rec = build_animal(*load_pair(pair))
        check = is_animal(rec.animal)
        rep = verify_construction_decomposition(rec)
    assert t.elapsed < 60
    assert check.diagnostic.value == "Ball"
    assert rep.ok, rep.failures
    assert all(step[2] and step[3] for step in rep.steps)
    assert rep.checks["red_meets_k_plus_in_one_square"]


@pytest.mark.parametrize("pair", PAIRS)
def test_criterion_3_blocked(pair):
    a = build_animal(*load_pair(pair)).animal
    rep = verify_theorem_blocked(a, sample_fraction=0.01)
    c = rep.counts()
    assert c["cubes"] == 15895
    assert c["oracle_animal"] == 0
    assert c["necessary_ok"] == 0
    assert c["sample_size"] >= 159 and c["sample_mismatches"] == 0
    assert rep.ok


def test_criterion_4_search():
    with Timer() as t:
        first = search_filling_curve(LAYOUT_3D.first_constraints())
        white = search_filling_curve(LAYOUT_3D.white_constraints())
    assert t.elapsed < 300
    assert is_valid_filling_curve(first, Box.from_dims(4, 4, 4))
    assert is_valid_filling_curve(white, Box.from_dims(7, 7, 4))
    assert (first.cubes[0], first.cubes[1], first.cubes[-2], first.cubes[-1]) == ((3, 2, 1), (3, 2, 2), (3, 2, 3), (3, 2, 4))
    assert (white.cubes[0], white.cubes[1], white.cubes[-2], white.cubes[-1]) == ((5, 3, 1), (5, 3, 2), (2, 6, 3), (2, 6, 4))
    # the searched pair builds the blocked animal too
    rec = build_animal(first, white)
    assert is_animal(rec.animal)
    # two distinct pairs run through criteria 1 to 3 above
    pa, pb = load_pair("a"), load_pair("b")
    assert pa[0].cubes != pb[0].cubes and pa[1].cubes != pb[1].cubes


def test_criterion_5_no_uturn_free_square():
    with Timer() as t:
        box = Box.from_dims(2, 2, 1)
        paths = list(hamiltonian_paths(box))
        assert len(paths) == 8
        assert all(has_uturn(p) for p in paths)
        for s, e in itertools.permutations(list(box), 2):
            k = CurveConstraints(box, s, e)
            if parity_feasible(k):
                with pytest.raises(NotFound):
                    search_filling_curve(k)
    assert t.elapsed < 1


def test_criterion_6_link_table():
    with Timer() as t:
        table = link_table()
        assert all(brute_force_link_oracle(m) == table[m] for m in range(256))
    assert t.elapsed < 5


def test_criterion_7_legal_toggles_pass_disk_test():
    region = Box.from_dims(4, 4, 4)
    pairs = violations = 0
    for a in random_animals(160, seed=2024):
        for q in region:
            pairs += 1
            if is_animal(a.toggle(q)) and not necessary_move_ok(a, q):
                violations += 1
    assert pairs >= 10_000
    assert violations == 0


def test_criterion_8_2d():
    rec = build_2d_example()
    stages = rec.summary()["stages"]
    assert [stages[k] for k in ("B1", "B2", "B2'", "B3", "B3'")] == [[4, 4], [9, 9], [9, 14], [17, 27], [17, 55]]
    assert is_animal_2d(rec.animal)
    assert legal_moves(rec.animal, rec.animal.bounding_box())


def test_criterion_9_transform():
    solid = CubeSet(Box.from_dims(2, 2, 2))
    seq = transform_search(solid, CubeSet([(1, 1, 1)]), Box.from_dims(2, 2, 2))
    assert isinstance(seq, MoveSequence) and seq.replay()
    assert seq.end == CubeSet([(1, 1, 1)])
    a = build_animal(*load_pair("a")).animal
    res = transform_search(a, CubeSet([(3, 11, 24)]), a.bounding_box())
    assert isinstance(res, Exhausted) and res.max_frontier == 1


def _cli(*args):
    r = subprocess.run([sys.executable, "-m", "gridanimal.cli", *args], capture_output=True)
    assert r.returncode == 0, r.stderr.decode()


def test_criterion_10_deterministic_cli(tmp_path):
    outs = []
    for i in range(2):
        a = tmp_path / f"a{i}.json"
        rep = tmp_path / f"t{i}.json"
        _cli("build-a", "--workers", "1", "-o", str(a), "--manifest", str(tmp_path / "m.json"))
        _cli("verify-theorem", str(a), "--workers", "1", "--report", str(rep), "--manifest", str(tmp_path / "m.json"))
        outs.append((a.read_bytes(), rep.read_bytes()))
    assert outs[0] == outs[1]
