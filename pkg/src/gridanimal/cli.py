"""Command-line interface.

Exit codes: 0 pass, 1 verification failure, 2 pipeline assertion (or a
corrupted curve file fed to the pipeline), 3 timeout, 4 input error.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, _kernels
from .construction import (
    LAYOUT_3D,
    PipelineAssertFailed,
    TunnelError,
    build_2d_example,
    build_animal,
    build_furch,
    load_tunnel,
)
from .curves import (
    CurveConstraints,
    InfeasibleConstraints,
    LatticeCurve,
    NotFound,
    SearchTimeout,
    search_with_stats,
)
from .fixtures import load_pair
from .moves import (
    BudgetExceeded,
    Exhausted,
    greedy_reduce,
    legal_moves,
    transform_search,
    verify_construction_decomposition,
    verify_theorem_blocked,
)
from .topology import boundary_surface, is_animal, is_animal_2d
from .voxel import Box, CubeSet

PASS, FAIL, PIPELINE, TIMEOUT, INPUT = 0, 1, 2, 3, 4
VERDICT = {PASS: "pass", FAIL: "fail", PIPELINE: "fail", TIMEOUT: "timeout", INPUT: "fail"}


class InputError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    arguments: dict
    input_hashes: dict = field(default_factory=dict)
    seed: int | None = None
    tool_version: str = __version__
    backend: str = _kernels.BACKEND
    wall_clock: float = 0.0
    verdict: str = "fail"

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=1, sort_keys=True) + "\n"


class Run:
    """Per-invocation state: input hashing and the manifest."""

    def __init__(self, args):
        self.args = args
        skip = {"func", "manifest"}
        self.manifest = RunManifest(
            command=args.command,
            arguments={k: v for k, v in sorted(vars(args).items()) if k not in skip},
            seed=getattr(args, "seed", None),
        )

    def read(self, path: str) -> str:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        self.manifest.input_hashes[path] = hashlib.sha256(data).hexdigest()
        return data.decode()

    def cubes(self, path: str) -> CubeSet:
        try:
            return CubeSet.from_json(self.read(path))
        except (ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"{path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _box(text: str, what: str = "box") -> Box:
    try:
        return Box.parse(text)
    except ValueError as exc:
        raise InputError(f"bad {what}: {exc}") from exc


def _point(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad cube {text!r}") from exc


# --------------------------------------------------------------------------
# Construction commands
# --------------------------------------------------------------------------

def _curve_file(run: Run, path: str) -> LatticeCurve:
    try:
        return LatticeCurve.from_json(run.read(path))
    except ValueError as exc:
        raise PipelineAssertFailed(f"corrupted curve file {path}: {exc}") from exc


def cmd_build_a(run: Run) -> int:
    a = run.args
    if a.search:
        first, _ = search_with_stats(_with_seed(LAYOUT_3D.first_constraints(), a), a.workers)
        white, _ = search_with_stats(_with_seed(LAYOUT_3D.white_constraints(), a), a.workers)
    else:
        first, white = load_pair(a.pair)
        if a.curve444:
            first = _curve_file(run, a.curve444)
        if a.curve774:
            white = _curve_file(run, a.curve774)
    rec = build_animal(first, white)
    _write(a.output, rec.animal.to_json())
    if a.emit_stages:
        _emit_stages(rec, Path(a.emit_stages))
    print(json.dumps(rec.summary(), sort_keys=True), file=sys.stderr if a.output in (None, "-") else sys.stdout)
    return PASS


def _with_seed(k: CurveConstraints, a) -> CurveConstraints:
    return dataclasses.replace(k, seed=a.seed, time_limit=a.time_limit)


def _emit_stages(rec, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    names = {"B1": "b1", "B2": "b2", "B2'": "b2p", "B3": "b3", "B3'": "b3p"}
    for key, stage in rec.stages.items():
        (out / f"{names[key]}.txt").write_text(stage.to_ascii())
    (out / "summary.json").write_text(json.dumps(rec.summary(), indent=1, sort_keys=True) + "\n")


def cmd_build_2d(run: Run) -> int:
    rec = build_2d_example()
    _write(run.args.output, rec.animal.to_json())
    if run.args.emit_stages:
        _emit_stages(rec, Path(run.args.emit_stages))
    return PASS


def cmd_build_furch(run: Run) -> int:
    a = run.args
    try:
        tunnel, box = load_tunnel(run.read(a.tunnel))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{a.tunnel}: {exc}") from exc
    if a.box:
        dims = _point(a.box)
        box = Box.from_dims(*dims)
    try:
        s = build_furch(tunnel, box, plug=a.plug)
    except TunnelError as exc:
        raise InputError(str(exc)) from exc
    _write(a.output, s.to_json())
    return PASS


def cmd_search_curve(run: Run) -> int:
    a = run.args
    k = CurveConstraints(
        Box.from_dims(*a.dims),
        _point(a.start),
        _point(a.end),
        _point(a.second) if a.second else None,
        _point(a.penultimate) if a.penultimate else None,
        seed=a.seed,
        time_limit=a.time_limit,
        allow_uturns=a.allow_uturns,
    )
    try:
        curve, stats = search_with_stats(k, a.workers)
    except InfeasibleConstraints as exc:
        raise InputError(str(exc)) from exc
    except NotFound as exc:
        print(f"not found: {exc}")
        return FAIL
    _write(a.output, curve.to_json(k.dims))
    if a.ascii:
        _write(a.ascii, curve.to_ascii(k.dims))
    print(f"found after {stats.restarts} restart(s), {stats.nodes} nodes", file=sys.stderr)
    return PASS


# --------------------------------------------------------------------------
# Verification commands
# --------------------------------------------------------------------------

def _oracle(s: CubeSet):
    return is_animal_2d(s) if s.dim == 2 else is_animal(s)


def cmd_verify_animal(run: Run) -> int:
    s = run.cubes(run.args.file)
    check = _oracle(s)
    doc = {"animal": bool(check), "diagnostic": check.diagnostic.value, "cubes": len(s)}
    if s.dim == 3 and len(s):
        doc["boundary_quads"] = len(boundary_surface(s).quads)
    print(f"{run.args.file}: {check.diagnostic.value}")
    if run.args.report:
        _write(run.args.report, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return PASS if check else FAIL


def cmd_verify_theorem(run: Run) -> int:
    a = run.args
    s = run.cubes(a.file)
    box = None if a.box == "auto" else _box(a.box)
    rep = verify_theorem_blocked(s, box, workers=a.workers, sample_fraction=a.sample, seed=a.seed)
    c = rep.counts()
    print(f"cubes checked: {c['cubes']}")
    print(f"toggles giving an animal: {c['oracle_animal']}")
    print(f"toggles passing the local disk test: {c['necessary_ok']}")
    print(f"full-recompute sample: {c['sample_size']} cubes, {c['sample_mismatches']} mismatches")
    print("blocked" if rep.ok else "NOT blocked")
    if a.report:
        _write(a.report, rep.to_json())
    return PASS if rep.ok else FAIL


def cmd_verify_decomposition(run: Run) -> int:
    a = run.args
    first, white = load_pair(a.pair)
    if a.curve444:
        first = _curve_file(run, a.curve444)
    if a.curve774:
        white = _curve_file(run, a.curve774)
    rep = verify_construction_decomposition(build_animal(first, white))
    for name, ok in rep.checks.items():
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
    if a.report:
        _write(a.report, rep.to_json())
    return PASS if rep.ok else FAIL


def cmd_moves(run: Run) -> int:
    a = run.args
    s = run.cubes(a.file)
    region = _box(a.region, "region") if a.region else s.bounding_box()
    if not _oracle(s):
        print("input is not an animal")
        return FAIL
    moves = legal_moves(s, region)
    for q in moves:
        print(("remove " if q in s else "add    ") + ",".join(map(str, q)))
    print(f"{len(moves)} legal move(s) in {region}")
    if a.report:
        doc = {"region": {"lo": list(region.lo), "hi": list(region.hi)},
               "moves": [["remove" if q in s else "add", list(q)] for q in moves]}
        _write(a.report, json.dumps(doc) + "\n")
    return PASS


def cmd_reduce(run: Run) -> int:
    a = run.args
    s = run.cubes(a.file)
    region = _box(a.region, "region") if a.region else None
    end, seq = greedy_reduce(s, region)
    print(f"removed {len(seq.moves)} cube(s); {len(end)} left")
    if a.output:
        _write(a.output, end.to_json())
    if a.report:
        _write(a.report, seq.to_json())
    return PASS if len(end) == 1 else FAIL


def cmd_transform(run: Run) -> int:
    a = run.args
    start, goal = run.cubes(a.start), run.cubes(a.goal)
    region = _box(a.region, "region")
    res = transform_search(start, goal, region, a.budget)
    if isinstance(res, Exhausted):
        print(f"exhausted: explored {res.explored}, max frontier {res.max_frontier}")
        doc = {"result": "exhausted", "explored": res.explored, "max_frontier": res.max_frontier}
        code = FAIL
    elif isinstance(res, BudgetExceeded):
        print(f"budget exceeded after {res.explored} states")
        doc = {"result": "budget_exceeded", "explored": res.explored}
        code = TIMEOUT
    else:
        print(f"found a sequence of {len(res.moves)} move(s)")
        doc = {"result": "found", "moves": [[k, list(q)] for k, q in res.moves]}
        code = PASS if res.replay() else FAIL
    if a.report:
        _write(a.report, json.dumps(doc) + "\n")
    return code


def cmd_export(run: Run) -> int:
    a = run.args
    s = run.cubes(a.file)
    if a.format == "obj":
        if s.dim != 3:
            raise InputError("OBJ export needs a 3D set")
        text = boundary_surface(s).to_obj()
    elif a.format == "ascii":
        text = s.to_ascii()
    else:
        text = s.to_json()
    _write(a.output, text)
    return PASS


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gridanimal", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def command(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--workers", type=int, default=1, help="worker processes (1 is the reference mode)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--manifest", help="write the run manifest here (default: stderr)")
        return sp

    sp = command("build-a", cmd_build_a, "build the blocked animal")
    sp.add_argument("--curve444")
    sp.add_argument("--curve774")
    sp.add_argument("--pair", choices=("a", "b"), default="a", help="bundled curve pair")
    sp.add_argument("--search", action="store_true", help="search curves instead of using fixtures")
    sp.add_argument("--time-limit", type=float, default=300.0)
    sp.add_argument("-o", "--output")
    sp.add_argument("--emit-stages", metavar="DIR")

    sp = command("build-2d", cmd_build_2d, "build the planar analogue")
    sp.add_argument("-o", "--output")
    sp.add_argument("--emit-stages", metavar="DIR")

    sp = command("build-furch", cmd_build_furch, "solid box minus a knotted tunnel")
    sp.add_argument("--tunnel", required=True)
    sp.add_argument("--box", help="box dimensions A,B,C (default: from the tunnel file)")
    sp.add_argument("--plug", choices=("start", "end"), default="end")
    sp.add_argument("-o", "--output")

    sp = command("search-curve", cmd_search_curve, "find a box-filling curve")
    sp.add_argument("--dims", type=int, nargs="+", required=True)
    sp.add_argument("--start", required=True)
    sp.add_argument("--end", required=True)
    sp.add_argument("--second")
    sp.add_argument("--penultimate")
    sp.add_argument("--allow-uturns", action="store_true")
    sp.add_argument("--time-limit", type=float, default=300.0)
    sp.add_argument("-o", "--output")
    sp.add_argument("--ascii", metavar="FILE")

    sp = command("verify-animal", cmd_verify_animal, "is the set a ball?")
    sp.add_argument("file")
    sp.add_argument("--report")

    sp = command("verify-theorem", cmd_verify_theorem, "check that no toggle keeps an animal")
    sp.add_argument("file")
    sp.add_argument("--box", default="auto")
    sp.add_argument("--sample", type=float, default=0.01, help="full-recompute sample fraction")
    sp.add_argument("--report")

    sp = command("verify-decomposition", cmd_verify_decomposition, "check the ball decomposition of A")
    sp.add_argument("--curve444")
    sp.add_argument("--curve774")
    sp.add_argument("--pair", choices=("a", "b"), default="a")
    sp.add_argument("--report")

    sp = command("moves", cmd_moves, "list legal toggles")
    sp.add_argument("file")
    sp.add_argument("--region")
    sp.add_argument("--report")

    sp = command("reduce", cmd_reduce, "greedily remove cubes")
    sp.add_argument("file")
    sp.add_argument("--region")
    sp.add_argument("-o", "--output")
    sp.add_argument("--report")

    sp = command("transform", cmd_transform, "breadth-first search between two animals")
    sp.add_argument("start")
    sp.add_argument("goal")
    sp.add_argument("--region", required=True)
    sp.add_argument("--budget", type=int, default=10**6)
    sp.add_argument("--report")

    sp = command("export", cmd_export, "OBJ mesh, layered ASCII or normalized JSON")
    sp.add_argument("file")
    sp.add_argument("--format", choices=("obj", "ascii", "json"), default="json")
    sp.add_argument("-o", "--output")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    run = Run(args)
    t0 = time.perf_counter()
    try:
        code = args.func(run)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        code = INPUT
    except PipelineAssertFailed as exc:
        print(f"pipeline assertion failed: {exc}", file=sys.stderr)
        code = PIPELINE
    except SearchTimeout as exc:
        print(f"timeout: {exc}", file=sys.stderr)
        code = TIMEOUT
    except NotFound as exc:
        print(f"curve search failed: {exc}", file=sys.stderr)
        code = PIPELINE
    run.manifest.wall_clock = round(time.perf_counter() - t0, 3)
    run.manifest.verdict = VERDICT[code]
    if args.manifest:
        _write(args.manifest, run.manifest.to_json())
    else:
        sys.stderr.write(run.manifest.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
