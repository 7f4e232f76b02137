"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from gridanimal import _kernels
from gridanimal.construction import LAYOUT_3D, build_animal
from gridanimal.curves import search_with_stats
from gridanimal.fixtures import load_pair
from gridanimal.topology import link_table


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()

    a = build_animal(*load_pair("a")).animal
    box = a.bounding_box()
    grid, origin = a.to_grid(box, pad=2)
    cands = np.asarray(list(box), dtype=np.int64) - np.asarray(origin)
    table = link_table()

    cases = {
        "vertex_masks (A)": lambda k: k.vertex_masks(grid),
        "boundary_counts (A)": lambda k: k.boundary_counts(grid),
        "toggle_scan (15895 cubes)": lambda k: k.toggle_scan(grid, table, cands),
    }
    searches = {
        "curve search 4x4x4": LAYOUT_3D.first_constraints(),
        "curve search 7x7x4": LAYOUT_3D.white_constraints(),
    }

    backends = _kernels.available()
    print(f"{'kernel':30s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in cases.items():
        row = [best_of(lambda: fn(_kernels.load(b)), args.repeat) for b in backends]
        print(_row(name, row))
    for name, k in searches.items():
        row = [best_of(lambda: search_with_stats(k, backend=b), args.repeat) for b in backends]
        print(_row(name, row))


def _row(name, row):
    text = f"{name:30s}" + "".join(f"{t:11.4f}s" for t in row)
    if len(row) == 2:
        text += f"  {row[1] / row[0]:9.1f}x"
    return text


if __name__ == "__main__":
    main()
