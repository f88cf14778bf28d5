#!/usr/bin/env python3
"""Compare the jitted kernels against the pure-numpy fallback.

Times the hot kernels on representative workloads: bulk order checks over a
materialized lattice, one search round of candidate expansion, the
maximality filter, and full product enumeration. Run:

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import numpy as np

import latticeselect as ls
from latticeselect._backend import load_backend
from latticeselect.dataset import AttributeSchema, ClassSchema, ObjectRecord, Region
from latticeselect.lattice import materialize, stack_rows


def build_workload(seed=7):
    rng = random.Random(seed)
    attrs = (
        AttributeSchema("a0", "categorical", domain=tuple(f"s{i}" for i in range(7))),
        AttributeSchema("a1", "categorical", domain=tuple(f"t{i}" for i in range(5))),
        AttributeSchema("a2", "numeric", lower=0, upper=100),
    )
    schema = ClassSchema("Bench", attrs)
    objects = []
    values = set()
    while len(objects) < 16:
        v = (rng.choice(attrs[0].domain), rng.choice(attrs[1].domain), rng.randrange(0, 101))
        if v in values:
            continue
        values.add(v)
        objects.append(
            ObjectRecord(
                f"o{len(objects)}", "Bench", Region(0, 0, 1, 1),
                {"a0": v[0], "a1": v[1], "a2": v[2]},
            )
        )
    ctx = ls.build_context(schema, objects)
    rows = materialize(ctx, cap=10_000_000)
    atoms = stack_rows([ls.atom_of(ctx, o) for o in objects])
    return ctx, rows, atoms


def timeit(fn, repeats):
    best = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    ctx, rows, atoms = build_workload()
    pos, neg = atoms[:10], atoms[10:]
    kinds, sizes = ctx.kinds, ctx.sizes
    top = ctx.top_row()
    sample = rows[:: max(1, rows.shape[0] // 4000)].copy()

    backends = {}
    for name in ("numba", "numpy"):
        try:
            backends[name] = load_backend(name)
        except Exception as exc:  # pragma: no cover
            print(f"{name} backend unavailable: {exc}", file=sys.stderr)
    if "numba" in backends:
        backends["numba"].warmup()

    workloads = {
        "covers_any (|L| x atoms)": lambda k: k.covers_any(rows, pos, kinds),
        "leq_rows (|L|)": lambda k: k.leq_rows(rows, top, kinds),
        "diff_round (4k cands)": lambda k: k.diff_round(sample, neg[0], kinds),
        "maximal_filter (4k cands)": lambda k: k.maximal_filter(
            sample, neg, kinds, sizes, top, True
        ),
        "leq_matrix (atoms x 4k)": lambda k: k.leq_matrix(atoms, sample, kinds),
    }

    print(f"lattice size {rows.shape[0] + 1}, candidates {sample.shape[0]}, "
          f"{atoms.shape[0]} atoms, repeats {args.repeats}")
    header = f"{'kernel':28} " + " ".join(f"{n:>12}" for n in backends) + f" {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label, call in workloads.items():
        times = {name: timeit(lambda: call(k), args.repeats) for name, k in backends.items()}
        row = f"{label:28} " + " ".join(f"{times[n] * 1e3:10.2f}ms" for n in backends)
        if "numba" in times and "numpy" in times:
            row += f" {times['numpy'] / times['numba']:8.1f}x"
        print(row)

    # sanity: backends agree on every workload
    if len(backends) == 2:
        a, b = backends["numba"], backends["numpy"]
        for label, call in workloads.items():
            if not np.array_equal(np.asarray(call(a)), np.asarray(call(b))):
                print(f"MISMATCH in {label}", file=sys.stderr)
                return 1
        print("backends agree on all workloads")
    return 0


if __name__ == "__main__":
    sys.exit(main())
