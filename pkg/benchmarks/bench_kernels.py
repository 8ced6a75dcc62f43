"""Compare the compiled and pure-Python measure kernels, then log estimator cost.

    python benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

The first table times ``klee.measure`` and ``klee.sample`` on random box sets
under both backends and checks that they agree. The second table is a smoke
log of estimator wall time against the size of the final cover set; it is for
eyeballing trends and gates nothing.
"""

from __future__ import annotations

import argparse
import random
import time

from welltris import klee
from welltris.core import AxisBox, JoinSchema, TableSchema
from welltris.estimator import EstimatorConfig, estimate_join_size
from welltris.gapbox import build_index
from welltris.ingest import Relation


def random_boxes(rng, d, L, count):
    n = 1 << L
    out = []
    for _ in range(count):
        lo, hi = [], []
        for _ in range(d):
            a = rng.randrange(n)
            lo.append(a)
            hi.append(rng.randrange(a + 1, n + 1))
        out.append(AxisBox(tuple(lo), tuple(hi)))
    return out


def best_of(repeat, fn):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_kernels(rng, repeat):
    backends = ["python"] + (["cython"] if klee.BACKEND == "cython" else [])
    print(f"{'d':>2} {'L':>2} {'boxes':>6}  " + "  ".join(f"{b + ' measure':>15} {b + ' sample':>14}" for b in backends)
          + ("  speedup" if len(backends) == 2 else ""))
    for d, L, m in [(2, 6, 20), (2, 10, 100), (3, 6, 50), (3, 8, 200), (4, 5, 100), (4, 8, 400), (6, 4, 200)]:
        boxes = random_boxes(rng, d, L, m)
        S = AxisBox.space(d, L)
        count = klee.measure(boxes, S)
        ranks = sorted(rng.sample(range(1, count + 1), min(count, 100)))
        row, answers, measure_times = [], [], []
        for b in backends:
            tm, count = best_of(repeat, lambda: klee.measure(boxes, S, b))
            ts, drawn = best_of(repeat, lambda: klee.sample(boxes, S, ranks, 0, b))
            answers.append((count, drawn))
            measure_times.append(tm)
            row.append(f"{tm * 1e3:>12.2f} ms {ts * 1e3:>11.2f} ms")
        agree = all(a == answers[0] for a in answers)
        line = f"{d:>2} {L:>2} {m:>6}  " + "  ".join(row)
        if len(backends) == 2:
            line += f"  {measure_times[0] / measure_times[1]:>6.1f}x"
        print(line + ("" if agree else "  MISMATCH"))


def random_instance(rng, d, L, tables, rows):
    n = 1 << L
    schemas, rels = [], []
    for t in range(tables):
        attrs = tuple(sorted(rng.sample(range(d), rng.randint(1, d))))
        data = frozenset(tuple(rng.randrange(n) for _ in attrs) for _ in range(rows))
        schema = TableSchema(f"T{t}", attrs, len(data))
        schemas.append(schema)
        rels.append(Relation(schema, data, L))
    covered = set().union(*(s.attrs for s in schemas))
    for a in range(d):
        if a not in covered:
            schema = TableSchema(f"U{a}", (a,), n)
            schemas.append(schema)
            rels.append(Relation(schema, frozenset((v,) for v in range(n)), L))
    return JoinSchema(tuple(f"a{i}" for i in range(d)), L, tuple(schemas)), rels


def estimator_log(rng):
    print(f"\n{'d':>2} {'L':>2} {'|B_d|':>6} {'|E|':>5} {'rounds':>6} {'estimate':>10} {'wall':>10}")
    for d, L, tables, rows in [(2, 4, 2, 30), (3, 3, 3, 40), (3, 4, 3, 80), (4, 3, 4, 60), (4, 4, 3, 150)]:
        schema, rels = random_instance(rng, d, L, tables, rows)
        idx = build_index(schema, rels)
        t0 = time.perf_counter()
        est = estimate_join_size(idx, EstimatorConfig(seed=1))
        wall = time.perf_counter() - t0
        print(f"{d:>2} {L:>2} {idx.box_count:>6} {est.boxes_in_E:>5} {est.iterations:>6} {est.value:>10} "
              f"{wall * 1e3:>7.1f} ms")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print(f"default backend: {klee.BACKEND}\n")
    bench_kernels(rng, args.repeat)
    estimator_log(rng)


if __name__ == "__main__":
    main()
