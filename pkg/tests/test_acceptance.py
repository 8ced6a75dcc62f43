"""Exit criteria. Each test prints one PASS/FAIL line (also collected in the terminal summary)."""

import json
import math
import random
import time
from collections import Counter
from itertools import product

import pytest
from scipy.stats import chisquare

from welltris import klee
from welltris.cli import main
from welltris.core import AxisBox, dyadic_contains_point
from welltris.estimator import EstimatorConfig, estimate_join_size, sample_join_rows
from welltris.gapbox import build_index, construct_gap_boxes, gap_box_count_bound
from welltris.oracle import (
    exact_join,
    maximal_dyadic_gap_boxes,
    maximal_gap_boxes,
    min_cover_size,
    union_volume_ie,
    uncovered_points,
)

from helpers import random_boxes, random_dyadic_boxes, random_join, random_relation

pytestmark = pytest.mark.acceptance

ALPHA = 0.01


def loop_bounds_ok(est, idx):
    growth_cap = sum((idx.schema.L + 1) ** t.d for t in idx.schema.tables)
    return est.iterations <= idx.box_count and est.max_growth <= growth_cap


def test_c1_preprocessing(report):
    rng = random.Random(101)
    t0 = time.perf_counter()
    failures = 0
    for i in range(200):
        d, L = rng.randint(1, 3), rng.randint(1, 4)
        r = random_relation(rng, d, L, rng.randint(1, 20))
        out = construct_gap_boxes(r)
        complete = maximal_dyadic_gap_boxes(r) <= out
        sound = not any(dyadic_contains_point(b, x) for b in out for x in r.rows)
        bounded = len(out) <= gap_box_count_bound(r)
        failures += not (complete and sound and bounded)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30
    report("C1 preprocessing completeness/soundness/size", ok,
           f"200 relations, {failures} failures, {elapsed:.1f}s (< 30s)")
    assert ok


def test_c2_measure_exactness(report):
    rng = random.Random(202)
    t0 = time.perf_counter()
    mismatches = 0
    runs = 0
    for i in range(500):
        d, L = rng.randint(1, 4), rng.randint(1, 4)
        make = random_dyadic_boxes if i % 2 else random_boxes
        boxes = make(rng, d, L, rng.randint(0, 12))
        S = AxisBox.space(d, L)
        expected = S.volume - union_volume_ie(boxes, S)
        for backend in ("python", None):
            runs += 1
            mismatches += klee.measure(boxes, S, backend) != expected
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60
    report("C2 measure == inclusion-exclusion", ok,
           f"500 instances x {runs // 500} backends, {mismatches} mismatches, {elapsed:.1f}s (< 60s)")
    assert ok


def test_c3_sampler_bijection(report):
    rng = random.Random(303)
    t0 = time.perf_counter()
    failures = 0
    for i in range(200):
        d, L = rng.randint(1, 4), rng.randint(1, 3)
        make = random_dyadic_boxes if i % 2 else random_boxes
        boxes = make(rng, d, L, rng.randint(0, 12))
        S = AxisBox.space(d, L)
        expected = uncovered_points(boxes, S)
        for backend in ("python", None):
            count, pts = klee.sample(boxes, S, range(1, len(expected) + 1), 0, backend)
            failures += not (count == len(expected) and len(pts) == len(set(pts)) and set(pts) == expected)
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 60
    report("C3 full-rank sampling == oracle uncovered set", ok,
           f"200 instances, {failures} failures, {elapsed:.1f}s (< 60s)")
    assert ok


def test_c4_sampler_uniformity(report):
    # 8x8 grid; the uncovered points spread over several leaves
    S = AxisBox.space(2, 3)
    boxes = [AxisBox((0, 0), (4, 4)), AxisBox((4, 4), (8, 8)), AxisBox((2, 2), (6, 6)),
             AxisBox((0, 6), (1, 8)), AxisBox((7, 0), (8, 2)), AxisBox((3, 0), (5, 1))]
    support = uncovered_points(boxes, S)
    t0 = time.perf_counter()
    draw = klee.draw_uniform_uncovered(boxes, S, 10_000, random.Random(404))
    elapsed = time.perf_counter() - t0
    counts = Counter(draw.points)
    p = chisquare([counts[x] for x in sorted(support)]).pvalue
    ok = len(support) <= 32 and set(counts) <= support and p > ALPHA and elapsed < 30
    report("C4 uncovered-point sampling uniform", ok,
           f"{len(support)} uncovered points, 10^4 draws, chi-square p = {p:.3f} (> {ALPHA}), {elapsed:.1f}s")
    assert ok


def _estimator_runs(seed, count, need_positive):
    rng = random.Random(seed)
    runs = 0
    while runs < count:
        d, L, t = rng.randint(1, 4), rng.randint(1, 3), rng.randint(1, 3)
        planted = rng.randint(1, 4) if need_positive else rng.randint(0, 3)
        schema, rels = random_join(rng, d, L, t, rng.randint(2, 24), planted=planted)
        _, z = exact_join(rels, schema)
        if need_positive and z == 0:
            continue
        idx = build_index(schema, rels)
        est = estimate_join_size(idx, EstimatorConfig(epsilon=0.5, delta=0.1, seed=seed * 10_000 + runs))
        runs += 1
        yield z, est, idx


def test_c5_c8_estimator_soundness(report):
    t0 = time.perf_counter()
    unsound = 0
    bound_violations = 0
    for z, est, idx in _estimator_runs(505, 500, need_positive=False):
        unsound += est.value < z
        bound_violations += not loop_bounds_ok(est, idx)
    elapsed = time.perf_counter() - t0
    ok = unsound == 0 and elapsed < 120
    report("C5 estimate >= exact join size", ok, f"500 runs, {unsound} below z, {elapsed:.1f}s (< 120s)")
    report("C8 loop bounds (soundness runs)", bound_violations == 0,
           f"{bound_violations} runs broke iterations <= |B_d| or growth <= sum (L+1)^d_i")
    assert ok and bound_violations == 0


def test_c6_c8_estimator_accuracy(report):
    eps, delta, runs = 0.5, 0.1, 500
    threshold = delta + 3 * math.sqrt(delta * (1 - delta) / runs)
    t0 = time.perf_counter()
    over = 0
    bound_violations = 0
    unsound = 0
    for z, est, idx in _estimator_runs(606, runs, need_positive=True):
        over += est.value > (1 + eps) * z
        unsound += est.value < z
        bound_violations += not loop_bounds_ok(est, idx)
    elapsed = time.perf_counter() - t0
    freq = over / runs
    ok = freq <= threshold and unsound == 0 and elapsed < 180
    report("C6 (1+eps) accuracy with prob >= 1-delta", ok,
           f"{runs} runs with z > 0, P[estimate > 1.5z] = {freq:.3f} (<= {threshold:.3f}), {elapsed:.1f}s (< 180s)")
    report("C8 loop bounds (accuracy runs)", bound_violations == 0,
           f"{bound_violations} runs broke iterations <= |B_d| or growth <= sum (L+1)^d_i")
    assert ok and bound_violations == 0


def test_c7_join_row_sampling(report):
    t0 = time.perf_counter()
    rng = random.Random(707)
    outside = 0
    for trial in range(40):
        schema, rels = random_join(rng, rng.randint(1, 4), rng.randint(1, 3), rng.randint(1, 3), 16,
                                   planted=rng.randint(1, 3))
        join, _ = exact_join(rels, schema)
        rows = sample_join_rows(build_index(schema, rels), 200, EstimatorConfig(seed=trial))
        outside += sum(p not in join for p in rows)

    # fixed instance: three tables over (a, b, c) at L=2, join size between 4 and 16
    L = 2
    fixed_rng = random.Random(77)
    schema, rels = None, None
    while True:
        schema, rels = random_join(fixed_rng, 3, L, 3, 10, planted=6)
        join, z = exact_join(rels, schema)
        if 4 <= z <= 16:
            break
    rows = sample_join_rows(build_index(schema, rels), 10_000, EstimatorConfig(seed=7))
    outside += sum(p not in join for p in rows)
    counts = Counter(rows)
    p = chisquare([counts[x] for x in sorted(join)]).pvalue
    elapsed = time.perf_counter() - t0
    ok = outside == 0 and p > ALPHA and elapsed < 60
    report("C7 join-row sampling in-join and uniform", ok,
           f"{outside} rows outside the join; |J| = {z}, 10^4 rows, chi-square p = {p:.3f} (> {ALPHA}), "
           f"{elapsed:.1f}s (< 60s)")
    assert ok


def _two_point_cover(n, cells):
    target = [p for p in product(range(n), repeat=2) if p not in cells]
    return min_cover_size(maximal_gap_boxes(cells, 2, n), target)


def test_c9_two_point_cover(report):
    t0 = time.perf_counter()
    # rows (2,4) and (3,1) as unit cells whose far corner is the row: cells (1,3) and (2,0) on [0,4]^2
    c = _two_point_cover(4, [(1, 3), (2, 0)])
    side = {"n=8 literal (2,4),(3,1)": _two_point_cover(8, [(2, 4), (3, 1)]),
            "n=8 cells (1,3),(2,0)": _two_point_cover(8, [(1, 3), (2, 0)])}
    elapsed = time.perf_counter() - t0
    ok = c == 4 and elapsed < 10
    report("C9 two-point instance min cover", ok,
           f"computed C = {c} on [0,4]^2, expected C = 4; other grids: {side}; {elapsed:.1f}s")
    assert ok


def test_c10_determinism(tmp_path, capsys, report):
    t0 = time.perf_counter()
    rng = random.Random(1010)
    tables = {
        "R": ("a,b", [(rng.randrange(3), rng.randrange(3)) for _ in range(7)]),
        "S": ("b,c", [(rng.randrange(3), rng.randrange(3)) for _ in range(7)]),
        "T": ("a,c", [(rng.randrange(3), rng.randrange(3)) for _ in range(7)]),
    }
    paths = []
    for name, (header, rows) in tables.items():
        path = tmp_path / f"{name}.csv"
        path.write_text(header + "\n" + "".join(f"{x},{y}\n" for x, y in rows))
        paths.append(str(path))
    builds = []
    for i in range(2):
        out = tmp_path / f"idx{i}.txt"
        assert main(["preprocess", *paths, "-o", str(out)]) == 0
        builds.append((out.read_bytes(), (tmp_path / f"idx{i}.txt.encoding").read_bytes()))
    capsys.readouterr()
    estimates = []
    for _ in range(3):
        assert main(["estimate", str(tmp_path / "idx0.txt"), "--seed", "42"]) == 0
        res = json.loads(capsys.readouterr().out)
        res.pop("wall_ms")
        estimates.append(res)
    elapsed = time.perf_counter() - t0
    ok = builds[0] == builds[1] and estimates[0] == estimates[1] == estimates[2] and elapsed < 10
    report("C10 determinism", ok,
           f"index rebuild byte-identical: {builds[0] == builds[1]}; 3 estimates identical: "
           f"{estimates[0] == estimates[1] == estimates[2]} (estimate {estimates[0]['estimate']}); {elapsed:.1f}s")
    assert ok
