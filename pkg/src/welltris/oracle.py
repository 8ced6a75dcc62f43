"""Brute-force references for small instances.

Every function here either answers exactly or raises ``OracleGuardError``;
nothing approximates.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .core import AxisBox, DyadicBox, JoinSchema, dyadic_contains_box, dyadic_to_axis
from .ingest import Relation

GRID_LIMIT = 1 << 20


class OracleGuardError(RuntimeError):
    pass


def exact_join(relations: Sequence[Relation], schema: JoinSchema, limit: int = GRID_LIMIT) -> tuple[set, int]:
    """Hash join of all relations; ``limit`` caps every intermediate result."""
    assigned: list[int] = []
    partial: list[tuple[int, ...]] = [()]
    for r in sorted(relations, key=lambda r: len(r.rows)):
        attrs = r.schema.attrs
        shared = [a for a in attrs if a in assigned]
        fresh = [a for a in attrs if a not in assigned]
        buckets: dict[tuple, list[tuple]] = {}
        pos = {a: i for i, a in enumerate(attrs)}
        for row in r.rows:
            key = tuple(row[pos[a]] for a in shared)
            buckets.setdefault(key, []).append(tuple(row[pos[a]] for a in fresh))
        where = {a: i for i, a in enumerate(assigned)}
        nxt = []
        for t in partial:
            for ext in buckets.get(tuple(t[where[a]] for a in shared), ()):
                nxt.append(t + ext)
                if len(nxt) > limit:
                    raise OracleGuardError(f"intermediate join result exceeds {limit} rows")
        assigned.extend(fresh)
        partial = nxt
    missing = [a for a in range(schema.d) if a not in assigned]
    if missing and partial:
        raise OracleGuardError("attributes not covered by any relation")
    order = sorted(range(len(assigned)), key=lambda i: assigned[i])
    rows = {tuple(t[i] for i in order) for t in partial}
    return rows, len(rows)


def exact_join_enumerate(relations: Sequence[Relation], schema: JoinSchema, limit: int = GRID_LIMIT) -> tuple[set, int]:
    """Same answer as ``exact_join`` by testing every lattice point."""
    if schema.space_volume > limit:
        raise OracleGuardError(f"n^d = {schema.space_volume} exceeds {limit}")
    tables = [(r.schema.attrs, r.rows) for r in relations]
    rows = {
        p for p in product(range(schema.n), repeat=schema.d)
        if all(tuple(p[a] for a in attrs) in rs for attrs, rs in tables)
    }
    return rows, len(rows)


def _intersect(a: tuple, b: tuple):
    lo = tuple(max(x, y) for x, y in zip(a[0], b[0]))
    hi = tuple(min(x, y) for x, y in zip(a[1], b[1]))
    if all(x < y for x, y in zip(lo, hi)):
        return lo, hi
    return None


def _vol(lo, hi) -> int:
    v = 1
    for a, b in zip(lo, hi):
        v *= b - a
    return v


def _ie(boxes: list[tuple]) -> int:
    total = 0

    def walk(start: int, cur: tuple, size: int):
        nonlocal total
        for i in range(start, len(boxes)):
            nxt = _intersect(cur, boxes[i])
            if nxt is None:
                continue
            total += _vol(*nxt) if size % 2 == 0 else -_vol(*nxt)
            walk(i + 1, nxt, size + 1)

    for i, b in enumerate(boxes):
        total += _vol(*b)
        walk(i + 1, b, 1)
    return total


def _grid(boxes: list[tuple], S: AxisBox) -> np.ndarray:
    covered = np.zeros(tuple(b - a for a, b in zip(S.lo, S.hi)), dtype=bool)
    for lo, hi in boxes:
        covered[tuple(slice(a - s, b - s) for a, b, s in zip(lo, hi, S.lo))] = True
    return covered


def _clipped(boxes: Iterable[AxisBox], S: AxisBox) -> list[tuple]:
    out = []
    for b in boxes:
        c = _intersect((b.lo, b.hi), (S.lo, S.hi))
        if c is not None:
            out.append(c)
    return out


def union_volume_ie(boxes: Sequence[AxisBox], S: AxisBox, max_boxes: int = 20) -> int:
    """Exact covered volume of ``S``, by inclusion-exclusion, checked by grid marking when small."""
    clipped = _clipped(boxes, S)
    ie_ok = len(clipped) <= max_boxes
    grid_ok = S.volume <= GRID_LIMIT
    if not ie_ok and not grid_ok:
        raise OracleGuardError(f"{len(clipped)} boxes and |S| = {S.volume} are both too large")
    grid = int(_grid(clipped, S).sum()) if grid_ok else None
    if not ie_ok:
        return grid
    ie = _ie(clipped)
    if grid is not None and grid != ie:
        raise AssertionError(f"inclusion-exclusion {ie} disagrees with grid marking {grid}")
    return ie


def uncovered_points(boxes: Sequence[AxisBox], S: AxisBox) -> set[tuple[int, ...]]:
    if S.volume > GRID_LIMIT:
        raise OracleGuardError(f"|S| = {S.volume} exceeds {GRID_LIMIT}")
    free = ~_grid(_clipped(boxes, S), S)
    return {tuple(int(x) + s for x, s in zip(idx, S.lo)) for idx in np.argwhere(free)}


def all_dyadic_boxes(d: int, L: int) -> list[DyadicBox]:
    prefixes = [""] + [format(v, f"0{ell}b") for ell in range(1, L + 1) for v in range(1 << ell)]
    return [DyadicBox(p, L) for p in product(prefixes, repeat=d)]


def maximal_dyadic_gap_boxes(r: Relation, limit: int = GRID_LIMIT) -> set[DyadicBox]:
    """Every dyadic box holding no tuple and contained in no larger such box.

    Any strict container of ``b`` contains a one-step parent of ``b`` (one
    dimension's last bit dropped), and sub-boxes of gaps are gaps, so ``b`` is
    maximal exactly when no parent is a gap.
    """
    d, L = r.d, r.L
    everything = all_dyadic_boxes(d, L)
    if len(everything) * max(1, len(r.rows)) > limit * 16:
        raise OracleGuardError(f"{len(everything)} dyadic boxes is too many to enumerate")
    if not r.rows:
        gaps = set(everything)
    else:
        axis = [dyadic_to_axis(b) for b in everything]
        lo = np.array([a.lo for a in axis])[:, None, :]
        hi = np.array([a.hi for a in axis])[:, None, :]
        rows = np.array(sorted(r.rows))[None, :, :]
        holds = ((lo <= rows) & (rows < hi)).all(axis=2).any(axis=1)
        gaps = {b for b, h in zip(everything, holds) if not h}

    def parents(b: DyadicBox):
        for k, p in enumerate(b.prefixes):
            if p:
                yield DyadicBox(b.prefixes[:k] + (p[:-1],) + b.prefixes[k + 1:], L)

    return {b for b in gaps if not any(p in gaps for p in parents(b))}


def maximal_gap_boxes(points: Iterable[Sequence[int]], d: int, n: int, limit: int = GRID_LIMIT) -> list[AxisBox]:
    """All maximal (not necessarily dyadic) gap boxes of a point set in ``[0, n)^d``."""
    points = [tuple(p) for p in points]
    intervals = [(a, b) for a in range(n) for b in range(a + 1, n + 1)]
    if len(intervals) ** d > limit:
        raise OracleGuardError("too many candidate boxes")

    def is_gap(lo, hi):
        return not any(all(a <= x < b for a, x, b in zip(lo, p, hi)) for p in points)

    out = []
    for ivs in product(intervals, repeat=d):
        lo = tuple(a for a, _ in ivs)
        hi = tuple(b for _, b in ivs)
        if not is_gap(lo, hi):
            continue
        extendable = False
        for k in range(d):
            if lo[k] > 0 and is_gap(lo[:k] + (lo[k] - 1,) + lo[k + 1:], hi):
                extendable = True
                break
            if hi[k] < n and is_gap(lo, hi[:k] + (hi[k] + 1,) + hi[k + 1:]):
                extendable = True
                break
        if not extendable:
            out.append(AxisBox(lo, hi))
    return out


def min_cover_size(candidates: Sequence[AxisBox], target: Iterable[Sequence[int]], max_candidates: int = 64) -> int:
    """Fewest candidates whose union covers every target point (exact branch and bound)."""
    if len(candidates) > max_candidates:
        raise OracleGuardError(f"{len(candidates)} candidates exceeds {max_candidates}")
    target = sorted({tuple(p) for p in target})
    if not target:
        return 0
    masks = []
    for c in candidates:
        m = 0
        for i, p in enumerate(target):
            if c.contains(p):
                m |= 1 << i
        masks.append(m)
    full = (1 << len(target)) - 1
    union = 0
    for m in masks:
        union |= m
    if union != full:
        raise ValueError("candidates cannot cover the target")
    best = len(candidates)

    def search(covered: int, used: int):
        nonlocal best
        if covered == full:
            best = min(best, used)
            return
        if used + 1 >= best:
            return
        missing = full & ~covered
        # branch on the missing point with the fewest candidate covers
        options = None
        for i in range(len(target)):
            if missing >> i & 1:
                opts = [m for m in masks if m >> i & 1]
                if options is None or len(opts) < len(options):
                    options = opts
                    if len(opts) == 1:
                        break
        for m in sorted(options, key=lambda m: -bin(m & missing).count("1")):
            search(covered | m, used + 1)

    search(0, 0)
    return best


def containing_dyadic_count(box: DyadicBox) -> int:
    """Brute-force count of dyadic boxes strictly containing ``box``."""
    return sum(1 for o in all_dyadic_boxes(box.d, box.L) if o != box and dyadic_contains_box(o, box))
