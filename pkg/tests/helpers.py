"""Random instance generators shared by the test modules."""

import random
from itertools import product

from welltris.core import AxisBox, JoinSchema, TableSchema
from welltris.ingest import Relation


def random_relation(rng: random.Random, d: int, L: int, m: int, name: str = "T") -> Relation:
    n = 1 << L
    rows = frozenset(tuple(rng.randrange(n) for _ in range(d)) for _ in range(m))
    return Relation(TableSchema(name, tuple(range(d)), len(rows)), rows, L)


def random_boxes(rng: random.Random, d: int, L: int, count: int) -> list[AxisBox]:
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


def random_dyadic_boxes(rng: random.Random, d: int, L: int, count: int) -> list[AxisBox]:
    """Dyadic-aligned boxes, the shape the estimator feeds the measure engine."""
    out = []
    for _ in range(count):
        lo, hi = [], []
        for _ in range(d):
            ell = rng.randint(0, L)
            w = 1 << (L - ell)
            a = rng.randrange(1 << ell) * w
            lo.append(a)
            hi.append(a + w)
        out.append(AxisBox(tuple(lo), tuple(hi)))
    return out


def random_join(rng: random.Random, d: int, L: int, t: int, m: int, planted: int = 0):
    """Random schema over ``d`` attributes with ``t`` tables.

    ``planted`` global points are projected into every table first, so the
    join holds at least those rows.
    """
    n = 1 << L
    attrs = tuple(f"a{i}" for i in range(d))
    while True:
        subsets = [tuple(sorted(rng.sample(range(d), rng.randint(1, d)))) for _ in range(t)]
        if set().union(*subsets) == set(range(d)):
            break
    seeds = [tuple(rng.randrange(n) for _ in range(d)) for _ in range(planted)]
    relations = []
    for i, sub in enumerate(subsets):
        rows = {tuple(p[a] for a in sub) for p in seeds}
        for _ in range(rng.randint(0, m)):
            rows.add(tuple(rng.randrange(n) for _ in sub))
        relations.append(Relation(TableSchema(f"T{i}", sub, len(rows)), frozenset(rows), L))
    schema = JoinSchema(attrs, L, tuple(r.schema for r in relations))
    return schema, relations


def brute_uncovered(boxes, S):
    return {p for p in product(*(range(a, b) for a, b in zip(S.lo, S.hi)))
            if not any(b.contains(p) for b in boxes)}
