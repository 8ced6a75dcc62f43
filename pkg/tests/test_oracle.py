import random
from itertools import product

import pytest

from welltris.core import AxisBox, JoinSchema, TableSchema
from welltris.ingest import Relation
from welltris.oracle import (
    OracleGuardError,
    exact_join,
    exact_join_enumerate,
    maximal_gap_boxes,
    min_cover_size,
    union_volume_ie,
)

from helpers import random_boxes, random_join


def relation(name, attrs, rows, L=1):
    return Relation(TableSchema(name, attrs, len(rows)), frozenset(rows), L)


def test_exact_join_examples():
    rels = [relation("T1", (0, 1), {(0, 0), (1, 1)}), relation("T2", (1, 2), {(0, 0), (1, 0)})]
    schema = JoinSchema(("A", "B", "C"), 1, tuple(r.schema for r in rels))
    rows, z = exact_join(rels, schema)
    assert rows == {(0, 0, 0), (1, 1, 0)} and z == 2

    rels = [relation("T1", (0, 1), {(0, 0)}), relation("T2", (1, 2), {(1, 0)})]
    schema = JoinSchema(("A", "B", "C"), 1, tuple(r.schema for r in rels))
    assert exact_join(rels, schema)[1] == 0

    rels = [relation("T1", (0,), {(0,), (1,)}, 2), relation("T2", (1,), {(0,), (2,), (3,)}, 2)]
    schema = JoinSchema(("A", "B"), 2, tuple(r.schema for r in rels))
    assert exact_join(rels, schema)[1] == 6


def test_hash_join_matches_enumeration():
    rng = random.Random(23)
    for _ in range(120):
        schema, rels = random_join(rng, rng.randint(1, 4), rng.randint(1, 3), rng.randint(1, 3), 20,
                                   planted=rng.randint(0, 3))
        if schema.space_volume > 1 << 12:
            continue
        assert exact_join(rels, schema) == exact_join_enumerate(rels, schema)


def test_join_guard():
    rels = [relation("T1", (0,), {(0,), (1,)}), relation("T2", (1,), {(0,), (1,)})]
    schema = JoinSchema(("A", "B"), 1, tuple(r.schema for r in rels))
    with pytest.raises(OracleGuardError):
        exact_join(rels, schema, limit=3)
    with pytest.raises(OracleGuardError):
        exact_join_enumerate(rels, schema, limit=3)


def test_union_volume_examples():
    S = AxisBox((0, 0), (4, 4))
    assert union_volume_ie([AxisBox((1, 1), (3, 2))], S) == 2
    assert union_volume_ie([AxisBox((0, 0), (1, 1)), AxisBox((2, 2), (4, 4))], S) == 5
    assert union_volume_ie([AxisBox((0, 0), (2, 4)), AxisBox((1, 0), (3, 4))], S) == 12


def test_union_volume_guard():
    S = AxisBox((0,), (1 << 21,))
    boxes = [AxisBox((i,), (i + 1,)) for i in range(25)]
    with pytest.raises(OracleGuardError):
        union_volume_ie(boxes, S)
    # grid alone is fine for a small cell
    assert union_volume_ie(boxes, AxisBox((0,), (64,))) == 25


def test_ie_and_grid_agree_random():
    rng = random.Random(1)
    for _ in range(200):
        d, L = rng.randint(1, 4), rng.randint(1, 4)
        boxes = random_boxes(rng, d, L, rng.randint(0, 12))
        # union_volume_ie raises if its two routes disagree
        union_volume_ie(boxes, AxisBox.space(d, L))


def test_maximal_gap_boxes_single_point():
    boxes = maximal_gap_boxes([(1,)], 1, 3)
    assert {(b.lo, b.hi) for b in boxes} == {((0,), (1,)), ((2,), (3,))}


def test_min_cover_trivial():
    S = AxisBox((0, 0), (2, 2))
    assert min_cover_size([S], []) == 0
    assert min_cover_size([S], product(range(2), repeat=2)) == 1
    with pytest.raises(ValueError):
        min_cover_size([AxisBox((0, 0), (1, 1))], [(1, 1)])


def test_min_cover_one_interior_point():
    # complement of a single interior cell needs its four neighbouring strips
    n = 5
    mg = maximal_gap_boxes([(2, 2)], 2, n)
    target = [p for p in product(range(n), repeat=2) if p != (2, 2)]
    assert min_cover_size(mg, target) == 4


def test_maximal_dyadic_matches_pairwise_definition():
    from welltris.core import dyadic_contains_box, dyadic_contains_point
    from welltris.oracle import all_dyadic_boxes, maximal_dyadic_gap_boxes

    from helpers import random_relation

    rng = random.Random(6)
    for _ in range(25):
        d, L = rng.randint(1, 2), rng.randint(1, 3)
        r = random_relation(rng, d, L, rng.randint(0, 6))
        gaps = [b for b in all_dyadic_boxes(d, L) if not any(dyadic_contains_point(b, x) for x in r.rows)]
        pairwise = {b for b in gaps if not any(o != b and dyadic_contains_box(o, b) for o in gaps)}
        assert maximal_dyadic_gap_boxes(r) == pairwise
