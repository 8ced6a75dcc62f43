import random
from itertools import product

import pytest

from welltris.core import DyadicBox, JoinSchema, SchemaError, TableSchema, dyadic_contains_point
from welltris.gapbox import build_index
from welltris.oracle import all_dyadic_boxes, exact_join
from welltris.trie import DyadicTrie, GapBoxIndex, IndexFormatError, parse, serialize

from helpers import random_join


def test_serialize():
    assert serialize(DyadicBox.of("00", "λ", "1", L=2)) == "00,λ,1"
    assert serialize(DyadicBox(("", ""), 3)) == "λ,λ"
    assert serialize(DyadicBox(("", "01"), 3), "_") == "_,01"


def test_roundtrip_random():
    rng = random.Random(0)
    for _ in range(200):
        d, L = rng.randint(1, 4), rng.randint(1, 5)
        ps = []
        for _ in range(d):
            ell = rng.randint(0, L)
            ps.append("".join(rng.choice("01") for _ in range(ell)))
        b = DyadicBox(tuple(ps), L)
        assert parse(serialize(b), L) == b
        assert parse(serialize(b, "_"), L, "_") == b
        assert len(serialize(b)) <= d * L + (d - 1) + d


def test_insert_contains():
    t = DyadicTrie(1, 2)
    b = DyadicBox(("0",), 2)
    assert t.insert(b)
    assert not t.insert(b)
    assert len(t) == 1
    assert b in t
    assert DyadicBox(("00",), 2) not in t
    assert DyadicBox(("",), 2) not in t
    assert DyadicBox(("1",), 2) not in t
    with pytest.raises(SchemaError):
        t.insert(DyadicBox(("0", "1"), 2))


def test_iteration_recovers_boxes():
    t = DyadicTrie(2, 2)
    boxes = {DyadicBox(p, 2) for p in [("", "1"), ("0", ""), ("01", "10"), ("", "")]}
    for b in boxes:
        t.insert(b)
    assert set(t) == boxes


def test_covering_examples():
    js = JoinSchema(("a",), 2, (TableSchema("T", (0,)),))
    idx = GapBoxIndex(js)
    idx.insert("T", DyadicBox(("1",), 2))
    assert idx.covering_boxes((3,)) == [("T", DyadicBox(("1",), 2))]
    assert idx.covering_boxes((0,)) == []


@pytest.mark.parametrize("d, L", [(1, 3), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_covering_matches_filter_exhaustive(d, L):
    rng = random.Random(d * 7 + L)
    everything = all_dyadic_boxes(d, L)
    t = DyadicTrie(d, L)
    stored = rng.sample(everything, min(len(everything), 40))
    for b in stored:
        t.insert(b)
    for p in product(range(1 << L), repeat=d):
        expected = {b for b in stored if dyadic_contains_point(b, p)}
        assert set(t.covering(p)) == expected


def test_covering_matches_filter_random_large():
    rng = random.Random(5)
    d, L = 4, 6
    stored = []
    for _ in range(300):
        stored.append(DyadicBox(tuple(
            format(rng.randrange(1 << ell), f"0{ell}b") if ell else ""
            for ell in (rng.randint(0, L) for _ in range(d))), L))
    t = DyadicTrie(d, L)
    for b in stored:
        t.insert(b)
    for _ in range(300):
        p = tuple(rng.randrange(1 << L) for _ in range(d))
        assert set(t.covering(p)) == {b for b in set(stored) if dyadic_contains_point(b, p)}


def test_uncovered_iff_join_row():
    rng = random.Random(9)
    for _ in range(40):
        schema, rels = random_join(rng, rng.randint(2, 3), rng.randint(1, 2), rng.randint(1, 3), 6, planted=1)
        idx = build_index(schema, rels)
        join, _ = exact_join(rels, schema)
        for p in product(range(schema.n), repeat=schema.d):
            assert (not idx.covering_boxes(p)) == (p in join)


def test_file_roundtrip():
    rng = random.Random(2)
    schema, rels = random_join(rng, 3, 2, 3, 5)
    idx = build_index(schema, rels)
    text = idx.dumps()
    assert text.startswith("welltris-index v1 d=3 L=2\n")
    again = GapBoxIndex.loads(text, schema.attributes)
    for ts in schema.tables:
        assert set(again.boxes(ts.name)) == set(idx.boxes(ts.name))
        assert again.schema.table(ts.name).attrs == ts.attrs
    assert again.dumps() == text
    assert "λ" not in text


@pytest.mark.parametrize("text", [
    "",
    "not-an-index\n",
    "welltris-index v1 d=2\n",
    "welltris-index v1 d=1 L=2\n0\n",
    "welltris-index v1 d=1 L=2\ntable T attrs=0\n012\n",
    "welltris-index v1 d=1 L=2\ntable T attrs=0\n0,1\n",
])
def test_malformed_index(text):
    with pytest.raises(IndexFormatError):
        GapBoxIndex.loads(text)
