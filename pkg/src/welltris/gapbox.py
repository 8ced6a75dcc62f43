"""Dyadic gap box construction for a single table."""

from __future__ import annotations

from itertools import product

from .core import DyadicBox, JoinSchema, bits
from .ingest import Relation
from .trie import GapBoxIndex


def flip_neighbors(prefixes: tuple[str, ...]) -> list[tuple[str, ...]]:
    """Flip the last bit of each non-λ dimension, one dimension at a time."""
    out = []
    for a, p in enumerate(prefixes):
        if p:
            flipped = p[:-1] + ("1" if p[-1] == "0" else "0")
            out.append(prefixes[:a] + (flipped,) + prefixes[a + 1:])
    return out


def construct_gap_boxes(r: Relation) -> set[DyadicBox]:
    """Table-local dyadic gap boxes including every maximal one.

    Every dyadic box holding a tuple goes into ``D``; its last-bit-flip
    neighbours go into ``D2``; the answer is ``D2 - D``. An empty table
    yields the all-λ box since the whole space is a gap.
    """
    L, d = r.L, r.d
    if not r.rows:
        return {DyadicBox(("",) * d, L)}
    D: set[tuple[str, ...]] = set()
    D2: set[tuple[str, ...]] = set()
    for row in r.rows:
        choices = []
        for x in row:
            s = bits(x, L)
            choices.append([s[:ell] for ell in range(L + 1)])
        for b in product(*choices):
            if b in D:
                continue
            D.add(b)
            D2.update(flip_neighbors(b))
    return {DyadicBox(b, L) for b in D2 - D}


def gap_box_count_bound(r: Relation) -> int:
    return len(r.rows) * r.d * (r.L + 1) ** r.d


def build_index(schema: JoinSchema, relations) -> GapBoxIndex:
    """Preprocess every table into one gap-box index."""
    return GapBoxIndex.build(schema, {r.schema.name: construct_gap_boxes(r) for r in relations})
