"""Dyadic tree: a trie over box strings in the alphabet {0, 1, λ, ','}.

Each table gets its own trie of table-local boxes. Point coverage walks the
trie one dimension at a time: at each dimension the walk may take λ, or
follow the coordinate's bits for any number of steps, and then it must cross
the comma into the next dimension.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .core import LAMBDA, DyadicBox, JoinSchema, SchemaError, TableSchema, bits, lift_to_global

COMMA = ","
FILE_LAMBDA = "_"
MAGIC = "welltris-index v1"


class IndexFormatError(ValueError):
    pass


def serialize(box: DyadicBox, lam: str = LAMBDA) -> str:
    return COMMA.join(p or lam for p in box.prefixes)


def parse(text: str, L: int, lam: str = LAMBDA) -> DyadicBox:
    parts = text.split(COMMA)
    return DyadicBox(tuple("" if p == lam else p for p in parts), L)


def _symbols(box: DyadicBox) -> Iterator[str]:
    for i, p in enumerate(box.prefixes):
        if i:
            yield COMMA
        if p:
            yield from p
        else:
            yield LAMBDA


class _Node:
    __slots__ = ("children", "terminal")

    def __init__(self):
        self.children: dict[str, _Node] = {}
        self.terminal = False


class DyadicTrie:
    """Set of same-dimension dyadic boxes keyed by their string form."""

    def __init__(self, d: int, L: int):
        self.d = d
        self.L = L
        self.root = _Node()
        self.size = 0

    def _check(self, box: DyadicBox):
        if box.d != self.d or box.L != self.L:
            raise SchemaError(f"box {box} does not match trie d={self.d}, L={self.L}")

    def insert(self, box: DyadicBox) -> bool:
        self._check(box)
        node = self.root
        for sym in _symbols(box):
            node = node.children.setdefault(sym, _Node())
        if node.terminal:
            return False
        node.terminal = True
        self.size += 1
        return True

    def __contains__(self, box: DyadicBox) -> bool:
        if box.d != self.d or box.L != self.L:
            return False
        node = self.root
        for sym in _symbols(box):
            node = node.children.get(sym)
            if node is None:
                return False
        return node.terminal

    def __len__(self):
        return self.size

    def __iter__(self) -> Iterator[DyadicBox]:
        stack = [(self.root, [""])]
        while stack:
            node, parts = stack.pop()
            if node.terminal:
                yield DyadicBox(tuple(parts), self.L)
            for sym, child in node.children.items():
                if sym == COMMA:
                    stack.append((child, parts + [""]))
                elif sym == LAMBDA:
                    stack.append((child, parts))
                else:
                    stack.append((child, parts[:-1] + [parts[-1] + sym]))

    def covering(self, p: Sequence[int]) -> list[DyadicBox]:
        """Stored boxes containing the local point ``p``."""
        if len(p) != self.d:
            raise SchemaError(f"point has {len(p)} dims, trie has {self.d}")
        coords = [bits(x, self.L) for x in p]
        found = []
        last = self.d - 1

        def visit(node: _Node, dim: int, prefixes: list[str]):
            # ends of this dimension: (node after the prefix, prefix)
            ends = []
            lam = node.children.get(LAMBDA)
            if lam is not None:
                ends.append((lam, ""))
            s = coords[dim]
            cur = node
            for ell in range(self.L):
                cur = cur.children.get(s[ell])
                if cur is None:
                    break
                ends.append((cur, s[: ell + 1]))
            for end, prefix in ends:
                if dim == last:
                    if end.terminal:
                        found.append(DyadicBox(tuple(prefixes + [prefix]), self.L))
                else:
                    nxt = end.children.get(COMMA)
                    if nxt is not None:
                        visit(nxt, dim + 1, prefixes + [prefix])

        visit(self.root, 0, [])
        return found


@dataclass
class GapBoxIndex:
    """Per-table tries of table-local gap boxes plus the global schema."""

    schema: JoinSchema
    tries: dict[str, DyadicTrie] = field(default_factory=dict)

    def __post_init__(self):
        for t in self.schema.tables:
            self.tries.setdefault(t.name, DyadicTrie(t.d, self.schema.L))

    @property
    def box_count(self) -> int:
        return sum(len(t) for t in self.tries.values())

    def _trie(self, table: str) -> DyadicTrie:
        try:
            return self.tries[table]
        except KeyError:
            raise SchemaError(f"unknown table {table!r}") from None

    def insert(self, table: str, box: DyadicBox) -> bool:
        return self._trie(table).insert(box)

    def contains(self, table: str, box: DyadicBox) -> bool:
        return box in self._trie(table)

    def boxes(self, table: str) -> list[DyadicBox]:
        return sorted(self._trie(table), key=serialize)

    def covering_boxes(self, p: Sequence[int]) -> list[tuple[str, DyadicBox]]:
        if len(p) != self.schema.d:
            raise SchemaError(f"point has {len(p)} dims, schema has {self.schema.d}")
        out = []
        for ts in self.schema.tables:
            local = tuple(p[a] for a in ts.attrs)
            out.extend((ts.name, b) for b in self.tries[ts.name].covering(local))
        return out

    def lifted(self, table: str, box: DyadicBox) -> DyadicBox:
        return lift_to_global(box, self.schema.table(table), self.schema)

    @classmethod
    def build(cls, schema: JoinSchema, boxes: dict[str, Iterable[DyadicBox]]) -> "GapBoxIndex":
        idx = cls(schema)
        for table, bs in boxes.items():
            for b in bs:
                idx.insert(table, b)
        return idx

    def dumps(self) -> str:
        out = io.StringIO()
        out.write(f"{MAGIC} d={self.schema.d} L={self.schema.L}\n")
        for ts in self.schema.tables:
            out.write(f"table {ts.name} attrs={','.join(map(str, ts.attrs))}\n")
            for s in sorted(serialize(b, FILE_LAMBDA) for b in self.tries[ts.name]):
                out.write(s + "\n")
        return out.getvalue()

    def save(self, path: str | os.PathLike):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str, attributes: Sequence[str] | None = None) -> "GapBoxIndex":
        lines = text.splitlines()
        if not lines or not lines[0].startswith(MAGIC + " "):
            raise IndexFormatError("missing welltris-index header")
        try:
            fields = dict(kv.split("=", 1) for kv in lines[0][len(MAGIC) + 1:].split())
            d, L = int(fields["d"]), int(fields["L"])
        except (ValueError, KeyError) as exc:
            raise IndexFormatError(f"bad header: {lines[0]!r}") from exc
        tables: list[tuple[TableSchema, list[str]]] = []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            if line.startswith("table "):
                parts = line.split()
                if len(parts) != 3 or not parts[2].startswith("attrs="):
                    raise IndexFormatError(f"line {lineno}: bad table line {line!r}")
                try:
                    attrs = tuple(int(a) for a in parts[2][len("attrs="):].split(","))
                    tables.append((TableSchema(parts[1], attrs), []))
                except (ValueError, SchemaError) as exc:
                    raise IndexFormatError(f"line {lineno}: {exc}") from exc
            elif not tables:
                raise IndexFormatError(f"line {lineno}: box before any table line")
            else:
                tables[-1][1].append(line)
        if attributes is None:
            attributes = [f"a{i:0{len(str(d))}d}" for i in range(d)]
        if len(attributes) != d:
            raise IndexFormatError(f"{len(attributes)} attribute names for d={d}")
        try:
            schema = JoinSchema(tuple(attributes), L, tuple(t for t, _ in tables))
            idx = cls(schema)
            for ts, lines_ in tables:
                for s in lines_:
                    idx.insert(ts.name, parse(s, L, FILE_LAMBDA))
        except SchemaError as exc:
            raise IndexFormatError(str(exc)) from exc
        return idx

    @classmethod
    def load(cls, path: str | os.PathLike, attributes: Sequence[str] | None = None) -> "GapBoxIndex":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read(), attributes)
