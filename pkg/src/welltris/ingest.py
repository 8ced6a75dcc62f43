"""CSV loading and dictionary encoding onto the shared lattice."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .core import JoinSchema, SchemaError, TableSchema


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class RawTable:
    name: str
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]


@dataclass
class DomainEncoding:
    L: int
    values: dict[str, list[str]]  # attribute -> code-ordered values
    codes: dict[str, dict[str, int]]

    @property
    def n(self) -> int:
        return 1 << self.L

    def encode(self, attr: str, value: str) -> int:
        try:
            return self.codes[attr][value]
        except KeyError:
            raise IngestError(f"value {value!r} of attribute {attr!r} is not in the encoding") from None

    def decode(self, attr: str, code: int) -> str:
        vals = self.values[attr]
        if code >= len(vals):
            # dead code: a lattice slot with no domain value behind it
            raise IngestError(f"code {code} of attribute {attr!r} has no value")
        return vals[code]

    @classmethod
    def from_values(cls, L: int, values: dict[str, list[str]]) -> "DomainEncoding":
        codes = {a: {v: i for i, v in enumerate(vs)} for a, vs in values.items()}
        return cls(L, {a: list(vs) for a, vs in values.items()}, codes)


@dataclass(frozen=True)
class Relation:
    schema: TableSchema
    rows: frozenset[tuple[int, ...]]
    L: int

    @property
    def d(self) -> int:
        return self.schema.d


def parse_csv(text: str, name: str) -> RawTable:
    lines = [ln.rstrip("\r") for ln in text.split("\n")]
    while lines and not lines[-1]:
        lines.pop()
    if not lines or not lines[0].strip():
        raise IngestError(f"{name}: empty header")
    header = tuple(c.strip() for c in lines[0].split(","))
    if any(not c for c in header):
        raise IngestError(f"{name}: empty column name")
    if len(set(header)) != len(header):
        raise IngestError(f"{name}: duplicate column name")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = tuple(c.strip() for c in line.split(","))
        if len(cells) != len(header):
            raise IngestError(f"{name}:{lineno}: expected {len(header)} fields, got {len(cells)}")
        rows.append(cells)
    return RawTable(name, header, tuple(rows))


def read_csv(path: str | os.PathLike) -> RawTable:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    name = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    return parse_csv(text, name)


def build_encoding(tables: list[RawTable]) -> tuple[JoinSchema, DomainEncoding]:
    """Assign dense first-seen codes per attribute and size the lattice.

    ``n`` is the smallest power of two (at least 2) that holds the largest
    per-attribute distinct count.
    """
    if len({t.name for t in tables}) != len(tables):
        raise IngestError("table names must be unique")
    values: dict[str, list[str]] = {}
    seen: dict[str, set[str]] = {}
    for t in tables:
        for attr in t.header:
            values.setdefault(attr, [])
            seen.setdefault(attr, set())
        for row in t.rows:
            for attr, v in zip(t.header, row):
                if v not in seen[attr]:
                    seen[attr].add(v)
                    values[attr].append(v)
    if not values:
        raise IngestError("no attributes")
    widest = max(len(v) for v in values.values())
    L = max(1, (widest - 1).bit_length())
    attributes = tuple(sorted(values))
    position = {a: i for i, a in enumerate(attributes)}
    schemas = []
    for t in tables:
        schemas.append(TableSchema(t.name, tuple(sorted(position[a] for a in t.header)), len(t.rows)))
    try:
        schema = JoinSchema(attributes, L, tuple(schemas))
    except SchemaError as exc:
        raise IngestError(str(exc)) from exc
    return schema, DomainEncoding.from_values(L, values)


def encode_relation(table: RawTable, schema: JoinSchema, encoding: DomainEncoding) -> Relation:
    ts = schema.table(table.name)
    # columns reordered into global attribute order
    order = sorted(range(len(table.header)), key=lambda i: schema.attributes.index(table.header[i]))
    rows = set()
    for row in table.rows:
        rows.add(tuple(encoding.encode(table.header[i], row[i]) for i in order))
    return Relation(ts, frozenset(rows), schema.L)


def load_tables(paths) -> tuple[JoinSchema, DomainEncoding, list[Relation]]:
    raw = [read_csv(p) for p in paths]
    schema, encoding = build_encoding(raw)
    return schema, encoding, [encode_relation(t, schema, encoding) for t in raw]
