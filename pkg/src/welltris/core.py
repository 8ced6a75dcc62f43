"""Points, dyadic boxes, axis boxes and join schemas on a 2^L lattice.

A dyadic box keeps one MSB-first bit prefix per dimension. The empty prefix
(``""``, printed as ``λ``) spans the whole dimension. Coordinates are 0-based
codes in ``[0, 2**L)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

LAMBDA = "λ"

Point = tuple  # d-vector of int codes


class SchemaError(ValueError):
    """Raised when boxes, points or tables disagree on dimensionality or L."""


def bits(code: int, L: int) -> str:
    """The L-bit MSB-first string of ``code``."""
    if not 0 <= code < (1 << L):
        raise SchemaError(f"code {code} does not fit in {L} bits")
    return format(code, f"0{L}b")


@dataclass(frozen=True)
class TableSchema:
    name: str
    attrs: tuple[int, ...]
    row_count: int = 0

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.attrs, self.attrs[1:])):
            raise SchemaError(f"table {self.name!r}: attrs must be strictly increasing")

    @property
    def d(self) -> int:
        return len(self.attrs)


@dataclass(frozen=True)
class JoinSchema:
    attributes: tuple[str, ...]
    L: int
    tables: tuple[TableSchema, ...] = ()

    def __post_init__(self):
        if self.L < 1:
            raise SchemaError("L must be at least 1")
        if list(self.attributes) != sorted(self.attributes):
            raise SchemaError("attributes must be in lexicographic order")
        if len(set(self.attributes)) != len(self.attributes):
            raise SchemaError("duplicate attribute name")
        if self.tables:
            covered = set()
            for t in self.tables:
                if any(not 0 <= a < self.d for a in t.attrs):
                    raise SchemaError(f"table {t.name!r} references unknown attribute")
                covered.update(t.attrs)
            if covered != set(range(self.d)):
                raise SchemaError("tables do not cover every attribute")

    @property
    def d(self) -> int:
        return len(self.attributes)

    @property
    def n(self) -> int:
        return 1 << self.L

    @property
    def space_volume(self) -> int:
        return self.n ** self.d

    def table(self, name: str) -> TableSchema:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)


@dataclass(frozen=True)
class DyadicBox:
    """One bit prefix per dimension; ``""`` is λ."""

    prefixes: tuple[str, ...]
    L: int

    def __post_init__(self):
        for p in self.prefixes:
            if len(p) > self.L or p.strip("01"):
                raise SchemaError(f"invalid prefix {p!r} for L={self.L}")

    @classmethod
    def of(cls, *prefixes: str, L: int) -> "DyadicBox":
        return cls(tuple("" if p == LAMBDA else p for p in prefixes), L)

    @property
    def d(self) -> int:
        return len(self.prefixes)

    @property
    def volume(self) -> int:
        v = 1
        for p in self.prefixes:
            v <<= self.L - len(p)
        return v

    def __str__(self):
        return "(" + ",".join(p or LAMBDA for p in self.prefixes) + ")"


@dataclass(frozen=True)
class AxisBox:
    """Half-open integer hyperrectangle ``[lo_i, hi_i)`` per dimension."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise SchemaError("lo/hi dimensionality mismatch")
        if any(a >= b for a, b in zip(self.lo, self.hi)):
            raise SchemaError(f"empty interval in {self}")

    @classmethod
    def from_intervals(cls, intervals: Iterable[tuple[int, int]]) -> "AxisBox":
        intervals = list(intervals)
        return cls(tuple(a for a, _ in intervals), tuple(b for _, b in intervals))

    @classmethod
    def space(cls, d: int, L: int) -> "AxisBox":
        return cls((0,) * d, (1 << L,) * d)

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def intervals(self) -> list[tuple[int, int]]:
        return list(zip(self.lo, self.hi))

    @property
    def volume(self) -> int:
        v = 1
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v

    def contains(self, p: Sequence[int]) -> bool:
        return all(a <= x < b for a, x, b in zip(self.lo, p, self.hi))


def _check(box: DyadicBox, d: int, L: int):
    if box.d != d or box.L != L:
        raise SchemaError(f"box {box} has d={box.d}, L={box.L}; expected d={d}, L={L}")


def dyadic_contains_point(box: DyadicBox, p: Sequence[int], L: int | None = None) -> bool:
    L = box.L if L is None else L
    _check(box, len(p), L)
    for prefix, x in zip(box.prefixes, p):
        if prefix and not bits(x, L).startswith(prefix):
            return False
    return True


def dyadic_contains_box(outer: DyadicBox, inner: DyadicBox) -> bool:
    _check(outer, inner.d, inner.L)
    return all(b.startswith(a) for a, b in zip(outer.prefixes, inner.prefixes))


def prefix_interval(prefix: str, L: int) -> tuple[int, int]:
    width = 1 << (L - len(prefix))
    start = int(prefix, 2) * width if prefix else 0
    return start, start + width


def dyadic_to_axis(box: DyadicBox) -> AxisBox:
    return AxisBox.from_intervals(prefix_interval(p, box.L) for p in box.prefixes)


def enumerate_containing_dyadic(p: Sequence[int], L: int, dims: Iterable[int] | None = None) -> list[DyadicBox]:
    """Every dyadic box holding ``p`` whose non-λ dimensions lie within ``dims``.

    Returns ``(L+1)**len(dims)`` boxes; dimensions outside ``dims`` are λ.
    """
    d = len(p)
    dims = range(d) if dims is None else sorted(set(dims))
    if not dims:
        raise SchemaError("dims must be nonempty")
    choices = []
    for i in range(d):
        if i in dims:
            s = bits(p[i], L)
            choices.append([s[:ell] for ell in range(L + 1)])
        else:
            choices.append([""])
    return [DyadicBox(tuple(c), L) for c in product(*choices)]


def lift_to_global(box: DyadicBox, ts: TableSchema, js: JoinSchema) -> DyadicBox:
    if box.d != ts.d:
        raise SchemaError(f"box {box} is not local to table {ts.name!r}")
    prefixes = [""] * js.d
    for attr, prefix in zip(ts.attrs, box.prefixes):
        prefixes[attr] = prefix
    return DyadicBox(tuple(prefixes), box.L)


def project(p: Sequence[int], ts: TableSchema) -> tuple[int, ...]:
    return tuple(p[a] for a in ts.attrs)
