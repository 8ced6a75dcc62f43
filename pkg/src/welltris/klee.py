"""Counting and uniformly sampling lattice points not covered by a box set.

The recursion simplifies away slabs, cuts the cell in two and recurses; leaves
with at most four boxes are solved by inclusion-exclusion. Sampling reruns the
same recursion with a sorted list of ranks, so each rank lands in exactly one
leaf and becomes one uncovered point there.

Two kernels implement the recursion: the compiled ``_kernel`` extension and
the pure-Python ``_kernel_py``. The extension is used when it imports and the
cell volume fits its int64 arithmetic; set ``WELLTRIS_PURE_PYTHON=1`` to force
the fallback.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from . import _kernel_py
from .core import AxisBox, SchemaError

try:
    if os.environ.get("WELLTRIS_PURE_PYTHON") == "1":
        raise ImportError("pure Python requested")
    from . import _kernel as _ckernel
except ImportError:
    _ckernel = None

BACKEND = "cython" if _ckernel is not None else "python"
LEAF_SIZE = _kernel_py.LEAF_SIZE


class RankError(RuntimeError):
    """A rank fell outside the uncovered count; measure and sample disagree."""


@dataclass(frozen=True)
class Cell:
    """A cell plus the slab intervals removed from it, per dimension.

    ``removed[k]`` holds sorted disjoint intervals in pre-removal coordinates;
    ``to_original`` maps a point of the squeezed cell back.
    """

    box: AxisBox
    removed: tuple[tuple[tuple[int, int], ...], ...] = ()

    def to_original(self, p: Sequence[int]) -> tuple[int, ...]:
        if not self.removed:
            return tuple(p)
        return tuple(_kernel_py._unsqueeze(x, rem) for x, rem in zip(p, self.removed))


def _kernel_for(S: AxisBox, backend: str | None):
    if backend == "python":
        return _kernel_py
    if backend == "cython":
        if _ckernel is None:
            raise RuntimeError("compiled kernel is not available")
        if S.volume >= _ckernel.MAX_VOLUME:
            raise OverflowError("cell volume exceeds the compiled kernel's int64 range")
        return _ckernel
    if backend is not None:
        raise ValueError(f"unknown backend {backend!r}")
    if _ckernel is not None and S.volume < _ckernel.MAX_VOLUME:
        return _ckernel
    return _kernel_py


def _unpack(B: Sequence[AxisBox], S: AxisBox | Cell):
    cell = S if isinstance(S, Cell) else Cell(S)
    box = cell.box
    for b in B:
        if b.d != box.d:
            raise SchemaError(f"box {b} does not match cell dimensionality {box.d}")
    return cell, [(b.lo, b.hi) for b in B]


def measure(B: Sequence[AxisBox], S: AxisBox | Cell, backend: str | None = None) -> int:
    """Count the lattice points of ``S`` covered by no box of ``B``."""
    cell, boxes = _unpack(B, S)
    return _kernel_for(cell.box, backend).measure(boxes, cell.box.lo, cell.box.hi)


def sample(B: Sequence[AxisBox], S: AxisBox | Cell, R: Sequence[int], V: int = 0,
           backend: str | None = None) -> tuple[int, list[tuple[int, ...]]]:
    """Materialize the ranks of ``R`` falling in ``(V, V + count]``.

    Returns ``(count, points)`` where ``count`` is the uncovered count of
    ``S``. Ranks above ``V + count`` raise ``RankError``; ranks at or below
    ``V`` belong to cells visited earlier and are skipped.
    """
    cell, boxes = _unpack(B, S)
    ranks = list(R)
    if any(a > b for a, b in zip(ranks, ranks[1:])):
        raise ValueError("ranks must be sorted ascending")
    count, points = _kernel_for(cell.box, backend).sample(boxes, cell.box.lo, cell.box.hi, ranks, V)
    if ranks and ranks[-1] > V + count:
        raise RankError(f"rank {ranks[-1]} exceeds uncovered count {count} (offset {V})")
    return count, [cell.to_original(p) for p in points]


def draw_ranks(total: int, k: int, rng: random.Random) -> list[int]:
    """``k`` ranks drawn uniformly with replacement from ``[1, total]``, sorted."""
    return sorted(rng.randint(1, total) for _ in range(k))


class Draw(NamedTuple):
    points: list[tuple[int, ...]]
    uncovered: int

    @property
    def coverage_complete(self) -> bool:
        return self.uncovered == 0


def draw_uniform_uncovered(B: Sequence[AxisBox], S: AxisBox | Cell, k: int, rng: random.Random,
                           backend: str | None = None) -> Draw:
    """Draw ``k`` uncovered points uniformly with replacement.

    Points come back in ascending rank order; repeated ranks give repeated
    points. If nothing is uncovered the result is empty.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    total = measure(B, S, backend)
    if total == 0:
        return Draw([], 0)
    count, points = sample(B, S, draw_ranks(total, k, rng), 0, backend)
    if count != total or len(points) != k:
        raise RankError("sampling pass disagrees with measuring pass")
    return Draw(points, total)
