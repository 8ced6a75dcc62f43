"""Welltris: join-size estimation and uniform join sampling over a gap-box index.

Each round draws points uniformly from the region left uncovered by the
selected boxes ``E``. If some drawn point lies in a gap box, every gap box
covering it joins ``E`` and the round repeats. Otherwise the uncovered volume
is returned. Gap boxes never cover a join row, so the uncovered volume is
always an upper bound on the join size.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from . import klee
from .core import AxisBox, dyadic_to_axis
from .trie import GapBoxIndex, serialize


class EmptyJoinError(RuntimeError):
    """Every lattice point got covered before enough join rows were accepted."""


@dataclass(frozen=True)
class EstimatorConfig:
    epsilon: float = 0.5
    delta: float = 0.1
    seed: int = 0
    k_override: int | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.k_override is not None and self.k_override < 1:
            raise ValueError("k_override must be positive")


@dataclass(frozen=True)
class Estimate:
    value: int
    epsilon: float
    delta: float
    seed: int
    iterations: int
    boxes_in_E: int
    samples_drawn: int
    k_used: int
    max_growth: int = 0  # most boxes added to E in one round

    def as_dict(self) -> dict:
        return {
            "estimate": self.value,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "seed": self.seed,
            "iterations": self.iterations,
            "boxes_in_E": self.boxes_in_E,
            "samples_drawn": self.samples_drawn,
            "k_used": self.k_used,
        }


def sample_budget(epsilon: float, delta: float, bd_count: int) -> int:
    """Points drawn per round: ceil(4/eps * (ln|B_d| + ln(1/delta))), at least 1."""
    if not epsilon > 0 or not 0 < delta <= 1:
        raise ValueError("need epsilon > 0 and 0 < delta <= 1")
    if bd_count < 1:
        raise ValueError("bd_count must be at least 1")
    return max(1, math.ceil(4 / epsilon * (math.log(bd_count) + math.log(1 / delta))))


@dataclass
class CoverState:
    """Selected gap boxes, lifted to the global space, and loop counters."""

    space: AxisBox
    keys: set[str] = field(default_factory=set)
    boxes: list[AxisBox] = field(default_factory=list)
    iteration: int = 0
    samples_drawn: int = 0
    max_growth: int = 0

    def add_covering(self, idx: GapBoxIndex, covering) -> int:
        added = 0
        for table, box in covering:
            g = idx.lifted(table, box)
            key = serialize(g)
            if key not in self.keys:
                self.keys.add(key)
                self.boxes.append(dyadic_to_axis(g))
                added += 1
        if added == 0:
            raise RuntimeError("covered point added no new box; E already covered it")
        self.iteration += 1
        self.max_growth = max(self.max_growth, added)
        return added


def _space(idx: GapBoxIndex) -> AxisBox:
    return AxisBox.space(idx.schema.d, idx.schema.L)


def is_join_row(idx: GapBoxIndex, p: Sequence[int]) -> bool:
    return not idx.covering_boxes(p)


def estimate_join_size(idx: GapBoxIndex, cfg: EstimatorConfig, backend: str | None = None) -> Estimate:
    bd = idx.box_count
    if bd == 0:
        return Estimate(idx.schema.space_volume, cfg.epsilon, cfg.delta, cfg.seed, 0, 0, 0, 0)
    k = cfg.k_override or sample_budget(cfg.epsilon, cfg.delta, bd)
    rng = random.Random(cfg.seed)
    state = CoverState(_space(idx))
    while True:
        draw = klee.draw_uniform_uncovered(state.boxes, state.space, k, rng, backend)
        if draw.coverage_complete:
            value = 0
            break
        state.samples_drawn += k
        for p in draw.points:
            covering = idx.covering_boxes(p)
            if covering:
                state.add_covering(idx, covering)
                break
        else:
            value = draw.uncovered
            break
    return Estimate(value, cfg.epsilon, cfg.delta, cfg.seed, state.iteration, len(state.boxes),
                    state.samples_drawn, k, state.max_growth)


def sample_join_rows(idx: GapBoxIndex, q: int, cfg: EstimatorConfig,
                     backend: str | None = None) -> list[tuple[int, ...]]:
    """``q`` join rows drawn uniformly with replacement, by rejection from the uncovered region.

    Raises ``EmptyJoinError`` when the join turns out to be empty.
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    rng = random.Random(cfg.seed)
    state = CoverState(_space(idx))
    accepted: list[tuple[int, ...]] = []
    while len(accepted) < q:
        draw = klee.draw_uniform_uncovered(state.boxes, state.space, q, rng, backend)
        if draw.coverage_complete:
            raise EmptyJoinError("the join is empty")
        state.samples_drawn += q
        hits = []
        grown = False
        for p in draw.points:
            covering = idx.covering_boxes(p)
            if not covering:
                hits.append(p)
            elif not grown:
                state.add_covering(idx, covering)
                grown = True
        # points arrive in rank order; truncating without a shuffle would favour low ranks
        rng.shuffle(hits)
        accepted.extend(hits[: q - len(accepted)])
    return accepted
