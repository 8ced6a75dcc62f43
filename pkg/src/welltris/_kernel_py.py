"""Pure-Python measure/sample recursion (fallback for the compiled kernel).

Boxes and cells are half-open integer boxes given as ``(lo, hi)`` tuples.
``sample`` walks the same recursion as ``measure`` and, at each leaf, turns
the ranks in ``(offset, offset + leaf_count]`` into uncovered points.
"""

from bisect import bisect_right
from itertools import combinations

LEAF_SIZE = 4


def _volume(lo, hi):
    v = 1
    for a, b in zip(lo, hi):
        v *= b - a
    return v


def _clip(boxes, lo, hi):
    out = []
    for blo, bhi in boxes:
        nlo = tuple(max(a, c) for a, c in zip(blo, lo))
        nhi = tuple(min(b, c) for b, c in zip(bhi, hi))
        if all(a < b for a, b in zip(nlo, nhi)):
            out.append((nlo, nhi))
    return out


def union_volume(boxes):
    """Inclusion-exclusion over all nonempty subsets; meant for a handful of boxes."""
    total = 0
    for r in range(1, len(boxes) + 1):
        sign = 1 if r % 2 else -1
        for group in combinations(boxes, r):
            lo = tuple(max(c) for c in zip(*(g[0] for g in group)))
            hi = tuple(min(c) for c in zip(*(g[1] for g in group)))
            if all(a < b for a, b in zip(lo, hi)):
                total += sign * _volume(lo, hi)
    return total


def _breaks(active, lo, hi, dim):
    cuts = {lo[dim], hi[dim]}
    for blo, bhi in active:
        cuts.add(blo[dim])
        cuts.add(bhi[dim])
    cuts = sorted(cuts)
    return list(zip(cuts, cuts[1:]))


def _count(active, lo, hi, dim):
    # uncovered points in dims dim.. given boxes still covering the fixed prefix
    if not active:
        return _volume(lo[dim:], hi[dim:])
    if dim == len(lo):
        return 0
    total = 0
    for a, b in _breaks(active, lo, hi, dim):
        sub = [bx for bx in active if bx[0][dim] <= a and b <= bx[1][dim]]
        total += (b - a) * _count(sub, lo, hi, dim + 1)
    return total


def _select(active, lo, hi, j, dim):
    """The j-th (0-based) uncovered point of the cell in lexicographic order."""
    d = len(lo)
    if not active:
        coords = []
        for k in range(d - 1, dim - 1, -1):
            w = hi[k] - lo[k]
            coords.append(lo[k] + j % w)
            j //= w
        return tuple(reversed(coords))
    for a, b in _breaks(active, lo, hi, dim):
        sub = [bx for bx in active if bx[0][dim] <= a and b <= bx[1][dim]]
        per = _count(sub, lo, hi, dim + 1)
        if per == 0:
            continue
        span = per * (b - a)
        if j < span:
            return (a + j // per,) + _select(sub, lo, hi, j % per, dim + 1)
        j -= span
    raise RuntimeError("rank exceeds uncovered count of leaf cell")


def _slab_removals(boxes, lo, hi):
    """Per dimension, merged intervals covered by boxes spanning every other dimension."""
    d = len(lo)
    removals = []
    for k in range(d):
        slabs = sorted(
            (blo[k], bhi[k])
            for blo, bhi in boxes
            if all(blo[j] == lo[j] and bhi[j] == hi[j] for j in range(d) if j != k)
        )
        merged = []
        for a, b in slabs:
            if merged and a <= merged[-1][1]:
                if b > merged[-1][1]:
                    merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        removals.append(merged)
    return removals


def _squeeze(x, removed):
    shift = 0
    for a, b in removed:
        if a >= x:
            break
        shift += min(x, b) - a
    return x - shift


def _unsqueeze(y, removed):
    for a, b in removed:
        if y >= a:
            y += b - a
        else:
            break
    return y


def _simplify(boxes, lo, hi, removals):
    d = len(lo)
    nhi = tuple(_squeeze(hi[k], removals[k]) for k in range(d))
    out = []
    for blo, bhi in boxes:
        slo = tuple(_squeeze(blo[k], removals[k]) for k in range(d))
        shi = tuple(_squeeze(bhi[k], removals[k]) for k in range(d))
        if all(a < b for a, b in zip(slo, shi)):
            out.append((slo, shi))
    return out, nhi


def _choose_cut(boxes, lo, hi, depth):
    d = len(lo)
    for t in range(d):
        k = (depth + t) % d
        ends = sorted({e for blo, bhi in boxes for e in (blo[k], bhi[k]) if lo[k] < e < hi[k]})
        if ends:
            return k, ends[len(ends) // 2]
    for t in range(d):
        k = (depth + t) % d
        if hi[k] - lo[k] >= 2:
            return k, (lo[k] + hi[k]) // 2
    raise RuntimeError("cannot cut a unit cell")


def _recurse(boxes, lo, hi, depth, ranks, offset, out):
    boxes = _clip(boxes, lo, hi)
    for blo, bhi in boxes:
        if blo == lo and bhi == hi:
            return 0
    if len(boxes) > LEAF_SIZE:
        removals = _slab_removals(boxes, lo, hi)
        if any(removals):
            boxes, hi = _simplify(boxes, lo, hi, removals)
            if any(a >= b for a, b in zip(lo, hi)):
                return 0
            start = len(out)
            count = _recurse(boxes, lo, hi, depth, ranks, offset, out)
            for i in range(start, len(out)):
                p = out[i]
                out[i] = tuple(_unsqueeze(x, removals[k]) for k, x in enumerate(p))
            return count
    if len(boxes) <= LEAF_SIZE:
        count = _volume(lo, hi) - union_volume(boxes)
        if ranks:
            i0 = bisect_right(ranks, offset)
            i1 = bisect_right(ranks, offset + count)
            for r in ranks[i0:i1]:
                out.append(_select(boxes, lo, hi, r - offset - 1, 0))
        return count
    k, c = _choose_cut(boxes, lo, hi, depth)
    left_hi = hi[:k] + (c,) + hi[k + 1:]
    right_lo = lo[:k] + (c,) + lo[k + 1:]
    n1 = _recurse(boxes, lo, left_hi, depth + 1, ranks, offset, out)
    n2 = _recurse(boxes, right_lo, hi, depth + 1, ranks, offset + n1, out)
    return n1 + n2


def measure(boxes, lo, hi):
    """Number of lattice points of the cell ``[lo, hi)`` covered by no box."""
    return _recurse(list(boxes), tuple(lo), tuple(hi), 0, None, 0, [])


def sample(boxes, lo, hi, ranks, offset=0):
    """Return ``(count, points)``; one point per rank in ``(offset, offset + count]``.

    ``ranks`` must be sorted ascending; points come back in rank order.
    """
    out = []
    count = _recurse(list(boxes), tuple(lo), tuple(hi), 0, list(ranks), offset, out)
    return count, out
