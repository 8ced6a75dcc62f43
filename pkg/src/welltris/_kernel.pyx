# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled measure/sample recursion; same algorithm and output as _kernel_py.

Coordinates, volumes and ranks are int64. Callers must keep cell volumes
below MAX_VOLUME (inclusion-exclusion partial sums reach ~8x the volume).
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free, qsort
from libc.string cimport memcpy

ctypedef cnp.int64_t i64

cdef enum:
    LEAF_SIZE = 4
    MAX_BREAKS = 2 * LEAF_SIZE + 2

MAX_VOLUME = 1 << 58


cdef struct Ctx:
    int d
    i64* ranks
    Py_ssize_t nranks
    i64* out
    Py_ssize_t written


cdef int cmp_i64(const void* a, const void* b) noexcept nogil:
    cdef i64 x = (<i64*>a)[0]
    cdef i64 y = (<i64*>b)[0]
    return (x > y) - (x < y)


cdef int cmp_pair(const void* a, const void* b) noexcept nogil:
    cdef i64* x = <i64*>a
    cdef i64* y = <i64*>b
    if x[0] != y[0]:
        return (x[0] > y[0]) - (x[0] < y[0])
    return (x[1] > y[1]) - (x[1] < y[1])


cdef Py_ssize_t upper_bound(i64* a, Py_ssize_t n, i64 v) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef i64 volume(i64* lo, i64* hi, int start, int d) noexcept nogil:
    cdef i64 v = 1
    cdef int k
    for k in range(start, d):
        v *= hi[k] - lo[k]
    return v


cdef i64 union_volume(i64* boxes, int m, int d) noexcept nogil:
    cdef i64 total = 0, v
    cdef int mask, i, k, bitsset
    cdef i64 a, b, x
    for mask in range(1, 1 << m):
        v = 1
        bitsset = 0
        for i in range(m):
            if mask & (1 << i):
                bitsset += 1
        for k in range(d):
            a = -1
            b = -1
            for i in range(m):
                if mask & (1 << i):
                    x = boxes[i * 2 * d + k]
                    if a == -1 or x > a:
                        a = x
                    x = boxes[i * 2 * d + d + k]
                    if b == -1 or x < b:
                        b = x
            if a >= b:
                v = 0
                break
            v *= b - a
        if bitsset & 1:
            total += v
        else:
            total -= v
    return total


cdef int breaks(i64* boxes, int mask, int m, int d, i64* lo, i64* hi, int dim, i64* out) noexcept nogil:
    cdef int n = 0, i, j, u
    out[n] = lo[dim]; n += 1
    out[n] = hi[dim]; n += 1
    for i in range(m):
        if mask & (1 << i):
            out[n] = boxes[i * 2 * d + dim]; n += 1
            out[n] = boxes[i * 2 * d + d + dim]; n += 1
    qsort(out, n, sizeof(i64), cmp_i64)
    u = 1
    for j in range(1, n):
        if out[j] != out[u - 1]:
            out[u] = out[j]
            u += 1
    return u


cdef int sub_mask(i64* boxes, int mask, int m, int d, int dim, i64 a, i64 b) noexcept nogil:
    cdef int i, res = 0
    for i in range(m):
        if mask & (1 << i):
            if boxes[i * 2 * d + dim] <= a and b <= boxes[i * 2 * d + d + dim]:
                res |= 1 << i
    return res


cdef i64 leaf_count(i64* boxes, int mask, int m, int d, i64* lo, i64* hi, int dim) noexcept nogil:
    cdef i64 cuts[MAX_BREAKS]
    cdef int nc, j
    cdef i64 total = 0
    if mask == 0:
        return volume(lo, hi, dim, d)
    if dim == d:
        return 0
    nc = breaks(boxes, mask, m, d, lo, hi, dim, cuts)
    for j in range(nc - 1):
        total += (cuts[j + 1] - cuts[j]) * leaf_count(
            boxes, sub_mask(boxes, mask, m, d, dim, cuts[j], cuts[j + 1]), m, d, lo, hi, dim + 1)
    return total


cdef int leaf_select(i64* boxes, int mask, int m, int d, i64* lo, i64* hi, i64 j, int dim, i64* point) noexcept nogil:
    cdef i64 cuts[MAX_BREAKS]
    cdef int nc, t, k, sm
    cdef i64 per, span, w
    if mask == 0:
        for k in range(d - 1, dim - 1, -1):
            w = hi[k] - lo[k]
            point[k] = lo[k] + j % w
            j //= w
        return 0
    nc = breaks(boxes, mask, m, d, lo, hi, dim, cuts)
    for t in range(nc - 1):
        sm = sub_mask(boxes, mask, m, d, dim, cuts[t], cuts[t + 1])
        per = leaf_count(boxes, sm, m, d, lo, hi, dim + 1)
        if per == 0:
            continue
        span = per * (cuts[t + 1] - cuts[t])
        if j < span:
            point[dim] = cuts[t] + j // per
            return leaf_select(boxes, sm, m, d, lo, hi, j % per, dim + 1, point)
        j -= span
    return -1


cdef inline i64 squeeze(i64 x, i64* rem, int nrem) noexcept nogil:
    cdef i64 shift = 0
    cdef int i
    for i in range(nrem):
        if rem[2 * i] >= x:
            break
        shift += (x if x < rem[2 * i + 1] else rem[2 * i + 1]) - rem[2 * i]
    return x - shift


cdef inline i64 unsqueeze(i64 y, i64* rem, int nrem) noexcept nogil:
    cdef int i
    for i in range(nrem):
        if y >= rem[2 * i]:
            y += rem[2 * i + 1] - rem[2 * i]
        else:
            break
    return y


cdef i64 recurse(Ctx* ctx, i64* boxes, int nb, i64* lo, i64* hi, int depth, i64 offset) except -1:
    cdef int d = ctx.d
    cdef int stride = 2 * d
    cdef i64* cb = <i64*>malloc((nb if nb > 0 else 1) * stride * sizeof(i64))
    cdef i64* nhi = <i64*>malloc(d * sizeof(i64))
    cdef i64* rem = NULL
    cdef int* rem_start = NULL
    cdef int* rem_len = NULL
    cdef i64* ends = NULL
    cdef int m = 0, i, k, j, ok, full, nrem, total_rem, ne, u, cut_dim
    cdef i64 a, b, count, n1, n2, c = 0
    cdef Py_ssize_t i0, i1, r, start
    if cb == NULL or nhi == NULL:
        free(cb); free(nhi)
        raise MemoryError()
    try:
        # clip to the cell
        for i in range(nb):
            ok = 1
            full = 1
            for k in range(d):
                a = boxes[i * stride + k]
                b = boxes[i * stride + d + k]
                if a < lo[k]:
                    a = lo[k]
                if b > hi[k]:
                    b = hi[k]
                if a >= b:
                    ok = 0
                    break
                if a != lo[k] or b != hi[k]:
                    full = 0
                cb[m * stride + k] = a
                cb[m * stride + d + k] = b
            if ok:
                if full:
                    return 0
                m += 1

        if m > LEAF_SIZE:
            rem = <i64*>malloc(2 * m * d * sizeof(i64))
            rem_start = <int*>malloc(d * sizeof(int))
            rem_len = <int*>malloc(d * sizeof(int))
            if rem == NULL or rem_start == NULL or rem_len == NULL:
                raise MemoryError()
            total_rem = 0
            for k in range(d):
                rem_start[k] = total_rem
                nrem = 0
                for i in range(m):
                    ok = 1
                    for j in range(d):
                        if j != k and (cb[i * stride + j] != lo[j] or cb[i * stride + d + j] != hi[j]):
                            ok = 0
                            break
                    if ok:
                        rem[2 * (total_rem + nrem)] = cb[i * stride + k]
                        rem[2 * (total_rem + nrem) + 1] = cb[i * stride + d + k]
                        nrem += 1
                if nrem:
                    qsort(rem + 2 * total_rem, nrem, 2 * sizeof(i64), cmp_pair)
                    u = 0
                    for j in range(nrem):
                        a = rem[2 * (total_rem + j)]
                        b = rem[2 * (total_rem + j) + 1]
                        if u and a <= rem[2 * (total_rem + u - 1) + 1]:
                            if b > rem[2 * (total_rem + u - 1) + 1]:
                                rem[2 * (total_rem + u - 1) + 1] = b
                        else:
                            rem[2 * (total_rem + u)] = a
                            rem[2 * (total_rem + u) + 1] = b
                            u += 1
                    nrem = u
                rem_len[k] = nrem
                total_rem += nrem
            if total_rem:
                for k in range(d):
                    nhi[k] = squeeze(hi[k], rem + 2 * rem_start[k], rem_len[k])
                    if nhi[k] <= lo[k]:
                        return 0
                j = 0
                for i in range(m):
                    ok = 1
                    for k in range(d):
                        a = squeeze(cb[i * stride + k], rem + 2 * rem_start[k], rem_len[k])
                        b = squeeze(cb[i * stride + d + k], rem + 2 * rem_start[k], rem_len[k])
                        if a >= b:
                            ok = 0
                            break
                        cb[j * stride + k] = a
                        cb[j * stride + d + k] = b
                    if ok:
                        j += 1
                start = ctx.written
                count = recurse(ctx, cb, j, lo, nhi, depth, offset)
                for r in range(start, ctx.written):
                    for k in range(d):
                        ctx.out[r * d + k] = unsqueeze(ctx.out[r * d + k], rem + 2 * rem_start[k], rem_len[k])
                return count

        if m <= LEAF_SIZE:
            count = volume(lo, hi, 0, d) - union_volume(cb, m, d)
            if ctx.nranks:
                i0 = upper_bound(ctx.ranks, ctx.nranks, offset)
                i1 = upper_bound(ctx.ranks, ctx.nranks, offset + count)
                for r in range(i0, i1):
                    if leaf_select(cb, (1 << m) - 1, m, d, lo, hi, ctx.ranks[r] - offset - 1, 0,
                                   ctx.out + ctx.written * d) != 0:
                        raise RuntimeError("rank exceeds uncovered count of leaf cell")
                    ctx.written += 1
            return count

        ends = <i64*>malloc(2 * m * sizeof(i64))
        if ends == NULL:
            raise MemoryError()
        cut_dim = -1
        for j in range(d):
            k = (depth + j) % d
            ne = 0
            for i in range(m):
                a = cb[i * stride + k]
                b = cb[i * stride + d + k]
                if lo[k] < a < hi[k]:
                    ends[ne] = a; ne += 1
                if lo[k] < b < hi[k]:
                    ends[ne] = b; ne += 1
            if ne:
                qsort(ends, ne, sizeof(i64), cmp_i64)
                u = 1
                for i in range(1, ne):
                    if ends[i] != ends[u - 1]:
                        ends[u] = ends[i]
                        u += 1
                cut_dim = k
                c = ends[u // 2]
                break
        if cut_dim < 0:
            for j in range(d):
                k = (depth + j) % d
                if hi[k] - lo[k] >= 2:
                    cut_dim = k
                    c = (lo[k] + hi[k]) // 2
                    break
        if cut_dim < 0:
            raise RuntimeError("cannot cut a unit cell")
        memcpy(nhi, hi, d * sizeof(i64))
        nhi[cut_dim] = c
        n1 = recurse(ctx, cb, m, lo, nhi, depth + 1, offset)
        memcpy(nhi, lo, d * sizeof(i64))
        nhi[cut_dim] = c
        # nhi now holds the right cell's lo
        n2 = recurse(ctx, cb, m, nhi, hi, depth + 1, offset + n1)
        return n1 + n2
    finally:
        free(cb)
        free(nhi)
        free(rem)
        free(rem_start)
        free(rem_len)
        free(ends)


def _pack(boxes, lo, hi):
    lo_a = np.ascontiguousarray(lo, dtype=np.int64)
    hi_a = np.ascontiguousarray(hi, dtype=np.int64)
    d = lo_a.shape[0]
    rows = [tuple(blo) + tuple(bhi) for blo, bhi in boxes]
    box_a = np.ascontiguousarray(np.array(rows, dtype=np.int64).reshape(len(rows), 2 * d))
    return box_a, lo_a, hi_a


cdef i64 _run(i64[:, ::1] box_a, i64[::1] lo_a, i64[::1] hi_a,
              i64[::1] ranks, i64[:, ::1] out, i64 offset) except -1:
    cdef Ctx ctx
    cdef i64 dummy = 0
    ctx.d = lo_a.shape[0]
    ctx.nranks = ranks.shape[0]
    cdef i64* bp = &dummy
    ctx.ranks = &dummy
    ctx.out = &dummy
    if ctx.nranks:
        ctx.ranks = &ranks[0]
        ctx.out = &out[0, 0]
    if box_a.shape[0]:
        bp = &box_a[0, 0]
    ctx.written = 0
    return recurse(&ctx, bp, box_a.shape[0], &lo_a[0], &hi_a[0], 0, offset)


def measure(boxes, lo, hi):
    """Number of lattice points of the cell ``[lo, hi)`` covered by no box."""
    box_a, lo_a, hi_a = _pack(boxes, lo, hi)
    return int(_run(box_a, lo_a, hi_a, np.zeros(0, dtype=np.int64),
                    np.zeros((0, lo_a.shape[0]), dtype=np.int64), 0))


def sample(boxes, lo, hi, ranks, offset=0):
    """Return ``(count, points)``; one point per rank in ``(offset, offset + count]``."""
    box_a, lo_a, hi_a = _pack(boxes, lo, hi)
    rank_a = np.ascontiguousarray(ranks, dtype=np.int64)
    d = lo_a.shape[0]
    out = np.zeros((rank_a.shape[0], d), dtype=np.int64)
    count = int(_run(box_a, lo_a, hi_a, rank_a, out, offset))
    i0 = int(np.searchsorted(rank_a, offset, side="right"))
    i1 = int(np.searchsorted(rank_a, offset + count, side="right"))
    return count, [tuple(int(x) for x in row) for row in out[: i1 - i0]]
