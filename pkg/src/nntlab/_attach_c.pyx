# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled attachment kernels (hot loops of tree construction).

Mirror of ``nntlab._attach_py``: identical floating-point operation order
(coordinate-by-coordinate accumulation of squared distances), identical
brute-force cutoffs, ring-search termination and tie handling, so the two
backends return bitwise-identical outputs for identical inputs.
"""

import numpy as np

from libc.math cimport floor, INFINITY
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

DEF BRUTE_CUTOFF = 64
DEF MAX_DIM = 24
DEF TIE_BUF = 64


cdef inline uint64_t _mix64(uint64_t x) noexcept nogil:
    x = x + <uint64_t>0x9E3779B97F4A7C15
    x = (x ^ (x >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    x = (x ^ (x >> 27)) * <uint64_t>0x94D049BB133111EB
    return x ^ (x >> 31)


cdef inline uint64_t _tie_hash(uint64_t seed, uint64_t node) noexcept nogil:
    return _mix64(_mix64(seed) ^ _mix64(node))


def tie_pick(tie_seed, node, count):
    """Compiled counterpart of nntlab._tiebreak.tie_pick (must agree exactly)."""
    if count < 1:
        raise ValueError("tie_pick needs at least one candidate")
    cdef uint64_t s = <uint64_t>(tie_seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t i = <uint64_t>(node & 0xFFFFFFFFFFFFFFFF)
    return int(_tie_hash(s, i) % <uint64_t>count)


def build_sphere_scan(double[:, ::1] coords, tie_seed):
    """Exact linear-scan attachment for points with a plain Euclidean metric."""
    cdef Py_ssize_t n = coords.shape[0]
    cdef Py_ssize_t k = coords.shape[1]
    parent_arr = np.full(n, -1, dtype=np.int64)
    dist_arr = np.full(n, np.nan)
    cdef int64_t[::1] parent = parent_arr
    cdef double[::1] dist2 = dist_arr
    cdef uint64_t seed = <uint64_t>(tie_seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i, j, m, bestj, ties, pick, seen
    cdef double best, d2, diff
    with nogil:
        for i in range(1, n):
            best = INFINITY
            bestj = -1
            ties = 0
            for j in range(i):
                d2 = 0.0
                for m in range(k):
                    diff = coords[j, m] - coords[i, m]
                    d2 = d2 + diff * diff
                if d2 < best:
                    best = d2
                    bestj = j
                    ties = 1
                elif d2 == best:
                    ties = ties + 1
            if ties > 1:
                pick = <Py_ssize_t>(_tie_hash(seed, <uint64_t>i) % <uint64_t>ties)
                seen = 0
                for j in range(i):
                    d2 = 0.0
                    for m in range(k):
                        diff = coords[j, m] - coords[i, m]
                        d2 = d2 + diff * diff
                    if d2 == best:
                        if seen == pick:
                            bestj = j
                            break
                        seen = seen + 1
            parent[i] = bestj
            dist2[i] = best
    return parent_arr, dist_arr


cdef inline double _wrap_d2_one(const double* a, const double* b, Py_ssize_t d) noexcept nogil:
    cdef double acc = 0.0
    cdef double delta
    cdef Py_ssize_t m
    for m in range(d):
        delta = a[m] - b[m]
        if delta < 0.0:
            delta = -delta
        if delta > 0.5:
            delta = 1.0 - delta
        acc = acc + delta * delta
    return acc


def build_torus_grid(double[:, ::1] coords, tie_seed):
    """Exact grid-accelerated attachment on the unit torus (see _attach_py)."""
    cdef Py_ssize_t n = coords.shape[0]
    cdef Py_ssize_t d = coords.shape[1]
    if d > MAX_DIM:
        raise ValueError(f"torus grid kernel supports d <= {MAX_DIM}")
    parent_arr = np.full(n, -1, dtype=np.int64)
    dist_arr = np.full(n, np.nan)
    cdef int64_t[::1] parent = parent_arr
    cdef double[::1] dist2 = dist_arr
    cdef uint64_t seed = <uint64_t>(tie_seed & 0xFFFFFFFFFFFFFFFF)

    cdef Py_ssize_t g = <Py_ssize_t>floor(n ** (1.0 / d))
    if g < 1:
        g = 1
    cdef Py_ssize_t ncells = 1
    cdef Py_ssize_t m
    for m in range(d):
        ncells = ncells * g

    cell_arr = np.minimum((np.asarray(coords) * g).astype(np.int64), g - 1)
    cdef int64_t[:, ::1] cell_of = cell_arr
    head_arr = np.full(ncells, -1, dtype=np.int64)
    next_arr = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] head = head_arr
    cdef int64_t[::1] nxt = next_arr

    cdef int64_t* tiebuf = <int64_t*> malloc(TIE_BUF * sizeof(int64_t))
    if tiebuf == NULL:
        raise MemoryError()

    cdef Py_ssize_t i, j, r, cid, bestj, nties, pick, seen, a, b
    cdef int64_t jj
    cdef double best, d2j, lo
    cdef Py_ssize_t off[MAX_DIM]
    cdef Py_ssize_t cc
    cdef bint full_scan, at_ring, carry, overflow
    cdef int64_t tmp

    try:
        with nogil:
            # node 0 sits in its bucket before anyone searches
            cid = 0
            for m in range(d):
                cid = cid * g + cell_of[0, d - 1 - m]
            nxt[0] = head[cid]
            head[cid] = 0

            for i in range(1, n):
                best = INFINITY
                bestj = -1
                nties = 0
                overflow = False
                if i <= BRUTE_CUTOFF or g < 3:
                    for j in range(i):
                        d2j = _wrap_d2_one(&coords[j, 0], &coords[i, 0], d)
                        if d2j < best:
                            best = d2j
                            bestj = j
                            nties = 1
                            tiebuf[0] = j
                        elif d2j == best:
                            if nties < TIE_BUF:
                                tiebuf[nties] = j
                            else:
                                overflow = True
                            nties = nties + 1
                else:
                    r = 0
                    full_scan = False
                    while True:
                        if 2 * r + 1 >= g:
                            full_scan = True
                            break
                        # enumerate offsets with Chebyshev norm exactly r
                        for m in range(d):
                            off[m] = -r
                        while True:
                            at_ring = False
                            for m in range(d):
                                if off[m] == r or off[m] == -r:
                                    at_ring = True
                                    break
                            if at_ring or r == 0:
                                cid = 0
                                for m in range(d):
                                    cc = (cell_of[i, d - 1 - m] + off[d - 1 - m]) % g
                                    if cc < 0:
                                        cc = cc + g
                                    cid = cid * g + cc
                                jj = head[cid]
                                while jj != -1:
                                    if jj < i:
                                        d2j = _wrap_d2_one(&coords[jj, 0], &coords[i, 0], d)
                                        if d2j < best:
                                            best = d2j
                                            bestj = jj
                                            nties = 1
                                            tiebuf[0] = jj
                                        elif d2j == best:
                                            if nties < TIE_BUF:
                                                tiebuf[nties] = jj
                                            else:
                                                overflow = True
                                            nties = nties + 1
                                    jj = nxt[jj]
                            # odometer step
                            carry = True
                            for m in range(d):
                                if off[m] < r:
                                    off[m] = off[m] + 1
                                    carry = False
                                    break
                                off[m] = -r
                            if carry:
                                break
                        lo = (<double>r) / (<double>g)
                        if nties > 0 and best < lo * lo:
                            break
                        r = r + 1
                    if full_scan:
                        best = INFINITY
                        bestj = -1
                        nties = 0
                        overflow = False
                        for j in range(i):
                            d2j = _wrap_d2_one(&coords[j, 0], &coords[i, 0], d)
                            if d2j < best:
                                best = d2j
                                bestj = j
                                nties = 1
                                tiebuf[0] = j
                            elif d2j == best:
                                if nties < TIE_BUF:
                                    tiebuf[nties] = j
                                else:
                                    overflow = True
                                nties = nties + 1

                if nties > 1:
                    pick = <Py_ssize_t>(_tie_hash(seed, <uint64_t>i) % <uint64_t>nties)
                    if overflow:
                        # more ties than the buffer holds: rescan everything
                        seen = 0
                        for j in range(i):
                            d2j = _wrap_d2_one(&coords[j, 0], &coords[i, 0], d)
                            if d2j == best:
                                if seen == pick:
                                    bestj = j
                                    break
                                seen = seen + 1
                    else:
                        # ascending insertion sort of the tied list
                        for a in range(1, nties):
                            tmp = tiebuf[a]
                            b = a
                            while b > 0 and tiebuf[b - 1] > tmp:
                                tiebuf[b] = tiebuf[b - 1]
                                b = b - 1
                            tiebuf[b] = tmp
                        bestj = <Py_ssize_t>tiebuf[pick]
                parent[i] = bestj
                dist2[i] = best

                # insert node i into its bucket
                cid = 0
                for m in range(d):
                    cid = cid * g + cell_of[i, d - 1 - m]
                nxt[i] = head[cid]
                head[cid] = i
    finally:
        free(tiebuf)
    return parent_arr, dist_arr


def build_rrt(n, tie_seed):
    """Uniform attachment: node i picks among {0..i-1}, all tied at distance 1."""
    cdef Py_ssize_t nn = n
    parent_arr = np.full(nn, -1, dtype=np.int64)
    dist_arr = np.full(nn, np.nan)
    cdef int64_t[::1] parent = parent_arr
    cdef double[::1] dist2 = dist_arr
    cdef uint64_t seed = <uint64_t>(tie_seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    with nogil:
        for i in range(1, nn):
            parent[i] = <int64_t>(_tie_hash(seed, <uint64_t>i) % <uint64_t>i)
            dist2[i] = 1.0
    return parent_arr, dist_arr
