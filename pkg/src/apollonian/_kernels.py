"""Numba inner loops over the word tree.

Each node carries only the 4-vector g M_w.  Children of (a, b, c, k) with inscribed
curvature s = a + b + c + 2k are

    1: (s, b, c, b + c + k)    2: (a, s, c, a + c + k)    3: (a, b, s, a + b + k)

and every child has a strictly larger inscribed curvature than its parent, so a
subtree is cut as soon as its root exceeds lambda.  The kernels are compiled once
per dtype (int64 for integral seeds, float64 otherwise).
"""
import math

import numpy as np
from numba import njit, prange

_STACK0 = 256


@njit(cache=True, nogil=True)
def _grow(st, top):
    if top + 3 > st.shape[0]:
        new = np.empty((2 * st.shape[0], 4), st.dtype)
        new[:top] = st[:top]
        return new
    return st


@njit(cache=True, nogil=True)
def dfs_count(root, lam, cap):
    """Number of nodes with inscribed curvature <= lam; stops early past cap (cap <= 0: no cap).

    Returns (count, complete).
    """
    st = np.empty((_STACK0, 4), root.dtype)
    st[0, 0] = root[0]
    st[0, 1] = root[1]
    st[0, 2] = root[2]
    st[0, 3] = root[3]
    top = 1
    n = 0
    while top > 0:
        top -= 1
        a = st[top, 0]
        b = st[top, 1]
        c = st[top, 2]
        k = st[top, 3]
        s = a + b + c + 2 * k
        if s > lam:
            continue
        n += 1
        if cap > 0 and n > cap:
            return n - 1, False
        st = _grow(st, top)
        st[top, 0] = s
        st[top, 1] = b
        st[top, 2] = c
        st[top, 3] = b + c + k
        st[top + 1, 0] = a
        st[top + 1, 1] = s
        st[top + 1, 2] = c
        st[top + 1, 3] = a + c + k
        st[top + 2, 0] = a
        st[top + 2, 1] = b
        st[top + 2, 2] = s
        st[top + 2, 3] = a + b + k
        top += 3
    return n, True


@njit(cache=True, nogil=True)
def dfs_histogram(root, edges):
    """Counts of inscribed curvatures in (edges[i-1], edges[i]]; edges ascending, last = lambda."""
    lam = edges[edges.shape[0] - 1]
    hist = np.zeros(edges.shape[0], np.int64)
    st = np.empty((_STACK0, 4), root.dtype)
    st[0, 0] = root[0]
    st[0, 1] = root[1]
    st[0, 2] = root[2]
    st[0, 3] = root[3]
    top = 1
    while top > 0:
        top -= 1
        a = st[top, 0]
        b = st[top, 1]
        c = st[top, 2]
        k = st[top, 3]
        s = a + b + c + 2 * k
        if s > lam:
            continue
        hist[np.searchsorted(edges, s)] += 1
        st = _grow(st, top)
        st[top, 0] = s
        st[top, 1] = b
        st[top, 2] = c
        st[top, 3] = b + c + k
        st[top + 1, 0] = a
        st[top + 1, 1] = s
        st[top + 1, 2] = c
        st[top + 1, 3] = a + c + k
        st[top + 2, 0] = a
        st[top + 2, 1] = b
        st[top + 2, 2] = s
        st[top + 2, 3] = a + b + k
        top += 3
    return hist


@njit(cache=True, nogil=True)
def dfs_collect(root, lam):
    """All inscribed curvatures <= lam, in traversal order."""
    out = np.empty(1024, np.float64)
    m = 0
    st = np.empty((_STACK0, 4), root.dtype)
    st[0, 0] = root[0]
    st[0, 1] = root[1]
    st[0, 2] = root[2]
    st[0, 3] = root[3]
    top = 1
    while top > 0:
        top -= 1
        a = st[top, 0]
        b = st[top, 1]
        c = st[top, 2]
        k = st[top, 3]
        s = a + b + c + 2 * k
        if s > lam:
            continue
        if m == out.shape[0]:
            bigger = np.empty(2 * m, np.float64)
            bigger[:m] = out
            out = bigger
        out[m] = s
        m += 1
        st = _grow(st, top)
        st[top, 0] = s
        st[top, 1] = b
        st[top, 2] = c
        st[top, 3] = b + c + k
        st[top + 1, 0] = a
        st[top + 1, 1] = s
        st[top + 1, 2] = c
        st[top + 1, 3] = a + c + k
        st[top + 2, 0] = a
        st[top + 2, 1] = b
        st[top + 2, 2] = s
        st[top + 2, 3] = a + b + k
        top += 3
    return out[:m]


@njit(cache=True, nogil=True)
def _times_generator(v, j):
    a = v[0]
    b = v[1]
    c = v[2]
    k = v[3]
    s = a + b + c + 2 * k
    out = np.empty(4, v.dtype)
    if j == 0:
        out[0] = s
        out[1] = b
        out[2] = c
        out[3] = b + c + k
    elif j == 1:
        out[0] = a
        out[1] = s
        out[2] = c
        out[3] = a + c + k
    else:
        out[0] = a
        out[1] = b
        out[2] = s
        out[3] = a + b + k
    return out


@njit(cache=True, nogil=True)
def index_counts(root, lam, n_max):
    """Split the count of root over the index words j^n k.

    Returns (counts[j, n - 1, k] for n <= n_max, tail count for n > n_max,
    number of words j^n (n >= 0, empty word once) with curvature <= lam).
    """
    counts = np.zeros((3, n_max, 3), np.int64)
    tail = 0
    power_words = 0
    if root[0] + root[1] + root[2] + 2 * root[3] <= lam:
        power_words = 1
    for j in range(3):
        x = root
        n = 0
        while True:
            x = _times_generator(x, j)
            n += 1
            if x[0] + x[1] + x[2] + 2 * x[3] > lam:
                break
            power_words += 1
            for k in range(3):
                if k == j:
                    continue
                c, _ = dfs_count(_times_generator(x, k), lam, 0)
                if n <= n_max:
                    counts[j, n - 1, k] = c
                else:
                    tail += c
    return counts, tail, power_words


@njit(cache=True, parallel=True)
def count_batch(roots, lam):
    out = np.zeros(roots.shape[0], np.int64)
    for i in prange(roots.shape[0]):
        c, _ = dfs_count(roots[i], lam, 0)
        out[i] = c
    return out


@njit(cache=True, nogil=True)
def sorted_exp_sum(values, t):
    """Sum of exp(-t * v) over values already sorted ascending (compensated)."""
    total = 0.0
    comp = 0.0
    for i in range(values.shape[0]):
        y = math.exp(-t * values[i]) - comp
        s = total + y
        comp = (s - total) - y
        total = s
    return total
