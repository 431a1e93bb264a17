"""Slow reference implementations used to check the library.

Nothing here imports the library's arithmetic: generator matrices are spelled out
again and products are formed with exact rationals, one tree level at a time.
"""
from fractions import Fraction
from itertools import product

GEN = {
    "1": ((1, 0, 0, 0), (1, 1, 0, 1), (1, 0, 1, 1), (2, 0, 0, 1)),
    "2": ((1, 1, 0, 1), (0, 1, 0, 0), (0, 1, 1, 1), (0, 2, 0, 1)),
    "3": ((1, 0, 1, 1), (0, 1, 1, 1), (0, 0, 1, 0), (0, 0, 2, 1)),
}
ID4 = tuple(tuple(int(i == j) for j in range(4)) for i in range(4))
IN_VEC = (1, 1, 1, 2)


def matmul(a, b):
    return tuple(tuple(sum(a[i][r] * b[r][j] for r in range(4)) for j in range(4)) for i in range(4))


def word_matrix(w: str):
    m = ID4
    for ch in w:
        m = matmul(m, GEN[ch])
    return m


def row_times(g, m):
    return tuple(sum(g[r] * m[r][i] for r in range(4)) for i in range(4))


def inscribed(v):
    return sum(x * y for x, y in zip(v, IN_VEC))


def exact(g):
    return tuple(Fraction(x) for x in g)


def brute_force_curvatures(g, lam):
    """Inscribed curvatures of every word whose matrix-product value is <= lam.

    Level L holds g M_w for the surviving words of length L, built as
    (g M_{w'}) M_j with explicit 4x4 products in exact arithmetic.  A word whose
    value exceeds lam is not extended: children always exceed their parents.
    """
    out = []
    level = [("", exact(g))]
    while level:
        nxt = []
        for w, v in level:
            c = inscribed(v)
            if c <= lam:
                out.append((w, c))
                nxt.extend((w + j, row_times(v, GEN[j])) for j in "123")
        level = nxt
    return out


def exhaustive_count(g, lam, max_len: int) -> int:
    """Count over literally every word of length <= max_len, each with its own matrix product."""
    g = exact(g)
    return sum(inscribed(row_times(g, word_matrix(w))) <= lam for w in all_words(max_len))


def brute_force_count(g, lam) -> int:
    return len(brute_force_curvatures(g, lam))


def all_words(max_len: int):
    for m in range(max_len + 1):
        for t in product("123", repeat=m):
            yield "".join(t)
