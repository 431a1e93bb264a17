"""Words over {1, 2, 3}, the index set I = {j^n k}, and the curvature matrices M_w.

Words are plain strings such as ``"11123"``; the empty string is the empty word.
Matrices are 4x4 tuples of Python ints with the integer width checked according
to the requested backend.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from .curvature import Backend, CurvatureVector, check_width, in_gamma

LETTERS = (1, 2, 3)

Word = str


def make_word(letters: Sequence[int] | str) -> Word:
    w = "".join(str(x) for x in letters)
    if any(ch not in "123" for ch in w):
        raise ValueError(f"invalid word {letters!r}: letters must be 1, 2 or 3")
    return w


def is_prefix(w: Word, v: Word) -> bool:
    """True when v = w tau for some word tau (v extends w)."""
    return v.startswith(w)


def incomparable(w: Word, v: Word) -> bool:
    return not (is_prefix(w, v) or is_prefix(v, w))


def words_of_length(m: int) -> Iterator[Word]:
    for t in product("123", repeat=m):
        yield "".join(t)


@dataclass(frozen=True, order=True)
class IndexWord:
    """The word j^n k with j != k and n >= 1."""

    n: int
    j: int
    k: int

    def __post_init__(self):
        if self.j not in LETTERS or self.k not in LETTERS or self.j == self.k:
            raise ValueError(f"need distinct letters, got j={self.j}, k={self.k}")
        if self.n < 1:
            raise ValueError("n must be a positive integer")

    @property
    def word(self) -> Word:
        return str(self.j) * self.n + str(self.k)

    def __str__(self) -> str:
        return self.word

    @classmethod
    def parse(cls, w: Word) -> "IndexWord":
        w = make_word(w)
        if len(w) < 2 or len(set(w[:-1])) != 1 or w[-1] == w[0]:
            raise ValueError(f"{w!r} is not of the form j^n k")
        return cls(len(w) - 1, int(w[0]), int(w[-1]))


def enumerate_index_set(n_max: int) -> list[IndexWord]:
    """All j^n k with n <= n_max, ordered by (n, j, k)."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    return [IndexWord(n, j, k) for n in range(1, n_max + 1) for j in LETTERS for k in LETTERS if j != k]


@dataclass(frozen=True)
class CurvMatrix:
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != 4 or any(len(r) != 4 for r in self.rows):
            raise ValueError("curvature matrices are 4x4")

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def matmul(self, other: "CurvMatrix", backend: Backend | str = Backend.WIDE) -> "CurvMatrix":
        a, b = self.rows, other.rows
        out = []
        for i in range(4):
            row = []
            for j in range(4):
                row.append(check_width(sum(a[i][r] * b[r][j] for r in range(4)), backend))
            out.append(tuple(row))
        return CurvMatrix(tuple(out))

    __matmul__ = matmul

    def det(self) -> int:
        from fractions import Fraction

        m = [[Fraction(x) for x in r] for r in self.rows]
        det = Fraction(1)
        for c in range(4):
            piv = next((r for r in range(c, 4) if m[r][c] != 0), None)
            if piv is None:
                return 0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            det *= m[c][c]
            for r in range(c + 1, 4):
                f = m[r][c] / m[c][c]
                m[r] = [m[r][i] - f * m[c][i] for i in range(4)]
        return int(det)

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def to_json(self) -> str:
        return json.dumps([list(r) for r in self.rows])

    @classmethod
    def from_json(cls, text: str) -> "CurvMatrix":
        return cls(tuple(tuple(int(x) for x in r) for r in json.loads(text)))


IDENTITY = CurvMatrix(((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))

_GENERATORS = {
    1: CurvMatrix(((1, 0, 0, 0), (1, 1, 0, 1), (1, 0, 1, 1), (2, 0, 0, 1))),
    2: CurvMatrix(((1, 1, 0, 1), (0, 1, 0, 0), (0, 1, 1, 1), (0, 2, 0, 1))),
    3: CurvMatrix(((1, 0, 1, 1), (0, 1, 1, 1), (0, 0, 1, 0), (0, 0, 2, 1))),
}


def generator(j: int) -> CurvMatrix:
    if j not in _GENERATORS:
        raise ValueError(f"no generator for letter {j!r}")
    return _GENERATORS[j]


def matrix_of_word(w: Word, backend: Backend | str = Backend.WIDE) -> CurvMatrix:
    """Left-to-right product M_{w_1} ... M_{w_m}; the empty word gives the identity."""
    m = IDENTITY
    for ch in make_word(w):
        m = m.matmul(_GENERATORS[int(ch)], backend)
    return m


def _wide(rows, backend) -> CurvMatrix:
    return CurvMatrix(tuple(tuple(check_width(x, backend) for x in r) for r in rows))


def closed_form_power(j: int, n: int, backend: Backend | str = Backend.WIDE) -> CurvMatrix:
    """M_{j^n} from its entrywise closed form."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    q, t = n * n, 2 * n
    if j == 1:
        rows = ((1, 0, 0, 0), (q, 1, 0, n), (q, 0, 1, n), (t, 0, 0, 1))
    elif j == 2:
        rows = ((1, q, 0, n), (0, 1, 0, 0), (0, q, 1, n), (0, t, 0, 1))
    elif j == 3:
        rows = ((1, 0, q, n), (0, 1, q, n), (0, 0, 1, 0), (0, 0, t, 1))
    else:
        raise ValueError(f"no generator for letter {j!r}")
    return _wide(rows, backend)


def closed_form_index(tau: IndexWord, backend: Backend | str = Backend.WIDE) -> CurvMatrix:
    """M_{j^n k} from its entrywise closed form."""
    n = tau.n
    q, p = n * n, (n + 1) ** 2
    mix, top = n * (n + 1), n * n + n + 1
    a, b, c = 2 * n, 2 * (n + 1), 2 * n + 1
    forms = {
        (2, 3): ((1, q, p, top), (0, 1, 1, 1), (0, q, p, mix), (0, a, b, c)),
        (3, 2): ((1, p, q, top), (0, p, q, mix), (0, 1, 1, 1), (0, b, a, c)),
        (3, 1): ((p, 0, q, mix), (p, 1, q, top), (1, 0, 1, 1), (b, 0, a, c)),
        (1, 3): ((1, 0, 1, 1), (q, 1, p, top), (q, 0, p, mix), (a, 0, b, c)),
        (1, 2): ((1, 1, 0, 1), (q, p, 0, mix), (q, p, 1, top), (a, b, 0, c)),
        (2, 1): ((p, q, 0, mix), (1, 1, 0, 1), (p, q, 1, top), (b, a, 0, c)),
    }
    return _wide(forms[(tau.j, tau.k)], backend)


def apply(g: CurvatureVector, m: CurvMatrix, backend: Backend | str = Backend.WIDE) -> CurvatureVector:
    """Row-vector product g M; the result is validated against the kappa invariant."""
    if not in_gamma(g):
        raise ValueError(f"{g} is not in Gamma")
    v = g.as_tuple()
    if g.is_integral:
        out = [check_width(sum(v[r] * m.rows[r][i] for r in range(4)), backend) for i in range(4)]
    else:
        out = [sum(float(v[r]) * m.rows[r][i] for r in range(4)) for i in range(4)]
    return CurvatureVector(*out)


def apply_word(g: CurvatureVector, w: Word, backend: Backend | str = Backend.WIDE) -> CurvatureVector:
    """Propagate g letter by letter; the first letter acts first."""
    for ch in make_word(w):
        g = apply(g, _GENERATORS[int(ch)], backend)
    return g


@lru_cache(maxsize=None)
def index_matrix(tau: IndexWord) -> CurvMatrix:
    return closed_form_index(tau, Backend.EXACT)
