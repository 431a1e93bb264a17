"""Circle counting N(g, lam) = #{w : curvature of the disk inscribed in D_w <= lam}.

The inscribed curvature of D_w is g M_w (1, 1, 1, 2)^T.  Counting walks the word
tree depth first in compiled code; streaming walks it best first through a heap
so that records come out sorted by curvature.
"""
from __future__ import annotations

import csv
import heapq
import io
import json
import math
from dataclasses import asdict, dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence

import numba
import numpy as np

from . import _kernels
from .curvature import (
    Backend,
    CurvatureVector,
    check_width,
    in_gamma,
    inscribed_curvature,
    pair_sums,
    permute,
    scale,
)
from .words import LETTERS, IndexWord, Word, apply, closed_form_power, index_matrix

# every component of a node visited below lam is <= 5 lam
INT64_SAFE_LAMBDA = (2**63 - 1) // 8


class CountCapExceeded(RuntimeError):
    """The count passed the configured cap; ``partial`` is a lower bound."""

    def __init__(self, partial: int, cap: int):
        super().__init__(f"count exceeded cap {cap} (partial result {partial})")
        self.partial = partial
        self.cap = cap


class CountMode(str, Enum):
    COUNT = "count-only"
    STREAM = "stream"
    HISTOGRAM = "histogram"


@dataclass(frozen=True)
class CountQuery:
    g: CurvatureVector
    lam: float
    mode: CountMode = CountMode.COUNT

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")


@dataclass(frozen=True)
class CountRecord:
    word: Word
    curvature: float


def _require_gamma(g: CurvatureVector) -> None:
    if not in_gamma(g):
        raise ValueError(f"{g} is not in Gamma")


def _resolve(g: CurvatureVector, lam: float, backend: Backend | str):
    """Pick the representation for a traversal.

    Returns ("numba", root, lam_cast) or ("python", values, lam_cast).
    """
    backend = Backend(backend)
    if backend in (Backend.EXACT, Backend.WIDE) and not g.is_integral:
        raise ValueError("exact integer backends need an integral curvature quadruple")
    if backend is Backend.FLOAT or not g.is_integral:
        return "numba", np.array(g.as_floats(), dtype=np.float64), float(lam)
    lam_int = math.floor(lam)
    if lam_int <= INT64_SAFE_LAMBDA and max(g) <= INT64_SAFE_LAMBDA:
        return "numba", np.array(g.as_tuple(), dtype=np.int64), max(lam_int, -1)
    return "python", g.as_tuple(), lam_int


def _python_count(root, lam, cap, backend) -> tuple[int, bool]:
    stack = [root]
    n = 0
    while stack:
        a, b, c, k = stack.pop()
        s = check_width(a + b + c + 2 * k, backend)
        if s > lam:
            continue
        n += 1
        if cap and n > cap:
            return n - 1, False
        stack.append((a, b, s, check_width(a + b + k, backend)))
        stack.append((a, s, c, check_width(a + c + k, backend)))
        stack.append((s, b, c, check_width(b + c + k, backend)))
    return n, True


def _frontier(root: np.ndarray, lam, size: int) -> tuple[int, np.ndarray]:
    """Expand breadth first until at least ``size`` open nodes; returns (closed count, open nodes)."""
    closed = 0
    level = [root]
    while level and len(level) < size:
        nxt = []
        for v in level:
            s = v[0] + v[1] + v[2] + 2 * v[3]
            if s > lam:
                continue
            closed += 1
            for j in range(3):
                nxt.append(_kernels._times_generator(v, j))
        level = nxt
    if not level:
        return closed, np.empty((0, 4), root.dtype)
    return closed, np.stack(level)


def count(
    g: CurvatureVector,
    lam: float,
    *,
    backend: Backend | str = Backend.AUTO,
    cap: int | None = None,
    threads: int | None = None,
) -> int:
    """Exact number of words w with inscribed curvature of D_w at most ``lam``."""
    _require_gamma(g)
    if lam < 0:
        return 0
    kind, root, lam_c = _resolve(g, lam, backend)
    if kind == "python":
        width = Backend.WIDE if Backend(backend) is Backend.WIDE else Backend.EXACT
        n, complete = _python_count(root, lam_c, cap or 0, width)
    elif threads and threads > 1 and not cap:
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))
        closed, nodes = _frontier(root, lam_c, 16 * threads)
        n = closed + int(_kernels.count_batch(nodes, lam_c).sum()) if len(nodes) else closed
        complete = True
    else:
        n, complete = _kernels.dfs_count(root, lam_c, cap or 0)
        n = int(n)
    if not complete:
        raise CountCapExceeded(n, cap)
    return n


def count_stream(g: CurvatureVector, lam: float, *, backend: Backend | str = Backend.AUTO) -> Iterator[CountRecord]:
    """Yield every word with curvature <= lam in nondecreasing curvature order.

    Ties are broken by the lexicographic order of the words.  Memory is bounded by
    the size of the open frontier.
    """
    _require_gamma(g)
    backend = Backend(backend)
    if backend in (Backend.EXACT, Backend.WIDE) and not g.is_integral:
        raise ValueError("exact integer backends need an integral curvature quadruple")
    width = Backend.WIDE if backend is Backend.WIDE else Backend.EXACT
    if g.is_integral and backend is not Backend.FLOAT:
        vals = g.as_tuple()
    else:
        vals = g.as_floats()
    a, b, c, k = vals
    heap = [(a + b + c + 2 * k, "", vals)]
    while heap:
        s, w, (a, b, c, k) = heapq.heappop(heap)
        if s > lam:
            return
        yield CountRecord(w, s)
        children = ((s, b, c, b + c + k), (a, s, c, a + c + k), (a, b, s, a + b + k))
        for j, ch in zip("123", children):
            if isinstance(s, int):
                ch = tuple(check_width(x, width) for x in ch)
            cs = ch[0] + ch[1] + ch[2] + 2 * ch[3]
            if cs <= lam:
                heapq.heappush(heap, (cs, w + j, ch))


def geometric_grid(lo: float, hi: float, per_decade: int = 16) -> np.ndarray:
    """Points lo * 10^(i / per_decade) below hi, with hi appended as the last point."""
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    n = int(math.floor(per_decade * math.log10(hi / lo) + 1e-9))
    grid = lo * 10.0 ** (np.arange(n + 1) / per_decade)
    grid = grid[grid < hi * (1 - 1e-12)]
    return np.append(grid, hi)


def count_many(g: CurvatureVector, lambdas: Sequence[float], *, backend: Backend | str = Backend.AUTO) -> np.ndarray:
    """N(g, lam) for every lam in an ascending sequence, in a single traversal."""
    _require_gamma(g)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if lambdas.ndim != 1 or len(lambdas) == 0 or np.any(np.diff(lambdas) <= 0):
        raise ValueError("lambdas must be a nonempty strictly increasing sequence")
    kind, root, lam_c = _resolve(g, float(lambdas[-1]), backend)
    if kind == "python":
        vals = sorted(rec.curvature for rec in count_stream(g, float(lambdas[-1]), backend=backend))
        return np.array([np.searchsorted(vals, x, side="right") for x in lambdas], dtype=np.int64)
    if root.dtype == np.int64:
        edges = np.floor(lambdas).astype(np.int64)
        if np.any(np.diff(edges) <= 0):
            # integer thresholds collapse: fall back to one count per point
            return np.array([count(g, float(x), backend=backend) for x in lambdas], dtype=np.int64)
    else:
        edges = lambdas
    return np.cumsum(_kernels.dfs_histogram(root, edges))


@dataclass
class CountCurve:
    g: CurvatureVector
    lambdas: np.ndarray
    counts: np.ndarray
    d: float

    @property
    def normalized(self) -> np.ndarray:
        return self.counts / self.lambdas**self.d

    def to_csv(self, header: str | None = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "count", "normalized"])
        for lam, n, z in zip(self.lambdas, self.counts, self.normalized):
            w.writerow([repr(float(lam)), int(n), repr(float(z))])
        return buf.getvalue()


def count_curve(
    g: CurvatureVector,
    d: float,
    lambda_max: float = 1e6,
    lambda_min: float | None = None,
    per_decade: int = 16,
) -> CountCurve:
    """Counts on a geometric grid from the smallest curvature (default) up to lambda_max."""
    lo = float(inscribed_curvature(g)) if lambda_min is None else lambda_min
    grid = geometric_grid(lo, lambda_max, per_decade)
    return CountCurve(g, grid, count_many(g, grid), d)


# --- decomposition over the index set -----------------------------------------------------


@dataclass
class DecompositionReport:
    g: str
    lam: float
    total: int
    summands: dict[str, int]
    power_words: list[str]
    remainder: int
    remainder_bound: float
    identity_holds: bool
    bound_holds: bool

    @property
    def passed(self) -> bool:
        return self.identity_holds and self.bound_holds

    def to_json(self, **extra) -> str:
        return json.dumps({**asdict(self), "passed": self.passed, **extra}, indent=2)


def _power_chain(g: CurvatureVector, j: int, lam: float) -> Iterator[tuple[int, CurvatureVector]]:
    """(n, g M_{j^n}) for n = 0, 1, ... while the inscribed curvature stays <= lam."""
    n = 0
    while True:
        x = apply(g, closed_form_power(j, n, Backend.EXACT), Backend.EXACT)
        if inscribed_curvature(x) > lam:
            return
        yield n, x
        n += 1


def decomposition_check(g: CurvatureVector, lam: float) -> DecompositionReport:
    """Check N(g,lam) = sum over tau in I of N(g M_tau, lam) + #{j^n : curvature <= lam}.

    Every summand is an independent call to :func:`count`.  The tau-sum stops at the
    first n where g M_{j^n} already exceeds lam, since all of its extensions do too.
    Raises AssertionError if the identity fails.
    """
    _require_gamma(g)
    total = count(g, lam)
    summands: dict[str, int] = {}
    powers: set[str] = set()
    for j in LETTERS:
        for n, x in _power_chain(g, j, lam):
            powers.add(str(j) * n)
            if n == 0:
                continue
            for k in LETTERS:
                if k != j:
                    tau = IndexWord(n, j, k)
                    c = count(apply(g, index_matrix(tau), Backend.EXACT), lam)
                    if c:
                        summands[tau.word] = c
    remainder = len(powers)
    bound = 3 * min(pair_sums(g)) ** -0.5 * lam**0.5
    report = DecompositionReport(
        g=str(g),
        lam=lam,
        total=total,
        summands=summands,
        power_words=sorted(powers, key=lambda w: (len(w), w)),
        remainder=remainder,
        remainder_bound=bound,
        identity_holds=total == sum(summands.values()) + remainder,
        bound_holds=remainder <= bound,
    )
    if not report.identity_holds:
        raise AssertionError(f"decomposition identity violated for {g} at lambda={lam}: {report.to_json()}")
    return report


# --- Laplace transform ------------------------------------------------------------------


@dataclass
class LaplaceResult:
    t: float
    value: float
    lambda_cut: float
    n_terms: int
    tail_bound: float
    growth_ratio: float


def laplace_transform(g: CurvatureVector, t: float, truncation_tol: float = 1e-10) -> LaplaceResult:
    """Z(g, t) = sum over words of exp(-t * curvature), summed in increasing curvature order.

    Terms are taken up to a cutoff Lambda; the remainder is bounded by splitting
    (Lambda, inf) into dyadic shells and dominating the count in shell i by
    N(Lambda) rho^(i+1), where rho is the observed growth N(Lambda)/N(Lambda/2) with
    a 25% safety margin.  The cutoff doubles until that bound is below
    ``truncation_tol`` relative to the partial sum.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    _require_gamma(g)
    root = np.array(g.as_floats(), dtype=np.float64)
    cut = max(40.0 / t, 2.0 * float(inscribed_curvature(g)))
    while True:
        vals = np.sort(_kernels.dfs_collect(root, cut))
        value = float(_kernels.sorted_exp_sum(vals, t))
        n_cut = len(vals)
        n_half = int(np.searchsorted(vals, cut / 2, side="right"))
        rho = 1.25 * max(n_cut / max(n_half, 1), 2.0)
        tail = 0.0
        for i in range(200):
            term = n_cut * rho ** (i + 1) * math.exp(-cut * 2**i * t)
            tail += term
            if term < 1e-300 or (i > 3 and term < 1e-3 * tail):
                break
        if tail <= truncation_tol * max(value, 1e-300):
            return LaplaceResult(t, value, cut, n_cut, tail, rho)
        cut *= 2


@dataclass
class KaramataPoint:
    lam: float
    counting_side: float
    laplace_side: float

    @property
    def relative_gap(self) -> float:
        return abs(self.laplace_side / self.counting_side - 1)


def karamata_consistency(g: CurvatureVector, lambdas: Sequence[float], d: float) -> list[KaramataPoint]:
    """Compare lam^-d N(g, lam) with t^d Z(g, t) / Gamma(d + 1) at t = 1/lam."""
    pts = []
    for lam in lambdas:
        t = 1.0 / lam
        z = laplace_transform(g, t).value
        pts.append(KaramataPoint(lam, count(g, lam) / lam**d, t**d * z / math.gamma(d + 1)))
    return pts


# --- covariance --------------------------------------------------------------------------


@dataclass
class CovarianceReport:
    g: str
    s: float
    lam: float
    pi: tuple
    scaled: int
    rescaled: int
    permuted: int
    original: int

    @property
    def passed(self) -> bool:
        return self.scaled == self.rescaled and self.permuted == self.original


def scaling_covariance_check(g: CurvatureVector, s: float, lam: float, pi: Sequence[int] = (2, 3, 1)) -> CovarianceReport:
    """N(s g, lam) must equal N(g, lam / s) and N(pi g, lam) must equal N(g, lam)."""
    if s <= 0:
        raise ValueError("scale factor must be positive")
    if g.is_integral and isinstance(s, int):
        rescaled = count(g, Fraction(lam) / s)
    else:
        rescaled = count(g, lam / s)
    rep = CovarianceReport(
        g=str(g),
        s=s,
        lam=lam,
        pi=tuple(pi),
        scaled=count(scale(g, s), lam),
        rescaled=rescaled,
        permuted=count(permute(g, pi), lam),
        original=count(g, lam),
    )
    if not rep.passed:
        raise AssertionError(f"covariance violated: {rep}")
    return rep
