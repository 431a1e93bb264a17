"""The renewal Markov chain on unit-measure curvature quadruples.

From a state g with h(g) = 1 the chain picks tau = j^n k with probability
p_tau ~ h(g M_tau), moves to the rescaled g M_tau with unit measure and records the
increment u = -log(p_tau) / d.  Measures are replaced by counting estimates:

    p_tau = N(g M_tau, lam_k) / N(g, lam_k),     n <= n_max,

and the missing mass (long words, the boundary words j^n) is spread
proportionally over the retained words.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .counting import count, count_many
from .curvature import CurvatureVector, epsilon_of, in_gamma
from .dimension import MeasureEstimator
from .words import LETTERS, IndexWord, apply, index_matrix

RAW_SUM_BOUNDS = (0.9, 1.001)
CACHE_GRID = 1e-3


class KernelRejected(RuntimeError):
    """Estimated kernel mass outside the accepted bounds."""


@dataclass(frozen=True)
class ChainState:
    g: CurvatureVector
    h: float = 1.0  # measure estimate recorded when the state was made

    @classmethod
    def start(cls, g: CurvatureVector, estimator: MeasureEstimator) -> "ChainState":
        x = estimator.normalize(g)
        return cls(x, estimator.h(x))


@dataclass
class TransitionKernel:
    at: CurvatureVector  # point where counts were taken
    taus: tuple
    p_raw: np.ndarray
    n_max: int
    lambda_kernel: float
    total: int
    tail_count: int
    power_words: int
    cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.cdf = np.cumsum(self.p_raw)

    @property
    def raw_sum(self) -> float:
        return float(self.cdf[-1])

    @property
    def probs(self) -> np.ndarray:
        return self.p_raw / self.raw_sum

    @property
    def renormalization(self) -> float:
        return 1.0 / self.raw_sum

    def prob(self, tau: IndexWord) -> float:
        try:
            return float(self.probs[self.taus.index(tau)])
        except ValueError:
            return 0.0

    def sample(self, u: float) -> int:
        """Inverse-cdf draw from a uniform u in [0, 1)."""
        return int(min(np.searchsorted(self.cdf, u * self.cdf[-1], side="right"), len(self.taus) - 1))

    def summary(self) -> dict:
        return {
            "at": list(self.at.as_floats()),
            "n_max": self.n_max,
            "lambda_kernel": self.lambda_kernel,
            "total": self.total,
            "raw_sum": self.raw_sum,
            "tail_count": self.tail_count,
            "power_words": self.power_words,
            "support": len(self.taus),
        }


def build_kernel(g: CurvatureVector, n_max: int = 40, lambda_kernel: float = 1e5, check: bool = True) -> TransitionKernel:
    """Counting estimate of the transition law out of g; words with zero count are dropped."""
    if not in_gamma(g):
        raise ValueError(f"{g} is not in Gamma")
    root = np.array(g.as_floats())
    counts, tail, power = _kernels.index_counts(root, float(lambda_kernel), n_max)
    total = count(g.to_float(), lambda_kernel)
    if total == 0:
        raise KernelRejected(f"no circles below {lambda_kernel:g} for {g}")
    taus, ps = [], []
    for n in range(1, n_max + 1):
        for j in LETTERS:
            for k in LETTERS:
                c = counts[j - 1, n - 1, k - 1]
                if j != k and c > 0:
                    taus.append(IndexWord(n, j, k))
                    ps.append(c / total)
    kernel = TransitionKernel(g, tuple(taus), np.array(ps), n_max, lambda_kernel, total, int(tail), int(power))
    lo, hi = RAW_SUM_BOUNDS
    if check and not lo <= kernel.raw_sum <= hi:
        raise KernelRejected(f"kernel mass {kernel.raw_sum:.4f} outside [{lo}, {hi}] at {g}")
    return kernel


class KernelCache:
    """Kernels keyed by the state rounded to a grid.

    The kernel stored for a cell is always built at the cell's grid point, so the
    result does not depend on which path reaches the cell first.
    """

    def __init__(self, n_max: int, lambda_kernel: float, grid: float = CACHE_GRID):
        self.n_max = n_max
        self.lambda_kernel = lambda_kernel
        self.grid = grid
        self._store: dict[tuple, TransitionKernel] = {}
        self.hits = 0
        self.misses = 0

    def key(self, g: CurvatureVector) -> tuple:
        return tuple(round(float(x) / self.grid) for x in g.triple)

    def get(self, g: CurvatureVector) -> TransitionKernel:
        key = self.key(g)
        kernel = self._store.get(key)
        if kernel is not None:
            self.hits += 1
            return kernel
        self.misses += 1
        rep = CurvatureVector.from_triple(*(k * self.grid for k in key))
        return self._store.setdefault(key, build_kernel(rep, self.n_max, self.lambda_kernel))

    def __len__(self) -> int:
        return len(self._store)


@dataclass
class StepRecord:
    state: ChainState
    tau: IndexWord
    u: float  # -log(p_raw) / d
    correction: float  # log(raw_sum) / d, so that -log(p) / d = u + correction
    p_raw: float
    u_measure: float  # -log(h(g M_tau)) / d from the measure estimator


def step(state: ChainState, kernel: TransitionKernel, uniform: float, estimator: MeasureEstimator) -> StepRecord:
    d = estimator.d
    i = kernel.sample(uniform)
    tau, p = kernel.taus[i], float(kernel.p_raw[i])
    x = apply(state.g, index_matrix(tau))
    h = estimator.h(x)
    nxt = ChainState(estimator.normalize(x))
    return StepRecord(nxt, tau, -math.log(p) / d, math.log(kernel.raw_sum) / d, p, -math.log(h) / d)


@dataclass
class ChainPath:
    seed: tuple
    states: np.ndarray  # (n + 1, 4)
    taus: list
    u: np.ndarray
    corrections: np.ndarray
    p_raw: np.ndarray
    u_measure: np.ndarray
    failure: str | None = None

    @property
    def V(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.u)])

    @property
    def n_steps(self) -> int:
        return len(self.u)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "tau", "u", "correction", "V", "alpha", "beta", "gamma", "kappa"])
        V = self.V
        for n in range(len(self.states)):
            row = [n, self.taus[n - 1] if n else "", "", "", repr(float(V[n]))]
            if n:
                row[2] = repr(float(self.u[n - 1]))
                row[3] = repr(float(self.corrections[n - 1]))
            w.writerow(row + [repr(float(x)) for x in self.states[n]])
        return buf.getvalue()


def path_rng(seed: int, stream: int, path: int) -> np.random.Generator:
    """Philox stream for (seed, stream, path); seed is a 64-bit integer."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed & (2**64 - 1), stream, path])))


def _run_path(g0, n_steps, seed, stream, index, estimator, kernel_for) -> ChainPath:
    rng = path_rng(seed, stream, index)
    uniforms = rng.random(n_steps)
    state = ChainState.start(g0, estimator)
    states, taus, us, corr, ps, um = [state.g.as_floats()], [], [], [], [], []
    failure = None
    for n in range(n_steps):
        try:
            rec = step(state, kernel_for(state.g), float(uniforms[n]), estimator)
        except (KernelRejected, ValueError) as exc:
            failure = f"step {n}: {exc}"
            break
        state = rec.state
        states.append(state.g.as_floats())
        taus.append(str(rec.tau))
        us.append(rec.u)
        corr.append(rec.correction)
        ps.append(rec.p_raw)
        um.append(rec.u_measure)
    return ChainPath((seed, stream, index), np.array(states), taus, np.array(us), np.array(corr), np.array(ps), np.array(um), failure)


@dataclass
class Simulation:
    paths: list[ChainPath]
    metadata: dict

    def final_states(self) -> np.ndarray:
        return np.array([p.states[-1] for p in self.paths if p.failure is None])

    def drift(self) -> float:
        ok = [p for p in self.paths if p.failure is None]
        return float(np.mean([p.V[-1] / p.n_steps for p in ok]))

    def drift_spread(self) -> float:
        ok = [p for p in self.paths if p.failure is None]
        return float(np.std([p.V[-1] / p.n_steps for p in ok], ddof=1)) if len(ok) > 1 else 0.0


def simulate(
    g0: CurvatureVector,
    n_steps: int,
    n_paths: int,
    seed: int,
    estimator: MeasureEstimator,
    *,
    stream: int = 0,
    n_max: int = 40,
    lambda_kernel: float = 1e5,
    cache: KernelCache | bool | None = False,
    workers: int = 1,
) -> Simulation:
    """Run n_paths paths of n_steps steps from the normalisation of g0.

    Path i draws its uniforms from the Philox stream (seed, stream, i).  Two runs
    that share (seed, stream) but start elsewhere use identical uniforms, which
    couples them.
    """
    if cache is True:
        cache = KernelCache(n_max, lambda_kernel)
    elif cache is False:
        cache = None
    if cache is not None:
        kernel_for = cache.get
    else:
        def kernel_for(g):
            return build_kernel(g, n_max, lambda_kernel)

    def run(i):
        return _run_path(g0, n_steps, seed, stream, i, estimator, kernel_for)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            paths = list(pool.map(run, range(n_paths)))
    else:
        paths = [run(i) for i in range(n_paths)]
    meta = {
        "g0": str(g0),
        "n_steps": n_steps,
        "n_paths": n_paths,
        "seed": seed,
        "stream": stream,
        "rng": "numpy Philox, SeedSequence([seed, stream, path])",
        "n_max": n_max,
        "lambda_kernel": lambda_kernel,
        "cache": {"grid": cache.grid, "cells": len(cache), "hits": cache.hits, "misses": cache.misses,
                  "policy": "kernel built at the grid point of the state's cell"} if cache is not None else None,
        "estimator": estimator.metadata(),
        "failures": sum(p.failure is not None for p in paths),
    }
    return Simulation(paths, meta)


def binned_tv(x: np.ndarray, y: np.ndarray, bins: int = 8) -> float:
    """Total variation between histograms of x and y on equal-width bins over the pooled range."""
    lo, hi = min(x.min(), y.min()), max(x.max(), y.max())
    edges = np.linspace(lo, hi, bins + 1)
    px, _ = np.histogram(x, edges)
    py, _ = np.histogram(y, edges)
    return 0.5 * float(np.abs(px / px.sum() - py / py.sum()).sum())


def gelman_rubin(chains: np.ndarray) -> float:
    """Potential scale reduction factor for an (m chains, n draws) array."""
    m, n = chains.shape
    means = chains.mean(axis=1)
    W = chains.var(axis=1, ddof=1).mean()
    B = n * means.var(ddof=1)
    var_hat = (n - 1) / n * W + B / n
    return float(math.sqrt(var_hat / W))


@dataclass
class ErgodicityReport:
    tv: float
    coalesced: float  # fraction of coupled path pairs whose final states agree to 1e-9
    drift_a: float
    drift_b: float
    rhat: float
    min_epsilon: float
    tv_tol: float = 0.1
    drift_tol: float = 0.05
    rhat_tol: float = 1.1

    @property
    def drift_rel_diff(self) -> float:
        return abs(self.drift_a - self.drift_b) / (0.5 * (self.drift_a + self.drift_b))

    @property
    def passed(self) -> bool:
        return (
            self.tv < self.tv_tol
            and self.drift_rel_diff < self.drift_tol
            and self.rhat < self.rhat_tol
            and self.min_epsilon > 0
        )

    def summary(self) -> dict:
        return {
            "binned_tv_final_alpha": self.tv,
            "coalesced_fraction": self.coalesced,
            "drift_a": self.drift_a,
            "drift_b": self.drift_b,
            "drift_rel_diff": self.drift_rel_diff,
            "gelman_rubin_alpha": self.rhat,
            "min_epsilon_visited": self.min_epsilon,
            "passed": self.passed,
        }


def ergodicity_check(a: Simulation, b: Simulation, burn_in: int = 100, bins: int = 8) -> ErgodicityReport:
    pa = [p for p in a.paths if p.failure is None]
    pb = [p for p in b.paths if p.failure is None]
    xa = np.array([p.states[-1, 0] for p in pa])
    xb = np.array([p.states[-1, 0] for p in pb])
    same = [
        np.allclose(p.states[-1], q.states[-1], rtol=1e-9, atol=0)
        for p, q in zip(pa, pb)
        if p.seed[1:] == q.seed[1:]
    ]
    n = min(p.n_steps for p in pa + pb)
    chains = np.array([p.states[burn_in + 1 : n + 1, 0] for p in pa + pb])
    min_eps = min(min(epsilon_of(CurvatureVector(*s)) for s in p.states[1:]) for p in pa + pb)
    return ErgodicityReport(
        tv=binned_tv(xa, xb, bins),
        coalesced=float(np.mean(same)) if same else 0.0,
        drift_a=a.drift(),
        drift_b=b.drift(),
        rhat=gelman_rubin(chains),
        min_epsilon=min_eps,
    )


@dataclass
class ConstancyReport:
    lambdas: tuple
    d: float
    values: np.ndarray  # lam^-d N(g, lam) / h(g), shape (samples, lambdas)
    spreads: list[float]  # max/min over the sample at each lambda
    pooled: list[float]  # max/min over the sample and all lambdas up to each one
    tol: float = 1.1

    @property
    def passed(self) -> bool:
        return self.spreads[0] <= self.tol and all(b <= a for a, b in zip(self.spreads, self.spreads[1:]))

    @property
    def pooled_growing(self) -> bool:
        return all(b > a for a, b in zip(self.pooled, self.pooled[1:]))

    def summary(self) -> dict:
        return {
            "d": self.d,
            "lambdas": list(self.lambdas),
            "spreads": self.spreads,
            "pooled_spreads": self.pooled,
            "passed": self.passed,
        }


def renewal_constancy_check(
    states: list[CurvatureVector],
    lambdas: tuple = (1e5, 1e6),
    d: float | None = None,
    estimator: MeasureEstimator | None = None,
) -> ConstancyReport:
    """Spread of lam^-d N(g, lam) / h(g) across g: the renewal limit is one constant."""
    estimator = estimator or MeasureEstimator()
    d = estimator.d if d is None else d
    lams = np.array(sorted(lambdas), dtype=float)
    vals = np.array([count_many(g, lams) * lams ** (-d) / estimator.h(g) for g in states])
    spreads = [float(c.max() / c.min()) for c in vals.T]
    pooled = [float(vals[:, : i + 1].max() / vals[:, : i + 1].min()) for i in range(len(lams))]
    return ConstancyReport(tuple(map(float, lams)), d, vals, spreads, pooled)


def summary_json(sim: Simulation, **extra) -> str:
    body = {
        "metadata": sim.metadata,
        "drift": sim.drift(),
        "drift_path_std": sim.drift_spread(),
        **extra,
    }
    return json.dumps(body, indent=2, sort_keys=True)
