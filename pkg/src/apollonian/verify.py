"""Self-checks run by ``apollonian verify``: exact identities first, then the dimension gate."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from .counting import count, decomposition_check, scaling_covariance_check
from .curvature import Backend, CurvatureVector, inscribed_curvature, permute, scale
from .geometry import DiskTriple, descendant
from .words import (
    LETTERS,
    IndexWord,
    apply,
    apply_word,
    closed_form_index,
    closed_form_power,
    generator,
    matrix_of_word,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def check_closed_forms(n_max: int = 50) -> CheckResult:
    bad = 0
    for j in LETTERS:
        for n in range(n_max + 1):
            bad += closed_form_power(j, n, Backend.EXACT) != matrix_of_word(str(j) * n, Backend.EXACT)
        for k in LETTERS:
            if k != j:
                for n in range(1, n_max + 1):
                    tau = IndexWord(n, j, k)
                    bad += closed_form_index(tau, Backend.EXACT) != matrix_of_word(tau.word, Backend.EXACT)
    return CheckResult("closed-form matrices", bad == 0, f"n <= {n_max}, {bad} mismatches")


def random_integral_state(rng: random.Random, bound: int = 60) -> CurvatureVector:
    """Integral quadruple from a random pair (a, b) and a divisor split of a*b + ... (kappa exact)."""
    while True:
        # alpha, beta free; choose gamma so that kappa^2 = ab + c(a+b) is a square
        a, b = rng.randint(0, bound), rng.randint(0, bound)
        if a + b == 0:
            continue
        k = rng.randint(math.isqrt(a * b), math.isqrt(a * b) + 3 * bound)
        num = k * k - a * b
        if num >= 0 and num % (a + b) == 0:
            c = num // (a + b)
            if min(b + c, c + a) > 0:
                return CurvatureVector(a, b, c, k)


def check_kappa_invariant(n_states: int = 1000, max_len: int = 20, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    bad = 0
    for _ in range(n_states):
        g = random_integral_state(rng)
        w = "".join(rng.choice("123") for _ in range(rng.randint(0, max_len)))
        x = apply_word(g, w, Backend.EXACT)  # the constructor re-checks kappa exactly
        a, b, c, k = x
        bad += k * k != b * c + c * a + a * b
    return CheckResult("kappa invariant", bad == 0, f"{n_states} states, |w| <= {max_len}")


def check_fixtures() -> CheckResult:
    g = CurvatureVector(2, 3, 6, 6)
    got = (count(g, 23), count(g, 62), inscribed_curvature(g), apply(g, generator(1)).as_tuple())
    want = (1, 4, 23, (23, 3, 6, 15))
    return CheckResult("hand fixtures", got == want, f"N(23), N(62), curv_in, g M_1 = {got}")


DECOMPOSITION_CASES = [
    (CurvatureVector(2, 3, 6, 6), 62),
    (CurvatureVector(2, 3, 6, 6), 10**4),
    (CurvatureVector(0, 1, 1, 1), 5000),
    (CurvatureVector(1, 1, 0, 1), 5000),
    (CurvatureVector(3, 6, 7, 9), 20000),
]


def check_decomposition(cases=DECOMPOSITION_CASES) -> CheckResult:
    reports = [decomposition_check(g, lam) for g, lam in cases]
    ok = all(r.passed for r in reports)
    return CheckResult("decomposition identity", ok, f"{len(reports)} cases, largest N = {max(r.total for r in reports)}")


def check_covariance() -> CheckResult:
    g = CurvatureVector(2, 3, 6, 6)
    reps = [scaling_covariance_check(g, s, lam) for s, lam in ((2, 124), (3, 3000), (5, 10**4))]
    reps.append(scaling_covariance_check(CurvatureVector(0, 1, 1, 1), 4, 4000, (3, 1, 2)))
    ok = all(r.passed for r in reps)
    ok &= count(permute(g, (2, 1, 3)), 5000) == count(g, 5000) == count(scale(g, 1), 5000)
    return CheckResult("scaling/permutation covariance", ok, f"{len(reps)} scalings, 3 permutations")


def check_geometry(n_triples: int = 100, max_len: int = 10, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    worst_c = worst_t = 0.0
    for _ in range(n_triples):
        curv = [rng.uniform(0.1, 10) for _ in range(3)]
        if rng.random() < 0.1:
            curv[rng.randrange(3)] = 0.0
        t = DiskTriple.canonical(curv)
        g = t.quadruple()
        w = "".join(rng.choice("123") for _ in range(rng.randint(1, max_len)))
        tw = descendant(t, w)
        want = apply_word(g, w)
        for got, ref in zip(tw.curvatures, want.triple):
            worst_c = max(worst_c, abs(got - ref) / max(abs(ref), 1e-300))
        worst_t = max(worst_t, max(map(abs, tw.tangency_residuals().values())) / t.scale)
    ok = worst_c < 1e-9 and worst_t < 1e-9
    return CheckResult("geometry vs algebra", ok, f"max rel curvature err {worst_c:.2e}, max tangency residual {worst_t:.2e}")


def check_dimension_gate(lambda_max: float = 1e6) -> CheckResult:
    from .dimension import estimate_dimension

    est = estimate_dimension(CurvatureVector(2, 3, 6, 6), lambda_max)
    return CheckResult(
        "dimension gate",
        est.boyd_pass,
        f"d_hat {est.d_hat:.5f}, final-decade slope {est.final_slope:.5f} at lambda_max {lambda_max:g}",
    )


QUICK: list[Callable[[], CheckResult]] = [
    check_fixtures,
    check_closed_forms,
    check_kappa_invariant,
    check_decomposition,
    check_covariance,
    check_geometry,
]


def run_checks(quick: bool = True) -> list[CheckResult]:
    checks = QUICK if quick else QUICK + [check_dimension_gate]
    out = []
    for fn in checks:
        try:
            out.append(fn())
        except AssertionError as exc:
            out.append(CheckResult(fn.__name__.removeprefix("check_"), False, str(exc)))
    return out
