import math

import pytest

from apollonian.curvature import (
    Backend,
    CurvatureOverflowError,
    CurvatureVector,
    GammaEpsilonParams,
    check_width,
    circumscribed_curvature,
    epsilon_of,
    in_gamma,
    in_gamma_eps,
    in_gamma_interior,
    inscribed_curvature,
    kappa_of,
    norm,
    permute,
    rho_gamma,
    scale,
)


def test_kappa_exact_for_squares():
    assert kappa_of(2, 3, 6) == 6
    assert isinstance(kappa_of(2, 3, 6), int)
    assert kappa_of(0, 1, 1) == 1
    assert kappa_of(1.0, 1.0, 1.0) == pytest.approx(math.sqrt(3))


def test_kappa_rejects_negative():
    with pytest.raises(ValueError):
        kappa_of(-1, 2, 3)


def test_constructor_checks_invariant():
    CurvatureVector(2, 3, 6, 6)
    with pytest.raises(ValueError):
        CurvatureVector(2, 3, 6, 7)
    with pytest.raises(ValueError):
        CurvatureVector(1.0, 1.0, 1.0, 1.8)


def test_from_triple_coerces_irrational_to_float():
    g = CurvatureVector.from_triple(1, 1, 1)
    assert not g.is_integral
    assert g.kappa == pytest.approx(math.sqrt(3))
    assert CurvatureVector.from_triple(2, 3, 6).is_integral


def test_of_accepts_triple_or_quadruple():
    assert CurvatureVector.of([2, 3, 6]) == CurvatureVector(2, 3, 6, 6)
    assert CurvatureVector.of([2, 3, 6, 6]) == CurvatureVector(2, 3, 6, 6)
    with pytest.raises(ValueError):
        CurvatureVector.of([1, 2])


def test_inscribed_and_circumscribed(g236):
    assert inscribed_curvature(g236) == 23
    assert circumscribed_curvature(g236) == 6


def test_gamma_membership():
    assert in_gamma(CurvatureVector(0, 1, 1, 1))
    assert not in_gamma_interior(CurvatureVector(0, 1, 1, 1))
    assert in_gamma_interior(CurvatureVector(2, 3, 6, 6))
    # two half-planes: kappa = 0 is outside Gamma
    assert not in_gamma(CurvatureVector(0, 0, 1, 0))


def test_gamma_eps():
    g = CurvatureVector(2, 3, 6, 6)
    assert in_gamma_eps(g, 0.1)
    assert not in_gamma_eps(g, 0.2)  # 6 > 1/0.2
    assert in_gamma_eps(g, GammaEpsilonParams(1 / 6))
    assert epsilon_of(g) == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        GammaEpsilonParams(0.0)


def test_scale_and_permute(g236):
    assert scale(g236, 2) == CurvatureVector(4, 6, 12, 12)
    assert scale(g236, 0.5).as_tuple() == (1.0, 1.5, 3.0, 3.0)
    # new j-th entry is the old pi[j]-th
    assert permute(g236, (2, 3, 1)) == CurvatureVector(3, 6, 2, 6)
    with pytest.raises(ValueError):
        permute(g236, (1, 1, 2))
    with pytest.raises(ValueError):
        scale(g236, 0)


def test_rho_and_norm(g236):
    assert rho_gamma(g236, g236) == 0
    assert rho_gamma(g236, CurvatureVector(2, 3, 6, 6)) == 0
    assert norm(g236) == pytest.approx(math.sqrt(4 + 9 + 36 + 36))


def test_wide_backend_overflow():
    assert check_width(2**126, Backend.WIDE) == 2**126
    with pytest.raises(CurvatureOverflowError):
        check_width(2**127, Backend.WIDE)
    assert check_width(2**200, Backend.EXACT) == 2**200


def test_str_round_trip():
    assert str(CurvatureVector(2, 3, 6, 6)) == "(2,3,6,6)"
