import json

import pytest

from apollonian.curvature import Backend, CurvatureOverflowError, CurvatureVector
from apollonian.words import (
    IDENTITY,
    CurvMatrix,
    IndexWord,
    apply,
    apply_word,
    closed_form_index,
    closed_form_power,
    enumerate_index_set,
    generator,
    incomparable,
    index_matrix,
    is_prefix,
    make_word,
    matrix_of_word,
)
from oracles import GEN, word_matrix


def test_generators_match_oracle():
    for j in (1, 2, 3):
        assert generator(j).rows == GEN[str(j)]
        assert generator(j).det() in (1, -1)


def test_fixture_first_child(g236):
    assert apply(g236, generator(1)) == CurvatureVector(23, 3, 6, 15)
    assert apply(g236, generator(2)) == CurvatureVector(2, 23, 6, 14)
    assert apply(g236, generator(3)) == CurvatureVector(2, 3, 23, 11)


def test_word_product_order():
    # first letter acts first: g M_{12} = (g M_1) M_2
    g = CurvatureVector(2, 3, 6, 6)
    assert apply(g, matrix_of_word("12")) == apply_word(apply_word(g, "1"), "2")
    assert matrix_of_word("12").rows == word_matrix("12")
    assert matrix_of_word("") == IDENTITY


@pytest.mark.parametrize("n", range(0, 51))
def test_closed_form_powers(n):
    for j in (1, 2, 3):
        assert closed_form_power(j, n).rows == word_matrix(str(j) * n)


@pytest.mark.parametrize("n", range(1, 51))
def test_closed_form_index(n):
    for tau in [IndexWord(n, j, k) for j in (1, 2, 3) for k in (1, 2, 3) if j != k]:
        assert closed_form_index(tau).rows == word_matrix(tau.word)


def test_index_set():
    taus = enumerate_index_set(2)
    assert len(taus) == 12
    assert [t.word for t in taus[:6]] == ["12", "13", "21", "23", "31", "32"]
    words = [t.word for t in enumerate_index_set(6)]
    assert all(incomparable(a, b) for a in words for b in words if a != b)
    with pytest.raises(ValueError):
        enumerate_index_set(0)


def test_index_word_validation():
    assert IndexWord.parse("1112") == IndexWord(3, 1, 2)
    for bad in ("11", "1", "1212", "2"):
        with pytest.raises(ValueError):
            IndexWord.parse(bad)
    with pytest.raises(ValueError):
        IndexWord(1, 2, 2)
    with pytest.raises(ValueError):
        IndexWord(0, 1, 2)


def test_make_word_and_prefix():
    assert make_word([1, 2, 3]) == "123"
    with pytest.raises(ValueError):
        make_word("124")
    assert is_prefix("12", "123")
    assert not is_prefix("13", "123")


def test_json_round_trip():
    m = matrix_of_word("1231")
    assert CurvMatrix.from_json(m.to_json()) == m
    assert json.loads(m.to_json())[3] == list(m.rows[3])


def test_wide_backend_reports_overflow():
    with pytest.raises(CurvatureOverflowError):
        matrix_of_word("12" * 120, Backend.WIDE)
    big = matrix_of_word("12" * 120, Backend.EXACT)
    assert max(max(r) for r in big.rows) > 2**127


def test_index_matrix_cached():
    assert index_matrix(IndexWord(3, 2, 1)) is index_matrix(IndexWord(3, 2, 1))


def test_apply_rejects_outside_gamma():
    with pytest.raises(ValueError):
        apply(CurvatureVector(0, 0, 1, 0), generator(1))
