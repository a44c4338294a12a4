import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dunkl_harmonics.model import (DomainError, DunklParams, EllipsoidAxes, HarmonicIndex,
                                   InvalidParameterError, as_number, check_point, degree,
                                   indices_of_degree, load_problem, validate_params)


def test_mu_values():
    assert validate_params(1, ["1/2", "1/2"]).mu == 1
    assert validate_params(2, [0, 0, 0]).mu == Fraction(1, 2)
    p = validate_params(2, [0.5, 1.0, 0.25])
    assert isinstance(p.mu, float) and p.mu == pytest.approx(2.25)


def test_mu_must_be_positive():
    with pytest.raises(InvalidParameterError):
        validate_params(1, [0, 0])
    with pytest.raises(InvalidParameterError):
        validate_params(1, [-1, 2])
    with pytest.raises(InvalidParameterError):
        validate_params(2, [1, 1])


def test_degree():
    assert degree(HarmonicIndex((1,), (0, 0))) == 2
    assert degree(HarmonicIndex((0,), (0, 0))) == 0
    assert degree(HarmonicIndex((1, 2), (1, 0, 1))) == 8


def test_bad_index():
    with pytest.raises(InvalidParameterError):
        HarmonicIndex((1,), (0, 2))
    with pytest.raises(InvalidParameterError):
        HarmonicIndex((1,), (0, 0, 0))
    with pytest.raises(InvalidParameterError):
        HarmonicIndex((-1,), (0, 0))


def test_axes():
    ax = EllipsoidAxes(("-1", 1))
    assert ax.exact and ax.k == 1 and ax.width == 2
    assert ax.bigA == (-2, 2)
    with pytest.raises(InvalidParameterError):
        EllipsoidAxes((0, 0))
    with pytest.raises(InvalidParameterError):
        EllipsoidAxes((1, 0))


def test_as_number_modes():
    assert as_number("3/4") == Fraction(3, 4)
    assert isinstance(as_number(0.75), float)
    assert as_number(2) == 2 and isinstance(as_number(2), Fraction)
    with pytest.raises(InvalidParameterError):
        as_number(True)


def test_check_point():
    assert check_point([1, 2], 1) == (1, 2)
    with pytest.raises(DomainError):
        check_point([1, 2, 3], 1)


def test_load_problem_roundtrip():
    obj = json.loads('{"k": 2, "alpha": ["1/2", 1, "3/2"], "a": [0, 1, 3], "n": [1, 0], "p": [0, 1, 0]}')
    params, axes, index = load_problem(obj)
    assert params.alpha == (Fraction(1, 2), 1, Fraction(3, 2))
    assert params.mu == Fraction(7, 2)
    assert axes.a == (0, 1, 3)
    assert index.m == 3
    with pytest.raises(InvalidParameterError):
        load_problem({"alpha": [1, 1]})
    with pytest.raises(InvalidParameterError):
        load_problem({"k": 1, "alpha": [1, 1], "a": [0, 1, 2]})


@given(st.integers(1, 3), st.integers(0, 6))
def test_indices_of_degree(k, m):
    idxs = list(indices_of_degree(k, m))
    assert all(i.m == m and i.k == k for i in idxs)
    assert len(set(idxs)) == len(idxs)
    # the count equals the dimension of the space of harmonics of degree m
    from math import comb
    dim = comb(m + k, k) - (comb(m - 2 + k, k) if m >= 2 else 0)
    assert len(idxs) == dim


def test_params_hashable_and_float_copy():
    p = DunklParams(1, ("1/2", "3/2"))
    assert hash(p) == hash(DunklParams(1, (Fraction(1, 2), Fraction(3, 2))))
    q = p.as_float()
    assert not q.exact and q.mu == pytest.approx(2.0)


def test_exact_and_float_parameters_are_distinct_keys():
    from fractions import Fraction
    from dunkl_harmonics.orthopoly import JacobiParams
    ex = DunklParams(1, (Fraction(1, 2), 1))
    fl = ex.as_float()
    assert ex != fl and ex == DunklParams(1, (Fraction(1, 2), Fraction(1)))
    assert EllipsoidAxes((0, 1)) != EllipsoidAxes((0.0, 1.0))
    assert JacobiParams(Fraction(1, 2), 0) != JacobiParams(0.5, 0.0)
    assert len({ex, fl}) == 2
