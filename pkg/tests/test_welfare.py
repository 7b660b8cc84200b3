import math

import pytest
from hypothesis import given, strategies as st

from pastfair.welfare import (UtilityVector, WelfareError, WelfareSpec, egalitarian, evaluate,
                              generalized_gini, nash, utilitarian)

vals = st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=8)


@pytest.mark.parametrize("z,expected", [((1, 2, 3), 6), ((0, 0), 0), ((0.5, 0.3), 0.8)])
def test_utilitarian(z, expected):
    assert utilitarian(z) == pytest.approx(expected)


@pytest.mark.parametrize("z,expected", [((1, 2, 3), 1), ((0.2, 0.5), 0.2), ((5, 5), 5)])
def test_egalitarian(z, expected):
    assert egalitarian(z) == expected


@pytest.mark.parametrize("z,expected", [((2, 3), 6), ((0, 5), 0), ((1, 1, 1), 1)])
def test_nash(z, expected):
    assert nash(z) == expected


def test_nash_eps_offset():
    assert nash((0, 5), eps=1.0) == 6.0


@pytest.mark.parametrize("z,w,expected", [
    ((3, 1), (0.7, 0.3), 1.6),
    ((3, 1), (1, 0), 1),
    ((2, 2, 2), (0.5, 0.3, 0.2), 2),
])
def test_generalized_gini(z, w, expected):
    assert generalized_gini(z, w) == pytest.approx(expected, abs=1e-12)


def test_gini_errors():
    with pytest.raises(WelfareError, match="agents"):
        generalized_gini((1, 2), (1.0,))
    with pytest.raises(WelfareError, match="nonincreasing"):
        generalized_gini((1, 2), (0.3, 0.7))


@pytest.mark.parametrize("fn", [utilitarian, egalitarian, nash])
def test_empty_vector_is_an_error(fn):
    with pytest.raises(WelfareError, match="empty utility vector"):
        fn(())


@pytest.mark.parametrize("spec,z,expected", [
    (WelfareSpec("egalitarian"), (0.5, 0.3), 0.3),
    (WelfareSpec("utilitarian"), (1, 1), 2),
    (WelfareSpec("nash"), (2, 3), 6),
])
def test_evaluate_dispatch(spec, z, expected):
    assert evaluate(spec, UtilityVector(z)) == pytest.approx(expected)


def test_spec_parsing_and_validation():
    assert WelfareSpec.parse("mmf").kind == "egalitarian"
    g = WelfareSpec.parse("gini:0.7,0.3")
    assert g.kind == "generalized_gini" and g.gini_weights == (0.7, 0.3)
    with pytest.raises(WelfareError):
        WelfareSpec("generalized_gini")
    with pytest.raises(WelfareError):
        WelfareSpec("utilitarian", (1.0,))
    with pytest.raises(WelfareError):
        WelfareSpec("gini", (0.0, 0.0))
    with pytest.raises(WelfareError):
        WelfareSpec("alpha_fair")


def test_utility_vector_invariants():
    with pytest.raises(WelfareError):
        UtilityVector((1.0, -0.1))
    with pytest.raises(WelfareError):
        UtilityVector((1.0, 2.0), ("a", "a"))
    with pytest.raises(WelfareError):
        UtilityVector((1.0,), ("a", "b"))
    assert UtilityVector((1.0, 2.0), ("a", "b"))["b"] == 2.0


@given(vals, st.randoms())
def test_symmetry(z, rnd):
    perm = list(z)
    rnd.shuffle(perm)
    w = sorted((1.0 - rnd.random() for _ in z), reverse=True)
    assert egalitarian(perm) == egalitarian(z)
    assert generalized_gini(perm, w) == generalized_gini(z, w)
    assert utilitarian(perm) == pytest.approx(utilitarian(z), rel=1e-12, abs=1e-12)
    assert nash(perm) == pytest.approx(nash(z), rel=1e-12)


@given(vals, st.data())
def test_gini_weight_degeneracies(z, data):
    n = len(z)
    assert generalized_gini(z, [1.0] + [0.0] * (n - 1)) == egalitarian(z)
    assert generalized_gini(z, [1.0] * n) == pytest.approx(utilitarian(z), rel=1e-12, abs=1e-12)
