from math import gcd, isqrt

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from modmethod.algebra import ResidueSet
from modmethod.diophantine import (
    ConicParams,
    ExpTemplate,
    InvalidParams,
    MordellInstance,
    MordellSolutionSet,
    UnsupportedShape,
    conic_cover_check,
    conic_point,
    congruence_obstruction,
    filter_mordell_solutions,
    mordell_search,
    obstructed_for_all,
    primitive_conic_solutions,
    prop3_obstruction,
    prop3_search,
    reduce_unit_case,
)
from modmethod.frey import TernaryEquation


def naive_mordell(k, bound):
    out = []
    for x in range(-bound, bound + 1):
        v = x**3 + k
        if v >= 0 and isqrt(v) ** 2 == v:
            out.append((x, isqrt(v)))
    return out


# ---------------------------------------------------------------------------
# conics


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from([3, -3, 5, -5, 7, 11, -13]),
    st.sampled_from([1, 2]),
    st.integers(-40, 40),
    st.integers(-40, 40),
    st.sampled_from([1, -1]),
    st.sampled_from([1, -1]),
)
def test_conic_point_on_curve(p, family, s, t, sx, sz):
    params = ConicParams(p, family, s, t, sx, sz)
    try:
        x, y, z = conic_point(params)
    except InvalidParams:
        assume(False)
    assert x * x + p * y * y == z * z
    assert gcd(x, y) == 1


@pytest.mark.parametrize(
    "params",
    [
        ConicParams(4, 1, 2, 1),
        ConicParams(2, 1, 2, 1),
        ConicParams(3, 1, 3, 1),
        ConicParams(3, 2, 4, 1),
        ConicParams(3, 1, 1, 1),
        ConicParams(3, 1, 4, 2),
        ConicParams(3, 3, 2, 1),
        ConicParams(3, 1, 2, 1, sign_x=2),
    ],
)
def test_conic_invalid(params):
    with pytest.raises(InvalidParams):
        conic_point(params)


@pytest.mark.parametrize("p", [3, -3, 5, 7])
def test_conic_cover_small(p):
    rep = conic_cover_check(p, 40)
    assert rep.solutions > 0
    assert rep.ok, (rep.uncovered[:5], rep.in_both[:5], rep.bogus[:5])


def test_primitive_solutions_brute():
    sols = primitive_conic_solutions(5, 12)
    assert (2, 1, 3) in sols and (2, 1, -3) in sols
    assert all(x * x + 5 * y * y == z * z for x, y, z in sols)


# ---------------------------------------------------------------------------
# 2^(2x) - b^y = +-3 z^2


def test_prop3_obstruction_values():
    plus = {prop3_obstruction(3, s, t) for s in range(-30, 31) for t in range(-30, 31) if gcd(s, t) == 1 and (s - t) % 2}
    minus = {prop3_obstruction(-3, s, t) for s in range(-30, 31) for t in range(-30, 31) if gcd(s, t) == 1 and (s - t) % 2}
    assert plus == {0}
    assert minus == {1}


@pytest.mark.parametrize("b", [3, 5, 7, 9])
def test_prop3_search_empty(b):
    assert prop3_search(b, 12, 12) == []


def test_prop3_search_finds_planted_solution():
    # 2^2 - 1^2 = 3 * 1^2
    assert prop3_search(1, 3, 4, x_min=1)[:1] == [(1, 2, 1)]
    with pytest.raises(InvalidParams):
        prop3_search(4, 3, 3)


# ---------------------------------------------------------------------------
# congruences


def test_exp_template_text():
    assert str(ExpTemplate(64, -1, 5)) == "64 - 5^alpha"
    assert str(ExpTemplate(64, 3, 5)) == "64 + 3*5^alpha"


def test_mod6_obstruction_odd_alpha():
    allowed = ResidueSet.square_multiples(6, (3, -3))
    t = ExpTemplate(64, -1, 5)
    brute = {(64 - 5**a) % 6 for a in range(1, 1000, 2)}
    assert brute == {5}
    obs, residues, first = obstructed_for_all(t, 6, allowed, start=1, step=2)
    assert obs and set(residues) == {5} and first is None
    assert all(congruence_obstruction(t, 6, allowed, range(1, 1000, 2)).values())


def test_mod5_obstruction():
    allowed = ResidueSet.square_multiples(5, (3, -3))
    for sign in (1, -1):
        t = ExpTemplate(64, sign, 5)
        assert {t.residue(a, 5) for a in range(1, 1000)} == {4}
        assert obstructed_for_all(t, 5, allowed)[0]


def test_unobstructed_progression_reports_alpha():
    allowed = ResidueSet.square_multiples(6, (3, -3))
    obs, _, first = obstructed_for_all(ExpTemplate(64, -1, 5), 6, allowed, start=2, step=2)
    assert not obs and first == 2  # 64 - 25 = 39 = 3 mod 6


@settings(max_examples=60, deadline=None)
@given(st.integers(-50, 50), st.integers(-5, 5).filter(bool), st.integers(2, 9), st.integers(2, 12))
def test_cycle_decision_matches_brute(c, a, base, modulus):
    allowed = ResidueSet(modulus, frozenset({0}))
    t = ExpTemplate(c, a, base)
    obs, _, first = obstructed_for_all(t, modulus, allowed)
    brute = [al for al in range(1, 4 * modulus + 2) if t.residue(al, modulus) in allowed]
    if obs:
        assert not brute
    else:
        assert brute and first == brute[0]


# ---------------------------------------------------------------------------
# Mordell


@settings(max_examples=40, deadline=None)
@given(st.integers(-3000, 3000).filter(bool), st.integers(1, 400))
def test_mordell_matches_naive(k, bound):
    assert mordell_search(k, bound, chunk=97).solutions == naive_mordell(k, bound)


def test_mordell_workers_agree():
    a = mordell_search(-10584, 20000).solutions
    b = mordell_search(-10584, 20000, workers=2, chunk=5000).solutions
    assert a == b
    assert (22, 8) in a


def test_mordell_known_point():
    assert (-3, 36) in mordell_search(1323, 1000).solutions
    with pytest.raises(ValueError):
        mordell_search(0, 10)


def test_filter():
    sols = MordellSolutionSet(1323, 1000, [(-3, 36), (14, 56)])
    inst = MordellInstance(1323, 7, 7, 1, "test")
    assert filter_mordell_solutions(sols, inst) == [(14, 56)]
    with pytest.raises(ValueError):
        filter_mordell_solutions(sols, MordellInstance(5, 1, 1, 0, "x"))


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from([27, 9, 3, 5, -7]),
    st.sampled_from([7, 13, 1, -5]),
    st.integers(0, 20),
    st.sampled_from([1, -1]),
    st.sampled_from([1, -1]),
    st.integers(-50, 50),
)
def test_unit_reduction_identity(B, C, alpha, x, y, z):
    even, odd = reduce_unit_case(TernaryEquation(2, B, C, 3), x * y)
    gap = 2**alpha * x + B * y - C * z**3
    if alpha % 2 == 0:
        X, Y, k, f = x * C * z, abs(C) * 2 ** (alpha // 2), even.k, 1
    else:
        X, Y, k, f = 2 * x * C * z, 4 * abs(C) * 2 ** (alpha // 2), odd.k, 8
    assert Y * Y - X**3 - k == f * C * C * x * gap


def test_reduction_rejects_shapes():
    with pytest.raises(UnsupportedShape):
        reduce_unit_case(TernaryEquation(5, 64, 3, 2), 1)
    with pytest.raises(UnsupportedShape):
        reduce_unit_case(TernaryEquation(3, 2, 5, 3), 1)
