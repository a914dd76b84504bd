from math import gcd

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from sympy import factorint

from modmethod.algebra import FactoredLevel, is_kth_power_free, realize_level, valuation
from modmethod.ellcurve import WeierstrassCurve, discriminant
from modmethod.frey import (
    AmbiguousBranch,
    CaseTag2,
    NonIntegralModel,
    NormalizationViolated,
    SolutionTriple,
    TernaryEquation,
    UnclassifiableParity,
    artin_level_ppp2,
    artin_level_ppp3,
    classify_case2,
    epsilon3_prime,
    frey_curve_ppp2,
    frey_curve_ppp3,
    is_exceptional_ppp3,
    normalize_ppp2,
    normalize_ppp3,
)


def primes_of(n):
    return set(factorint(abs(n))) if abs(n) > 1 else set()


def case_predicates(eq, sol):
    """The five parity situations, written out independently of the module."""
    A, B, C = eq.A, eq.B, eq.C
    x, y, z, n = sol.x, sol.y, sol.z, sol.n
    ab_odd = x % 2 and y % 2
    v = valuation(B, 2)
    return {
        1: bool(ab_odd and A % 2 and B % 2 and C % 2 and (y + B * C) % 4 == 0),
        2: bool(ab_odd and (v == 1 or valuation(C, 2) == 1)),
        3: bool(ab_odd and v == 2 and (z + y * (B // 4)) % 4 == 0),
        4: bool(ab_odd and v in (3, 4, 5) and (z - C) % 4 == 0),
        5: bool(valuation(B * y**n, 2) >= 6 and (z - C) % 4 == 0),
    }


def squarefree_split(S):
    sign = -1 if S < 0 else 1
    C, z = sign, 1
    for p, e in factorint(abs(S)).items():
        C *= p ** (e % 2)
        z *= p ** (e // 2)
    return C, z


def cubefree_split(S):
    C, z = 1, -1 if S < 0 else 1
    for p, e in factorint(abs(S)).items():
        C *= p ** (e % 3)
        z *= p ** (e // 3)
    return C, z


# ---------------------------------------------------------------------------
# examples


def test_theorem1_case_and_level():
    eq = TernaryEquation(5, 64, 3, 2)
    norm = normalize_ppp2(eq, SolutionTriple(1, 1, 1, 7))
    assert norm.sol.z == -1 and norm.moves
    tag = classify_case2(norm.eq, norm.sol)
    assert (tag.index, tag.curve_choice, tag.alpha_exponent) == (5, "E3", -1)
    assert realize_level(artin_level_ppp2(norm.eq, tag)) == 45


def test_case1_example():
    eq = TernaryEquation(1, 1, 1, 2)
    sol = SolutionTriple(1, 3, 1, 7)  # y = -BC mod 4
    tag = classify_case2(eq, sol)
    assert (tag.index, tag.curve_choice, tag.alpha_exponent) == (1, "E1", 5)


def test_case5_alpha_zero_for_large_ord2():
    eq = TernaryEquation(1, 128, 1, 2)
    tag = classify_case2(eq, SolutionTriple(1, 1, 1, 7))
    assert (tag.index, tag.curve_choice, tag.alpha_exponent) == (5, "E3", 0)


def test_frey_curve_examples():
    e3 = frey_curve_ppp2(TernaryEquation(1, 64, 3, 2), SolutionTriple(1, 1, 23, 7), CaseTag2(5, "E3", -1))
    assert e3.ainvs == (1, 17, 0, 3, 0)
    e1 = frey_curve_ppp2(TernaryEquation(1, 2, 1, 2), SolutionTriple(1, 1, 3, 7), CaseTag2(2, "E1", 6))
    assert e1.ainvs == (0, 6, 0, 2, 0)
    e2 = frey_curve_ppp2(TernaryEquation(1, 4, 1, 2), SolutionTriple(1, 1, -1, 7), CaseTag2(3, "E2", 1))
    assert e2.ainvs == (0, -1, 0, 1, 0)


def test_non_integral_models():
    with pytest.raises(NonIntegralModel):
        frey_curve_ppp2(TernaryEquation(1, 2, 1, 2), SolutionTriple(1, 1, 1, 7), CaseTag2(3, "E2", 1))
    with pytest.raises(NonIntegralModel):
        frey_curve_ppp2(TernaryEquation(1, 64, 3, 2), SolutionTriple(1, 1, 1, 7), CaseTag2(5, "E3", -1))


def test_ppp3_curve_examples():
    assert frey_curve_ppp3(TernaryEquation(2, 27, 7, 3), SolutionTriple(1, 1, 1, 11)).ainvs == (21, 0, 1323, 0, 0)
    assert frey_curve_ppp3(TernaryEquation(2, 27, 13, 3), SolutionTriple(1, 1, 1, 11)).ainvs == (39, 0, 4563, 0, 0)
    eq = TernaryEquation(1, 3, 1, 3, n_floor=7)
    sol = SolutionTriple(2, -1, 5, 7)
    assert frey_curve_ppp3(eq, sol).ainvs == (15, 0, -3, 0, 0)
    assert is_exceptional_ppp3(eq, sol)


def test_ppp3_normalization_violation():
    with pytest.raises(NormalizationViolated):
        frey_curve_ppp3(TernaryEquation(3, 2, 5, 3), SolutionTriple(1, 1, 1, 11))


@pytest.mark.parametrize("C,level", [(7, 98), (13, 338)])
def test_ppp3_levels(C, level):
    eq = TernaryEquation(2, 27, C, 3)
    norm = normalize_ppp3(eq, SolutionTriple(5, 1, 1, 11))
    assert epsilon3_prime(norm.eq, norm.sol)[0] == 1
    assert realize_level(artin_level_ppp3(norm.eq, norm.sol)) == level


def test_epsilon_rows():
    assert epsilon3_prime(TernaryEquation(1, 2, 3, 3), SolutionTriple(1, 1, 1, 11))[0] == 3**5
    assert epsilon3_prime(TernaryEquation(1, 3, 1, 3), SolutionTriple(1, 1, 1, 11))[0] == 3**4
    assert epsilon3_prime(TernaryEquation(1, 9, 1, 3), SolutionTriple(1, 1, 1, 11))[0] == 3**3
    # C = 1, B = 7, z = 3: 2 + 7 - 9 = 0
    assert epsilon3_prime(TernaryEquation(1, 7, 1, 3), SolutionTriple(1, 1, 3, 11))[0] == 3**2
    # only reachable without normalization: B y^n = 2 mod 3 leaves 3 out of the bracket
    with pytest.raises(AmbiguousBranch):
        epsilon3_prime(TernaryEquation(1, 2, 1, 3), SolutionTriple(1, 1, 1, 11))


def test_beta_rule_xy_even():
    eq = TernaryEquation(1, 1, 1, 2)
    tag = CaseTag2(5, "E3", 0, xy_even=True)
    lvl = artin_level_ppp2(eq, tag)
    assert lvl.factors.get(2) == 1


def test_degenerate_level_is_power_of_two():
    lvl = artin_level_ppp2(TernaryEquation(1, 1, 1, 2), CaseTag2(1, "E1", 5))
    assert lvl == FactoredLevel({2: 5}, excludes_n=True)


def test_unclassifiable():
    with pytest.raises(UnclassifiableParity):
        classify_case2(TernaryEquation(1, 1, 1, 2), SolutionTriple(1, 1, 1, 7))  # y + BC = 2 mod 4
    with pytest.raises(ValueError):
        TernaryEquation(1, 1, 4, 2)


# ---------------------------------------------------------------------------
# properties on genuine solutions


@settings(max_examples=300, deadline=None)
@given(
    st.integers(-40, 40).filter(lambda a: a % 2),
    st.integers(-300, 300).filter(bool),
    st.integers(-30, 30).filter(bool),
    st.integers(-30, 30).filter(bool),
    st.sampled_from([3, 5, 7]),
)
def test_ppp2_frey_curve_on_solutions(A, B, x, y, n):
    S = A * x**n + B * y**n
    assume(S != 0)
    C, z = squarefree_split(S)
    assume(gcd(A * x, B * y) == 1 and gcd(A * x, C * z) == 1 and gcd(B * y, C * z) == 1)
    assume(x * y not in (1, -1))
    eq = TernaryEquation(A, B, C, 2)
    sol = SolutionTriple(x, y, z, n)
    try:
        norm = normalize_ppp2(eq, sol)
        tag = classify_case2(norm.eq, norm.sol)
    except UnclassifiableParity:
        preds = case_predicates(eq, sol)
        flipped = case_predicates(eq, SolutionTriple(x, y, -z, n))
        assert not any(preds.values()) and not any(flipped.values())
        return
    preds = case_predicates(norm.eq, norm.sol)
    assert [k for k, v in preds.items() if v] == [tag.index]
    E = frey_curve_ppp2(norm.eq, norm.sol, tag)
    d = discriminant(E)
    assert d != 0
    assert primes_of(d) <= {2} | primes_of(A * B * C * x * y)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 30),
    st.integers(-60, 60).filter(bool),
    st.integers(-20, 20).filter(bool),
    st.integers(-20, 20).filter(bool),
    st.sampled_from([5, 7, 11]),
)
def test_ppp3_frey_curve_on_solutions(A, B, x, y, n):
    S = A * x**n + B * y**n
    assume(S != 0)
    C, z = cubefree_split(S)
    assume(gcd(A * x, B * y) == 1 and gcd(A * x, C * z) == 1 and gcd(B * y, C * z) == 1)
    assume((A * x**n) % 3 or (B * y**n) % 3)
    assume(is_kth_power_free(A, n) and is_kth_power_free(B, n))
    eq = TernaryEquation(A, B, C, 3, n_floor=n)
    norm = normalize_ppp3(eq, SolutionTriple(x, y, z, n))
    e, s = norm.eq, norm.sol
    assert (e.A * s.x**n) % 3 != 0 and (e.B * s.y**n) % 3 != 2
    assert e.A * s.x**n + e.B * s.y**n == e.C * s.z**3
    E = frey_curve_ppp3(e, s)
    d = discriminant(E)
    assert d != 0
    assert primes_of(d) <= {3} | primes_of(A * B * C * x * y)


# units mod 6 give odd values prime to 3; x may not share a factor with 3 z, y not with 15
units6 = st.integers(0, 20).flatmap(lambda k: st.sampled_from([6 * k + 1, 6 * k + 5]))


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(
    units6,
    units6.filter(lambda y: y % 5),
    st.integers(-40, 40).filter(lambda z: z % 2 and z % 3 and z % 5),
    st.sampled_from([7, 11, 13, 17]),
)
def test_theorem1_level_is_independent_of_solution(x, y, z, n):
    assume(gcd(5 * x, 64 * y) == 1 and gcd(5 * x, 3 * z) == 1 and gcd(64 * y, 3 * z) == 1)
    norm = normalize_ppp2(TernaryEquation(5, 64, 3, 2), SolutionTriple(x, y, z, n))
    tag = classify_case2(norm.eq, norm.sol)
    lvl = artin_level_ppp2(norm.eq, tag)
    assert realize_level(lvl, n) == 45
    assert n not in lvl.factors


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(
    st.integers(0, 30).map(lambda k: 6 * k + 1),
    st.integers(0, 30).map(lambda k: 2 * k + 1),
    st.integers(-30, 30).map(lambda k: 6 * k + 1),
    st.sampled_from([(7, 98), (13, 338)]),
)
def test_ppp3_levels_independent_of_solution(x, y, z, case):
    C, level = case
    assume(gcd(2 * x, 27 * y) == 1 and gcd(2 * x, C * z) == 1 and gcd(27 * y, C * z) == 1)
    norm = normalize_ppp3(TernaryEquation(2, 27, C, 3), SolutionTriple(x, y, z, 11))
    assert realize_level(artin_level_ppp3(norm.eq, norm.sol)) == level


def test_weierstrass_roundtrip():
    assert WeierstrassCurve.from_ainvs([1, 2, 3, 4, 5]).ainvs == (1, 2, 3, 4, 5)
