import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from modmethod.algebra import (
    FactoredLevel,
    IntPoly,
    NonIntegralLevel,
    ResidueSet,
    discriminant,
    is_kth_power_free,
    poly_gcd_mod,
    realize_level,
    resultant,
    roots_mod_prime,
    valuation,
)

X = sympy.Symbol("x")
small = st.integers(-20, 20)


def to_sympy(f: IntPoly):
    return sum(c * X**i for i, c in enumerate(f.coeffs))


def sylvester_det(f: IntPoly, g: IntPoly):
    """Res(f, g) as the determinant of the Sylvester matrix."""
    m, n = f.degree, g.degree
    if n == 0:
        return g.coeffs[0] ** m
    fc, gc = list(reversed(f.coeffs)), list(reversed(g.coeffs))
    rows = [[0] * i + fc + [0] * (n - 1 - i) for i in range(n)]
    rows += [[0] * i + gc + [0] * (m - 1 - i) for i in range(m)]
    return sympy.Matrix(rows).det()


monic = st.lists(small, min_size=1, max_size=4).map(lambda cs: IntPoly(tuple(cs) + (1,)))
anypoly = st.lists(small, min_size=1, max_size=5).map(lambda cs: IntPoly(tuple(cs)))


def test_known_resultants():
    f = IntPoly((-2, 0, 1))
    assert resultant(f, IntPoly((-4, 1))) == 14
    assert resultant(f, IntPoly((0, 1))) == -2
    cubic = IntPoly((13, -4, -3, 1))
    assert resultant(cubic, IntPoly((4, 1))) == 83
    assert resultant(cubic, IntPoly((-4, 1))) == -13
    assert discriminant(cubic) == 49


@settings(max_examples=150, deadline=None)
@given(monic, anypoly)
def test_resultant_matches_sylvester(f, g):
    # sympy.resultant itself gets the sign wrong in some degree combinations
    # (x - 1 against x^3 + 1 gives -2), so the oracle is the Sylvester matrix
    expected = sylvester_det(f, g) if not g.is_zero() else 0
    assert resultant(f, g) == expected


def test_resultant_sign_case():
    assert resultant(IntPoly((-1, 1)), IntPoly((1, 0, 0, 1))) == 2
    assert resultant(IntPoly((0, 1)), IntPoly((1, 0, 0, 1))) == 1


@settings(max_examples=80, deadline=None)
@given(monic.filter(lambda f: f.degree >= 2))
def test_discriminant_matches_sympy(f):
    assert discriminant(f) == sympy.discriminant(to_sympy(f), X)


def test_resultant_rejects_non_monic():
    with pytest.raises(ValueError):
        resultant(IntPoly((1, 2)), IntPoly((1, 1)))
    with pytest.raises(ValueError):
        resultant(IntPoly((3,)), IntPoly((1, 1)))


@settings(max_examples=80, deadline=None)
@given(monic, st.sampled_from([2, 3, 5, 7, 11, 13, 83]))
def test_roots_mod_prime_brute(f, p):
    brute = {r for r in range(p) if f(r) % p == 0}
    if all(c % p == 0 for c in f.coeffs):
        return
    assert roots_mod_prime(f, p) == brute


def test_cubic_roots_mod_83():
    assert roots_mod_prime(IntPoly((13, -4, -3, 1)), 83) == {42, 48, 79}


def test_roots_mod_prime_needs_prime():
    with pytest.raises(ValueError):
        roots_mod_prime(IntPoly((1, 1)), 15)


@settings(max_examples=80, deadline=None)
@given(anypoly, anypoly, st.sampled_from([3, 5, 7, 11]))
def test_gcd_mod_divides_both(f, g, p):
    if f.reduce_mod(p).is_zero() and g.reduce_mod(p).is_zero():
        return
    d = poly_gcd_mod(f, g, p)
    ref = sympy.Poly(sympy.gcd(sympy.Poly(to_sympy(f), X, modulus=p), sympy.Poly(to_sympy(g), X, modulus=p)))
    assert d.degree == ref.degree()
    assert d.leading % p == 1


def test_valuation_and_powers():
    assert valuation(64, 2) == 6
    assert valuation(-27, 3) == 3
    with pytest.raises(ValueError):
        valuation(0, 2)
    assert is_kth_power_free(12, 3)
    assert not is_kth_power_free(16, 2)


def test_factored_level_realization():
    lvl = FactoredLevel({2: -1}, excludes_n=True) * FactoredLevel({2: 1, 5: 1, 3: 2})
    assert realize_level(lvl) == 45
    with pytest.raises(NonIntegralLevel):
        realize_level(FactoredLevel({2: -1, 3: 1}))


def test_factored_level_excludes_n():
    lvl = FactoredLevel({2: 1, 13: 2}, excludes_n=True)
    assert realize_level(lvl, 13) == 2
    assert realize_level(lvl, 11) == 338


def test_residue_sets():
    six = ResidueSet.square_multiples(6, (3, -3))
    assert six.sorted() == [0, 3]
    five = ResidueSet.square_multiples(5, (3, -3))
    assert five.sorted() == [0, 2, 3]
    assert 5 not in six and -2 in five
    assert ResidueSet.signed(83, [20]).sorted() == [20, 63]
