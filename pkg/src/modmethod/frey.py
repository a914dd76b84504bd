"""Ternary equations A x^n + B y^n = C z^m, their Frey curves and levels.

Only the conductor tables for the two signatures m = 2 and m = 3 are
implemented; no general Tate's algorithm is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import gcd

from .algebra import FactoredLevel, is_kth_power_free, prime_divisors, valuation
from .ellcurve import WeierstrassCurve, discriminant


class UnclassifiableParity(ValueError):
    pass


class NonIntegralModel(ValueError):
    pass


class NormalizationViolated(ValueError):
    pass


class AmbiguousBranch(ValueError):
    pass


N_FLOOR = {2: 7, 3: 11}


@dataclass(frozen=True)
class TernaryEquation:
    A: int
    B: int
    C: int
    m: int
    n_floor: int = 0

    def __post_init__(self):
        if self.m not in N_FLOOR:
            raise ValueError(f"signature m must be 2 or 3, got {self.m}")
        if 0 in (self.A, self.B, self.C):
            raise ValueError("coefficients must be nonzero")
        if not self.n_floor:
            object.__setattr__(self, "n_floor", N_FLOOR[self.m])
        if not is_kth_power_free(self.C, self.m):
            kind = "squarefree" if self.m == 2 else "cubefree"
            raise ValueError(f"C = {self.C} must be {kind}")
        if self.m == 3:
            for coeff in (self.A, self.B):
                if not is_kth_power_free(coeff, self.n_floor):
                    raise ValueError(f"{coeff} contains an n-th power for n = {self.n_floor}")

    def __str__(self) -> str:
        return f"{self.A}*x^n + {self.B}*y^n = {self.C}*z^{self.m}"


@dataclass(frozen=True)
class SolutionTriple:
    x: int
    y: int
    z: int
    n: int

    def __post_init__(self):
        if 0 in (self.x, self.y, self.z):
            raise ValueError("x, y, z must be nonzero")


@dataclass(frozen=True)
class CaseTag2:
    index: int
    curve_choice: str
    alpha_exponent: int
    xy_even: bool = False
    notes: tuple[str, ...] = ()


@dataclass
class Normalized:
    """An equation/solution pair after the sign and swap moves, with the log of moves."""

    eq: TernaryEquation
    sol: SolutionTriple
    moves: list[str] = field(default_factory=list)


def check_coprime(eq: TernaryEquation, sol: SolutionTriple) -> None:
    ax, by, cz = eq.A * sol.x, eq.B * sol.y, eq.C * sol.z
    if gcd(ax, by) != 1 or gcd(ax, cz) != 1 or gcd(by, cz) != 1:
        raise ValueError(f"A x, B y, C z are not pairwise coprime for {sol}")


def _swap(eq: TernaryEquation, sol: SolutionTriple) -> tuple[TernaryEquation, SolutionTriple]:
    return replace(eq, A=eq.B, B=eq.A), replace(sol, x=sol.y, y=sol.x)


# ---------------------------------------------------------------------------
# signature (p, p, 2)


def _case2_candidates(eq: TernaryEquation, sol: SolutionTriple):
    """Yield (index, needed z residue mod 4 or None) for the unique matching case."""
    A, B, C = eq.A, eq.B, eq.C
    x, y, z = sol.x, sol.y, sol.z
    ab_odd = x % 2 == 1 and y % 2 == 1
    byn_v2 = valuation(B, 2) + sol.n * valuation(y, 2)
    if byn_v2 >= 6:
        return 5, C % 4
    if not ab_odd:
        return None
    vb, vc = valuation(B, 2), valuation(C, 2)
    if A % 2 and B % 2 and C % 2:
        if (y + B * C) % 4 == 0:
            return 1, None
        return None
    if vb == 1 or vc == 1:
        return 2, None
    if vb == 2:
        return 3, (-y * (B // 4)) % 4
    if vb in (3, 4, 5):
        return 4, C % 4
    return None


def normalize_ppp2(eq: TernaryEquation, sol: SolutionTriple) -> Normalized:
    """Reach "A x odd" and one of the five parity cases by swapping and flipping z."""
    if eq.m != 2:
        raise ValueError("normalize_ppp2 needs m = 2")
    check_coprime(eq, sol)
    moves = []
    if (eq.A * sol.x) % 2 == 0:
        eq, sol = _swap(eq, sol)
        moves.append("swap (A,x) <-> (B,y) so that A x is odd")
    for attempt in range(2):
        hit = _case2_candidates(eq, sol)
        if hit is not None:
            break
        if attempt == 0 and (eq.B * sol.y) % 2 == 1:
            eq2, sol2 = _swap(eq, sol)
            if _case2_candidates(eq2, sol2) is not None:
                eq, sol = eq2, sol2
                moves.append("swap (A,x) <-> (B,y) to satisfy the case-1 congruence")
                continue
        raise UnclassifiableParity(f"no parity case matches {eq} with {sol}")
    index, z_res = hit
    if z_res is not None and sol.z % 4 != z_res:
        if (-sol.z) % 4 != z_res:
            raise UnclassifiableParity(f"case {index} needs z = {z_res} mod 4, impossible for z = {sol.z}")
        sol = replace(sol, z=-sol.z)
        moves.append(f"flip sign of z so that z = {z_res} mod 4")
    return Normalized(eq, sol, moves)


def classify_case2(eq: TernaryEquation, sol: SolutionTriple) -> CaseTag2:
    """Case index (1)-(5), Frey curve choice and conductor exponent of 2.

    ``sol`` must already be normalized (see :func:`normalize_ppp2`).
    """
    if eq.m != 2:
        raise ValueError("classify_case2 needs m = 2")
    if (eq.A * sol.x) % 2 == 0:
        raise UnclassifiableParity("normalization requires A x odd")
    hit = _case2_candidates(eq, sol)
    if hit is None:
        raise UnclassifiableParity(f"no parity case matches {eq} with {sol}")
    index, z_res = hit
    if z_res is not None and sol.z % 4 != z_res:
        raise UnclassifiableParity(f"case {index} needs z = {z_res} mod 4; normalize first")
    B, C, y = eq.B, eq.C, sol.y
    notes: list[str] = []
    xy_even = (sol.x * sol.y) % 2 == 0
    if index == 1:
        alpha = 5
    elif index == 2:
        alpha = 6
    elif index == 3:
        # rows for ord_2(B) = 2; the second row is printed as ord_2(B) = 1, read as 2
        bc4 = B * C // 4
        if (y + bc4) % 4 == 0:
            alpha = 1
        else:
            alpha = 2
            notes.append("alpha=2 row printed with ord_2(B)=1; applied with ord_2(B)=2")
    elif index == 4:
        alpha = 4 if valuation(B, 2) == 3 else 2
    else:
        v = valuation(B, 2) + sol.n * valuation(y, 2)
        if v == 6:
            alpha = -1
        else:
            alpha = 0
            if valuation(B, 2) < 7:
                notes.append("ord_2(B y^n) >= 7 with ord_2(B) < 7: alpha = 0 applied")
    curve = {1: "E1", 2: "E1", 3: "E2", 4: "E2", 5: "E3"}[index]
    return CaseTag2(index, curve, alpha, xy_even, tuple(notes))


def frey_curve_ppp2(eq: TernaryEquation, sol: SolutionTriple, tag: CaseTag2) -> WeierstrassCurve:
    B, C = eq.B, eq.C
    y, z = sol.y, sol.z
    bcy = B * C * y**sol.n
    if tag.curve_choice == "E1":
        E = WeierstrassCurve(0, 2 * z * C, 0, bcy, 0)
    elif tag.curve_choice == "E2":
        if bcy % 4:
            raise NonIntegralModel("E2 needs 4 | B C y^n")
        E = WeierstrassCurve(0, z * C, 0, bcy // 4, 0)
    elif tag.curve_choice == "E3":
        if bcy % 64:
            raise NonIntegralModel("E3 needs 64 | B C y^n")
        if (z * C - 1) % 4:
            raise NonIntegralModel("E3 needs z C = 1 mod 4")
        E = WeierstrassCurve(1, (z * C - 1) // 4, 0, bcy // 64, 0)
    else:
        raise ValueError(f"unknown curve choice {tag.curve_choice}")
    if discriminant(E) == 0:
        raise NonIntegralModel(f"{E} is singular")
    return E


def artin_level_ppp2(eq: TernaryEquation, tag: CaseTag2) -> FactoredLevel:
    """2^beta * prod_{p | C} p^2 * prod_{q | AB} q, with n excluded symbolically.

    The caller multiplies by n or n^2 when n divides AB or C.
    """
    if eq.m != 2:
        raise ValueError("artin_level_ppp2 needs m = 2")
    if tag.xy_even and (eq.A * eq.B) % 2 == 1:
        beta = 1
    else:
        beta = tag.alpha_exponent
    lvl = FactoredLevel({2: beta}, excludes_n=True)
    if abs(eq.C) > 1:
        lvl = lvl * FactoredLevel({p: 2 for p in prime_divisors(eq.C)})
    ab = eq.A * eq.B
    if abs(ab) > 1:
        lvl = lvl * FactoredLevel({q: 1 for q in prime_divisors(ab)})
    return lvl


# ---------------------------------------------------------------------------
# signature (p, p, 3)


def normalize_ppp3(eq: TernaryEquation, sol: SolutionTriple) -> Normalized:
    """Reach A x^n != 0 and B y^n != 2 (mod 3) by swapping and negating x, y, z."""
    if eq.m != 3:
        raise ValueError("normalize_ppp3 needs m = 3")
    check_coprime(eq, sol)
    moves = []
    n = sol.n
    if (eq.A * sol.x**n) % 3 == 0:
        eq, sol = _swap(eq, sol)
        moves.append("swap (A,x) <-> (B,y) so that 3 does not divide A x^n")
    if (eq.A * sol.x**n) % 3 == 0:
        raise NormalizationViolated("3 divides both A x^n and B y^n")
    if (eq.B * sol.y**n) % 3 == 2:
        sol = SolutionTriple(-sol.x, -sol.y, -sol.z, n)
        moves.append("negate (x, y, z) so that B y^n != 2 mod 3")
    return Normalized(eq, sol, moves)


def frey_curve_ppp3(eq: TernaryEquation, sol: SolutionTriple) -> WeierstrassCurve:
    if eq.m != 3:
        raise ValueError("frey_curve_ppp3 needs m = 3")
    byn = eq.B * sol.y**sol.n
    if (eq.A * sol.x**sol.n) % 3 == 0 or byn % 3 == 2:
        raise NormalizationViolated("need A x^n != 0 and B y^n != 2 mod 3")
    return WeierstrassCurve(3 * eq.C * sol.z, 0, eq.C**2 * byn, 0, 0)


def epsilon3_prime(eq: TernaryEquation, sol: SolutionTriple) -> tuple[int, str]:
    """The power of 3 in the Artin conductor of the (p,p,3) Frey curve, and the row used.

    The rows printed with ord_2(B y^n) in {1, 2} are read with ord_3.
    """
    B, C = eq.B, eq.C
    byn = B * sol.y**sol.n
    if C % 3 == 0:
        return 3**5, "3 | C"
    v3 = valuation(byn, 3)
    if v3 == 0:
        t = 2 + C * C * byn - 3 * C * sol.z
        if t % 9 == 0:
            return 3**2, "9 | (2 + C^2 B y^n - 3 C z)"
        if t % 3 == 0:
            return 3**3, "3 || (2 + C^2 B y^n - 3 C z)"
        raise AmbiguousBranch(f"no epsilon_3' row matches {eq} with {sol}")
    if v3 == 1:
        return 3**4, "ord_3(B y^n) = 1"
    if v3 == 2:
        return 3**3, "ord_3(B y^n) = 2"
    if valuation(B, 3) == 3:
        return 1, "ord_3(B) = 3"
    if v3 > 3:
        return 3, "ord_3(B y^n) > 3 and ord_3(B) != 3"
    raise AmbiguousBranch(f"no epsilon_3' row matches {eq} with {sol}")


def artin_level_ppp3(eq: TernaryEquation, sol: SolutionTriple) -> FactoredLevel:
    if eq.m != 3:
        raise ValueError("artin_level_ppp3 needs m = 3")
    eps, _ = epsilon3_prime(eq, sol)
    lvl = FactoredLevel.of(eps, excludes_n=True)
    c_primes = [p for p in prime_divisors(eq.C) if p != 3] if abs(eq.C) > 1 else []
    lvl = lvl * FactoredLevel({p: 2 for p in c_primes})
    ab = eq.A * eq.B
    ab_primes = [q for q in prime_divisors(ab) if q != 3] if abs(ab) > 1 else []
    return lvl * FactoredLevel({q: 1 for q in ab_primes})


EXCEPTIONAL_PPP3 = (
    # (A, B, C, x, y, z, n) for the two equations where level lowering fails
    (1, 27, 5, 2, -1, 1, 5),
    (1, 3, 1, 2, -1, 5, 7),
)


def is_exceptional_ppp3(eq: TernaryEquation, sol: SolutionTriple) -> bool:
    key = (eq.A, eq.B, eq.C, sol.x, sol.y, sol.z, sol.n)
    return key in EXCEPTIONAL_PPP3
