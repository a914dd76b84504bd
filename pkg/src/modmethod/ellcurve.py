"""Integral Weierstrass models: invariants and traces of Frobenius."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .algebra import is_prime


class SingularCurve(ValueError):
    pass


class BadReduction(ValueError):
    pass


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6"""

    a1: int = 0
    a2: int = 0
    a3: int = 0
    a4: int = 0
    a6: int = 0

    @classmethod
    def from_ainvs(cls, ainvs) -> "WeierstrassCurve":
        ainvs = [int(a) for a in ainvs]
        if len(ainvs) != 5:
            raise ValueError(f"need 5 a-invariants, got {len(ainvs)}")
        return cls(*ainvs)

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def c4(self) -> int:
        b2, b4, _, _ = self.b_invariants()
        return b2 * b2 - 24 * b4

    def discriminant(self) -> int:
        return discriminant(self)

    def shift_x(self, r: int) -> "WeierstrassCurve":
        """The isomorphic model obtained from x -> x + r."""
        a1, a2, a3, a4, a6 = self.ainvs
        return WeierstrassCurve(
            a1,
            a2 + 3 * r,
            a3 + a1 * r,
            a4 + 2 * a2 * r + 3 * r * r,
            a6 + a4 * r + a2 * r * r + r**3,
        )

    def __str__(self) -> str:
        return "[" + ",".join(str(a) for a in self.ainvs) + "]"


@dataclass(frozen=True)
class RationalJ:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        if gcd(self.numerator, self.denominator) != 1:
            raise ValueError("RationalJ must be in lowest terms")

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def discriminant(E: WeierstrassCurve) -> int:
    b2, b4, b6, b8 = E.b_invariants()
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def j_invariant(E: WeierstrassCurve) -> RationalJ:
    disc = discriminant(E)
    if disc == 0:
        raise SingularCurve(f"{E} has zero discriminant")
    num = E.c4() ** 3
    g = gcd(num, disc)
    num, den = num // g, disc // g
    if den < 0:
        num, den = -num, -den
    return RationalJ(num, den)


def count_points(E: WeierstrassCurve, p: int) -> int:
    """#E(F_p) including the point at infinity, by enumerating x."""
    a1, a2, a3, a4, a6 = (a % p for a in E.ainvs)
    total = 1
    if p == 2:
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % 2 == 0:
                    total += 1
        return total
    # odd p: (2y + a1 x + a3)^2 = 4(x^3 + a2 x^2 + a4 x + a6) + (a1 x + a3)^2
    is_square = [False] * p
    for y in range(p):
        is_square[y * y % p] = True
    for x in range(p):
        lin = (a1 * x + a3) % p
        d = (4 * (((x + a2) * x + a4) * x + a6) + lin * lin) % p
        if d == 0:
            total += 1
        elif is_square[d]:
            total += 2
    return total


def ap_trace(E: WeierstrassCurve, p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if discriminant(E) % p == 0:
        raise BadReduction(f"{E} has bad reduction at {p}")
    return p + 1 - count_points(E, p)
