"""Exact integer, residue and integer-polynomial arithmetic.

Everything here works on Python ints; nothing is ever rounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from sympy import factorint, isprime


class NonIntegralLevel(ValueError):
    pass


def valuation(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in ``n``; ``n`` must be nonzero."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def prime_divisors(n: int) -> list[int]:
    if n == 0:
        raise ValueError("zero has every prime as a divisor")
    return sorted(factorint(abs(n)))


def is_prime(n: int) -> bool:
    return bool(isprime(n))


def is_kth_power_free(n: int, k: int) -> bool:
    return all(e < k for e in factorint(abs(n)).values())


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial; ``coeffs[i]`` is the coefficient of x^i."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = [int(a) for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def x(cls) -> "IntPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, a: int) -> "IntPoly":
        return cls((a,))

    @property
    def degree(self) -> int:
        # the zero polynomial gets degree -1
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.leading == 1

    def __call__(self, a: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * a + c
        return acc

    def __add__(self, other: "IntPoly | int") -> "IntPoly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "IntPoly":
        return IntPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPoly | int") -> "IntPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other: int) -> "IntPoly":
        return _as_poly(other) - self

    def __mul__(self, other: "IntPoly | int") -> "IntPoly":
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def derivative(self) -> "IntPoly":
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def reduce_mod(self, m: int) -> "IntPoly":
        return IntPoly(tuple(c % m for c in self.coeffs))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                mono = "x" if i == 1 else f"x^{i}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s


def _as_poly(a: "IntPoly | int") -> IntPoly:
    return a if isinstance(a, IntPoly) else IntPoly.const(a)


def _bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; exact for integer matrices."""
    a = [row[:] for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _mult_matrix(f: IntPoly, g: IntPoly) -> list[list[int]]:
    # columns: g(θ)·θ^j reduced mod f, in the power basis 1, θ, ..., θ^{d-1}
    d = f.degree
    low = [-c for c in f.coeffs[:d]]  # θ^d = sum low[i] θ^i
    rem = list(g.coeffs)
    for top in range(len(rem) - 1, d - 1, -1):
        c = rem[top]
        if c:
            rem[top] = 0
            for i in range(d):
                rem[top - d + i] += c * low[i]
    cur = (rem + [0] * d)[:d]
    cols = []
    for _ in range(d):
        cols.append(cur)
        # multiply by θ
        carry = cur[-1]
        nxt = [0] + cur[:-1]
        cur = [nxt[i] + carry * low[i] for i in range(d)]
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def resultant(f: IntPoly, g: IntPoly) -> int:
    """Product of g over the roots of the monic polynomial f.

    Computed as the determinant of multiplication by g(θ) on Z[x]/(f), which
    is the resultant Res(f, g) when f is monic.
    """
    if f.degree < 1 or not f.is_monic():
        raise ValueError(f"resultant needs a monic non-constant first argument, got {f}")
    return _bareiss_det(_mult_matrix(f, g))


def discriminant(f: IntPoly) -> int:
    d = f.degree
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative())


def poly_eval_mod(f: IntPoly, a: int, m: int) -> int:
    if m < 1:
        raise ValueError("modulus must be positive")
    acc = 0
    for c in reversed(f.coeffs):
        acc = (acc * a + c) % m
    return acc


def roots_mod_prime(f: IntPoly, n: int) -> set[int]:
    """All residues r in [0, n) with f(r) = 0 mod n, by exhaustive scan."""
    if not is_prime(n):
        raise ValueError(f"{n} is not prime")
    if f.reduce_mod(n).is_zero():
        raise ValueError(f"{f} vanishes identically mod {n}")
    return {r for r in range(n) if poly_eval_mod(f, r, n) == 0}


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_gcd_mod(f: IntPoly, g: IntPoly, p: int) -> IntPoly:
    """Monic gcd of f and g in F_p[x] (zero polynomial if both vanish)."""
    a = _trim([c % p for c in f.coeffs])
    b = _trim([c % p for c in g.coeffs])
    while b:
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b):
            c = a[-1] * inv % p
            shift = len(a) - len(b)
            for i, bc in enumerate(b):
                a[shift + i] = (a[shift + i] - c * bc) % p
            _trim(a)
            if not a:
                break
        a, b = b, a
    if not a:
        return IntPoly()
    inv = pow(a[-1], -1, p)
    return IntPoly(tuple(c * inv % p for c in a))


# ---------------------------------------------------------------------------
# levels and residues


@dataclass(frozen=True)
class FactoredLevel:
    """prime -> signed exponent.  Negative exponents are allowed until realization.

    ``excludes_n`` marks a level stated for a symbolic exponent prime n; any
    factor equal to n is dropped when the level is realized for that n.
    """

    factors: Mapping[int, int] = field(default_factory=dict)
    excludes_n: bool = False

    def __post_init__(self):
        clean = {int(p): int(e) for p, e in self.factors.items() if e != 0}
        for p in clean:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "factors", dict(sorted(clean.items())))

    @classmethod
    def of(cls, n: int, excludes_n: bool = False) -> "FactoredLevel":
        return cls(dict(factorint(abs(n))) if abs(n) > 1 else {}, excludes_n)

    def merge(self, other: "FactoredLevel") -> "FactoredLevel":
        out = dict(self.factors)
        for p, e in other.factors.items():
            out[p] = out.get(p, 0) + e
        return FactoredLevel(out, self.excludes_n or other.excludes_n)

    __mul__ = merge

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{e}" if e != 1 else str(p) for p, e in self.factors.items())


def realize_level(level: FactoredLevel, n: int | None = None) -> int:
    """The integer value of a factored level, optionally for a concrete exponent n."""
    out = 1
    for p, e in level.factors.items():
        if level.excludes_n and n is not None and p == n:
            continue
        if e < 0:
            raise NonIntegralLevel(f"exponent {e} at {p} in {level}")
        out *= p**e
    return out


@dataclass(frozen=True)
class ResidueSet:
    modulus: int
    residues: frozenset[int]

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "residues", frozenset(r % self.modulus for r in self.residues))

    @classmethod
    def of(cls, modulus: int, values: Iterable[int]) -> "ResidueSet":
        # signed inputs like ±3 are expanded by the caller; we only canonicalize
        return cls(modulus, frozenset(values))

    @classmethod
    def signed(cls, modulus: int, values: Iterable[int]) -> "ResidueSet":
        vals = list(values)
        return cls(modulus, frozenset(vals + [-v for v in vals]))

    @classmethod
    def square_multiples(cls, modulus: int, coefficients: Iterable[int]) -> "ResidueSet":
        """Residues of c*z^2 mod ``modulus`` for every listed c and every z."""
        coeffs = list(coefficients)
        squares = {z * z % modulus for z in range(modulus)}
        return cls(modulus, frozenset(c * s for c in coeffs for s in squares))

    def __contains__(self, a: int) -> bool:
        return a % self.modulus in self.residues

    def sorted(self) -> list[int]:
        return sorted(self.residues)
