"""Conic parametrizations, congruence obstructions and bounded Mordell searches.

These close the branches where the Frey curve is unavailable (xy = +-1).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np

from .algebra import ResidueSet, is_prime, valuation
from .frey import TernaryEquation


class InvalidParams(ValueError):
    pass


class UnsupportedShape(ValueError):
    pass


# ---------------------------------------------------------------------------
# x^2 + p y^2 = z^2


@dataclass(frozen=True)
class ConicParams:
    p: int
    family: int
    s: int
    t: int
    sign_x: int = 1
    sign_z: int = 1

    def check(self) -> None:
        p = self.p
        if p == 2 or p == -2 or not is_prime(abs(p)):
            raise InvalidParams(f"p = {p} must be an odd prime up to sign")
        if self.family not in (1, 2):
            raise InvalidParams("family must be 1 or 2")
        if self.sign_x not in (1, -1) or self.sign_z not in (1, -1):
            raise InvalidParams("signs must be +-1")
        s, t = self.s, self.t
        if gcd(s, t) != 1 or (s - t) % 2 == 0:
            raise InvalidParams(f"(s, t) = ({s}, {t}) must be coprime of opposite parity")
        if self.family == 1 and s % p == 0:
            raise InvalidParams(f"family 1 needs p not dividing s = {s}")
        if self.family == 2 and (s - t) % p == 0:
            raise InvalidParams(f"family 2 needs s != t mod p for (s, t) = ({s}, {t})")


def conic_point(params: ConicParams) -> tuple[int, int, int]:
    params.check()
    p, s, t = params.p, params.s, params.t
    if params.family == 1:
        x = s * s - p * t * t
        y = 2 * s * t
        z = s * s + p * t * t
    else:
        x = ((p - 1) // 2) * (s * s + t * t) + (p + 1) * s * t
        y = s * s - t * t
        z = ((p + 1) // 2) * (s * s + t * t) + (p - 1) * s * t
    return params.sign_x * x, y, params.sign_z * z


def primitive_conic_solutions(p: int, bound: int) -> set[tuple[int, int, int]]:
    """Brute force: all (x, y, z) with x^2 + p y^2 = z^2, gcd(x, y) = 1 and
    max(|x|, |y|, |z|) <= bound."""
    out = set()
    for y in range(-bound, bound + 1):
        for x in range(-bound, bound + 1):
            if gcd(x, y) != 1:
                continue
            v = x * x + p * y * y
            if v < 0:
                continue
            r = isqrt(v)
            if r * r == v and r <= bound:
                out.add((x, y, r))
                out.add((x, y, -r))
    return out


def conic_family_points(p: int, bound: int) -> dict[tuple[int, int, int], set[int]]:
    """Every point of height <= bound produced by either family, with the families producing it."""
    reach = isqrt(2 * bound) + 2
    out: dict[tuple[int, int, int], set[int]] = {}
    for family in (1, 2):
        for s in range(-reach, reach + 1):
            for t in range(-reach, reach + 1):
                for sx in (1, -1):
                    for sz in (1, -1):
                        params = ConicParams(p, family, s, t, sx, sz)
                        try:
                            pt = conic_point(params)
                        except InvalidParams:
                            continue
                        if max(abs(c) for c in pt) <= bound:
                            out.setdefault(pt, set()).add(family)
    return out


@dataclass
class ConicCoverReport:
    p: int
    bound: int
    solutions: int
    uncovered: list[tuple[int, int, int]]
    in_both: list[tuple[int, int, int]]
    bogus: list[tuple[int, int, int]]

    @property
    def ok(self) -> bool:
        return not (self.uncovered or self.in_both or self.bogus)


def conic_cover_check(p: int, bound: int) -> ConicCoverReport:
    """Check that the two families are disjoint and cover every primitive point.

    Height is max(|x|, |y|, |z|): for p < 0 the points with |z| bounded are infinite.
    """
    truth = primitive_conic_solutions(p, bound)
    fam = conic_family_points(p, bound)
    uncovered = sorted(pt for pt in truth if pt not in fam)
    in_both = sorted(pt for pt, f in fam.items() if len(f) > 1)
    bogus = sorted(pt for pt in fam if pt not in truth)
    return ConicCoverReport(p, bound, len(truth), uncovered, in_both, bogus)


# ---------------------------------------------------------------------------
# 2^(2x) - b^y = +-3 z^2


def prop3_value(sign: int, s: int, t: int) -> int:
    if sign not in (3, -3):
        raise InvalidParams("sign must be +3 or -3")
    if gcd(s, t) != 1 or (s - t) % 2 == 0:
        raise InvalidParams(f"(s, t) = ({s}, {t}) must be coprime of opposite parity")
    return ((sign - 1) // 2) * (s * s + t * t) + (sign + 1) * s * t


def prop3_obstruction(sign: int, s: int, t: int) -> int:
    """2-adic valuation of the family-2 expression that would have to equal 2^x."""
    return valuation(prop3_value(sign, s, t), 2)


def prop3_search(b: int, x_max: int, y_max: int, x_min: int = 2) -> list[tuple[int, int, int]]:
    """Solutions of 2^(2x) - b^y = +-3 z^2 with x_min <= x <= x_max, y even, z >= 1."""
    if b < 1 or b % 2 == 0:
        raise InvalidParams("b must be a positive odd integer")
    found = []
    for x in range(x_min, x_max + 1):
        for y in range(2, y_max + 1, 2):
            v = abs(4**x - b**y)
            if v == 0 or v % 3:
                continue
            w = v // 3
            z = isqrt(w)
            if z * z == w:
                found.append((x, y, z))
    return found


# ---------------------------------------------------------------------------
# congruences


@dataclass(frozen=True)
class ExpTemplate:
    """constant + coeff * base^alpha"""

    constant: int
    coeff: int
    base: int

    def residue(self, alpha: int, modulus: int) -> int:
        return (self.constant + self.coeff * pow(self.base, alpha, modulus)) % modulus

    def __str__(self) -> str:
        sign = "+" if self.coeff >= 0 else "-"
        c = abs(self.coeff)
        coeff = "" if c == 1 else f"{c}*"
        return f"{self.constant} {sign} {coeff}{self.base}^alpha"


def congruence_obstruction(template: ExpTemplate, modulus: int, allowed: ResidueSet, alphas) -> dict[int, bool]:
    """alpha -> True when template(alpha) mod modulus is not in ``allowed``."""
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    if allowed.modulus != modulus:
        raise ValueError("allowed residues use a different modulus")
    return {a: template.residue(a, modulus) not in allowed for a in alphas}


def obstructed_for_all(template: ExpTemplate, modulus: int, allowed: ResidueSet, start: int = 1, step: int = 1):
    """Decide the obstruction for every alpha = start + k*step, k >= 0.

    base^alpha mod modulus is eventually periodic along the progression, so
    following it until the state repeats covers all alpha.  Returns
    (obstructed, residues seen, first unobstructed alpha or None).
    """
    seen = {}
    alpha = start
    state = pow(template.base, start, modulus)
    mult = pow(template.base, step, modulus)
    residues = []
    while state not in seen:
        seen[state] = alpha
        r = (template.constant + template.coeff * state) % modulus
        residues.append(r)
        if r in allowed:
            return False, residues, alpha
        state = state * mult % modulus
        alpha += step
    return True, residues, None


# ---------------------------------------------------------------------------
# Mordell equations Y^2 = X^3 + k


@dataclass(frozen=True)
class MordellInstance:
    k: int
    x_scale: int
    y_scale: int
    min_m: int
    origin: str

    def __post_init__(self):
        if self.k == 0:
            raise ValueError("k must be nonzero")


@dataclass
class MordellSolutionSet:
    k: int
    bound: int
    solutions: list[tuple[int, int]] = field(default_factory=list)
    caveat: str = "exhaustive within |X| <= bound; completeness beyond the bound is not claimed"


def _icbrt_floor(v: int) -> int:
    if v < 0:
        return -_icbrt_ceil(-v)
    r = round(v ** (1 / 3)) if v else 0
    while r**3 > v:
        r -= 1
    while (r + 1) ** 3 <= v:
        r += 1
    return r


def _icbrt_ceil(v: int) -> int:
    r = _icbrt_floor(v)
    return r if r**3 == v else r + 1


_NUMPY_SAFE = 1 << 62


def _search_chunk(args) -> list[tuple[int, int]]:
    k, lo, hi = args
    out = []
    if lo > hi:
        return out
    if max(abs(lo), abs(hi)) ** 3 + abs(k) < _NUMPY_SAFE:
        xs = np.arange(lo, hi + 1, dtype=np.int64)
        v = xs * xs * xs + np.int64(k)
        ok = v >= 0
        xs, v = xs[ok], v[ok]
        r = np.sqrt(v.astype(np.float64)).astype(np.int64)
        # float sqrt is within 1 of the true root in this range; exact check follows
        hit = (r * r == v) | ((r + 1) * (r + 1) == v) | ((r - 1) * (r - 1) == v)
        candidates = xs[hit].tolist()
    else:
        candidates = range(lo, hi + 1)
    for x in candidates:
        x = int(x)
        v = x**3 + k
        if v < 0:
            continue
        y = isqrt(v)
        if y * y == v:
            out.append((x, y))
    return out


def mordell_search(k: int, bound: int, workers: int = 1, chunk: int = 250_000) -> MordellSolutionSet:
    """All (X, Y), |X| <= bound, Y >= 0 with Y^2 = X^3 + k."""
    if k == 0:
        raise ValueError("k must be nonzero")
    if bound < 1:
        raise ValueError("bound must be positive")
    lo = max(-bound, _icbrt_ceil(-k))
    pieces = [(k, a, min(a + chunk - 1, bound)) for a in range(lo, bound + 1, chunk)]
    if workers > 1 and len(pieces) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_search_chunk, pieces))
    else:
        parts = [_search_chunk(p) for p in pieces]
    sols = sorted({s for part in parts for s in part})
    return MordellSolutionSet(k, bound, sols)


def _is_scaled_power_of_two(y: int, scale: int, min_m: int) -> bool:
    if y <= 0 or y % scale:
        return False
    q = y // scale
    return q & (q - 1) == 0 and q.bit_length() - 1 >= min_m


def filter_mordell_solutions(sols: MordellSolutionSet, inst: MordellInstance) -> list[tuple[int, int]]:
    """Solutions of the shape X = x_scale * (anything), Y = y_scale * 2^m with m >= min_m."""
    if sols.k != inst.k:
        raise ValueError(f"solution set is for k = {sols.k}, instance needs k = {inst.k}")
    return [
        (X, Y)
        for X, Y in sols.solutions
        if X % inst.x_scale == 0 and _is_scaled_power_of_two(Y, inst.y_scale, inst.min_m)
    ]


def reduce_unit_case(eq: TernaryEquation, xy_sign: int) -> tuple[MordellInstance, MordellInstance]:
    """Mordell equations for 2^alpha x^n + B y^n = C z^3 with x, y = +-1.

    With s = x^n * y^n = xy the equation times C^2 reads
    (x C z)^3 = C^2 2^alpha + s C^2 B.  Even alpha = 2m gives Y = C 2^m,
    X = x C z, k = -s C^2 B; odd alpha = 2m + 1 is first multiplied by 8:
    Y = 4 C 2^m, X = 2 x C z, k = -8 s C^2 B.
    """
    if eq.m != 3:
        raise UnsupportedShape("unit-case reduction is for signature (p, p, 3)")
    if xy_sign not in (1, -1):
        raise ValueError("xy_sign must be +-1")
    A, B, C = eq.A, eq.B, eq.C
    if A < 1 or A & (A - 1):
        raise UnsupportedShape(f"A = {A} is not a power of 2")
    k_even = -xy_sign * C * C * B
    even = MordellInstance(k_even, abs(C), abs(C), 1, f"alpha even, xy = {xy_sign}")
    odd = MordellInstance(8 * k_even, 2 * abs(C), 4 * abs(C), 0, f"alpha odd, xy = {xy_sign}")
    return even, odd
