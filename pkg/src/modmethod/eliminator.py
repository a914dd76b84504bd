"""Eliminating newforms: trace sieve, residue refinement and j-denominator test."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

from .algebra import IntPoly, discriminant, is_prime, poly_gcd_mod, prime_divisors, roots_mod_prime
from .ellcurve import j_invariant
from .newforms import (
    MissingEigenvalue,
    NewformRecord,
    NoDegreeOnePrime,
    RationalNewformCurve,
    eigenvalue_norm_diff,
)

CONVENTIONS = ("always", "never")


class InsufficientEigenvalues(KeyError):
    pass


@dataclass(frozen=True)
class AdmissibleTraces:
    p: int
    m: int
    small_set: tuple[int, ...]
    special_set: tuple[int, ...]
    convention: str

    def values(self) -> tuple[int, ...]:
        if self.convention == "always":
            return self.small_set + self.special_set
        return self.small_set

    def residues(self, n: int) -> set[int]:
        return {a % n for a in self.values()}


def admissible_traces(p: int, m: int, convention: str = "always") -> AdmissibleTraces:
    """Possible traces of Frobenius at p for the Frey curve: the Hasse interval
    restricted by a congruence (even for m = 2, = p + 1 mod 3 for m = 3),
    plus +-(p + 1) when ``convention`` is "always"."""
    if m not in (2, 3):
        raise ValueError(f"signature m must be 2 or 3, got {m}")
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    if p < 2 or not is_prime(p):
        raise ValueError(f"{p} is not prime")
    r = isqrt(4 * p)
    small = []
    for x in range(-r, r + 1):
        if x * x >= 4 * p:
            continue
        if m == 2 and x % 2 == 0:
            small.append(x)
        elif m == 3 and (x - (p + 1)) % 3 == 0:
            small.append(x)
    return AdmissibleTraces(p, m, tuple(sorted(small)), (p + 1, -(p + 1)), convention)


@dataclass
class WitnessResult:
    p: int
    traces: tuple[int, ...]
    norms: dict[int, int]
    # primes n >= n_floor that survive this witness; None means every n survives
    allowed: frozenset[int] | None

    def witnessing(self, n: int) -> list[int]:
        return [a for a, v in self.norms.items() if v % n == 0]


@dataclass
class RefinementOutcome:
    n: int
    q: int
    outcome: str  # "contradiction" | "consistent" | "inapplicable"
    roots: tuple[int, ...] = ()
    c_residues: tuple[int, ...] = ()
    admissible_residues: tuple[int, ...] = ()
    complete: bool = True
    reason: str = ""


@dataclass
class EliminationReport:
    form_label: str
    level: int
    m: int
    n_floor: int
    n_excluded: tuple[int, ...]
    convention: str
    witnesses: dict[int, WitnessResult]
    survivors: list[int] | None
    refinements: list[RefinementOutcome] = field(default_factory=list)

    @property
    def remaining(self) -> list[int] | None:
        if self.survivors is None:
            return None
        killed = {r.n for r in self.refinements if r.outcome == "contradiction"}
        return [n for n in self.survivors if n not in killed]

    @property
    def status(self) -> str:
        rem = self.remaining
        if rem is None:
            return "survives(all)"
        if not rem:
            return "eliminated"
        return "survives(" + ",".join(map(str, rem)) + ")"

    @property
    def eliminated(self) -> bool:
        return self.status == "eliminated"

    def witnessing(self, n: int) -> dict[int, list[int]]:
        return {p: w.witnessing(n) for p, w in self.witnesses.items()}


def _allowed_primes(norms: dict[int, int], p: int, n_floor: int, excluded) -> frozenset[int] | None:
    if any(v == 0 for v in norms.values()):
        return None
    out = set()
    for v in norms.values():
        if abs(v) > 1:
            out.update(q for q in prime_divisors(v) if q >= n_floor and q not in excluded)
    if p >= n_floor and p not in excluded:
        # the witness says nothing about n = p itself
        out.add(p)
    return frozenset(out)


def default_witnesses(f: NewformRecord, n_floor: int) -> list[int]:
    """Primes below n_floor that are coprime to the level and have a stored c_p."""
    return [p for p in range(2, n_floor) if is_prime(p) and f.level % p and p in f.eigenvalues]


def sieve_witness(f: NewformRecord, p: int, m: int, n_floor: int, n_excluded=(), convention="always") -> WitnessResult:
    if f.level % p == 0:
        raise ValueError(f"witness {p} divides the level {f.level}")
    if p not in f.eigenvalues:
        raise InsufficientEigenvalues(f"{f.label} has no c_{p}")
    traces = admissible_traces(p, m, convention).values()
    norms = {a: eigenvalue_norm_diff(f, p, a) for a in traces}
    return WitnessResult(p, traces, norms, _allowed_primes(norms, p, n_floor, set(n_excluded)))


def sieve_form(
    f: NewformRecord,
    witnesses,
    n_floor: int,
    n_excluded=(),
    convention: str = "always",
    *,
    m: int,
) -> EliminationReport:
    """Primes n >= n_floor that every witness p leaves possible.

    n is never scanned: each witness contributes the finite set of primes
    dividing its nonzero norms, and the survivors are their intersection.
    """
    results = {}
    for p in sorted(set(witnesses)):
        try:
            results[p] = sieve_witness(f, p, m, n_floor, n_excluded, convention)
        except MissingEigenvalue as exc:
            raise InsufficientEigenvalues(str(exc)) from exc
    survivors: set[int] | None = None
    for w in results.values():
        if w.allowed is None:
            continue
        survivors = set(w.allowed) if survivors is None else survivors & w.allowed
    return EliminationReport(
        form_label=f.label,
        level=f.level,
        m=m,
        n_floor=n_floor,
        n_excluded=tuple(sorted(set(n_excluded))),
        convention=convention,
        witnesses=results,
        survivors=None if survivors is None else sorted(survivors),
    )


def _consistent_roots(f: NewformRecord, n: int, witnessing: dict[int, list[int]]):
    """Roots of the field polynomial mod n compatible with every witness, and
    whether every prime above n compatible with the witnesses has degree one."""
    roots = roots_mod_prime(f.field_poly, n)
    complete = True
    for p, avals in witnessing.items():
        poly, den = f.coefficient_poly(p)
        keep = set()
        for a in avals:
            g = poly_gcd_mod(f.field_poly, poly - a * den, n)
            lin = {r for r in roots if poly_eval_mod_zero(g, r, n)}
            if g.degree > len(lin):
                complete = False
            keep |= lin
        roots &= keep
    return roots, complete


def poly_eval_mod_zero(g: IntPoly, r: int, n: int) -> bool:
    acc = 0
    for c in reversed(g.coeffs):
        acc = (acc * r + c) % n
    return acc == 0


def refine_residue(
    f: NewformRecord,
    n: int,
    q: int,
    m: int = 3,
    convention: str = "always",
    witnessing: dict[int, list[int]] | None = None,
) -> RefinementOutcome:
    """Compare c_q modulo the degree-one primes above n with admissible a_q mod n.

    With ``witnessing`` (witness prime -> traces a_p with n | Norm(c_p - a_p))
    only primes above n where c_p = a_p are considered.
    """
    if not is_prime(n):
        raise ValueError(f"{n} is not prime")
    if q not in f.eigenvalues:
        raise MissingEigenvalue(f"{f.label} has no c_{q}")
    if (f.level * n) % q == 0:
        raise ValueError(f"q = {q} must be coprime to n * level")
    poly, den = f.coefficient_poly(q)
    adm = tuple(sorted(admissible_traces(q, m, convention).residues(n)))
    if discriminant(f.field_poly) % n == 0 or any(d % n == 0 for _, d in f.eigenvalues.values()):
        raise NoDegreeOnePrime(f"{n} divides the discriminant of {f.field_poly} or a denominator")
    if witnessing:
        roots, complete = _consistent_roots(f, n, witnessing)
    else:
        roots = roots_mod_prime(f.field_poly, n)
        complete = len(roots) == f.degree
    if not roots:
        raise NoDegreeOnePrime(f"no degree-one prime above {n} is compatible with the witnesses")
    inv = pow(den, -1, n)
    per_root = [(r, poly(r) * inv % n) for r in sorted(roots)]
    hit = any(c in adm for _, c in per_root)
    if hit:
        outcome = "consistent"
    elif complete:
        outcome = "contradiction"
    else:
        outcome = "inapplicable"
    return RefinementOutcome(
        n=n,
        q=q,
        outcome=outcome,
        roots=tuple(r for r, _ in per_root),
        c_residues=tuple(c for _, c in per_root),
        admissible_residues=adm,
        complete=complete,
        reason="" if complete else "a prime of degree > 1 above n is compatible with the witnesses",
    )


def refine_report(report: EliminationReport, f: NewformRecord, qs) -> EliminationReport:
    """Try the residue refinement on each survivor with each prime in ``qs``."""
    if report.survivors is None:
        return report
    for n in report.survivors:
        for q in qs:
            if q not in f.eigenvalues or (f.level * n) % q == 0:
                continue
            try:
                out = refine_residue(f, n, q, report.m, report.convention, report.witnessing(n))
            except NoDegreeOnePrime as exc:
                out = RefinementOutcome(n, q, "inapplicable", complete=False, reason=str(exc))
            report.refinements.append(out)
            if out.outcome == "contradiction":
                break
    return report


@dataclass(frozen=True)
class JObstruction:
    form_label: str
    curve_label: str
    j_denominator: int
    prime: int
    for_all_n: bool  # False means the obstruction holds only for n != prime


def j_obstruction(curve: RationalNewformCurve, C: int, n_floor: int) -> JObstruction | None:
    """An odd prime dividing C and the denominator of j, if there is one."""
    den = j_invariant(curve.curve).denominator
    odd = [p for p in prime_divisors(C) if p != 2] if abs(C) > 1 else []
    hits = [p for p in odd if den % p == 0]
    if not hits:
        return None
    # prefer a prime below n_floor, which cannot be the exponent n
    hits.sort(key=lambda p: (p >= n_floor, p))
    p = hits[0]
    return JObstruction(curve.form_label, curve.label, den, p, p < n_floor)
