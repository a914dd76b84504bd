"""Newform records and their one-record-per-file text format."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from ..algebra import IntPoly, is_prime
from ..ellcurve import WeierstrassCurve, discriminant


class ValidationFailed(ValueError):
    pass


class RecordParseError(ValueError):
    pass


HASSE_TOL = 1e-6


@dataclass(frozen=True)
class NewformRecord:
    """A Galois class of weight-2 newforms with trivial character.

    ``eigenvalues[q] = (v, den)`` means c_q = (v[0] + v[1] θ + ...) / den,
    where θ is a root of ``field_poly``.
    """

    label: str
    level: int
    field_poly: IntPoly
    eigenvalues: dict[int, tuple[tuple[int, ...], int]] = field(default_factory=dict)
    weight: int = 2

    def __post_init__(self):
        if not self.field_poly.is_monic() or self.field_poly.degree < 1:
            raise ValidationFailed(f"{self.label}: field polynomial must be monic of degree >= 1")
        d = self.field_poly.degree
        for q, (vec, den) in self.eigenvalues.items():
            if len(vec) != d:
                raise ValidationFailed(f"{self.label}: c_{q} has {len(vec)} entries, expected {d}")
            if den < 1:
                raise ValidationFailed(f"{self.label}: c_{q} has non-positive denominator")

    @property
    def degree(self) -> int:
        return self.field_poly.degree

    def is_rational(self) -> bool:
        return self.degree == 1

    def coefficient_poly(self, q: int) -> tuple[IntPoly, int]:
        vec, den = self.eigenvalues[q]
        return IntPoly(vec), den

    def rational_coefficient(self, q: int) -> int:
        """c_q for a rational form (field_poly = x - r)."""
        if not self.is_rational():
            raise ValueError(f"{self.label} is not rational")
        poly, den = self.coefficient_poly(q)
        root = -self.field_poly.coeffs[0]
        val = poly(root)
        if val % den:
            raise ValueError(f"c_{q} of {self.label} is not integral")
        return val // den

    def primes(self) -> list[int]:
        return sorted(self.eigenvalues)

    def fingerprint(self) -> str:
        return hashlib.sha256(serialize_record(self).encode("utf-8")).hexdigest()

    def restricted(self, primes) -> "NewformRecord":
        keep = {q: self.eigenvalues[q] for q in sorted(set(primes)) if q in self.eigenvalues}
        return NewformRecord(self.label, self.level, self.field_poly, keep, self.weight)


@dataclass(frozen=True)
class RationalNewformCurve:
    label: str
    curve: WeierstrassCurve
    form_label: str = ""

    def __post_init__(self):
        if discriminant(self.curve) == 0:
            raise ValidationFailed(f"{self.label} is singular")


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",")] if text.strip() else []


def parse_record(text: str) -> NewformRecord:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 4:
        raise RecordParseError("truncated header")
    header = {}
    eig = {}
    try:
        for key, want in zip(lines[:4], ("label", "level", "weight", "field_poly")):
            k, _, v = key.partition(":")
            if k.strip() != want:
                raise RecordParseError(f"expected header '{want}', got '{k}'")
            header[want] = v.strip()
        for ln in lines[4:]:
            k, _, v = ln.partition(":")
            q = int(k)
            v = v.strip()
            den = 1
            if "/" in v:
                v, d = v.split("/")
                den = int(d)
            eig[q] = (tuple(_ints(v)), den)
        rec = NewformRecord(
            label=header["label"],
            level=int(header["level"]),
            weight=int(header["weight"]),
            field_poly=IntPoly(tuple(_ints(header["field_poly"]))),
            eigenvalues=eig,
        )
    except (ValueError, KeyError) as exc:
        if isinstance(exc, (RecordParseError, ValidationFailed)):
            raise
        raise RecordParseError(str(exc)) from exc
    return rec


def serialize_record(rec: NewformRecord) -> str:
    out = [
        f"label: {rec.label}",
        f"level: {rec.level}",
        f"weight: {rec.weight}",
        "field_poly: " + ",".join(map(str, _padded(rec.field_poly.coeffs, rec.degree + 1))),
    ]
    for q in sorted(rec.eigenvalues):
        vec, den = rec.eigenvalues[q]
        body = ",".join(map(str, vec))
        if den != 1:
            body += f"/{den}"
        out.append(f"{q}: {body}")
    return "\n".join(out) + "\n"


def _padded(coeffs, n):
    return list(coeffs) + [0] * (n - len(coeffs))


def complex_embeddings(rec: NewformRecord, q: int) -> np.ndarray:
    roots = np.roots(list(reversed(rec.field_poly.coeffs)))
    vec, den = rec.eigenvalues[q]
    vals = np.polyval(list(reversed(vec)) or [0], roots) / den
    return np.atleast_1d(vals)


def check_record(rec: NewformRecord, qmax: int = 50) -> None:
    """Coverage of every prime q <= qmax and the Hasse bound at good primes."""
    missing = [q for q in range(2, qmax + 1) if is_prime(q) and q not in rec.eigenvalues]
    if missing:
        raise ValidationFailed(f"{rec.label}: no eigenvalues for q in {missing}")
    for q in rec.eigenvalues:
        if rec.level % q == 0:
            continue
        worst = float(np.max(np.abs(complex_embeddings(rec, q))))
        if worst > 2 * sqrt(q) + HASSE_TOL:
            raise ValidationFailed(f"{rec.label}: |c_{q}| = {worst:.6f} violates the Hasse bound")
