"""Weight-2 newform data and exact arithmetic in their Hecke fields."""

from __future__ import annotations

from sympy import Matrix, Rational

from ..algebra import is_prime, poly_eval_mod, resultant, roots_mod_prime
from .records import (
    NewformRecord,
    RationalNewformCurve,
    RecordParseError,
    ValidationFailed,
    check_record,
    complex_embeddings,
    parse_record,
    serialize_record,
)
from .store import (
    CacheCorrupt,
    IngestReport,
    LevelData,
    LevelNotAvailable,
    RemoteSchemaMismatch,
    RemoteUnavailable,
    bundled_levels,
    fetch_and_cache,
    load_level,
    load_level_data,
    read_level_dir,
    write_level_dir,
)


class MissingEigenvalue(KeyError):
    pass


class NoDegreeOnePrime(ValueError):
    pass


def eigenvalue_norm_diff(f: NewformRecord, q: int, a: int) -> int:
    """Norm from the Hecke field down to Q of c_q - a, exactly."""
    if q not in f.eigenvalues:
        raise MissingEigenvalue(f"{f.label} has no stored c_{q}")
    poly, den = f.coefficient_poly(q)
    num = resultant(f.field_poly, poly - a * den)
    scale = den**f.degree
    if num % scale:
        raise ValueError(f"norm of c_{q} - {a} for {f.label} is not an integer")
    return num // scale


def eigenvalue_residues(f: NewformRecord, q: int, n: int) -> set[tuple[int, int]]:
    """(theta mod P, c_q mod P) for each degree-one prime P above n."""
    if q not in f.eigenvalues:
        raise MissingEigenvalue(f"{f.label} has no stored c_{q}")
    if not is_prime(n):
        raise ValueError(f"{n} is not prime")
    poly, den = f.coefficient_poly(q)
    if den % n == 0:
        raise NoDegreeOnePrime(f"c_{q} of {f.label} has {n} in its denominator")
    roots = roots_mod_prime(f.field_poly, n)
    if not roots:
        raise NoDegreeOnePrime(f"{f.field_poly} has no root mod {n}")
    inv = pow(den, -1, n)
    return {(r, poly_eval_mod(poly, r, n) * inv % n) for r in roots}


def coefficient_charpoly(f: NewformRecord, q: int) -> tuple:
    """Characteristic polynomial of c_q over Q; independent of the chosen basis."""
    d = f.degree
    low = [-c for c in f.field_poly.coeffs[:d]]
    vec, den = f.eigenvalues[q]
    cols = []
    cur = list(vec)
    for _ in range(d):
        cols.append(cur)
        carry = cur[-1]
        cur = [([0] + cur[:-1])[i] + carry * low[i] for i in range(d)]
    m = Matrix(d, d, lambda i, j: Rational(cols[j][i], den))
    return tuple(m.charpoly().all_coeffs())


def canonical_form(f: NewformRecord, primes=None) -> tuple:
    primes = sorted(primes if primes is not None else f.eigenvalues)
    return (f.level, f.degree, tuple((q, coefficient_charpoly(f, q)) for q in primes))


def same_form(f: NewformRecord, g: NewformRecord, primes=None) -> bool:
    """Whether two records agree up to relabelling and change of field basis.

    Compares characteristic polynomials of each c_q, which is a necessary
    condition for the two classes to coincide.
    """
    if primes is None:
        primes = sorted(set(f.eigenvalues) & set(g.eigenvalues))
    return canonical_form(f, primes) == canonical_form(g, primes)
