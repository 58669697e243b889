"""Primitive roots and the real cyclotomic fields Q(zeta_l)^+.

For an odd prime l the field k = Q(zeta_l + zeta_l^-1) has degree
d = (l - 1)/2 and discriminant l^((l-3)/2).  A prime p != l has residue
degree f = least k with p^k = +-1 (mod l) in k, so p is inert exactly when
f = d; in particular every primitive root mod l is inert.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from sympy import factorint, isprime, primerange

from .errors import IsospecError
from .numfmt import decimal_str

CANDIDATE_PRIMES = (5, 7, 11)


class RamifiedPrime(IsospecError):
    """The prime equals the conductor; it ramifies and has no residue-degree split."""


def _prime_factors(n: int) -> list[int]:
    return sorted(factorint(n))


def _check_coprime(g: int, ell: int):
    if math.gcd(g, ell) != 1:
        raise IsospecError(f"gcd({g}, {ell}) != 1")


def multiplicative_order(g: int, ell: int) -> int:
    """Order of g in (Z/ell)^*, by descending through the divisors of ell - 1."""
    _check_coprime(g, ell)
    g %= ell
    k = ell - 1
    for r in _prime_factors(ell - 1):
        while k % r == 0 and pow(g, k // r, ell) == 1:
            k //= r
    return k


def is_primitive_root(g: int, ell: int) -> bool:
    """g^((ell-1)/r) != 1 for every prime r dividing ell - 1."""
    _check_coprime(g, ell)
    return all(pow(g, (ell - 1) // r, ell) != 1 for r in _prime_factors(ell - 1))


@dataclass(frozen=True)
class CyclotomicRealField:
    conductor: int
    degree: int
    discriminant: int
    rd_base: int
    rd_exponent: Fraction
    rd_float: float

    @property
    def rd_exact(self) -> str:
        return f"{self.rd_base}^{self.rd_exponent.numerator}/{self.rd_exponent.denominator}"

    def rd_identity_holds(self) -> bool:
        """rd = (2d + 1)^(1 - 1/d), as equality of (base, rational exponent)."""
        d = self.degree
        disc_exponent = (self.conductor - 3) // 2
        return (
            self.discriminant == self.conductor**disc_exponent
            and Fraction(disc_exponent, d) == self.rd_exponent
            and (self.rd_base, self.rd_exponent) == (2 * d + 1, 1 - Fraction(1, d))
        )


def real_field_data(ell: int) -> CyclotomicRealField:
    if ell < 5 or not isprime(ell):
        raise IsospecError(f"conductor must be a prime >= 5, got {ell}")
    d = (ell - 1) // 2
    exponent = Fraction(ell - 3, ell - 1)
    return CyclotomicRealField(
        conductor=ell,
        degree=d,
        discriminant=ell ** ((ell - 3) // 2),
        rd_base=ell,
        rd_exponent=exponent,
        rd_float=ell ** float(exponent),
    )


@dataclass(frozen=True)
class DecompositionType:
    p: int
    conductor: int
    residue_degree: int
    num_primes: int
    ramified: bool = False

    @property
    def inert(self) -> bool:
        return self.num_primes == 1


def decomposition_in_real_subfield(p: int, ell: int) -> DecompositionType:
    """Splitting of p in Q(zeta_ell)^+ from the least k with p^k = +-1 mod ell."""
    if p == ell:
        raise RamifiedPrime(f"{p} ramifies in Q(zeta_{ell})^+")
    _check_coprime(p, ell)
    if ell < 3 or not isprime(ell):
        raise IsospecError(f"conductor must be an odd prime, got {ell}")
    d = (ell - 1) // 2
    x = p % ell
    f = 1
    while x != 1 and x != ell - 1:
        x = x * p % ell
        f += 1
    return DecompositionType(p, ell, f, d // f)


def inert_conductor_stream(candidates, limit: int) -> list[tuple[int, int]]:
    """Primes 7 <= ell <= limit with a primitive root among ``candidates``.

    Returns ``(ell, least witness)`` in ascending order.  A candidate equal to
    the conductor is never used as its witness.
    """
    candidates = sorted(set(int(c) for c in candidates))
    if not candidates:
        raise IsospecError("candidate set is empty")
    if not set(candidates) <= set(CANDIDATE_PRIMES):
        raise IsospecError(f"candidates must be drawn from {CANDIDATE_PRIMES}")
    out = []
    for ell in primerange(7, limit + 1):
        for g in candidates:
            if g != ell and is_primitive_root(g, ell):
                out.append((int(ell), g))
                break
    return out


def candidate_density(limit: int, candidates=CANDIDATE_PRIMES) -> Fraction:
    """Fraction of odd primes ell < limit (not in ``candidates``) with a candidate primitive root."""
    total = hits = 0
    for ell in primerange(3, limit):
        if ell in candidates:
            continue
        total += 1
        hits += any(is_primitive_root(g, ell) for g in candidates)
    return Fraction(hits, total)


def pipeline_degree(ell: int, doubling: bool = True) -> tuple[int, int]:
    """(field degree d, guaranteed inertia degree) for conductor ell.

    With ``doubling`` the base field is a quadratic extension of
    Q(zeta_ell)^+ (needed for signatures that are not totally real); only
    its numeric effect is modelled: degree 2 * (ell-1)/2, inertia (ell-1)/2.
    """
    d_real = (ell - 1) // 2
    return (2 * d_real, d_real) if doubling else (d_real, d_real)


# -- conductor tables ---------------------------------------------------------

TABLE_COLUMNS = ("ell", "d", "disc", "rd_exact", "witness", "f", "m")


@dataclass(frozen=True)
class ConductorRow:
    ell: int
    d: int
    disc: str
    rd_exact: str
    witness: int
    f: int
    m: int
    rd_float: float


def conductor_table(candidates, limit: int) -> list[ConductorRow]:
    rows = []
    for ell, g in inert_conductor_stream(candidates, limit):
        K = real_field_data(ell)
        dec = decomposition_in_real_subfield(g, ell)
        rows.append(ConductorRow(ell, K.degree, decimal_str(K.discriminant), K.rd_exact, g,
                                 dec.residue_degree, dec.num_primes, K.rd_float))
    return rows


def table_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    for r in rows:
        writer.writerow([getattr(r, c) for c in TABLE_COLUMNS])
    return buf.getvalue()


def table_to_records(rows) -> list[dict]:
    return [asdict(r) for r in rows]
