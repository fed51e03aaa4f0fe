"""Norm-form sets for quadratic fields Q(sqrt(d)).

Ideal-norm membership is decided by splitting types (Kronecker symbol of the
fundamental discriminant); element-norm membership for imaginary fields comes
from direct lattice enumeration of the norm form, which is the desk-scale
ground truth the class-number-dependent theory is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
import mpmath
import numpy as np

from .sieves import FactorSieve, primes_up_to

__all__ = [
    "QuadraticField",
    "NormSetIndicator",
    "quadratic_field",
    "class_number_imaginary",
    "splitting_type",
    "inert_primes",
    "ideal_norm_sieve",
    "element_norm_enumerate",
    "delta_K",
    "delta_K_at",
    "prime_norm_census",
]


@dataclass(frozen=True)
class QuadraticField:
    d: int
    disc: int
    class_number: int | None
    imaginary: bool


@dataclass
class NormSetIndicator:
    limit: int
    ideal_norms: np.ndarray
    element_norms: np.ndarray | None
    delta_k: list  # [(x, delta_K(x))] at dyadic checkpoints


def _is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    for p in range(2, math.isqrt(n) + 1):
        if n % (p * p) == 0:
            return False
    return True


def class_number_imaginary(disc: int) -> int:
    """Class number of an imaginary quadratic field by counting reduced
    binary quadratic forms (a, b, c) of discriminant disc = b^2 - 4ac."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not an imaginary fundamental discriminant")
    h = 0
    b = disc % 2
    while 3 * b * b <= -disc:
        q, rem = divmod(b * b - disc, 4)
        assert rem == 0
        a = max(b, 1)
        while a * a <= q:
            if q % a == 0:
                c = q // a
                if b == 0 or a == b or a == c:
                    h += 1  # ambiguous forms count once
                else:
                    h += 2  # (a, b, c) and (a, -b, c)
                a += 1
            else:
                a += 1
        b += 2
    return h


def quadratic_field(d: int) -> QuadraticField:
    if d in (0, 1):
        raise ValueError("d must be a squarefree integer other than 0 and 1")
    if not _is_squarefree(d):
        raise ValueError(f"d = {d} is not squarefree")
    disc = d if d % 4 == 1 else 4 * d
    h = class_number_imaginary(disc) if d < 0 else None
    return QuadraticField(d, disc, h, d < 0)


def splitting_type(field: QuadraticField, p: int) -> str:
    """'split', 'inert' or 'ramified' for the rational prime p."""
    if p < 2:
        raise ValueError("p must be a prime >= 2")
    if field.disc % p == 0:
        return "ramified"
    return "split" if gmpy2.kronecker(field.disc, p) == 1 else "inert"


def inert_primes(field: QuadraticField, limit: int) -> np.ndarray:
    ps = primes_up_to(limit)
    kron = np.array([int(gmpy2.kronecker(field.disc, int(p))) for p in ps])
    return ps[kron == -1]


def ideal_norm_sieve(field: QuadraticField, sieve: FactorSieve, limit: int) -> np.ndarray:
    """Indicator of ideal norms: n is a norm of an integral ideal iff every
    inert prime divides n to an even power."""
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if sieve.limit < limit:
        raise ValueError(f"factor sieve limit {sieve.limit} below {limit}")
    bitmap = np.ones(limit + 1, dtype=bool)
    bitmap[0] = False
    for p in map(int, inert_primes(field, limit)):
        pk = p
        while pk <= limit:  # odd exact exponents p, p^3, p^5, ...
            k = np.arange(1, limit // pk + 1, dtype=np.int64)
            bitmap[pk * k[k % p != 0]] = False
            pk *= p * p
    return bitmap


def element_norm_enumerate(field: QuadraticField, limit: int) -> np.ndarray:
    """Indicator of element norms by lattice enumeration (imaginary fields).

    Integral basis (1, sqrt(d)) for d = 2, 3 (mod 4) gives the form
    a^2 + |d| b^2; basis (1, (1 + sqrt(d))/2) for d = 1 (mod 4) gives
    a^2 + ab + ((1 + |d|)/4) b^2, enumerated as ((2a + b)^2 + |d| b^2) / 4.
    """
    if not field.imaginary:
        raise ValueError("element-norm enumeration supports imaginary fields only")
    if limit < 1:
        raise ValueError("limit must be >= 1")
    m = -field.d
    bitmap = np.zeros(limit + 1, dtype=bool)
    if field.d % 4 != 1:
        for b in range(math.isqrt(limit // m) + 1):
            amax = math.isqrt(limit - m * b * b)
            vals = np.arange(amax + 1, dtype=np.int64) ** 2 + m * b * b
            bitmap[vals] = True
    else:
        for b in range(math.isqrt(4 * limit // m) + 1):
            rem = 4 * limit - m * b * b
            umax = math.isqrt(rem)
            u = np.arange(b % 2, umax + 1, 2, dtype=np.int64)
            bitmap[(u * u + m * b * b) // 4] = True
    bitmap[0] = False
    return bitmap


def delta_K(field: QuadraticField, limit: int) -> list:
    """Partial products of (1 - 1/p) over inert p <= x at dyadic x <= limit,
    accumulated in log space."""
    if limit < 2:
        raise ValueError("limit must be >= 2")
    inert = inert_primes(field, limit).astype(np.float64)
    logs = np.log1p(-1.0 / inert) if len(inert) else np.array([])
    cum = np.concatenate([[0.0], np.cumsum(logs)])
    out = []
    x = 2
    while x <= limit:
        k = np.searchsorted(inert, x, side="right")
        out.append((x, float(np.exp(cum[k]))))
        x *= 2
    if not out or out[-1][0] != limit:
        out.append((limit, float(np.exp(cum[len(inert)]))))
    return out


def delta_K_at(field: QuadraticField, limit: int) -> float:
    return delta_K(field, limit)[-1][1]


def prime_norm_census(field: QuadraticField, limit: int):
    """(count of primes that are element norms, count that are ideal norms,
    li(limit)).  The element count requires an imaginary field and is None
    otherwise."""
    if limit < 100:
        raise ValueError("limit must be >= 100")
    ps = primes_up_to(limit)
    kron = np.array([int(gmpy2.kronecker(field.disc, int(p))) for p in ps])
    count_ideal = int(np.sum(kron >= 0))  # split or ramified
    count_element = None
    if field.imaginary:
        elem = element_norm_enumerate(field, limit)
        count_element = int(np.sum(elem[ps]))
    li = float(mpmath.li(limit) - mpmath.li(2))
    return count_element, count_ideal, li
