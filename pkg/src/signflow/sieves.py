"""Factorization infrastructure and arithmetic-function sieves over [1, X].

All arrays are flat and logically 1-indexed (index 0 is a zero/False
placeholder).  Everything is immutable after build and safe for shared reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hecke import EigenformTable

__all__ = [
    "FactorSieve",
    "SignSequence",
    "RSieve",
    "primes_up_to",
    "build_factor_sieve",
    "factorize",
    "lambda_sieve",
    "sign_sieve",
    "r_sieve",
    "divisor_sieve",
    "squarefree_sieve",
    "iota_sieve",
    "chi4",
    "ZERO_TOL",
    "LOW_CONFIDENCE_TOL",
]

ZERO_TOL = 1e-12
LOW_CONFIDENCE_TOL = 1e-9


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if is_p[i]:
            is_p[i * i :: i] = False
    return np.nonzero(is_p)[0].astype(np.int64)


@dataclass
class FactorSieve:
    """Smallest-prime-factor table enabling O(log n) factorization."""

    limit: int
    spf: np.ndarray

    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1, dtype=np.int64)
        return idx[2:][self.spf[2:] == idx[2:]]


def build_factor_sieve(limit: int) -> FactorSieve:
    if limit < 2:
        raise ValueError("limit must be >= 2")
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[2::2] = 2
    spf[1] = 1
    for i in range(3, math.isqrt(limit) + 1, 2):
        if spf[i] == 0:
            spf[i * i :: 2 * i][spf[i * i :: 2 * i] == 0] = i
    rest = np.nonzero(spf[3::2] == 0)[0] * 2 + 3
    spf[rest] = rest
    return FactorSieve(limit, spf)


def factorize(sieve: FactorSieve, n: int) -> list:
    """Prime factorization [(p, nu), ...] of n <= sieve.limit."""
    if not 1 <= n <= sieve.limit:
        raise ValueError(f"n = {n} outside sieve range [1, {sieve.limit}]")
    out = []
    spf = sieve.spf
    while n > 1:
        p = int(spf[n])
        nu = 0
        while n % p == 0:
            n //= p
            nu += 1
        out.append((p, nu))
    return out


def _lambda_powers(lam_p: float, p: int, limit: int) -> list:
    """[lambda(p), lambda(p^2), ...] for p^nu <= limit."""
    vals = []
    prev, cur = 1.0, lam_p
    pk = p
    while pk <= limit:
        vals.append(cur)
        prev, cur = cur, lam_p * cur - prev
        pk *= p
    return vals


def lambda_sieve(table: EigenformTable, sieve: FactorSieve, limit: int) -> np.ndarray:
    """lambda_f(n) for 0 <= n <= limit by multiplicative extension.

    The main path multiplies ratio factors lambda(p^nu)/lambda(p^(nu-1)) over
    slices of multiples; primes whose lambda values come near zero fall back
    to exact-exponent index arithmetic so a vanishing value never divides.
    """
    if table.precision < limit:
        raise ValueError(
            f"table precision {table.precision} below sieve limit {limit}"
        )
    if sieve.limit < limit:
        raise ValueError(f"factor sieve limit {sieve.limit} below {limit}")
    lam = np.ones(limit + 1)
    lam[0] = 0.0
    for p in map(int, primes_up_to(limit)):
        vals = _lambda_powers(table.lambda_prime[p], p, limit)
        if all(abs(v) > 1e-100 for v in vals[:-1]):
            lam[p::p] *= vals[0]
            pk = p * p
            for nu in range(1, len(vals)):
                lam[pk::pk] *= vals[nu] / vals[nu - 1]
                pk *= p
        else:
            pk = p
            for nu in range(len(vals)):
                k = np.arange(1, limit // pk + 1, dtype=np.int64)
                k = k[k % p != 0]
                lam[k * pk] *= vals[nu]
                pk *= p
    return lam


@dataclass
class SignSequence:
    """sigma_f(n) in {-1, 0, +1} with magnitude-confidence flags."""

    limit: int
    sign: np.ndarray  # int8
    low_confidence: np.ndarray  # bool, |lambda(n)| < LOW_CONFIDENCE_TOL


def sign_sieve(lam: np.ndarray, zero_tol: float = ZERO_TOL) -> SignSequence:
    if zero_tol <= 0:
        raise ValueError("zero tolerance must be positive")
    limit = len(lam) - 1
    sign = np.sign(lam).astype(np.int8)
    sign[np.abs(lam) < zero_tol] = 0
    low = np.abs(lam) < LOW_CONFIDENCE_TOL
    low[0] = False
    return SignSequence(limit, sign, low)


def chi4(n: int) -> int:
    """Non-principal character modulo 4."""
    r = n % 4
    return 0 if r % 2 == 0 else (1 if r == 1 else -1)


@dataclass
class RSieve:
    """r(n) = #{(a, b) in Z^2 : a^2 + b^2 = n}."""

    limit: int
    r: np.ndarray  # uint32


def r_sieve(limit: int) -> RSieve:
    """Multiplicative build of r/4 = 1 * chi4: p=2 contributes 1, split
    p=1 (mod 4) contributes nu+1, inert p=3 (mod 4) kills odd exponents."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    b = np.ones(limit + 1)
    b[0] = 0.0
    for p in map(int, primes_up_to(limit)):
        if p % 4 == 1:
            pk, nu = p, 1
            while pk <= limit:
                b[pk::pk] *= (nu + 1) / nu
                pk *= p
                nu += 1
        elif p % 4 == 3:
            pk = p
            while pk <= limit:
                k = np.arange(1, limit // pk + 1, dtype=np.int64)
                b[pk * k[k % p != 0]] = 0.0
                pk *= p * p
    return RSieve(limit, np.rint(4 * b).astype(np.uint32))


def divisor_sieve(limit: int) -> np.ndarray:
    """d(n) for 0 <= n <= limit (d[0] = 0)."""
    d = np.ones(limit + 1)
    d[0] = 0.0
    for p in map(int, primes_up_to(limit)):
        pk, nu = p, 1
        while pk <= limit:
            d[pk::pk] *= (nu + 1) / nu
            pk *= p
            nu += 1
    return np.rint(d).astype(np.int64)


def squarefree_sieve(limit: int) -> np.ndarray:
    """mu^2(n) as a boolean array."""
    sq = np.ones(limit + 1, dtype=bool)
    sq[0] = False
    for p in map(int, primes_up_to(math.isqrt(limit))):
        sq[p * p :: p * p] = False
    return sq


def iota_sieve(sieve: FactorSieve, bad_primes, limit: int) -> np.ndarray:
    """Indicator of squarefree n with no prime factor in bad_primes."""
    if sieve.limit < limit:
        raise ValueError(f"factor sieve limit {sieve.limit} below {limit}")
    out = squarefree_sieve(limit)
    for p in sorted(set(int(p) for p in bad_primes)):
        if p <= limit:
            out[p::p] = False
    return out
