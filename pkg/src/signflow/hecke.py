"""Exact q-expansions of level-1 Hecke eigenforms over the rational integers.

The six weights with one-dimensional cusp spaces and rational integer
eigenvalues are supported: 12, 16, 18, 20, 22, 26.  The weight-12 form is
built from Jacobi's sparse series for eta^3 by repeated squaring; the other
five are monomials delta * E4^a * E6^b.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
import warnings
from dataclasses import dataclass, field

import gmpy2
import numpy as np

__all__ = [
    "PowerSeriesZ",
    "EigenformTable",
    "ThetaAngle",
    "UnsupportedWeightError",
    "CacheFormatError",
    "eta_power_3",
    "delta_expansion",
    "eisenstein",
    "eigenform",
    "lambda_prime_power",
    "theta_angle",
    "write_cache",
    "read_cache",
    "cache_path",
    "SUPPORTED_WEIGHTS",
    "DEFAULT_PRECISION_CAP",
]

# weight -> (exponent of E4, exponent of E6) multiplying delta
_EIGENFORM_MONOMIALS = {
    12: (0, 0),
    16: (1, 0),
    18: (0, 1),
    20: (2, 0),
    22: (1, 1),
    26: (2, 1),
}
SUPPORTED_WEIGHTS = tuple(sorted(_EIGENFORM_MONOMIALS))

# big-integer tau(n) storage is the memory bottleneck; the CLI requires an
# explicit override above this
DEFAULT_PRECISION_CAP = 2 * 10**6

# a nonzero lambda_f(p^nu) below p^(-6 nu) signals float trouble, since the
# algebraic lower bound |lambda_f(p^nu)| >= p^(-C nu) holds with room to spare
# for rational eigenforms
CONFIDENCE_EXPONENT = 6.0

_SCHOOLBOOK_CUTOFF = 192

CACHE_MAGIC = b"HECK"
CACHE_VERSION = 1


class UnsupportedWeightError(ValueError):
    """Raised for weights outside the six rational-eigenvalue cusp weights."""


class CacheFormatError(RuntimeError):
    """Raised when a coefficient cache file cannot be used as-is."""


@dataclass
class PowerSeriesZ:
    """Truncated integer power series: coeffs[i] is the coefficient of q^i."""

    coeffs: list
    precision: int

    def __post_init__(self):
        if len(self.coeffs) != self.precision + 1:
            raise ValueError(
                f"coefficient list of length {len(self.coeffs)} does not match "
                f"precision {self.precision}"
            )

    def mul(self, other: "PowerSeriesZ", precision: int | None = None) -> "PowerSeriesZ":
        n = self.precision if precision is None else min(precision, self.precision)
        n = min(n, other.precision) if precision is None else n
        out = _mul_trunc(self.coeffs, other.coeffs, n)
        return PowerSeriesZ(out, n)

    def square(self, precision: int | None = None) -> "PowerSeriesZ":
        n = self.precision if precision is None else precision
        out = _mul_trunc(self.coeffs, self.coeffs, n)
        return PowerSeriesZ(out, n)

    def shift(self, k: int) -> "PowerSeriesZ":
        """Multiply by q^k, keeping the same precision."""
        n = self.precision
        out = [0] * (n + 1)
        out[k:] = self.coeffs[: n + 1 - k]
        return PowerSeriesZ(out, n)


def _mul_trunc(a: list, b: list, n: int) -> list:
    """Exact product of integer coefficient lists, truncated at q^n."""
    a = a[: n + 1]
    b = b[: n + 1]
    nza = sum(1 for x in a if x)
    nzb = sum(1 for x in b if x)
    if nza == 0 or nzb == 0:
        return [0] * (n + 1)
    if min(nza, nzb) <= _SCHOOLBOOK_CUTOFF or n <= _SCHOOLBOOK_CUTOFF:
        return _schoolbook_trunc(a, b, n)
    return _kronecker_trunc(a, b, n)


def _schoolbook_trunc(a: list, b: list, n: int) -> list:
    if sum(1 for x in b if x) < sum(1 for x in a if x):
        a, b = b, a
    out = [0] * (n + 1)
    for i, ai in enumerate(a):
        if not ai:
            continue
        top = n + 1 - i
        for j, bj in enumerate(b[:top]):
            if bj:
                out[i + j] += ai * bj
    return out


def _kronecker_trunc(a: list, b: list, n: int) -> list:
    """Truncated product via Kronecker substitution on GMP integers.

    Signed inputs are split into nonnegative parts so each packed slot of the
    four products stays nonnegative and within the slot width.
    """
    max_a = max(max(a), -min(a), 1)
    max_b = max(max(b), -min(b), 1)
    bound = int(max_a) * int(max_b) * min(len(a), len(b))
    slot_bits = ((bound.bit_length() + 1 + 63) // 64) * 64
    slot_bytes = slot_bits // 8

    def encode(vals):
        buf = b"".join(int(v).to_bytes(slot_bytes, "little") for v in vals)
        return gmpy2.mpz(int.from_bytes(buf, "little"))

    ap = encode([v if v > 0 else 0 for v in a])
    an = encode([-v if v < 0 else 0 for v in a])
    if b is a:
        bp, bn = ap, an
    else:
        bp = encode([v if v > 0 else 0 for v in b])
        bn = encode([-v if v < 0 else 0 for v in b])

    full = len(a) + len(b) - 1

    def decode(z):
        raw = int(z).to_bytes(slot_bytes * full, "little")
        words = np.frombuffer(raw, dtype="<u8").reshape(full, slot_bytes // 8)
        vals = words[: n + 1, 0].astype(object)
        for j in range(1, slot_bytes // 8):
            col = words[: n + 1, j]
            if col.any():
                vals = vals + (col.astype(object) << (64 * j))
        return vals

    pos = decode(ap * bp) + decode(an * bn)
    neg = decode(ap * bn) + decode(an * bp)
    return [int(x) for x in (pos - neg)]


def eta_power_3(precision: int) -> PowerSeriesZ:
    """Jacobi's expansion of eta^3 (without the q^(1/8) prefactor)."""
    if precision < 0:
        raise ValueError("precision must be nonnegative")
    coeffs = [0] * (precision + 1)
    j = 0
    while j * (j + 1) // 2 <= precision:
        coeffs[j * (j + 1) // 2] = (-1) ** j * (2 * j + 1)
        j += 1
    return PowerSeriesZ(coeffs, precision)


def delta_expansion(precision: int) -> PowerSeriesZ:
    """The discriminant cusp form: coefficient of q^n is tau(n)."""
    if precision < 1:
        raise ValueError("precision must be >= 1")
    s = eta_power_3(precision - 1)
    for _ in range(3):  # eta^3 -> eta^6 -> eta^12 -> eta^24
        s = s.square()
    coeffs = [0] + s.coeffs[:precision]
    return PowerSeriesZ(coeffs, precision)


def eisenstein(weight: int, precision: int) -> PowerSeriesZ:
    """Normalized Eisenstein series E4 or E6 with exact integer coefficients."""
    if weight not in (4, 6):
        raise UnsupportedWeightError(f"Eisenstein weight must be 4 or 6, got {weight}")
    if precision < 0:
        raise ValueError("precision must be nonnegative")
    scale = 240 if weight == 4 else -504
    sig = [0] * (precision + 1)
    for d in range(1, precision + 1):
        dw = d ** (weight - 1)
        for m in range(d, precision + 1, d):
            sig[m] += dw
    coeffs = [1] + [scale * s for s in sig[1:]]
    return PowerSeriesZ(coeffs, precision)


@dataclass
class EigenformTable:
    """Exact coefficients a_f(n), 1 <= n <= precision, of one eigenform.

    a[0] is a zero placeholder so a[n] is the coefficient of q^n.
    lambda_prime maps each prime p <= precision to a_f(p) / p^((k-1)/2).
    Immutable after construction; safe for shared reads.
    """

    weight: int
    precision: int
    a: list
    lambda_prime: dict
    _prime_arrays: tuple | None = field(default=None, repr=False, compare=False)

    def lambda_at(self, n: int) -> float:
        """Normalized coefficient lambda_f(n) = a_f(n) / n^((k-1)/2)."""
        return float(self.a[n]) / float(n) ** ((self.weight - 1) / 2)

    def prime_arrays(self):
        """(primes, lambda values) as aligned numpy arrays, cached."""
        if self._prime_arrays is None:
            ps = np.array(sorted(self.lambda_prime), dtype=np.int64)
            ls = np.array([self.lambda_prime[int(p)] for p in ps])
            object.__setattr__(self, "_prime_arrays", (ps, ls))
        return self._prime_arrays


@dataclass
class ThetaAngle:
    """Angle in [0, pi] with lambda_f(p) = 2 cos(theta)."""

    p: int
    theta: float


def theta_angle(table: EigenformTable, p: int) -> ThetaAngle:
    lam = table.lambda_prime.get(p)
    if lam is None:
        raise ValueError(f"prime {p} not in table of precision {table.precision}")
    return ThetaAngle(p, math.acos(min(1.0, max(-1.0, lam / 2.0))))


def _primes_up_to(limit: int) -> np.ndarray:
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if is_p[i]:
            is_p[i * i :: i] = False
    return np.nonzero(is_p)[0]


def eigenform(weight: int, precision: int) -> EigenformTable:
    """The unique normalized Hecke eigencusp form of the given weight."""
    if weight not in _EIGENFORM_MONOMIALS:
        raise UnsupportedWeightError(
            f"weight {weight} not supported: the rational-eigenvalue one-dimensional "
            f"cusp spaces occur at weights {SUPPORTED_WEIGHTS} (weight 24 has "
            "eigenvalues in a real quadratic field and is rejected)"
        )
    if precision < 2:
        raise ValueError("precision must be >= 2")
    series = delta_expansion(precision)
    e4_pow, e6_pow = _EIGENFORM_MONOMIALS[weight]
    if e4_pow:
        e4 = eisenstein(4, precision)
        for _ in range(e4_pow):
            series = series.mul(e4)
    if e6_pow:
        series = series.mul(eisenstein(6, precision))
    a = series.coeffs
    half = (weight - 1) / 2
    lam = {}
    for p in _primes_up_to(precision):
        p = int(p)
        lam[p] = float(a[p]) / float(p) ** half
    return EigenformTable(weight, precision, a, lam)


def lambda_prime_power(table: EigenformTable, p: int, nu: int) -> float:
    """lambda_f(p^nu) by the normalized Hecke recursion in double precision."""
    if nu < 0:
        raise ValueError("exponent must be nonnegative")
    lam_p = table.lambda_prime.get(p)
    if lam_p is None:
        raise ValueError(f"prime {p} exceeds table precision {table.precision}")
    prev, cur = 1.0, lam_p
    if nu == 0:
        return 1.0
    for _ in range(nu - 1):
        prev, cur = cur, lam_p * cur - prev
    if 0.0 < abs(cur) < float(p) ** (-CONFIDENCE_EXPONENT * nu):
        warnings.warn(
            f"lambda_f({p}^{nu}) = {cur:.3e} is suspiciously small: "
            "numerical-confidence failure",
            RuntimeWarning,
            stacklevel=2,
        )
    return cur


def cache_path(cache_dir: str, weight: int, precision: int) -> str:
    return os.path.join(cache_dir, f"eigenform_w{weight}_N{precision}.heck")


def write_cache(table: EigenformTable, path: str) -> None:
    """Bit-exact binary dump: HECK magic, version, weight, precision, then
    length-prefixed sign/magnitude little-endian integers a(1..N)."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(CACHE_MAGIC)
            fh.write(struct.pack("<IIQ", CACHE_VERSION, table.weight, table.precision))
            for n in range(1, table.precision + 1):
                v = table.a[n]
                mag = abs(v)
                nbytes = (mag.bit_length() + 7) // 8
                fh.write(struct.pack("<IB", nbytes, 1 if v < 0 else 0))
                fh.write(mag.to_bytes(nbytes, "little"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_cache(path: str) -> EigenformTable:
    def take(fh, n):
        buf = fh.read(n)
        if len(buf) != n:
            raise CacheFormatError(f"{path}: truncated cache file")
        return buf

    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CACHE_MAGIC:
            raise CacheFormatError(f"{path}: bad magic {magic!r}")
        version, weight, precision = struct.unpack("<IIQ", take(fh, 16))
        if version != CACHE_VERSION:
            raise CacheFormatError(
                f"{path}: cache version {version}, expected {CACHE_VERSION}"
            )
        a = [0]
        for _ in range(precision):
            nbytes, sign = struct.unpack("<IB", take(fh, 5))
            mag = int.from_bytes(take(fh, nbytes), "little")
            a.append(-mag if sign else mag)
    half = (weight - 1) / 2
    lam = {int(p): float(a[p]) / float(p) ** half for p in _primes_up_to(precision)}
    return EigenformTable(weight, precision, a, lam)
