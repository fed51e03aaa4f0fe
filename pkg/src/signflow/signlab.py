"""Experiments: sign-change counts along norm-form sets, short-interval
positivity surveys, long mean-value ratios, shifted convolution sums, and the
small-coefficient / arithmetic-progression masses for r(n)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hecke import EigenformTable
from .normforms import QuadraticField, delta_K_at, element_norm_enumerate, inert_primes
from .sieves import (
    FactorSieve,
    RSieve,
    SignSequence,
    ZERO_TOL,
    chi4,
    iota_sieve,
    lambda_sieve,
    primes_up_to,
)

__all__ = [
    "SignChangeReport",
    "IntervalStats",
    "ShiftedSumTrace",
    "count_sign_changes",
    "interval_sign_survey",
    "long_average_ratios",
    "shifted_convolution",
    "sign_changes_shifted",
    "small_lambda_prime_power_sum",
    "small_coefficient_interval_mass",
    "r_in_progression",
    "nonvanishing_interval_mass",
    "lambda_prime_power_values",
]


@dataclass
class SignChangeReport:
    limit: int
    set_label: str
    count: int
    normalizer: float
    ratio: float
    low_confidence_skipped: int = 0


def count_sign_changes(
    signs: SignSequence,
    set_bitmap: np.ndarray,
    limit: int,
    label: str = "",
    normalizer: float = math.nan,
) -> SignChangeReport:
    """Adjacent sign flips of sigma_f along the set, zeros skipped.

    Low-confidence entries (|lambda| below the magnitude-confidence line) are
    excluded from the scan and counted separately so float noise never
    fabricates a sign change.
    """
    if signs.limit < limit:
        raise ValueError(f"sign sequence limit {signs.limit} below {limit}")
    members = np.nonzero(set_bitmap[1 : limit + 1])[0] + 1
    if len(members) == 0:
        raise ValueError("empty set: nothing to scan")
    s = signs.sign[members]
    low = signs.low_confidence[members]
    keep = (s != 0) & ~low
    skipped = int(np.sum(low & (s != 0)))
    ss = s[keep].astype(np.int32)
    count = int(np.sum(ss[:-1] * ss[1:] < 0))
    ratio = count / normalizer if normalizer == normalizer else math.nan
    return SignChangeReport(limit, label, count, normalizer, ratio, skipped)


@dataclass
class IntervalStats:
    limit: int
    h: int
    fraction_both_signs: float
    fraction_nonempty: float
    exceptional_count: int


def interval_sign_survey(
    signs: SignSequence, set_bitmap: np.ndarray, limit: int, h: int
) -> IntervalStats:
    """Disjoint intervals of length h tiling [X, 2X]: how many contain both a
    positive and a negative sigma_f(n) with n in the set."""
    if not 10 <= h <= limit // 10:
        raise ValueError(f"h = {h} outside [10, {limit // 10}]")
    if signs.limit < 2 * limit or len(set_bitmap) <= 2 * limit:
        raise ValueError("survey needs sign and set data up to 2X")
    m = limit // h
    span = slice(limit + 1, limit + 1 + m * h)
    in_set = np.asarray(set_bitmap[span], dtype=bool).reshape(m, h)
    s = signs.sign[span].reshape(m, h)
    usable = in_set & ~signs.low_confidence[span].reshape(m, h)
    has_pos = np.any(usable & (s > 0), axis=1)
    has_neg = np.any(usable & (s < 0), axis=1)
    both = has_pos & has_neg
    return IntervalStats(
        limit,
        h,
        float(np.mean(both)),
        float(np.mean(np.any(in_set, axis=1))),
        int(m - np.sum(both)),
    )


def _delta_k_indicator(field: QuadraticField, limit: int) -> np.ndarray:
    """Multiplicative Delta_K(n): 1 iff no inert prime divides n."""
    out = np.ones(limit + 1, dtype=bool)
    out[0] = False
    for p in map(int, inert_primes(field, limit)):
        out[p::p] = False
    return out


def long_average_ratios(
    table: EigenformTable,
    field: QuadraticField,
    sieve: FactorSieve,
    limit: int,
    signs: SignSequence | None = None,
) -> dict:
    """Empirical versions of the long-sum bounds.

    R1: mean of Delta_K * iota over (X, 2X] divided by the Euler product
        prod_{p <= X} (1 + (Delta_K(p) - 1)/p) (= delta_K(X) for quadratic K).
    R2: |(1/X) sum_{n <= X} sigma_f Delta_K iota n^{-iu}| over the same
        product, at u in {0, 1, log X}.
    R3: H(Delta_K; X) * delta_K(X), the product-identity ratio (reported, not
        asserted to be 1).
    """
    if limit < 10**4:
        raise ValueError("limit must be >= 10^4")
    if table.precision < 2 * limit or sieve.limit < 2 * limit:
        raise ValueError("R1 averages over (X, 2X]: need data up to 2X")
    if signs is None:
        from .sieves import sign_sieve

        signs = sign_sieve(lambda_sieve(table, sieve, 2 * limit))
    dk = _delta_k_indicator(field, 2 * limit)
    bad = set(int(p) for p in primes_up_to(abs(field.disc)) if field.disc % int(p) == 0)
    bad |= {p for p, v in table.lambda_prime.items() if abs(v) < ZERO_TOL}
    iota = iota_sieve(sieve, bad, 2 * limit)
    euler = delta_K_at(field, limit)

    both = dk & iota
    r1 = float(np.mean(both[limit + 1 : 2 * limit + 1])) / euler

    n = np.arange(1, limit + 1, dtype=np.float64)
    base = signs.sign[1 : limit + 1].astype(np.float64) * both[1 : limit + 1]
    r2 = {}
    for u in (0.0, 1.0, math.log(limit)):
        tw = np.exp(-1j * u * np.log(n)) if u else 1.0
        r2[u] = abs(np.sum(base * tw)) / limit / euler

    inert = inert_primes(field, limit).astype(np.float64)
    h_log = float(np.sum(np.log1p(1.0 / inert))) if len(inert) else 0.0
    h_product = math.exp(h_log)
    r3 = h_product * euler
    return {"R1": r1, "R2": r2, "R3": r3, "H": h_product, "delta_K": euler}


@dataclass
class ShiftedSumTrace:
    a: int
    checkpoints: list  # [(y, S(y))]
    envelope: list  # [(y, sum of d(n) r(n-a))]
    exponent_fit: float


def shifted_convolution(
    table: EigenformTable,
    rs: RSieve,
    a: int,
    limit: int,
    checkpoints=None,
    lam: np.ndarray | None = None,
    sieve: FactorSieve | None = None,
) -> ShiftedSumTrace:
    """Prefix sums S(y) = sum_{n <= y} lambda_f(n) r(n - a) at dyadic y.

    exponent_fit is the least-squares slope of log|S| against log y over
    checkpoints y >= 10^3.
    """
    if a == 0:
        raise ValueError("shift must be nonzero")
    if limit + abs(a) > rs.limit:
        raise ValueError(f"r sieve limit {rs.limit} below X + |a| = {limit + abs(a)}")
    if lam is None:
        if sieve is None:
            from .sieves import build_factor_sieve

            sieve = build_factor_sieve(limit)
        lam = lambda_sieve(table, sieve, limit)
    start = max(a + 1, 1)
    n = np.arange(start, limit + 1, dtype=np.int64)
    terms = lam[start : limit + 1] * rs.r[n - a]
    cum = np.cumsum(terms)
    from .sieves import divisor_sieve

    env_terms = divisor_sieve(limit)[start : limit + 1] * rs.r[n - a].astype(np.float64)
    env_cum = np.cumsum(env_terms)
    if checkpoints is None:
        # dyadic points for reporting plus a dense geometric grid so the
        # exponent fit runs over >= 10^3 checkpoints
        dyadic = []
        y = 2
        while y <= limit:
            dyadic.append(y)
            y *= 2
        lo = max(2, min(10**3, limit // 2))
        dense = np.geomspace(lo, limit, 1100).astype(np.int64)
        checkpoints = sorted(set(dyadic) | set(map(int, dense)) | {limit})
    cps, env = [], []
    for y in checkpoints:
        if y < start:
            cps.append((y, 0.0))
            env.append((y, 0.0))
        else:
            cps.append((y, float(cum[y - start])))
            env.append((y, float(env_cum[y - start])))
    pts = [(y, abs(s)) for y, s in cps if y >= 10**3 and abs(s) > 0]
    if len(pts) >= 2:
        ly = np.log([y for y, _ in pts])
        ls = np.log([s for _, s in pts])
        slope = float(np.polyfit(ly, ls, 1)[0])
    else:
        slope = math.nan
    return ShiftedSumTrace(a, cps, env, slope)


def sign_changes_shifted(
    signs: SignSequence, limit: int, a: int, norm_bitmap: np.ndarray | None = None
) -> SignChangeReport:
    """Sign changes along the shifted set {n <= X : n - a a sum of two
    squares, n - a >= 1}; normalizer sqrt(X)."""
    if a == 0:
        raise ValueError("shift must be nonzero")
    if norm_bitmap is None:
        from .normforms import quadratic_field

        norm_bitmap = element_norm_enumerate(quadratic_field(-1), limit + abs(a))
    set_bitmap = np.zeros(limit + 1, dtype=bool)
    n = np.arange(max(a + 2, 1), limit + 1, dtype=np.int64)
    set_bitmap[n] = norm_bitmap[n - a]
    return count_sign_changes(
        signs, set_bitmap, limit, label=f"{a}+N", normalizer=math.sqrt(limit)
    )


def lambda_prime_power_values(table: EigenformTable, limit: int):
    """(p, nu, p^nu, lambda_f(p^nu)) for all prime powers p^nu <= limit."""
    out = []
    for p in map(int, primes_up_to(limit)):
        lam_p = table.lambda_prime[p]
        prev, cur = 1.0, lam_p
        pk, nu = p, 1
        while pk <= limit:
            out.append((p, nu, pk, cur))
            prev, cur = cur, lam_p * cur - prev
            pk *= p
            nu += 1
    return out


@dataclass
class SmallLambdaMass:
    value: float
    bound_shape: float
    contributors: list = field(repr=False)


def small_lambda_prime_power_sum(
    table: EigenformTable, c: float, z: int, limit: int
) -> SmallLambdaMass:
    """Reciprocal sum over prime powers p^nu in [Z, X] whose nonzero
    |lambda_f(p^nu)| is below (log X)^(-c), next to the analytic bound shape
    log log X / (log X)^c + 1 / (log(Z + log X))^(1/5)."""
    if not 0 < c < 0.25:
        raise ValueError("c must lie in (0, 1/4)")
    if not 2 <= z <= limit:
        raise ValueError("need 2 <= Z <= X")
    window = math.log(limit) ** (-c)
    contributors = [
        (p, nu, pk, lam)
        for p, nu, pk, lam in lambda_prime_power_values(table, limit)
        if z <= pk and ZERO_TOL < abs(lam) <= window
    ]
    value = math.fsum(1.0 / pk for _, _, pk, _ in contributors)
    log_x = math.log(limit)
    bound = math.log(log_x) / log_x**c + 1.0 / math.log(z + log_x) ** 0.2
    return SmallLambdaMass(value, bound, contributors)


@dataclass
class IntervalMassReport:
    limit: int
    h: int
    interval_sums: np.ndarray
    threshold: float
    exceeding_fraction: float
    total_mass: float


def small_coefficient_interval_mass(
    table: EigenformTable,
    rs: RSieve,
    limit: int,
    h: int,
    delta: float,
    a: int = 1,
    lam: np.ndarray | None = None,
    sieve: FactorSieve | None = None,
) -> IntervalMassReport:
    """Per-interval sums of r(n + a) over n with 0 < |lambda_f(n)| < X^-delta,
    for disjoint intervals of length h tiling [X, 2X]."""
    eps = 0.1
    if not limit**eps < h <= limit ** (1 - eps):
        raise ValueError(f"h = {h} outside (X^{eps}, X^{1 - eps}]")
    if delta <= 0:
        raise ValueError("delta must be positive")
    if 2 * limit + max(a, 0) > rs.limit:
        raise ValueError("r sieve too short for n + a up to 2X + a")
    if lam is None:
        lam = lambda_sieve(table, sieve, 2 * limit)
    m = limit // h
    n = np.arange(limit + 1, limit + 1 + m * h, dtype=np.int64)
    al = np.abs(lam[n])
    mask = (al > ZERO_TOL) & (al < limit ** (-delta))
    weights = np.where(mask, rs.r[n + a].astype(np.float64), 0.0)
    sums = weights.reshape(m, h).sum(axis=1)
    threshold = h / math.log(math.log(limit)) ** 0.1
    return IntervalMassReport(
        limit,
        h,
        sums,
        threshold,
        float(np.mean(sums > threshold)),
        float(np.sum(sums)),
    )


def r_in_progression(rs: RSieve, y: int, q: int, a: int):
    """(actual, mainTerm, relError) for sum of r(n) over n <= y, n = a (q),
    against the arithmetic-progression main term pi * y/q * prod_{p | q}
    (1 - chi4(p)/p)."""
    if not 1 <= q <= int(y ** (2 / 3)) + 1:
        raise ValueError(f"q = {q} outside [1, y^(2/3)]")
    if y > rs.limit:
        raise ValueError(f"y = {y} exceeds r sieve limit {rs.limit}")
    qf = []
    qq = q
    for p in range(2, math.isqrt(q) + 1):
        if qq % p == 0:
            qq //= p
            if qq % p == 0:
                raise ValueError(f"q = {q} is not squarefree")
            qf.append(p)
    if qq > 1:
        qf.append(qq)
    if q > 1 and math.gcd(a, q) != 1:
        raise ValueError(f"gcd({a}, {q}) > 1 violates the progression hypothesis")
    start = a % q if q > 1 else 1
    if start == 0:
        start = q
    actual = int(rs.r[start : y + 1 : q].sum(dtype=np.int64))
    main = math.pi * y / q
    for p in qf:
        main *= 1.0 - chi4(p) / p
    return actual, main, abs(actual - main) / main


@dataclass
class NonvanishingMassReport:
    limit: int
    h: int
    interval_sums: np.ndarray
    minimum: float
    median: float
    fraction_below: float  # fraction of intervals under 0.1 h


def nonvanishing_interval_mass(
    table: EigenformTable,
    rs: RSieve,
    limit: int,
    h: int,
    a: int,
    signs: SignSequence | None = None,
    sieve: FactorSieve | None = None,
) -> NonvanishingMassReport:
    """Per-interval sums of r(n + a) over n with sigma_f(n) != 0, for disjoint
    intervals of length h tiling [X, 2X]."""
    if h <= limit ** (1 / 3 + 0.05):
        raise ValueError(f"h = {h} must exceed X^(1/3 + 0.05)")
    if 2 * limit + max(a, 0) > rs.limit:
        raise ValueError("r sieve too short for n + a up to 2X + a")
    if signs is None:
        from .sieves import sign_sieve

        signs = sign_sieve(lambda_sieve(table, sieve, 2 * limit))
    m = limit // h
    n = np.arange(limit + 1, limit + 1 + m * h, dtype=np.int64)
    mask = signs.sign[n] != 0
    weights = np.where(mask, rs.r[n + a].astype(np.float64), 0.0)
    sums = weights.reshape(m, h).sum(axis=1)
    return NonvanishingMassReport(
        limit,
        h,
        sums,
        float(np.min(sums)),
        float(np.median(sums)),
        float(np.mean(sums < 0.1 * h)),
    )
