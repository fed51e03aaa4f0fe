"""Pretentious distances, restricted Mertens sums and Sato-Tate censuses.

Prime-indexed inputs g may be given as a callable p -> complex value in the
closed unit disc, or as an array aligned with the ascending primes <= X.
Weights restrict prime sums to a subset (e.g. ideal-norm primes of a field).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hecke import EigenformTable
from .sieves import ZERO_TOL, primes_up_to

__all__ = [
    "DistanceGrid",
    "SatoTateCensus",
    "pretentious_distance_sq",
    "distance_grid",
    "mertens_restricted",
    "sato_tate_census",
    "sato_tate_cdf",
    "vanishing_census",
]

_UNIT_DISC_SLACK = 1e-9


def _g_values(g, primes: np.ndarray) -> np.ndarray:
    if callable(g):
        vals = np.array([g(int(p)) for p in primes], dtype=np.complex128)
    else:
        vals = np.asarray(g, dtype=np.complex128)
        if len(vals) != len(primes):
            raise ValueError(
                f"g array of length {len(vals)} does not match {len(primes)} primes"
            )
    if len(vals) and np.max(np.abs(vals)) > 1.0 + _UNIT_DISC_SLACK:
        raise ValueError("g takes a value outside the unit disc")
    return vals


def _weight_mask(weight, primes: np.ndarray) -> np.ndarray:
    if weight is None:
        return np.ones(len(primes), dtype=bool)
    w = np.asarray(weight)
    if len(w) == len(primes):
        return w.astype(bool)
    return w[primes].astype(bool)  # bitmap indexed by n


def pretentious_distance_sq(g, weight, t: float, limit: int, primes=None) -> float:
    """D^2(g, n^{it}; limit), optionally restricted to weighted primes."""
    if primes is None:
        primes = primes_up_to(limit)
    else:
        primes = primes[primes <= limit]
    mask = _weight_mask(weight, primes)
    ps = primes[mask]
    gv = _g_values(g, primes)[mask]
    if len(ps) == 0:
        return 0.0
    pf = ps.astype(np.float64)
    phase = t * np.log(pf)
    terms = (1.0 - (gv.real * np.cos(phase) + gv.imag * np.sin(phase))) / pf
    return math.fsum(terms.tolist())


@dataclass
class DistanceGrid:
    limit: int
    t_grid: np.ndarray
    values: np.ndarray
    minimizer: tuple  # (t0, D^2 at t0)


def _grid_values(gr, gi, wp, lnp, ts: np.ndarray) -> np.ndarray:
    """D^2 at each t; wp = weight/p coefficients over the selected primes."""
    base = float(np.sum(wp))
    out = np.empty(len(ts))
    chunk = max(1, 8_000_000 // max(len(lnp), 1))
    for i in range(0, len(ts), chunk):
        phase = np.outer(ts[i : i + chunk], lnp)
        acc = np.cos(phase) @ (wp * gr)
        if gi is not None:
            acc += np.sin(phase) @ (wp * gi)
        out[i : i + chunk] = base - acc
    return out


def distance_grid(
    g,
    weight,
    limit: int,
    t_max: float | None = None,
    steps: int | None = None,
) -> DistanceGrid:
    """Minimize D^2(g, n^{it}; limit) over a symmetric t-grid.

    The delicate range |t| <= log(limit) is covered at spacing 1/(4 log limit);
    any remaining range up to t_max is covered coarsely at spacing 1.  A 10x
    finer pass around the coarse argmin bounds the discretization error.
    """
    log_x = math.log(limit)
    if t_max is None:
        t_max = log_x
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    fine_max = min(t_max, log_x)
    if steps is None:
        steps = 2 * int(fine_max * 4 * log_x) + 1
    if steps < 3:
        raise ValueError("steps must be >= 3")
    if steps % 2 == 0:
        steps += 1  # keep t = 0 on the grid
    ts = np.linspace(-fine_max, fine_max, steps)
    if t_max > fine_max:
        tail = np.arange(fine_max + 1.0, t_max + 0.5, 1.0)
        ts = np.unique(np.concatenate([-tail[::-1], ts, tail]))

    primes = primes_up_to(limit)
    mask = _weight_mask(weight, primes)
    ps = primes[mask]
    gv = _g_values(g, primes)[mask]
    pf = ps.astype(np.float64)
    lnp = np.log(pf)
    wp = 1.0 / pf
    gi = gv.imag if np.any(gv.imag) else None

    values = _grid_values(gv.real, gi, wp, lnp, ts)
    i0 = int(np.argmin(values))
    spacing = ts[min(i0 + 1, len(ts) - 1)] - ts[i0] if len(ts) > 1 else 1.0
    lo = ts[max(i0 - 1, 0)]
    hi = ts[min(i0 + 1, len(ts) - 1)]
    fine_ts = np.linspace(lo, hi, 21)
    fine_vals = _grid_values(gv.real, gi, wp, lnp, fine_ts)
    j0 = int(np.argmin(fine_vals))
    if fine_vals[j0] <= values[i0]:
        minimizer = (float(fine_ts[j0]), float(fine_vals[j0]))
    else:
        minimizer = (float(ts[i0]), float(values[i0]))
    return DistanceGrid(limit, ts, values, minimizer)


def mertens_restricted(predicate, limit: int, primes=None) -> float:
    """Sum of 1/p over primes p <= limit passing the filter.

    predicate: None (all primes), a callable p -> bool, or a boolean array
    aligned with the ascending primes <= limit.
    """
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if primes is None:
        primes = primes_up_to(limit)
    else:
        primes = primes[primes <= limit]
    if predicate is None:
        keep = primes
    elif callable(predicate):
        keep = np.array([p for p in map(int, primes) if predicate(p)], dtype=np.int64)
    else:
        keep = primes[np.asarray(predicate, dtype=bool)]
    if len(keep) == 0:
        return 0.0
    return math.fsum((1.0 / keep.astype(np.float64)).tolist())


def sato_tate_cdf(theta) -> np.ndarray:
    """CDF of the Sato-Tate measure (2/pi) sin^2(theta) dtheta on [0, pi]."""
    theta = np.asarray(theta, dtype=np.float64)
    return (theta - np.sin(theta) * np.cos(theta)) / np.pi


@dataclass
class SatoTateCensus:
    limit: int
    bin_counts: np.ndarray
    bin_edges: np.ndarray
    census_size: int
    prime_count: int
    ks_statistic: float
    theta_sorted: np.ndarray
    class_filter: tuple | None

    @property
    def density(self) -> float:
        return self.census_size / self.prime_count


def _apply_class_filter(primes: np.ndarray, class_filter) -> np.ndarray:
    if class_filter is None:
        return np.ones(len(primes), dtype=bool)
    kind = class_filter[0]
    if kind == "mod":
        _, q, a = class_filter
        return primes % q == a % q
    if kind in ("split", "inert", "ramified"):
        from .normforms import splitting_type

        field = class_filter[1]
        return np.array(
            [splitting_type(field, int(p)) == kind for p in primes], dtype=bool
        )
    raise ValueError(f"unknown class filter {class_filter!r}")


def sato_tate_census(
    table: EigenformTable,
    limit: int,
    bins: int = 64,
    class_filter=None,
) -> SatoTateCensus:
    """Empirical distribution of theta_p = arccos(lambda_f(p)/2).

    ks_statistic is the sup-norm distance between the exact empirical CDF of
    the filtered angles (sorted values, not the reporting histogram) and the
    Sato-Tate CDF.
    """
    if table.precision < limit:
        raise ValueError(f"table precision {table.precision} below {limit}")
    primes, lam = table.prime_arrays()
    keep = primes <= limit
    primes, lam = primes[keep], lam[keep]
    mask = _apply_class_filter(primes, class_filter)
    lam_c = lam[mask]
    if len(lam_c) == 0:
        raise ValueError("empty census: no primes pass the class filter")
    theta = np.arccos(np.clip(lam_c / 2.0, -1.0, 1.0))
    theta.sort()
    n = len(theta)
    model = sato_tate_cdf(theta)
    i = np.arange(1, n + 1)
    ks = float(np.max(np.maximum(np.abs(model - i / n), np.abs(model - (i - 1) / n))))
    counts, edges = np.histogram(theta, bins=bins, range=(0.0, math.pi))
    return SatoTateCensus(
        limit, counts, edges, n, len(primes), ks, theta, class_filter
    )


def vanishing_census(table: EigenformTable, limit: int, zero_tol: float = ZERO_TOL):
    """(count of primes p <= limit with |lambda_f(p)| < zero_tol,
    the density bound limit / (log limit)^(5/4) it is compared against)."""
    if limit < 100:
        raise ValueError("limit must be >= 100")
    primes, lam = table.prime_arrays()
    keep = primes <= limit
    count = int(np.sum(np.abs(lam[keep]) < zero_tol))
    bound = limit / math.log(limit) ** 1.25
    return count, bound
