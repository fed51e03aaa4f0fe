"""Sign-change scans, interval surveys, shifted sums and the r(n) masses."""

import math

import numpy as np
import pytest

from signflow import normforms, sieves, signlab


def synthetic_signs(values):
    """SignSequence from a literal list of lambda values (1-indexed)."""
    lam = np.array([0.0] + list(values), dtype=np.float64)
    return sieves.sign_sieve(lam)


def everything(limit):
    bitmap = np.ones(limit + 1, dtype=bool)
    bitmap[0] = False
    return bitmap


def test_count_sign_changes_toy():
    s = synthetic_signs([1.0, -1.0, 1.0, 1.0, -1.0])
    rep = signlab.count_sign_changes(s, everything(5), 5, normalizer=1.0)
    assert rep.count == 3
    assert rep.ratio == 3.0


def test_zeros_are_skipped_not_counted():
    s = synthetic_signs([1.0, 0.0, 0.0, -1.0, 0.0, 1.0])
    rep = signlab.count_sign_changes(s, everything(6), 6, normalizer=1.0)
    assert rep.count == 2  # +..- and -..+ through the zeros


def test_low_confidence_excluded_and_counted():
    # 1e-10 is nonzero but below the confidence line: excluded from the scan
    s = synthetic_signs([1.0, -1e-10, 1.0])
    rep = signlab.count_sign_changes(s, everything(3), 3, normalizer=1.0)
    assert rep.count == 0
    assert rep.low_confidence_skipped == 1


def test_count_respects_set_membership():
    s = synthetic_signs([1.0, -1.0, 1.0, -1.0])
    bitmap = np.array([False, True, False, True, False])  # only {1, 3}
    rep = signlab.count_sign_changes(s, bitmap, 4, normalizer=1.0)
    assert rep.count == 0  # signs at 1 and 3 agree


def test_empty_set_rejected():
    s = synthetic_signs([1.0, 1.0])
    with pytest.raises(ValueError):
        signlab.count_sign_changes(s, np.zeros(3, dtype=bool), 2)


def naive_scan(signs, bitmap, limit):
    prev, count = 0, 0
    for n in range(1, limit + 1):
        if not bitmap[n] or signs.low_confidence[n]:
            continue
        s = int(signs.sign[n])
        if s == 0:
            continue
        if prev and s != prev:
            count += 1
        prev = s
    return count


def test_scan_matches_naive_oracle(signs_small, qi):
    limit = 10**4
    elem = normforms.element_norm_enumerate(qi, limit)
    rep = signlab.count_sign_changes(signs_small, elem, limit, normalizer=1.0)
    assert rep.count == naive_scan(signs_small, elem, limit)


def test_interval_survey_matches_naive(signs_small, fs_small, qi):
    limit, h = 4000, 100
    elem = normforms.element_norm_enumerate(qi, 2 * limit)
    stats = signlab.interval_sign_survey(signs_small, elem, limit, h)
    both = 0
    m = limit // h
    for i in range(m):
        lo = limit + 1 + i * h
        vals = [
            int(signs_small.sign[n])
            for n in range(lo, lo + h)
            if elem[n] and not signs_small.low_confidence[n]
        ]
        if any(v > 0 for v in vals) and any(v < 0 for v in vals):
            both += 1
    assert stats.fraction_both_signs == pytest.approx(both / m)
    assert stats.exceptional_count == m - both


def test_interval_survey_validation(signs_small, qi):
    elem = normforms.element_norm_enumerate(qi, 10**4)
    with pytest.raises(ValueError):
        signlab.interval_sign_survey(signs_small, elem, 5000, 5)
    with pytest.raises(ValueError):
        signlab.interval_sign_survey(signs_small, elem, 9000, 100)  # needs 2X data


def test_long_average_ratios(table_big, fs_big, signs_big, qi):
    out = signlab.long_average_ratios(table_big, qi, fs_big, 10**5, signs=signs_big)
    assert 0.2 <= out["R1"] <= 2.0
    assert out["R2"][0.0] < out["R1"] / 3  # sign cancellation beats the density
    assert out["R3"] == pytest.approx(out["H"] * out["delta_K"], rel=1e-12)
    assert 0.5 <= out["R3"] <= 2.0


def test_shifted_convolution_matches_prefix_sums(table_small, fs_small, lam_small):
    limit = 3000
    rs = sieves.r_sieve(limit + 1)
    trace = signlab.shifted_convolution(
        table_small, rs, 1, limit, checkpoints=[10, 100, 1000, 3000], sieve=fs_small
    )
    for y, s in trace.checkpoints:
        direct = math.fsum(
            float(lam_small[n]) * int(rs.r[n - 1]) for n in range(2, y + 1)
        )
        assert s == pytest.approx(direct, abs=1e-6)
    for (y, s), (y2, e) in zip(trace.checkpoints, trace.envelope):
        assert y == y2 and abs(s) <= e + 1e-9


def test_shifted_convolution_negative_shift(table_small, fs_small):
    rs = sieves.r_sieve(3000)
    trace = signlab.shifted_convolution(
        table_small, rs, -1, 2999, checkpoints=[2999], sieve=fs_small
    )
    assert len(trace.checkpoints) == 1
    with pytest.raises(ValueError):
        signlab.shifted_convolution(table_small, rs, 0, 1000, sieve=fs_small)


def test_exponent_fit_checkpoint_density(table_small, fs_small):
    rs = sieves.r_sieve(10**4 + 1)
    trace = signlab.shifted_convolution(table_small, rs, 1, 10**4, sieve=fs_small)
    fitted = [y for y, s in trace.checkpoints if y >= 10**3 and abs(s) > 0]
    assert len(fitted) >= 500  # dense geometric grid, not just dyadic points
    assert math.isfinite(trace.exponent_fit)


def test_sign_changes_shifted_matches_naive(signs_small, qi):
    limit, a = 10**4, 1
    norm = normforms.element_norm_enumerate(qi, limit + 1)
    rep = signlab.sign_changes_shifted(signs_small, limit, a, norm_bitmap=norm)
    bitmap = np.zeros(limit + 1, dtype=bool)
    for n in range(a + 2, limit + 1):
        bitmap[n] = norm[n - a]
    assert rep.count == naive_scan(signs_small, bitmap, limit)
    assert rep.normalizer == pytest.approx(math.sqrt(limit))


def test_lambda_prime_power_values(table_small):
    vals = signlab.lambda_prime_power_values(table_small, 100)
    lookup = {pk: lam for _, _, pk, lam in vals}
    assert set(lookup) == {
        int(p**k)
        for p in sieves.primes_up_to(100)
        for k in range(1, 8)
        if p**k <= 100
    }
    assert lookup[4] == pytest.approx(table_small.lambda_prime[2] ** 2 - 1, rel=1e-12)


def test_small_lambda_mass_validation(table_small):
    with pytest.raises(ValueError):
        signlab.small_lambda_prime_power_sum(table_small, 0.3, 2, 10**4)
    with pytest.raises(ValueError):
        signlab.small_lambda_prime_power_sum(table_small, 0.2, 1, 10**4)
    mass = signlab.small_lambda_prime_power_sum(table_small, 0.2, 2, 10**4)
    window = math.log(10**4) ** -0.2
    assert mass.value == pytest.approx(
        math.fsum(1.0 / pk for _, _, pk, lam in mass.contributors)
    )
    assert all(abs(lam) <= window for _, _, _, lam in mass.contributors)


def test_r_in_progression_oracle():
    rs = sieves.r_sieve(10**4)
    actual, main, rel = signlab.r_in_progression(rs, 10**4, 5, 1)
    brute = sum(int(rs.r[n]) for n in range(1, 10**4 + 1) if n % 5 == 1)
    assert actual == brute
    assert main == pytest.approx(math.pi * 10**4 / 5 * (1 - sieves.chi4(5) / 5))
    assert rel == pytest.approx(abs(actual - main) / main)


def test_r_in_progression_hypotheses():
    rs = sieves.r_sieve(10**4)
    with pytest.raises(ValueError):
        signlab.r_in_progression(rs, 10**4, 12, 1)  # 12 not squarefree
    with pytest.raises(ValueError):
        signlab.r_in_progression(rs, 10**4, 15, 6)  # gcd(6, 15) > 1
    with pytest.raises(ValueError):
        signlab.r_in_progression(rs, 10**4, 10**4, 1)  # q above y^(2/3)


def test_interval_mass_windows(table_small, fs_small, lam_small):
    rs = sieves.r_sieve(2 * 4000 + 2)
    lam = sieves.lambda_sieve(table_small, fs_small, 8000)
    rep = signlab.small_coefficient_interval_mass(
        table_small, rs, 4000, 100, 0.05, a=1, lam=lam
    )
    assert rep.interval_sums.shape == (40,)
    assert 0.0 <= rep.exceeding_fraction <= 1.0
    assert rep.total_mass == pytest.approx(float(rep.interval_sums.sum()))
    with pytest.raises(ValueError):
        signlab.small_coefficient_interval_mass(
            table_small, rs, 4000, 2, 0.05, a=1, lam=lam
        )


def test_nonvanishing_mass(table_small, fs_small, signs_small):
    rs = sieves.r_sieve(2 * 4000 + 2)
    signs = sieves.sign_sieve(sieves.lambda_sieve(table_small, fs_small, 8000))
    rep = signlab.nonvanishing_interval_mass(table_small, rs, 4000, 200, 1, signs=signs)
    # nearly every n has a sign, so interval masses track pi * h
    assert rep.median == pytest.approx(math.pi * 200, rel=0.25)
    assert rep.minimum > 0
    with pytest.raises(ValueError):
        signlab.nonvanishing_interval_mass(table_small, rs, 4000, 10, 1, signs=signs)
