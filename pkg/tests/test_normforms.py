"""Quadratic field splitting, norm sets and density products."""

import math

import numpy as np
import pytest

from signflow import normforms, sieves

# h(disc) for fundamental discriminants, cross-checked against standard tables
KNOWN_CLASS_NUMBERS = {
    -1: 1, -2: 1, -3: 1, -5: 2, -6: 2, -7: 1, -10: 2, -11: 1,
    -13: 2, -14: 4, -15: 2, -163: 1, -199: 9,
}


@pytest.mark.parametrize("d,h", sorted(KNOWN_CLASS_NUMBERS.items()))
def test_class_numbers(d, h):
    assert normforms.quadratic_field(d).class_number == h


def test_quadratic_field_validation():
    for bad in (0, 1, -4, -8, 12):
        with pytest.raises(ValueError):
            normforms.quadratic_field(bad)


def test_discriminant_convention(qi, q3, q5):
    assert qi.disc == -4
    assert q3.disc == -3  # d = 1 (mod 4)
    assert q5.disc == -20


def test_splitting_type_gaussian(qi):
    assert normforms.splitting_type(qi, 2) == "ramified"
    for p in (5, 13, 17, 29):
        assert normforms.splitting_type(qi, p) == "split"
    for p in (3, 7, 11, 19):
        assert normforms.splitting_type(qi, p) == "inert"
    with pytest.raises(ValueError):
        normforms.splitting_type(qi, 1)


def test_inert_primes(qi, q3):
    assert list(normforms.inert_primes(qi, 30)) == [3, 7, 11, 19, 23]
    # inert in Q(sqrt(-3)): p = 2 (mod 3)
    assert list(normforms.inert_primes(q3, 30)) == [2, 5, 11, 17, 23, 29]


def element_oracle(field, limit):
    """Brute enumeration straight from the norm-form definition."""
    out = np.zeros(limit + 1, dtype=bool)
    m = -field.d
    if field.d % 4 != 1:
        for a in range(math.isqrt(limit) + 1):
            for b in range(math.isqrt(limit // m) + 1):
                v = a * a + m * b * b
                if 1 <= v <= limit:
                    out[v] = True
    else:
        c = (1 + m) // 4
        bound = int(2 * math.sqrt(limit)) + 2
        for a in range(-bound, bound + 1):
            for b in range(-bound, bound + 1):
                v = a * a + a * b + c * b * b
                if 1 <= v <= limit:
                    out[v] = True
    return out


@pytest.mark.parametrize("d", [-1, -2, -5, -3, -7, -11])
def test_element_enumeration_matches_oracle(d):
    field = normforms.quadratic_field(d)
    got = normforms.element_norm_enumerate(field, 2000)
    assert np.array_equal(got, element_oracle(field, 2000))


def test_three_way_agreement_gaussian(qi, fs_small):
    """Element norms = ideal norms = mod-4 exponent rule for class number 1."""
    limit = 10**4
    elem = normforms.element_norm_enumerate(qi, limit)
    ideal = normforms.ideal_norm_sieve(qi, fs_small, limit)
    rule = np.zeros(limit + 1, dtype=bool)
    for n in range(1, limit + 1):
        ok = True
        for p, nu in sieves.factorize(fs_small, n):
            if p % 4 == 3 and nu % 2 == 1:
                ok = False
        rule[n] = ok
    assert np.array_equal(elem, ideal)
    assert np.array_equal(ideal, rule)


def test_class_number_two_witness(q5, fs_small):
    """2 = N((2, 1 + sqrt(-5))) is an ideal norm but not an element norm."""
    ideal = normforms.ideal_norm_sieve(q5, fs_small, 100)
    elem = normforms.element_norm_enumerate(q5, 100)
    assert ideal[2] and not elem[2]
    assert np.all(~elem[1:] | ideal[1:])  # element norms are ideal norms


def test_ideal_norm_even_inert_exponents(q3, fs_small):
    ideal = normforms.ideal_norm_sieve(q3, fs_small, 1000)
    assert not ideal[2] and ideal[4] and not ideal[8] and ideal[16]
    assert not ideal[2 * 7] and ideal[4 * 7] and not ideal[5 * 7]


def test_delta_k_against_direct_product(qi):
    limit = 10**4
    inert = [int(p) for p in sieves.primes_up_to(limit) if p % 4 == 3]
    direct = math.prod(1.0 - 1.0 / p for p in inert)
    assert normforms.delta_K_at(qi, limit) == pytest.approx(direct, rel=1e-12)
    traj = normforms.delta_K(qi, limit)
    assert traj[-1][0] == limit
    vals = [v for _, v in traj]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))  # decreasing


def test_prime_norm_census(qi):
    elem_count, ideal_count, li = normforms.prime_norm_census(qi, 10**4)
    # split primes have density 1/2; ramified 2 joins the ideal count
    assert ideal_count == 1 + sum(1 for p in sieves.primes_up_to(10**4) if p % 4 == 1)
    assert elem_count == ideal_count  # class number 1: same prime norms
    assert abs(ideal_count - li / 2) < 0.05 * li
