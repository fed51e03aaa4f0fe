"""Shared fixtures.

The million-scale objects (eigenform table, factor sieve, lambda array) are
expensive to build, so they are session-scoped and shared between the unit
tests that need scale and the acceptance suite.
"""

import numpy as np
import pytest

from signflow import hecke, normforms, sieves

SCALE = 10**6


@pytest.fixture(scope="session")
def table_big():
    """Weight-12 eigenform table to 2 * 10^6 (exact integer coefficients)."""
    return hecke.eigenform(12, 2 * SCALE + 10)


@pytest.fixture(scope="session")
def fs_big():
    return sieves.build_factor_sieve(2 * SCALE + 10)


@pytest.fixture(scope="session")
def lam_big(table_big, fs_big):
    return sieves.lambda_sieve(table_big, fs_big, 2 * SCALE)


@pytest.fixture(scope="session")
def signs_big(lam_big):
    return sieves.sign_sieve(lam_big)


@pytest.fixture(scope="session")
def rs_big():
    return sieves.r_sieve(2 * SCALE + 10)


@pytest.fixture(scope="session")
def qi():
    return normforms.quadratic_field(-1)


@pytest.fixture(scope="session")
def q3():
    return normforms.quadratic_field(-3)


@pytest.fixture(scope="session")
def q5():
    return normforms.quadratic_field(-5)


@pytest.fixture(scope="session")
def elem_qi_big(qi):
    return normforms.element_norm_enumerate(qi, 2 * SCALE)


@pytest.fixture(scope="session")
def table_small():
    """Weight-12 table to 10^4 for the cheap unit tests."""
    return hecke.eigenform(12, 10**4)


@pytest.fixture(scope="session")
def fs_small():
    return sieves.build_factor_sieve(10**4)


@pytest.fixture(scope="session")
def lam_small(table_small, fs_small):
    return sieves.lambda_sieve(table_small, fs_small, 10**4)


@pytest.fixture(scope="session")
def signs_small(lam_small):
    return sieves.sign_sieve(lam_small)
