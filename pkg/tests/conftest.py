"""Shared fixtures: the brute-force reference trajectory used in several files."""

import pytest

from ddesplit.oracle import poly_history

from reference import rk4_dde_subsampled

# Coefficients of the short-delay scalar benchmark run.
SCALAR_A = -0.15
SCALAR_B = -6.0
SCALAR_TAU = -0.257


@pytest.fixture(scope="session")
def reference_run():
    """Method-of-steps RK4 trajectory on [0, 40], subsampled to h = 0.001.

    The fine step is h/100 = 1e-5, small enough that the remaining reference
    error (~3e-13 by self-convergence) is negligible against every tolerance
    asserted downstream.
    """
    times, values = rk4_dde_subsampled(SCALAR_A, SCALAR_B, SCALAR_TAU,
                                       poly_history, T=40.0, h=0.001,
                                       refine=100)
    return times, values
