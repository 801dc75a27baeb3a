import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import slspec as sl


@pytest.fixture(scope="session")
def zero_sigma():
    return sl.PiecewiseSigma.constant(0.0)


@pytest.fixture(scope="session")
def step_sigma():
    """Antiderivative of a unit point mass at x = 1/2."""
    return sl.PiecewiseSigma((0.0, 0.5, 1.0), (0.0, 1.0))


@pytest.fixture(scope="session")
def step_spectra_200(step_sigma):
    """Spectra of the mass potential for h = 0, 2, inf (N = 200 each)."""
    lam = sl.compute_spectrum(step_sigma, sl.BoundaryData(sl.INF, 0.0), 200)
    mu = sl.compute_spectrum(step_sigma, sl.BoundaryData(sl.INF, 2.0), 200)
    mu_d = sl.compute_spectrum(step_sigma, sl.BoundaryData(sl.INF, sl.INF), 200)
    return lam, mu, mu_d


@pytest.fixture(scope="session")
def step_alphas_200(step_sigma, step_spectra_200):
    lam, _, _ = step_spectra_200
    return sl.norming_constants(step_sigma, sl.BoundaryData(sl.INF, 0.0), lam)
