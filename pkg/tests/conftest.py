"""Shared helpers: seeded smooth schedules and random matrices.

Everything here is deterministic in the seed so failures reproduce.
"""

import numpy as np
import pytest

from cosetflow.algebra import CoefficientVector, assemble_su3_hamiltonian


def smooth_coefficients(seed, terms=3):
    """Random few-term Fourier series for each of the eight coefficients.

    Smooth bounded drives, the kind of schedule the integrators are meant
    for.  Amplitudes in [0.2, 0.9], frequencies in [0.3, 2.0].
    """
    rng = np.random.default_rng(seed)
    amp = rng.uniform(0.2, 0.9, size=(8, terms))
    omega = rng.uniform(0.3, 2.0, size=(8, terms))
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(8, terms))

    def coeffs(t):
        return CoefficientVector((amp * np.cos(omega * t + phase)).sum(axis=1))

    return coeffs


def smooth_matrix(seed, terms=3):
    """Matrix-valued version of :func:`smooth_coefficients`."""
    cf = smooth_coefficients(seed, terms)
    return lambda t: assemble_su3_hamiltonian(cf(t))


def random_positive_definite(rng, n, floor=0.3):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a @ a.conj().T + floor * np.eye(n)


def random_coset_point(rng, shape=(2, 1), scale=0.6):
    re = rng.normal(size=shape)
    im = rng.normal(size=shape)
    return scale * (re + 1j * im)


@pytest.fixture
def coeff_schedule():
    return smooth_coefficients


@pytest.fixture
def matrix_schedule():
    return smooth_matrix
