import math
from fractions import Fraction

import numpy as np
import pytest

from rmtlab.combinat import mp_moment_exact
from rmtlab.errors import ResourceGuardError
from rmtlab.matgen import EntryLaw, RandomSeed, sample_wigner
from rmtlab.spectral import (
    MPParams,
    generating_eq_residual,
    jacobi_eigh,
    max_entry_statistic,
    mp_density,
    mp_moment_quadrature,
    mp_moment_series,
    stieltjes_residual,
)

SEED = RandomSeed(master=7, stream=9)


def test_params_edges():
    params = MPParams(0.25)
    assert params.a == pytest.approx(0.25)
    assert params.b == pytest.approx(2.25)
    with pytest.raises(ValueError):
        MPParams(0.0)


def test_density_support():
    params = MPParams(0.5)
    assert mp_density(params.a - 0.01, params) == 0.0
    assert mp_density(params.b + 0.01, params) == 0.0
    assert mp_density((params.a + params.b) / 2, params) > 0.0


def test_total_mass_accounts_for_atom():
    # the continuous part carries full mass up to ratio 1; beyond that an
    # atom at zero holds the remainder, so the integral drops to 1/gamma
    assert mp_moment_quadrature(0, MPParams(0.5)) == pytest.approx(1.0, abs=1e-8)
    assert mp_moment_quadrature(0, MPParams(2.0)) == pytest.approx(0.5, abs=1e-8)


def test_quadrature_matches_exact_moments():
    for gamma in (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)):
        params = MPParams(float(gamma))
        for k in range(1, 9):
            exact = float(mp_moment_exact(k, gamma))
            assert mp_moment_quadrature(k, params) == pytest.approx(exact, abs=1e-6)


def test_series_route_matches_exact():
    for gamma in (0.25, 1.0, 3.0):
        for k in range(1, 7):
            exact = float(mp_moment_exact(k, Fraction(gamma).limit_denominator(4)))
            assert mp_moment_series(k, float(Fraction(gamma).limit_denominator(4))) == pytest.approx(exact, rel=1e-12)


def test_stieltjes_residual_tiny_on_grid():
    for gamma in (0.5, 1.0, 2.0):
        params = MPParams(gamma)
        for real in (1.0, 2.0, 3.0):
            for imag in (1.0, 2.0):
                assert stieltjes_residual(complex(real, imag), params) < 1e-8


def test_stieltjes_needs_offset_from_axis():
    with pytest.raises(ValueError):
        stieltjes_residual(complex(1.0, 0.001), MPParams(1.0))


def test_generating_residual_decays_with_truncation():
    params = MPParams(0.5)
    x = 0.1 / params.b
    coarse = generating_eq_residual(x, params, 30)
    fine = generating_eq_residual(x, params, 40)
    assert fine <= coarse + 1e-15
    assert fine < 1e-8


def test_generating_residual_rejects_large_argument():
    params = MPParams(1.0)
    with pytest.raises(ValueError):
        generating_eq_residual(1.0, params, 40)


def test_jacobi_on_known_matrix():
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    dec = jacobi_eigh(a)
    assert dec.eigenvalues == pytest.approx([3.0, 1.0])
    # eigenvector columns orthonormal
    assert np.allclose(dec.eigenvectors.T @ dec.eigenvectors, np.eye(2), atol=1e-12)


def test_jacobi_reconstructs_and_orders():
    a = sample_wigner(40, EntryLaw.gaussian(), SEED, 0)
    dec = jacobi_eigh(a)
    assert all(x >= y for x, y in zip(dec.eigenvalues, dec.eigenvalues[1:]))
    recon = dec.eigenvectors @ np.diag(dec.eigenvalues) @ dec.eigenvectors.T
    assert np.allclose(recon, a, atol=1e-9)
    assert np.trace(a) == pytest.approx(sum(dec.eigenvalues), abs=1e-10)


def test_jacobi_agrees_with_lapack():
    a = sample_wigner(60, EntryLaw.uniform_symmetric(), SEED, 1)
    dec = jacobi_eigh(a)
    reference = np.linalg.eigvalsh(a)[::-1]
    assert np.allclose(dec.eigenvalues, reference, atol=1e-9)


def test_jacobi_permutation_alignment():
    a = sample_wigner(12, EntryLaw.rademacher(), SEED, 2)
    perm = np.random.default_rng(5).permutation(12)
    b = a[np.ix_(perm, perm)]
    assert np.array_equal(b, b.T)
    da, db = jacobi_eigh(a), jacobi_eigh(b)
    assert np.allclose(da.eigenvalues, db.eigenvalues, atol=1e-10)


def test_jacobi_rejects_asymmetric_and_big():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[1.0, 2.0], [2.0000001, 1.0]]))
    with pytest.raises(ResourceGuardError):
        jacobi_eigh(np.eye(513))


def test_max_entry_statistic_identity():
    n = 16
    value = max_entry_statistic(np.eye(n))
    assert value == pytest.approx(1.0 / math.sqrt(math.log(n) / n))
    perm = np.eye(n)[:, ::-1]
    assert max_entry_statistic(perm) == pytest.approx(value)
