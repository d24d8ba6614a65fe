"""Marchenko-Pastur analytics and a deterministic dense eigensolver.

Quadrature note: the density has square-root singularities at both support
endpoints, and at aspect ratio 1 an extra integrable 1/x blowup at the
lower edge. The substitution x = a + (b - a) sin^2(theta) absorbs the
square roots exactly (the Jacobian supplies the matching factor), leaving a
smooth integrand on (0, pi/2) that Gauss-Legendre nodes handle at geometric
convergence. Node counts double until two successive estimates agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .combinat import narayana_count
from .errors import ConvergenceError, ResourceGuardError

_NODE_SCHEDULE = (16, 32, 64, 128, 256, 512, 1024, 2048)
_QUAD_TOL = 1e-9
_JACOBI_N_CAP = 512
_JACOBI_MAX_SWEEPS = 30
_JACOBI_REL_TOL = 1e-10


@dataclass(frozen=True)
class MPParams:
    """Aspect ratio gamma with the support endpoints it induces."""

    gamma: float

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def a(self) -> float:
        return (1.0 - math.sqrt(self.gamma)) ** 2

    @property
    def b(self) -> float:
        return (1.0 + math.sqrt(self.gamma)) ** 2


def mp_density(x: float, params: MPParams) -> float:
    """Density sqrt((b - x)(x - a)) / (2 pi gamma x) on [a, b], 0 outside.

    At gamma = 1 the support touches zero; x = 0 returns 0 by the outside
    convention (the singularity is integrable, the point itself carries no
    mass).
    """
    a, b = params.a, params.b
    if x <= a or x >= b or x <= 0.0:
        return 0.0
    return math.sqrt((b - x) * (x - a)) / (2.0 * math.pi * params.gamma * x)


def _quad_nodes(m: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(m)
    theta = (t + 1.0) * (math.pi / 4.0)
    return theta, w * (math.pi / 4.0)


def _substituted_integral(g, params: MPParams):
    """Integral of g(x) f_gamma(x) dx via the sin^2 substitution.

    g maps a vector of x nodes to (possibly complex) values. Doubles the
    node count until the estimate moves by at most the tolerance.
    """
    a, b = params.a, params.b
    span = b - a
    previous = None
    achieved = math.inf
    for m in _NODE_SCHEDULE:
        theta, w = _quad_nodes(m)
        sin_sq = np.sin(theta) ** 2
        x = a + span * sin_sq
        weight = span * span * sin_sq * np.cos(theta) ** 2 / (math.pi * params.gamma * x)
        estimate = np.sum(w * weight * g(x))
        if previous is not None:
            achieved = abs(estimate - previous)
            if achieved <= _QUAD_TOL:
                return estimate
        previous = estimate
    raise ConvergenceError(
        f"quadrature stalled at change {achieved:.3e} with {_NODE_SCHEDULE[-1]} nodes",
        achieved=achieved,
    )


def mp_moment_quadrature(k: int, params: MPParams) -> float:
    """k-th moment of the law by quadrature, absolute error near 1e-8.

    k = 0 is allowed and doubles as the normalization check: the density
    mass is 1 for gamma <= 1 and 1/gamma above (the remaining 1 - 1/gamma
    sits in a point mass at zero, which no moment k >= 1 sees).
    """
    if not 0 <= k <= 12:
        raise ValueError(f"k must be within 0..12, got {k}")
    return float(np.real(_substituted_integral(lambda x: x**k, params)))


def mp_moment_series(k: int, gamma: float) -> float:
    """k-th moment as the Narayana polynomial in gamma, in floats.

    The float companion of the exact rational evaluation, for callers whose
    gamma is already a float.
    """
    if k < 1:
        raise ValueError(f"moments start at k=1, got {k}")
    return float(sum(narayana_count(k, r) * gamma**r for r in range(k)))


def stieltjes_residual(z: complex, params: MPParams) -> float:
    """How far the quadrature Stieltjes transform is from its quadratic
    equation: |gamma z m^2 - (1 - gamma - z) m + 1| at m = m(z).

    m(z) is the transform of the whole law: the density integral by
    quadrature plus, for gamma > 1, the point mass (1 - 1/gamma) at zero
    contributing -(1 - 1/gamma)/z. Dropping the atom breaks the identity
    by O(1) for gamma > 1; with it the residual is pure quadrature error.

    Restricted to Im(z) >= 0.05; closer to the real axis the quadrature
    error bound no longer supports a meaningful residual.
    """
    z = complex(z)
    if z.imag < 0.05:
        raise ValueError(f"need Im(z) >= 0.05, got {z.imag}")
    m_z = _substituted_integral(lambda x: 1.0 / (x - z), params)
    gamma = params.gamma
    if gamma > 1.0:
        m_z = m_z + (1.0 - 1.0 / gamma) / (0.0 - z)
    return abs(gamma * z * m_z * m_z - (1.0 - gamma - z) * m_z + 1.0)


def generating_eq_residual(x: float, params: MPParams, truncation: int) -> float:
    """Residual of the moment generating series in its quadratic equation.

    S(x) = sum_{k=1}^{truncation} moment_k x^k must satisfy
    gamma x S^2 + ((gamma + 1) x - 1) S + x = 0 up to the series tail,
    which decays geometrically inside the disk |x| < 1/b.
    """
    if truncation < 30:
        raise ValueError(f"truncation must be at least 30, got {truncation}")
    if abs(x) > 0.8 / params.b:
        raise ValueError(f"|x| must be at most 0.8/b = {0.8 / params.b:.6f}, got {x}")
    gamma = params.gamma
    s = 0.0
    for k in range(truncation, 0, -1):
        s = s * x + mp_moment_series(k, gamma)
    s *= x
    return abs(gamma * x * s * s + ((gamma + 1.0) * x - 1.0) * s + x)


@dataclass
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int
    offdiag_norm: float


@njit(cache=True)
def _jacobi_kernel(a, v, tol, max_sweeps):  # pragma: no cover - compiled
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        off = math.sqrt(off)
        if off <= tol:
            return sweep, off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    if k != p and k != q:
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * akq
                        a[p, k] = a[k, p]
                        a[k, q] = s * akp + c * akq
                        a[q, k] = a[k, q]
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    off = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            off += 2.0 * a[i, j] * a[i, j]
    return max_sweeps, math.sqrt(off)


def jacobi_eigh(a: np.ndarray) -> EigenDecomposition:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Fixed row-by-row sweep order makes the result a pure function of the
    input bytes. Stops when the off-diagonal Frobenius norm drops below
    1e-10 times the input norm; eigenvalues come back descending with
    matching eigenvector columns.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > _JACOBI_N_CAP:
        raise ResourceGuardError(f"jacobi_eigh capped at n = {_JACOBI_N_CAP}, got {n}")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric")
    work = a.copy()
    vectors = np.eye(n)
    tol = _JACOBI_REL_TOL * math.sqrt(float(np.sum(a * a)))
    sweeps, off = _jacobi_kernel(work, vectors, tol, _JACOBI_MAX_SWEEPS)
    if off > tol:
        raise ConvergenceError(
            f"Jacobi sweeps exhausted at off-norm {off:.3e} (tol {tol:.3e})",
            achieved=off,
        )
    diag = np.diag(work).copy()
    order = np.argsort(-diag, kind="stable")
    return EigenDecomposition(
        eigenvalues=diag[order],
        eigenvectors=vectors[:, order],
        sweeps=sweeps,
        offdiag_norm=off,
    )


def max_entry_statistic(u: np.ndarray) -> float:
    """Largest absolute entry of an orthonormal matrix in delocalization
    units: max |u_ij| / sqrt(log(n) / n)."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"need a square matrix, got shape {u.shape}")
    n = u.shape[0]
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return float(np.max(np.abs(u)) / math.sqrt(math.log(n) / n))
