"""Numeric primitives shared by the rest of the package.

Hermitian eigendecomposition with residual guarantees, Fock-window selection
for coherent states, Richardson-extrapolated central differences, and
quadrature weights for integrals over the Bloch sphere.
"""

from __future__ import annotations

from typing import Callable, Iterable, NamedTuple

import numpy as np
from scipy import stats
from scipy.special import gammaln


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


class FockWindow(NamedTuple):
    offset: int
    dim: int

    @property
    def stop(self) -> int:
        return self.offset + self.dim

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.offset, self.stop)


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest entry of ``|A - A^H|`` relative to the largest entry of ``|A|``."""
    a = np.asarray(a)
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)) / scale)


def is_hermitian(a: np.ndarray, rtol: float = 1e-12) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and hermiticity_defect(a) <= rtol


def hermitian_eig(a: np.ndarray, rtol: float = 1e-12) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises ``ValueError`` if ``a`` is not square or not Hermitian to ``rtol``
    (relative to its largest entry).
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not is_hermitian(a, rtol):
        raise ValueError(
            f"matrix is not Hermitian (relative defect {hermiticity_defect(a):.3e})"
        )
    # symmetrise so roundoff in the lower triangle cannot leak into the result
    values, vectors = np.linalg.eigh(0.5 * (a + a.conj().T))
    return EigenDecomposition(values, vectors)


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t H)`` for Hermitian ``H`` via its eigendecomposition."""
    eig = hermitian_eig(h)
    return (eig.vectors * np.exp(-1j * t * eig.values)) @ eig.vectors.conj().T


def _poisson_window(mean: float, tolerance: float) -> tuple[int, int]:
    if mean == 0.0:
        return 0, 1
    half = 0.5 * tolerance
    lo = int(stats.poisson.ppf(half, mean))
    hi = int(stats.poisson.isf(half, mean)) + 1
    # ppf/isf are computed on the CDF; tighten or relax by direct log-space checks
    while lo > 0 and stats.poisson.logcdf(lo - 1, mean) > np.log(half):
        lo -= 1
    while stats.poisson.logsf(hi - 1, mean) > np.log(half):
        hi += 1
    return lo, hi


def _stirling_error(n: np.ndarray) -> np.ndarray:
    # log(n!) - [(n + 1/2) log n - n + log(2 pi)/2]
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    small = n <= 15
    ns = n[small]
    out[small] = gammaln(ns + 1) - (ns + 0.5) * np.log(ns) + ns - 0.5 * np.log(2 * np.pi)
    nl = n[~small]
    inv, inv2 = 1.0 / nl, 1.0 / nl**2
    out[~small] = inv * (1 / 12 - inv2 * (1 / 360 - inv2 * (1 / 1260 - inv2 * (1 / 1680 - inv2 / 1188))))
    return out


def _deviance(x: np.ndarray, mean: float) -> np.ndarray:
    # x log(x / mean) + mean - x, without cancellation near x == mean
    v = (x - mean) / mean
    out = np.empty_like(v)
    near = np.abs(v) < 0.1
    vn = v[near]
    series = np.zeros_like(vn)
    term = vn * vn
    for k in range(2, 40):
        series += term / (k * (k - 1))
        term = -term * vn
    out[near] = mean * series
    vf = v[~near]
    out[~near] = mean * ((1 + vf) * np.log1p(vf) - vf)
    return out


def poisson_log_pmf(n, mean: float) -> np.ndarray:
    """``log(e^-mean mean^n / n!)`` accurate to roundoff even for ``mean ~ 1e6``.

    The naive form subtracts numbers of size ``n log n``; the saddle-point
    form used here keeps every term O(1) near the peak.
    """
    n = np.asarray(n, dtype=float)
    if mean == 0.0:
        return np.where(n == 0, 0.0, -np.inf)
    out = np.empty_like(n)
    zero = n == 0
    out[zero] = -mean
    pos = ~zero
    npos = n[pos]
    out[pos] = -0.5 * np.log(2 * np.pi * npos) - _stirling_error(npos) - _deviance(npos, mean)
    return out


def fock_window(amplitudes: Iterable[complex], tolerance: float = 1e-12) -> FockWindow:
    """Smallest contiguous Fock range holding every coherent state to ``tolerance``.

    Each ``|beta>`` has a Poisson(|beta|^2) number distribution; the window
    leaves at most ``tolerance`` of that mass outside (half on each side).
    For the default tolerance this is roughly ``|beta|^2 +- 7 sqrt(|beta|^2)``.
    """
    if not 0.0 < tolerance < 1.0:
        raise ValueError("tolerance must lie in (0, 1)")
    means = np.abs(np.atleast_1d(np.asarray(list(amplitudes), dtype=complex))) ** 2
    if means.size == 0:
        raise ValueError("no amplitudes given")
    bounds = [_poisson_window(float(mu), tolerance) for mu in np.unique(means)]
    lo = min(b[0] for b in bounds)
    hi = max(b[1] for b in bounds)
    return FockWindow(lo, hi - lo)


def central_derivative(f: Callable[[float], float], x: float, h: float = 1e-5) -> float:
    """Central difference at steps ``h`` and ``h/2``, Richardson-extrapolated once.

    Truncation error is O(h^4) for smooth ``f``.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    h2 = 0.5 * h
    d2 = (f(x + h2) - f(x - h2)) / (2 * h2)
    return (4.0 * d2 - d1) / 3.0


def clenshaw_curtis(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Polar nodes ``theta_k = k pi / (n-1)`` and weights for ``int_0^pi g sin(theta) dtheta``.

    These are Clenshaw-Curtis weights in ``x = cos(theta)``; the rule is exact
    whenever ``g`` is a polynomial in ``cos(theta)`` of degree below ``n_nodes``.
    """
    if n_nodes < 2:
        raise ValueError("need at least two polar nodes")
    n = n_nodes - 1
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    inner = theta[1:-1]
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n**2 - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k**2 - 1)
        v -= np.cos(n * inner) / (n**2 - 1)
    else:
        w[0] = w[n] = 1.0 / n**2
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k**2 - 1)
    w[1:-1] = 2.0 * v / n
    return theta, w


def periodic_trapezoid(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Azimuthal nodes on ``[0, 2 pi)`` with equal weights summing to ``2 pi``."""
    if n_nodes < 2:
        raise ValueError("need at least two azimuthal nodes")
    phi = 2 * np.pi * np.arange(n_nodes) / n_nodes
    return phi, np.full(n_nodes, 2 * np.pi / n_nodes)
