"""Quantum Fisher information for mixed probe states and their purifications.

For a probe ``rho`` sent through ``exp(-i phase G)``:

* ``qfi_mixed`` is the QFI when only the probe is measured;
* ``qfi_purification`` is the QFI of any purification, ``4 Var(G)``;
* ``qfi_breakdown`` splits ``4 Var(Jy)`` into the parts that depend on the
  diagonal, first and second off-diagonals of ``rho`` in the Dicke basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .joint import dephasing_coherence
from .numerics import hermitian_eig, is_hermitian
from .spin import SpinSpace, angular_momentum_operators
from .states import validate_density

# terms with lambda_i + lambda_j below this are dropped from the mixed-state sum
EIGEN_SUM_FLOOR = 1e-12


@dataclass(frozen=True)
class QfiBreakdown:
    f0: float
    f1: float
    f2: float

    @property
    def total(self) -> float:
        return self.f0 + self.f1 + self.f2


@dataclass(frozen=True)
class CoherenceSpectrum:
    orders: np.ndarray
    values: np.ndarray


def _check_generator(rho: np.ndarray, generator: np.ndarray) -> np.ndarray:
    generator = np.asarray(generator)
    if generator.shape != rho.shape:
        raise ValueError(f"generator shape {generator.shape} does not match state {rho.shape}")
    if not is_hermitian(generator):
        raise ValueError("generator must be Hermitian")
    return generator


def qfi_mixed(rho: np.ndarray, generator: np.ndarray) -> float:
    """``2 sum_ij (l_i - l_j)^2 / (l_i + l_j) |<e_i|G|e_j>|^2``."""
    rho = validate_density(rho)
    generator = _check_generator(rho, generator)
    eig = hermitian_eig(rho)
    lam = np.clip(eig.values, 0.0, None)
    g = eig.vectors.conj().T @ generator @ eig.vectors
    lsum = lam[:, None] + lam[None, :]
    ldiff = lam[:, None] - lam[None, :]
    keep = lsum > EIGEN_SUM_FLOOR
    terms = np.zeros_like(lsum)
    terms[keep] = ldiff[keep] ** 2 / lsum[keep] * np.abs(g[keep]) ** 2
    return float(2.0 * terms.sum())


def qfi_purification(rho: np.ndarray, generator: np.ndarray) -> float:
    """QFI of any purification of ``rho``: ``4 (Tr[G^2 rho] - Tr[G rho]^2)``."""
    rho = validate_density(rho)
    generator = _check_generator(rho, generator)
    g_rho = generator @ rho
    mean = np.trace(g_rho).real
    second = np.trace(generator @ g_rho).real
    return float(4.0 * (second - mean**2))


def qfi_breakdown(rho: np.ndarray) -> QfiBreakdown:
    rho = validate_density(rho)
    space = SpinSpace.from_dim(rho.shape[0])
    ops = angular_momentum_operators(space)
    n = space.n_particles

    def expect(op):
        return np.trace(op @ rho)

    f0 = n * (n + 2) / 2 - 2 * expect(ops.jz @ ops.jz).real
    f1 = -expect(1j * (ops.jplus - ops.jminus)).real ** 2
    f2 = -expect(ops.jplus @ ops.jplus + ops.jminus @ ops.jminus).real
    return QfiBreakdown(float(f0), float(f1), float(f2))


def coherence_dephasing(order: int, beta_sq: float, gt: float) -> complex:
    """Coherence ``C_k = exp[-|beta|^2 (1 - exp(-i k gt))]`` under ``Jz b^dag b``."""
    if beta_sq < 0:
        raise ValueError("beta_sq must be non-negative")
    return complex(dephasing_coherence(order, beta_sq, gt))


def coherence_spectrum(orders, beta_sq: float, gt: float) -> CoherenceSpectrum:
    orders = np.asarray(orders, dtype=int)
    if beta_sq < 0:
        raise ValueError("beta_sq must be non-negative")
    return CoherenceSpectrum(orders, dephasing_coherence(orders, beta_sq, gt))


def analytic_qfi_dephasing(
    space: SpinSpace, theta: float, azimuth: float, beta_sq: float, gt: float
) -> QfiBreakdown:
    """Closed-form breakdown for a spin coherent state dephased by ``Jz b^dag b``.

    The probe starts in ``|alpha(theta, azimuth)>`` and the mode in ``|beta>``.
    """
    if beta_sq < 0:
        raise ValueError("beta_sq must be non-negative")
    n = space.n_particles
    s2 = np.sin(theta) ** 2
    f0 = n * (1 + (n - 1) / 2 * s2)
    f1 = -(n**2) * s2 * np.sin(beta_sq * np.sin(gt) + azimuth) ** 2 * np.exp(
        -4 * beta_sq * np.sin(gt / 2) ** 2
    )
    f2 = n * (1 - n) / 2 * s2 * np.cos(beta_sq * np.sin(2 * gt) + 2 * azimuth) * np.exp(
        -2 * beta_sq * np.sin(gt) ** 2
    )
    return QfiBreakdown(float(f0), float(f1), float(f2))


def qfi_spin_coherent(space: SpinSpace, theta: float, azimuth: float) -> float:
    """QFI along ``Jy`` of ``|alpha(theta, azimuth)>``; never above ``N``."""
    return float(space.n_particles * (1 - np.sin(theta) ** 2 * np.sin(azimuth) ** 2))
