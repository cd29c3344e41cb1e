"""Collective spin operators for N bosons in the symmetric (Dicke) sector.

Basis vectors are ordered by ascending ``m = -j, ..., +j`` with ``j = N/2``,
so index ``k`` corresponds to ``m = k - j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, xlogy

from .numerics import hermitian_eig


@dataclass(frozen=True)
class SpinSpace:
    """Total spin ``j = N/2`` of ``N`` two-mode bosons; ``dim = N + 1``.

    ``n_particles`` doubles as ``2j`` so half-integer spins stay exact.
    """

    n_particles: int

    def __post_init__(self):
        if int(self.n_particles) != self.n_particles or self.n_particles < 0:
            raise ValueError(f"particle number must be a non-negative integer, got {self.n_particles}")
        object.__setattr__(self, "n_particles", int(self.n_particles))

    @classmethod
    def from_dim(cls, dim: int) -> "SpinSpace":
        return cls(dim - 1)

    @property
    def two_j(self) -> int:
        return self.n_particles

    @property
    def j(self) -> float:
        return self.n_particles / 2

    @property
    def dim(self) -> int:
        return self.n_particles + 1

    @property
    def m(self) -> np.ndarray:
        """Dicke labels ``m``, ascending."""
        return np.arange(self.dim) - self.j


class SpinOperators(NamedTuple):
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray


def angular_momentum_operators(space: SpinSpace) -> SpinOperators:
    j, m = space.j, space.m
    # <m+1|J+|m> sits on the first subdiagonal in ascending-m order
    ladder = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jplus = np.diag(ladder, -1).astype(complex)
    jminus = jplus.T.copy()
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    jz = np.diag(m).astype(complex)
    return SpinOperators(jx, jy, jz, jplus, jminus)


def spin_coherent_state(space: SpinSpace, theta: float, azimuth: float) -> np.ndarray:
    """Amplitudes of ``exp(-i azimuth Jz) exp(-i theta Jy) |j, j>``.

    ``c_m = sqrt(C(N, j+m)) cos(theta/2)^(j+m) sin(theta/2)^(j-m) exp(-i m azimuth)``,
    evaluated in log space so large ``N`` neither overflows nor loses digits.
    """
    n = space.n_particles
    up = np.arange(n + 1)  # j + m
    down = n - up  # j - m
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    log_binom = 0.5 * (gammaln(n + 1) - gammaln(up + 1) - gammaln(down + 1))
    # xlogy gives 0 * log(0) = 0 at the poles
    log_mag = log_binom + xlogy(up, abs(c)) + xlogy(down, abs(s))
    # numpy's 0.0 ** 0 == 1 keeps the pole states exact
    sign = np.sign(c) ** up * np.sign(s) ** down
    return sign * np.exp(log_mag) * np.exp(-1j * space.m * azimuth)


def rotation_operator(space: SpinSpace, theta: float, azimuth: float) -> np.ndarray:
    """``R(theta, azimuth) = exp(-i azimuth Jz) exp(-i theta Jy)``."""
    ops = angular_momentum_operators(space)
    eig = hermitian_eig(ops.jy)
    about_y = (eig.vectors * np.exp(-1j * theta * eig.values)) @ eig.vectors.conj().T
    return np.exp(-1j * azimuth * space.m)[:, None] * about_y


def parity_operator(space: SpinSpace) -> np.ndarray:
    """Diagonal ``(-1)^m``; for odd N, where m is half-integer, ``(-1)^(m+j)``."""
    k = np.arange(space.dim)  # m + j
    if space.n_particles % 2 == 0:
        exponent = k - space.n_particles // 2
    else:
        exponent = k
    return np.diag(np.where(exponent % 2 == 0, 1.0, -1.0)).astype(complex)


def mz_unitary(space: SpinSpace, phase: float) -> np.ndarray:
    """Mach-Zehnder phase shift ``exp(-i phase Jy)``."""
    return rotation_operator(space, phase, 0.0)
