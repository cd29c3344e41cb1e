"""Pure states of the probe spin (system A) and a bosonic auxiliary mode (B).

Two representations are used:

``CoherentBranchState``
    ``|Psi> = sum_m c_m |j,m> (x) |beta exp(-i m gt)>``, exact and cheap for
    any ``|beta|^2``; produced by the dispersive ``Jz b^dag b`` coupling.
``WindowedFockState``
    amplitudes ``psi[m, n - offset]`` on a finite Fock window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .spin import SpinSpace


class TruncationError(ArithmeticError):
    """A Fock window dropped more norm than the caller allows."""


class ResourceBudgetError(MemoryError):
    """A requested representation would exceed the configured memory budget."""


def coherent_overlap(a: complex, b: complex) -> complex:
    """``<a|b>`` for Glauber coherent states, stable for ``|a|^2`` up to ~1e15.

    Uses ``-|a|^2/2 - |b|^2/2 + a* b = -|a - b|^2/2 + i Im(a* b)``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.exp(-0.5 * np.abs(a - b) ** 2 + 1j * np.imag(np.conj(a) * b))


def dephasing_coherence(order, beta_sq: float, gt: float):
    """``<B_m|B_{m+k}> = exp[-|beta|^2 (1 - exp(-i k gt))]`` evaluated in log space."""
    k = np.asarray(order, dtype=float)
    log_c = -2.0 * beta_sq * np.sin(0.5 * k * gt) ** 2 - 1j * beta_sq * np.sin(k * gt)
    return np.exp(log_c)


@dataclass(frozen=True)
class CoherentBranchState:
    space: SpinSpace
    coeffs: np.ndarray
    beta: complex
    gt: float

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.shape != (self.space.dim,):
            raise ValueError(f"expected {self.space.dim} amplitudes, got {coeffs.shape}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "gt", float(self.gt))

    @property
    def beta_sq(self) -> float:
        return abs(self.beta) ** 2

    @property
    def branches(self) -> np.ndarray:
        """Coherent amplitude ``beta exp(-i m gt)`` attached to each Dicke level."""
        return self.beta * np.exp(-1j * self.space.m * self.gt)

    def overlaps(self) -> np.ndarray:
        """Matrix ``O[n, m] = <B_m|B_n>``, which depends only on ``n - m``."""
        k = np.arange(self.space.dim)
        diff = k[:, None] - k[None, :]
        return dephasing_coherence(diff, self.beta_sq, self.gt)

    def norm(self) -> float:
        # branch states are normalised, so the norm is that of c_m
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class WindowedFockState:
    space: SpinSpace
    offset: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != self.space.dim:
            raise ValueError(f"amplitude matrix must have {self.space.dim} rows, got {amps.shape}")
        if self.offset < 0:
            raise ValueError("Fock offset must be non-negative")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "offset", int(self.offset))

    @property
    def fock_dim(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.fock_dim)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def boundary_mass(self) -> float:
        """Probability on the two outermost Fock shells of the window."""
        amps = self.amplitudes
        edge = np.sum(np.abs(amps[:, 0]) ** 2)
        if self.fock_dim > 1:
            edge += np.sum(np.abs(amps[:, -1]) ** 2)
        return float(edge)

    def apply_b(self, psi: np.ndarray | None = None) -> np.ndarray:
        """Annihilation operator on the window (levels beyond the window are dropped)."""
        psi = self.amplitudes if psi is None else psi
        out = np.zeros_like(psi)
        out[:, :-1] = psi[:, 1:] * np.sqrt(self.levels[1:])
        return out

    def apply_bdag(self, psi: np.ndarray | None = None) -> np.ndarray:
        psi = self.amplitudes if psi is None else psi
        out = np.zeros_like(psi)
        out[:, 1:] = psi[:, :-1] * np.sqrt(self.levels[1:])
        return out

    def apply_fock_parity(self, psi: np.ndarray | None = None) -> np.ndarray:
        psi = self.amplitudes if psi is None else psi
        return psi * np.where(self.levels % 2 == 0, 1.0, -1.0)

    def apply_probe(self, op: np.ndarray, psi: np.ndarray | None = None) -> np.ndarray:
        """Apply an operator acting on system A only."""
        psi = self.amplitudes if psi is None else psi
        return op @ psi


JointState = Union[CoherentBranchState, WindowedFockState]
