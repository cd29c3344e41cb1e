"""Probe density matrices, phase-space pictures and reduced states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .joint import CoherentBranchState, JointState, TruncationError, WindowedFockState
from .numerics import clenshaw_curtis, hermitian_eig, hermiticity_defect, periodic_trapezoid
from .spin import SpinSpace, angular_momentum_operators, spin_coherent_state

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10
# tolerated norm loss when tracing out a Fock-windowed auxiliary mode
WINDOW_NORM_TOL = 1e-8


def validate_density(rho: np.ndarray) -> np.ndarray:
    """Return ``rho`` as a complex array, raising ``ValueError`` if it is not a state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL * max(1.0, np.max(np.abs(rho))):
        raise ValueError(f"density matrix is not Hermitian (defect {hermiticity_defect(rho):.2e})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    lowest = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lowest < PSD_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {lowest:.3e}")
    return rho


def density_from_pure(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state is not normalised (norm {norm!r})")
    state = state / norm
    return np.outer(state, state.conj())


def case_state(which, space: SpinSpace) -> np.ndarray:
    """The three benchmark probes built from equatorial spin coherent states.

    ``"I"``: the pure state ``|alpha(pi/2, 0)>``.
    ``"II"``: its uniform azimuthal average, a binomial mixture of Dicke states.
    ``"III"``: equal mixture of the extreme ``Jy`` eigenstates ``|alpha(pi/2, +-pi/2)>``.
    """
    key = str(which).upper()
    key = {"1": "I", "2": "II", "3": "III"}.get(key, key)
    if space.n_particles < 1:
        raise ValueError("benchmark states need at least one particle")
    if key == "I":
        return density_from_pure(spin_coherent_state(space, np.pi / 2, 0.0))
    if key == "II":
        n = space.n_particles
        k = np.arange(space.dim)
        weights = np.exp(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) - n * np.log(2.0))
        return np.diag(weights).astype(complex)
    if key == "III":
        plus = density_from_pure(spin_coherent_state(space, np.pi / 2, np.pi / 2))
        minus = density_from_pure(spin_coherent_state(space, np.pi / 2, -np.pi / 2))
        return 0.5 * (plus + minus)
    raise ValueError(f"unknown case {which!r}; expected I, II or III")


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho)
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho) ** 2))


@dataclass(frozen=True)
class HusimiField:
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    theta_weights: np.ndarray
    phi_weights: np.ndarray

    def integral(self) -> float:
        """Integral over the sphere, ``int Q sin(theta) dtheta dphi``."""
        return float(self.theta_weights @ self.values @ self.phi_weights)

    def argmax(self) -> tuple[float, float]:
        i, k = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.theta[i]), float(self.phi[k])


def husimi_q(rho: np.ndarray, theta_nodes: int, phi_nodes: int) -> HusimiField:
    """``Q(theta, phi) = (2j + 1)/(4 pi) <alpha(theta, phi)|rho|alpha(theta, phi)>``.

    ``theta`` runs over ``[0, pi]`` including both poles, ``phi`` over ``[0, 2 pi)``.
    The attached weights integrate any state exactly once ``theta_nodes > N``
    and ``phi_nodes > N``.
    """
    rho = np.asarray(rho, dtype=complex)
    space = SpinSpace.from_dim(rho.shape[0])
    theta, wt = clenshaw_curtis(theta_nodes)
    phi, wp = periodic_trapezoid(phi_nodes)
    # |alpha(theta, phi)> = e^{-i m phi} d_m(theta) with d real
    d = np.array([spin_coherent_state(space, t, 0.0).real for t in theta])
    phases = np.exp(-1j * np.outer(phi, space.m))
    # Q[t, p] = sum_{n,m} d_n d_m e^{i(n-m)phi} rho[n, m]
    amps = d[:, None, :] * phases[None, :, :]
    values = np.einsum("tpn,nm,tpm->tp", amps.conj(), rho, amps, optimize=True).real
    values *= space.dim / (4 * np.pi)
    return HusimiField(theta, phi, values, wt, wp)


@dataclass(frozen=True)
class JyDistribution:
    m: np.ndarray
    probabilities: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.m @ self.probabilities)

    @property
    def variance(self) -> float:
        return float((self.m**2) @ self.probabilities - self.mean**2)


def jy_distribution(rho: np.ndarray) -> JyDistribution:
    """Populations ``<J_y = m|rho|J_y = m>`` in the ``Jy`` eigenbasis."""
    rho = validate_density(rho)
    space = SpinSpace.from_dim(rho.shape[0])
    eig = hermitian_eig(angular_momentum_operators(space).jy)
    labels = np.round(2 * eig.values) / 2
    residual = np.max(np.abs(labels - eig.values))
    if residual > 1e-6:
        raise ArithmeticError(f"Jy spectrum is not half-integer (residual {residual:.2e})")
    probs = np.einsum("ik,ij,jk->k", eig.vectors.conj(), rho, eig.vectors).real
    order = np.argsort(labels)
    return JyDistribution(labels[order], probs[order])


def partial_trace_to_probe(joint: JointState) -> np.ndarray:
    """Reduced probe state ``Tr_B |Psi><Psi|``."""
    if isinstance(joint, CoherentBranchState):
        c = joint.coeffs
        rho = np.outer(c, c.conj()) * joint.overlaps()
        rho = 0.5 * (rho + rho.conj().T)
        return rho / np.trace(rho).real
    if isinstance(joint, WindowedFockState):
        psi = joint.amplitudes
        norm_sq = np.sum(np.abs(psi) ** 2)
        if abs(1.0 - norm_sq) > WINDOW_NORM_TOL:
            raise TruncationError(f"Fock window holds norm^2 {norm_sq:.12f}")
        rho = psi @ psi.conj().T
        rho = 0.5 * (rho + rho.conj().T)
        return rho / np.trace(rho).real
    raise TypeError(f"unsupported joint state {type(joint).__name__}")
