"""Entangling the probe with a bosonic auxiliary mode.

Two couplings are provided:

* dispersive ``H = g Jz b^dag b`` acting on ``|alpha> (x) |beta>``, solved in
  closed form (each Dicke level rotates the coherent amplitude);
* particle exchange ``H_-+ = g (J_-+ b^dag + J_+- b)``, block-diagonalised into
  sectors of conserved ``m + n`` (minus) or ``m - n`` (plus).

Time enters only through the dimensionless product ``gt``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .joint import CoherentBranchState, ResourceBudgetError, TruncationError, WindowedFockState
from .numerics import expm_hermitian, fock_window, hermitian_eig, poisson_log_pmf
from .spin import SpinSpace, angular_momentum_operators
from .states import partial_trace_to_probe

DEFAULT_MEMORY_BUDGET = 512 * 2**20  # bytes


def _space_of(amplitudes: np.ndarray) -> SpinSpace:
    return SpinSpace.from_dim(len(amplitudes))


def dephasing_purification(initial: np.ndarray, beta: complex, gt: float) -> CoherentBranchState:
    """Evolve ``|initial> (x) |beta>`` under ``g Jz b^dag b`` for time ``gt / g``."""
    initial = np.asarray(initial, dtype=complex)
    norm = np.linalg.norm(initial)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"initial probe state is not normalised (norm {norm!r})")
    return CoherentBranchState(_space_of(initial), initial / norm, beta, gt)


def coherent_fock_amplitudes(alpha: complex, levels: np.ndarray) -> np.ndarray:
    """``<n|alpha>`` for the given Fock levels, computed in log space."""
    levels = np.asarray(levels)
    r = abs(alpha)
    if r == 0.0:
        return (levels == 0).astype(complex)
    return np.exp(0.5 * poisson_log_pmf(levels, r**2) + 1j * levels * np.angle(alpha))


def to_windowed_fock(
    joint: CoherentBranchState,
    norm_tolerance: float = 1e-12,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> WindowedFockState:
    """Expand the coherent branches on a Fock window holding all but ``norm_tolerance``."""
    if not isinstance(joint, CoherentBranchState):
        raise TypeError("expected a CoherentBranchState")
    space = joint.space
    window = fock_window([joint.beta], norm_tolerance)
    needed = space.dim * window.dim * np.dtype(complex).itemsize
    if needed > memory_budget:
        raise ResourceBudgetError(
            f"Fock window of {window.dim} levels x {space.dim} spin levels needs "
            f"{needed / 2**20:.1f} MiB, budget is {memory_budget / 2**20:.1f} MiB"
        )
    levels = window.levels
    radial = np.exp(0.5 * poisson_log_pmf(levels, joint.beta_sq))
    # branch m carries phase arg(beta) - m gt on every quantum
    angles = np.angle(joint.beta) - space.m * joint.gt
    amps = joint.coeffs[:, None] * radial[None, :] * np.exp(1j * np.outer(angles, levels))
    state = WindowedFockState(space, window.offset, amps)
    captured = state.norm() ** 2
    # slack covers summation roundoff over ~1e6 terms
    if captured < 1.0 - norm_tolerance - 1e-12:
        raise TruncationError(f"window captured only {captured!r} of the norm")
    return state


class ExchangeSpec(NamedTuple):
    sign: str
    n_b_initial: int
    gt_grid: np.ndarray

    @classmethod
    def make(cls, sign: str, n_b_initial: int, gt_grid) -> "ExchangeSpec":
        if sign not in ("plus", "minus"):
            raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
        if n_b_initial < 0:
            raise ValueError("initial Fock number must be non-negative")
        grid = np.asarray(gt_grid, dtype=float)
        if grid.size > 1 and np.any(np.diff(grid) <= 0):
            raise ValueError("time grid must be strictly increasing")
        return cls(sign, int(n_b_initial), grid)


@dataclass(frozen=True)
class ExchangeSector:
    """Invariant block of ``H_-+ / g``.

    ``k`` is the Dicke index ``m + j`` and ``n`` the Fock number of each basis
    state; ``key`` is the conserved ``k + n`` (minus) or ``k - n`` (plus).
    """

    sign: str
    key: int
    k: np.ndarray
    n: np.ndarray
    hamiltonian: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.k)

    def index_of(self, k: int, n: int) -> int:
        hits = np.flatnonzero((self.k == k) & (self.n == n))
        if hits.size == 0:
            raise KeyError((k, n))
        return int(hits[0])


def exchange_sector(space: SpinSpace, sign: str, k0: int, n0: int) -> ExchangeSector:
    """The sector containing ``|m = k0 - j> (x) |n0>``."""
    if sign not in ("plus", "minus"):
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    ks = np.arange(space.dim)
    if sign == "minus":
        key = k0 + n0
        ns = key - ks
    else:
        key = k0 - n0
        ns = ks - key
    ok = ns >= 0
    ks, ns = ks[ok], ns[ok]
    j, m = space.j, ks - space.j
    dim = len(ks)
    h = np.zeros((dim, dim))
    # ascending k: neighbour i+1 has k+1, so the J+ branch couples i -> i+1
    for i in range(dim - 1):
        mm, nn = m[i], ns[i]
        if sign == "minus":
            # J+ b : (k, n) -> (k+1, n-1)
            amp = np.sqrt(j * (j + 1) - mm * (mm + 1)) * np.sqrt(nn)
        else:
            # J+ b^dag : (k, n) -> (k+1, n+1)
            amp = np.sqrt(j * (j + 1) - mm * (mm + 1)) * np.sqrt(nn + 1)
        h[i + 1, i] = h[i, i + 1] = amp
    return ExchangeSector(sign, int(key), ks, ns, h)


def exchange_sectors(space: SpinSpace, spec: ExchangeSpec, n_max: int | None = None) -> list[ExchangeSector]:
    """All sectors whose states fit inside Fock levels ``0..n_max``.

    ``n_max`` defaults to ``N_B + N``, enough to hold the sector reached from
    ``|j, j> (x) |N_B>`` for either sign.
    """
    if n_max is None:
        n_max = spec.n_b_initial + space.n_particles
    sectors = []
    if spec.sign == "minus":
        # key = k + n ranges from 0 (k = n = 0) upward; the largest n in a sector is key
        for key in range(0, n_max + 1):
            sectors.append(exchange_sector(space, "minus", min(key, space.dim - 1), key - min(key, space.dim - 1)))
    else:
        # key = k - n; the largest n in a sector is N - key, smallest key is N - n_max
        for key in range(space.n_particles - n_max, space.dim):
            k0 = max(key, 0)
            sectors.append(exchange_sector(space, "plus", k0, k0 - key))
    return sectors


class ExchangeSnapshot(NamedTuple):
    gt: float
    joint: WindowedFockState
    rho: np.ndarray


def evolve_exchange(space: SpinSpace, spec: ExchangeSpec, initial: np.ndarray | None = None) -> list[ExchangeSnapshot]:
    """Evolve ``|initial> (x) |N_B>`` under ``H_-+`` over ``spec.gt_grid``.

    ``initial`` must be a ``Jz`` eigenstate (default ``|j, j>``), which puts the
    joint state in a single sector so the exact evolution is
    ``V exp(-i Lambda gt) V^dag`` on that block.
    """
    if initial is None:
        initial = np.zeros(space.dim, dtype=complex)
        initial[-1] = 1.0
    initial = np.asarray(initial, dtype=complex)
    support = np.flatnonzero(np.abs(initial) > 1e-12)
    if support.size != 1 or abs(abs(initial[support[0]]) - 1.0) > 1e-10:
        raise ValueError("exchange evolution is modelled only for Jz eigenstates")
    k0 = int(support[0])
    sector = exchange_sector(space, spec.sign, k0, spec.n_b_initial)
    eig = hermitian_eig(sector.hamiltonian)
    start = np.zeros(sector.dim, dtype=complex)
    start[sector.index_of(k0, spec.n_b_initial)] = initial[k0]
    projected = eig.vectors.conj().T @ start

    offset = int(sector.n.min())
    fock_dim = int(sector.n.max()) - offset + 1
    snapshots = []
    for gt in spec.gt_grid:
        amps_sector = eig.vectors @ (np.exp(-1j * eig.values * gt) * projected)
        amps = np.zeros((space.dim, fock_dim), dtype=complex)
        amps[sector.k, sector.n - offset] = amps_sector
        joint = WindowedFockState(space, offset, amps)
        snapshots.append(ExchangeSnapshot(float(gt), joint, partial_trace_to_probe(joint)))
    return snapshots


def dense_exchange_hamiltonian(space: SpinSpace, sign: str, fock_dim: int) -> np.ndarray:
    """``H_-+ / g`` on the full truncated grid, index ``k * fock_dim + n``."""
    ops = angular_momentum_operators(space)
    b = np.diag(np.sqrt(np.arange(1, fock_dim)), 1).astype(complex)
    bd = b.conj().T
    if sign == "minus":
        h = np.kron(ops.jminus, bd) + np.kron(ops.jplus, b)
    elif sign == "plus":
        h = np.kron(ops.jplus, bd) + np.kron(ops.jminus, b)
    else:
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    return h


def undepleted_pump_rotation(space: SpinSpace, beta: float, gt: float) -> np.ndarray:
    """Exchange coupling with ``b -> beta`` (real): ``exp(-i 2 beta gt Jx)``.

    Both signs reduce to ``g beta (J_+ + J_-) = 2 g beta Jx``, a plain rotation
    about ``x`` by ``2 beta gt``.
    """
    if np.iscomplexobj(beta) and np.imag(beta) != 0:
        raise ValueError("the undepleted-pump limit assumes a real pump amplitude")
    ops = angular_momentum_operators(space)
    return expm_hermitian(ops.jx, 2 * float(np.real(beta)) * gt)
