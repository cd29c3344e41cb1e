"""Measurement signals and the phase sensitivity they reach.

Every signal ``S`` is reported through :class:`SignalStats`, with
``delta_phi = sqrt(Var S) / |d<S>/dphi|``.

Exact signals (closed-form or exact derivatives):

* ``exact_dicke_stats``: ``S = (cos(phi) Jz - sin(phi) Jx - S_B)^2`` with a
  perfectly correlated ``S_B``, evaluated from probe moments alone;
* ``exact_parity_stats``: ``S = U^dag Pi_A U (x) Pi_B`` for pseudo-spin-cat purifications;
* ``fock_counting_stats``: the Dicke signal with ``S_B`` read from the number
  of quanta in the auxiliary mode after particle exchange.

Approximate signals (numerical derivative):

* ``approx_homodyne_stats``: ``S_B`` replaced by the phase quadrature ``Y_B / (2 beta gt)``;
* ``approx_quadrature_parity_stats``: ``Pi_B`` replaced by ``X_B / (2 beta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dynamics import to_windowed_fock
from .joint import CoherentBranchState, JointState, TruncationError, WindowedFockState
from .numerics import central_derivative, hermitian_eig
from .spin import SpinSpace, angular_momentum_operators, parity_operator
from .states import WINDOW_NORM_TOL, validate_density

DERIVATIVE_STEP = 1e-5
# Fock columns processed at once when forming Gram matrices on large windows
CHUNK_COLUMNS = 2048


@dataclass(frozen=True)
class SignalStats:
    phase: float
    mean: float
    second_moment: float
    variance: float
    dmean_dphase: float
    delta_phi: float

    @classmethod
    def from_moments(cls, phase, mean, second, deriv, limit=None) -> "SignalStats":
        """Assemble stats; ``limit`` is used for ``delta_phi`` where ``0 / 0`` occurs."""
        variance = second - mean**2
        vanishing = abs(variance) <= 1e-12 * max(1.0, abs(second)) and abs(deriv) <= 1e-12
        if limit is not None and vanishing:
            delta = limit
        elif deriv != 0.0:
            delta = math.sqrt(max(variance, 0.0)) / abs(deriv)
        else:
            delta = math.inf
        return cls(float(phase), float(mean), float(second), float(variance), float(deriv), float(delta))


@dataclass(frozen=True)
class SignalKind:
    """Which signal to evaluate, plus the parameters it needs.

    ``tag`` is one of ``exact_dicke``, ``exact_parity``, ``approx_homodyne``,
    ``approx_quadrature_parity`` or ``fock_counting``.
    """

    tag: str
    beta: float | None = None
    gt: float | None = None
    n_b_initial: int | None = None
    sign: str | None = None

    TAGS = ("exact_dicke", "exact_parity", "approx_homodyne", "approx_quadrature_parity", "fock_counting")

    def __post_init__(self):
        if self.tag not in self.TAGS:
            raise ValueError(f"unknown signal {self.tag!r}; expected one of {', '.join(self.TAGS)}")


# --------------------------------------------------------------------------
# exact Dicke-mixture signal, from probe moments


@dataclass(frozen=True)
class DickeMoments:
    """Probe moments entering the Dicke-mixture signal."""

    jz2: float
    jx2: float
    jy2: float
    jz4: float
    jx4: float
    cross: float  # <Jz^2 Jx^2 + Jx^2 Jz^2 + 4 Jz Jx Jx Jz>
    chiral: float  # <i (Jz Jx Jy - Jy Jx Jz)>


def dicke_moments(rho: np.ndarray) -> DickeMoments:
    rho = validate_density(rho)
    ops = angular_momentum_operators(SpinSpace.from_dim(rho.shape[0]))
    jx, jy, jz = ops.jx, ops.jy, ops.jz
    jz2, jx2 = jz @ jz, jx @ jx

    def ev(op):
        return float(np.trace(op @ rho).real)

    return DickeMoments(
        jz2=ev(jz2),
        jx2=ev(jx2),
        jy2=ev(jy @ jy),
        jz4=ev(jz2 @ jz2),
        jx4=ev(jx2 @ jx2),
        cross=ev(jz2 @ jx2 + jx2 @ jz2 + 4 * jz @ jx @ jx @ jz),
        chiral=ev(1j * (jz @ jx @ jy - jy @ jx @ jz)),
    )


def _dicke_signal(mom: DickeMoments, phase: float) -> tuple[float, float, float]:
    c, s = math.cos(phase), math.sin(phase)
    cm1 = c - 1.0
    mean = mom.jz2 * cm1**2 + mom.jx2 * s**2
    second = (
        mom.jz4 * cm1**4
        + mom.jx4 * s**4
        + mom.cross * s**2 * cm1**2
        + 2 * mom.chiral * s**2 * c * cm1
        + mom.jy2 * c**2 * s**2
    )
    deriv = -2 * mom.jz2 * cm1 * s + 2 * mom.jx2 * s * c
    return mean, second, deriv


def exact_dicke_stats(rho_or_moments, phase: float) -> SignalStats:
    """Dicke-mixture signal with ideal correlations; assumes vanishing odd coherences.

    At ``phase = 0`` the ratio is ``0/0``; the reported ``delta_phi`` is then the
    limit ``sqrt(<Jy^2>) / (2 <Jx^2>)`` (``1/sqrt(4 <Jy^2>)`` for Dicke mixtures).
    """
    mom = rho_or_moments if isinstance(rho_or_moments, DickeMoments) else dicke_moments(rho_or_moments)
    mean, second, deriv = _dicke_signal(mom, phase)
    limit = math.sqrt(mom.jy2) / (2 * mom.jx2) if mom.jx2 > 0 else math.inf
    return SignalStats.from_moments(phase, mean, second, deriv, limit)


def analytic_homodyne_sensitivity(phase: float, beta: float, gt: float, moments: DickeMoments) -> float:
    """Linearised sensitivity of the homodyne signal.

    The exact Dicke-signal variance is inflated by the residual quadrature noise
    ``1/(2 beta gt)^2`` and the curvature term ``sin^2(phi/2) <Jz^4> / beta^2``.
    """
    mean, second, deriv = _dicke_signal(moments, phase)
    if deriv == 0.0:
        return math.inf
    scale = 2 * beta * gt
    inv_b2 = 0.0 if math.isinf(beta) else 1.0 / beta**2
    inv_s2 = 0.0 if math.isinf(scale) else 1.0 / scale**2
    c, s = math.cos(phase), math.sin(phase)
    var = (
        second
        - mean**2
        - math.sin(phase / 2) ** 2 * inv_b2 * moments.jz4
        + 2 * inv_s2**2
        + 4 * inv_s2 * ((c - 1) ** 2 * moments.jz2 + s**2 * moments.jx2)
    )
    return math.sqrt(max(var, 0.0)) / abs(deriv)


# --------------------------------------------------------------------------
# signals built from a windowed joint state


def _as_windowed(joint: JointState) -> WindowedFockState:
    if isinstance(joint, WindowedFockState):
        state = joint
    elif isinstance(joint, CoherentBranchState):
        state = to_windowed_fock(joint)
    else:
        raise TypeError(f"unsupported joint state {type(joint).__name__}")
    deficit = abs(1.0 - state.norm() ** 2)
    if deficit > WINDOW_NORM_TOL:
        raise TruncationError(f"Fock window norm deficit {deficit:.2e}")
    return state


def _shift_down(block: np.ndarray, levels: np.ndarray) -> np.ndarray:
    # b: out[n] = sqrt(n + 1) psi[n + 1]
    out = np.zeros_like(block)
    out[:, :-1] = block[:, 1:] * np.sqrt(levels[1:])
    return out


def _shift_up(block: np.ndarray, levels: np.ndarray) -> np.ndarray:
    # b^dag: out[n] = sqrt(n) psi[n - 1]
    out = np.zeros_like(block)
    out[:, 1:] = block[:, :-1] * np.sqrt(levels[1:])
    return out


class _ThreeTermSignal:
    """``S = A(phi)^2`` with ``A = cos(phi) Jz - sin(phi) Jx - S_B``.

    The first two moments are quadratic forms in ``(cos, -sin, -1)`` over
    Gram matrices of ``O_p psi`` and ``O_p O_q psi``, so they are formed once
    per state and every phase costs O(1).
    """

    def __init__(self, state: WindowedFockState, apply_sb: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        ops = angular_momentum_operators(state.space)
        jz, jx = ops.jz, ops.jx
        probe_ops = [lambda v, lv: jz @ v, lambda v, lv: jx @ v, apply_sb]
        self.first = np.zeros((3, 3), dtype=complex)
        self.second = np.zeros((9, 9), dtype=complex)
        psi, levels = state.amplitudes, state.levels
        width = psi.shape[1]
        halo = 2
        for start in range(0, width, CHUNK_COLUMNS):
            stop = min(start + CHUNK_COLUMNS, width)
            lo, hi = max(start - halo, 0), min(stop + halo, width)
            block, lv = psi[:, lo:hi], levels[lo:hi]
            keep = slice(start - lo, stop - lo)
            once = [op(block, lv) for op in probe_ops]
            twice = [op_p(v, lv) for op_p in probe_ops for v in once]
            # twice[p * 3 + q] = O_p O_q psi
            once_k = np.stack([v[:, keep].ravel() for v in once])
            twice_k = np.stack([v[:, keep].ravel() for v in twice])
            self.first += once_k.conj() @ once_k.T
            self.second += twice_k.conj() @ twice_k.T
        self.jy2 = float(np.sum(np.abs(ops.jy @ psi) ** 2) / np.sum(np.abs(psi) ** 2))
        self.jx2 = float(self.first[1, 1].real)

    @staticmethod
    def _weights(phase):
        return np.array([math.cos(phase), -math.sin(phase), -1.0])

    def mean(self, phase: float) -> float:
        w = self._weights(phase)
        return float((w @ self.first @ w).real)

    def second_moment(self, phase: float) -> float:
        w = self._weights(phase)
        # index p * 3 + q  <->  O_p O_q, weight w_p w_q
        ww = np.outer(w, w).ravel()
        return float((ww @ self.second @ ww).real)

    def exact_derivative(self, phase: float) -> float:
        w = self._weights(phase)
        dw = np.array([-math.sin(phase), -math.cos(phase), 0.0])
        return float(2 * (dw @ self.first @ w).real)


def _check_branch_params(beta: float, gt: float | None = None):
    if not np.isreal(beta) or float(np.real(beta)) <= 0:
        raise ValueError("beta must be real and positive")
    if gt is not None and gt <= 0:
        raise ValueError("gt must be positive")


class HomodyneSignal:
    """Dicke-mixture signal with ``S_B = Y_B / (2 beta gt)``, ``Y_B = i (b - b^dag)``."""

    def __init__(self, joint: JointState, beta: float, gt: float):
        _check_branch_params(beta, gt)
        beta = float(np.real(beta))
        scale = 1.0 / (2 * beta * gt)

        def apply_sb(v, lv):
            return 1j * scale * (_shift_down(v, lv) - _shift_up(v, lv))

        self._signal = _ThreeTermSignal(_as_windowed(joint), apply_sb)

    def stats(self, phase: float, h: float = DERIVATIVE_STEP) -> SignalStats:
        sig = self._signal
        deriv = central_derivative(sig.mean, phase, h)
        return SignalStats.from_moments(phase, sig.mean(phase), sig.second_moment(phase), deriv)


def approx_homodyne_stats(joint: JointState, phase: float, beta: float, gt: float) -> SignalStats:
    return HomodyneSignal(joint, beta, gt).stats(phase)


class FockCountingSignal:
    """Dicke-mixture signal with ``S_B`` read off the auxiliary-mode occupation.

    After exchange from ``|j,j> (x) |N_B>``, ``S_B = N/2 + (N_B - n)`` under
    ``H_-`` and ``N/2 - (N_B - n)`` under ``H_+`` reproduce ``Jz`` exactly.
    """

    def __init__(self, joint: WindowedFockState, n_b_initial: int, sign: str):
        if not isinstance(joint, WindowedFockState):
            raise TypeError("Fock counting needs a WindowedFockState from exchange evolution")
        if sign not in ("plus", "minus"):
            raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
        space = joint.space
        k, n = np.nonzero(np.abs(joint.amplitudes) > 1e-300)
        n = n + joint.offset
        keys = k + n if sign == "minus" else k - n
        if keys.size and np.any(keys != keys[0]):
            raise ValueError("joint state spans several exchange sectors")
        half_n = space.n_particles / 2
        direction = 1.0 if sign == "minus" else -1.0

        def apply_sb(v, lv):
            return v * (half_n + direction * (n_b_initial - lv))[None, :]

        self._apply_sb = apply_sb
        self._state = joint
        self._signal = _ThreeTermSignal(joint, apply_sb)

    def correlation_residual(self) -> float:
        """``<(Jz - S_B)^2>``; zero when counting is perfectly correlated with ``Jz``."""
        st = self._state
        jz = angular_momentum_operators(st.space).jz
        diff = jz @ st.amplitudes - self._apply_sb(st.amplitudes, st.levels)
        return float(np.sum(np.abs(diff) ** 2))

    def stats(self, phase: float) -> SignalStats:
        sig = self._signal
        limit = math.sqrt(sig.jy2) / (2 * sig.jx2) if sig.jx2 > 0 else math.inf
        return SignalStats.from_moments(
            phase, sig.mean(phase), sig.second_moment(phase), sig.exact_derivative(phase), limit
        )


def fock_counting_stats(joint: WindowedFockState, phase: float, n_b_initial: int, sign: str) -> SignalStats:
    return FockCountingSignal(joint, n_b_initial, sign).stats(phase)


# --------------------------------------------------------------------------
# parity signals


class _Interferometer:
    """Caches the ``Jy`` eigenbasis so ``U^dag O U`` is cheap for many phases."""

    def __init__(self, space: SpinSpace):
        ops = angular_momentum_operators(space)
        self.jy = ops.jy
        self._eig = hermitian_eig(ops.jy)
        self.parity = parity_operator(space)

    def heisenberg(self, op: np.ndarray, phase: float) -> np.ndarray:
        """``U^dag op U`` with ``U = exp(-i phase Jy)``."""
        v = self._eig.vectors
        u = (v * np.exp(-1j * phase * self._eig.values)) @ v.conj().T
        return u.conj().T @ op @ u


def _parity_classes(space: SpinSpace) -> np.ndarray:
    """0 where the probe parity is +1, 1 where it is -1."""
    return (np.diag(parity_operator(space)).real < 0).astype(int)


def _two_branch_form(joint: JointState) -> tuple[np.ndarray, np.ndarray, complex]:
    """Reduce a pseudo-spin-cat purification to branch coefficients.

    Returns ``(c, cls, s)``: the state is ``sum_m c_m |m> (x) |b_{cls(m)}>``
    with normalised branch states ``b_0, b_1`` of overlap ``s = <b_0|b_1>``.
    """
    space = joint.space
    cls = _parity_classes(space)
    if isinstance(joint, CoherentBranchState):
        over = joint.overlaps()  # over[n, m] = <B_m|B_n>
        c = joint.coeffs.copy()
        refs = []
        for label in (0, 1):
            members = np.flatnonzero(cls == label)
            if members.size == 0:
                raise ValueError("a pseudo-spin-cat needs at least one particle")
            ref = members[0]
            if np.max(np.abs(over[members, ref] - 1.0)) > 1e-9:
                raise ValueError("branches within a parity class differ; not a pseudo-spin-cat purification")
            refs.append(ref)
        s = over[refs[1], refs[0]] if len(refs) == 2 else 0.0
        return c, cls, complex(s)
    if isinstance(joint, WindowedFockState):
        psi = joint.amplitudes
        c = np.zeros(space.dim, dtype=complex)
        refs = []
        for label in (0, 1):
            members = np.flatnonzero(cls == label)
            norms = np.linalg.norm(psi[members], axis=1)
            if norms.max() == 0.0:
                refs.append(None)
                continue
            ref = psi[members[np.argmax(norms)]]
            ref = ref / np.linalg.norm(ref)
            proj = psi[members] @ ref.conj()
            resid = np.linalg.norm(psi[members] - np.outer(proj, ref), axis=1)
            if np.any(resid > 1e-8 * np.maximum(norms, 1e-300)):
                raise ValueError("branches within a parity class differ; not a pseudo-spin-cat purification")
            c[members] = proj
            refs.append(ref)
        s = 0.0 if refs[0] is None or refs[1] is None else refs[0].conj() @ refs[1]
        return c, cls, complex(s)
    raise TypeError(f"unsupported joint state {type(joint).__name__}")


class ParitySignal:
    """``S = U^dag Pi_A U (x) Pi_B`` with ``Pi_B |B_m> = (-1)^m |B_m>``.

    ``Pi_B`` is +1 on the branch state of even-parity Dicke levels and -1 on
    the odd one. When the two branch states are not exactly orthogonal they are
    symmetrically orthonormalised first, which changes nothing once
    ``|<b_0|b_1>| = exp(-2 |beta|^2)`` is below roundoff.
    """

    def __init__(self, joint: JointState):
        c, cls, s = _two_branch_form(joint)
        if abs(s) >= 1.0 - 1e-12:
            raise ValueError("branch states coincide; parity of the auxiliary mode is undefined")
        gram = np.array([[1.0, s], [np.conj(s), 1.0]])
        w, v = np.linalg.eigh(gram)
        root = (v * np.sqrt(w)) @ v.conj().T  # <e_i|b_k> = root[i, k]
        # amplitudes on |m> (x) |e_i>
        psi2 = c[:, None] * root[:, cls].T
        z = np.array([1.0, -1.0])
        self._k = (psi2 * z) @ psi2.conj().T  # sum_i z_i psi_i psi_i^dag
        self._ifo = _Interferometer(joint.space)
        self.jy2 = float(np.real(np.sum(np.abs(self._ifo.jy @ psi2) ** 2)))

    def mean(self, phase: float) -> float:
        op = self._ifo.heisenberg(self._ifo.parity, phase)
        return float(np.real(np.trace(op @ self._k)))

    def derivative(self, phase: float) -> float:
        # d/dphi U^dag P U = i [Jy, U^dag P U]
        op = self._ifo.heisenberg(self._ifo.parity, phase)
        jy = self._ifo.jy
        return float(np.real(np.trace(1j * (jy @ op - op @ jy) @ self._k)))

    def stats(self, phase: float) -> SignalStats:
        limit = 1.0 / math.sqrt(4 * self.jy2) if self.jy2 > 0 else math.inf
        return SignalStats.from_moments(phase, self.mean(phase), 1.0, self.derivative(phase), limit)


def exact_parity_stats(joint: JointState, phase: float) -> SignalStats:
    if not isinstance(joint, (CoherentBranchState, WindowedFockState)):
        raise TypeError(f"unsupported joint state {type(joint).__name__}")
    return ParitySignal(joint).stats(phase)


class QuadratureParitySignal:
    """``S = U^dag Pi_A U (x) X_B / (2 beta)``, an amplitude-quadrature stand-in for parity.

    ``X_B`` is taken along the coherent amplitude of the even-parity branch,
    i.e. the ordinary ``b + b^dag`` for real ``beta`` and even ``N``.
    """

    def __init__(self, joint: JointState, beta: float):
        _check_branch_params(beta)
        beta = float(np.real(beta))
        state = _as_windowed(joint)
        psi, lv = state.amplitudes, state.levels
        direction = self._reference_direction(joint, state)
        xpsi = np.conj(direction) * _shift_down(psi, lv) + direction * _shift_up(psi, lv)
        xpsi /= 2 * beta
        # mean = sum_{m,m'} O[m, m'] <psi_m|X|psi_m'>
        self._k = psi.conj() @ xpsi.T
        self._second = float(np.sum(np.abs(xpsi) ** 2))
        self._ifo = _Interferometer(state.space)

    @staticmethod
    def _reference_direction(joint: JointState, state: WindowedFockState) -> complex:
        cls = _parity_classes(state.space)
        if isinstance(joint, CoherentBranchState):
            amp = joint.branches[np.flatnonzero(cls == 0)[0]]
        else:
            psi = state.amplitudes
            even = np.flatnonzero(cls == 0)
            row = even[np.argmax(np.linalg.norm(psi[even], axis=1))]
            amp = np.vdot(psi[row], _shift_down(psi[row : row + 1], state.levels)[0])
        if amp == 0:
            raise ValueError("even-parity branch has no coherent amplitude")
        return amp / abs(amp)

    def mean(self, phase: float) -> float:
        op = self._ifo.heisenberg(self._ifo.parity, phase)
        return float(np.real(np.sum(op * self._k)))

    def stats(self, phase: float, h: float = DERIVATIVE_STEP) -> SignalStats:
        deriv = central_derivative(self.mean, phase, h)
        return SignalStats.from_moments(phase, self.mean(phase), self._second, deriv)


def approx_quadrature_parity_stats(joint: JointState, phase: float, beta: float) -> SignalStats:
    return QuadratureParitySignal(joint, beta).stats(phase)


# --------------------------------------------------------------------------
# curves


def sensitivity_curve(kind: SignalKind, state, phase_grid: Sequence[float]) -> list[SignalStats]:
    """Stats for every phase in ``phase_grid``; the state is prepared once.

    ``state`` is a density matrix for ``exact_dicke`` and a joint state otherwise.
    """
    grid = np.atleast_1d(np.asarray(phase_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("phase grid is empty")
    if kind.tag == "exact_dicke":
        mom = dicke_moments(state)
        return [exact_dicke_stats(mom, p) for p in grid]
    if kind.tag == "exact_parity":
        sig = ParitySignal(state)
    elif kind.tag == "approx_homodyne":
        sig = HomodyneSignal(state, kind.beta, kind.gt)
    elif kind.tag == "approx_quadrature_parity":
        sig = QuadratureParitySignal(state, kind.beta)
    else:
        sig = FockCountingSignal(state, kind.n_b_initial, kind.sign)
    return [sig.stats(float(p)) for p in grid]


def best_sensitivity(curve: Sequence[SignalStats], rel_floor: float = 1e-12) -> SignalStats:
    """Point of smallest ``delta_phi``, skipping points where the slope vanishes.

    A slope counts as vanishing below ``rel_floor`` times the largest slope on the curve.
    """
    scale = max(abs(s.dmean_dphase) for s in curve)
    usable = [s for s in curve if abs(s.dmean_dphase) >= rel_floor * scale and math.isfinite(s.delta_phi)]
    if not usable:
        raise ValueError("no point on the curve has a usable slope")
    return min(usable, key=lambda s: s.delta_phi)
