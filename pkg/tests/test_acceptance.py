"""Acceptance criteria, one test each.

Every test records a single PASS/FAIL line in ``RESULTS``; ``conftest.py``
prints them at the end of the session. Sub-checks are all evaluated before
the verdict so a failing line reports everything that went wrong.

    python3 tests/test_acceptance.py
"""

import math
import sys

import numpy as np
import pytest

from purimetry import (
    ExchangeSpec,
    SpinSpace,
    analytic_qfi_dephasing,
    angular_momentum_operators,
    case_state,
    dephasing_purification,
    evolve_exchange,
    exact_dicke_stats,
    exact_parity_stats,
    husimi_q,
    parity_operator,
    partial_trace_to_probe,
    qfi_breakdown,
    qfi_mixed,
    qfi_purification,
    spin_coherent_state,
)
from purimetry.dynamics import dense_exchange_hamiltonian
from purimetry.numerics import expm_hermitian, hermitian_eig
from purimetry.output import format_csv
from purimetry.scenarios import resolve_config, run_scenario

RESULTS: dict[int, str] = {}


class Criterion:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.failures: list[str] = []
        self.notes: list[str] = []

    def check(self, label: str, ok: bool, detail: str = ""):
        text = f"{label}: {detail}" if detail else label
        (self.notes if ok else self.failures).append(text)

    def finish(self):
        verdict = "PASS" if not self.failures else "FAIL"
        shown = self.failures or self.notes
        RESULTS[self.number] = f"[{verdict}] {self.number}. {self.title} | " + "; ".join(shown)
        assert not self.failures, "; ".join(self.failures)


def _rel(a, b):
    return abs(a - b) / abs(b)


def _scenario(name, **flags):
    return run_scenario(resolve_config(name, {k: str(v) for k, v in flags.items()}))


def test_criterion_1_case_state_table():
    c = Criterion(1, "case-state QFI table, N=100")
    n = 100
    space = SpinSpace(n)
    jy = angular_momentum_operators(space).jy
    states = {k: case_state(k, space) for k in ("I", "II", "III")}
    for key, target in (("I", n), ("II", n * (n + 1) / 2), ("III", n * n)):
        f_ab = qfi_purification(states[key], jy)
        c.check(f"4Var case {key}", _rel(f_ab, target) <= 1e-9, f"{f_ab:.10g} vs {target:g}")
    f_a = {k: qfi_mixed(rho, jy) for k, rho in states.items()}
    c.check("F_A case I", _rel(f_a["I"], n) <= 1e-9, f"{f_a['I']:.10g}")
    for key in ("II", "III"):
        c.check(f"F_A case {key} ~ N/2", _rel(f_a[key], n / 2) <= 0.10, f"{f_a[key]:.6g} vs 50 +- 10%")
    small = qfi_mixed(case_state("II", SpinSpace(2)), angular_momentum_operators(SpinSpace(2)).jy)
    c.check("F_A case II N=2", _rel(small, 1 / 3) <= 1e-9, f"{small:.12g}")
    c.finish()


def test_criterion_2_analytic_numeric_equivalence():
    c = Criterion(2, "analytic vs matrix QFI on 100 gt points")
    worst = 0.0
    for n in (10, 100):
        space = SpinSpace(n)
        jy = angular_momentum_operators(space).jy
        for beta_sq in (50.0, 500.0):
            for theta, azimuth in ((math.pi / 2, 0.0), (math.pi / 2, math.pi / 2)):
                initial = spin_coherent_state(space, theta, azimuth)
                for gt in np.linspace(0, 2 * math.pi, 100):
                    rho = partial_trace_to_probe(dephasing_purification(initial, math.sqrt(beta_sq), gt))
                    closed = analytic_qfi_dephasing(space, theta, azimuth, beta_sq, gt).total
                    scale = max(1.0, abs(closed))
                    worst = max(
                        worst,
                        abs(qfi_purification(rho, jy) - closed) / scale,
                        abs(qfi_breakdown(rho).total - closed) / scale,
                    )
    c.check("max relative deviation", worst <= 1e-9, f"{worst:.2e}")
    c.finish()


def test_criterion_3_dicke_dephasing_sweep():
    c = Criterion(3, "dephasing of the maximal Jx eigenstate, N=100, |beta|^2=500")
    t = _scenario("dephasing-dicke", n=100, beta2=500)
    c1, c2, f_ab, f_a, pur = (t.column(k) for k in ("C1_sq", "C2_sq", "F_AB", "F_A", "purity"))
    plateau = (c1 <= 1e-6) & (c2 <= 1e-6)
    dev = np.max(np.abs(f_ab[plateau] - 5050) / 5050) if plateau.any() else math.inf
    c.check("F_AB plateau", plateau.any() and dev <= 0.01, f"{plateau.sum()} samples, max rel dev {dev:.2e}")
    c.check("F_A <= N", f_a.max() <= 100 + 1e-6, f"max {f_a.max():.9g}")
    c.check("purity decays, stays positive", pur[-1] < pur[0] and pur.min() > 0, f"{pur[0]:.3g} -> min {pur.min():.3g}")
    c.finish()


def test_criterion_4_pseudo_cat_revival():
    c = Criterion(4, "pseudo-cat revival, N=100, |beta|^2=500")
    t = _scenario("pseudo-cat", n=100, beta2=500, gt_center="pi", gt_halfwidth=0.5, gt_steps=201)
    gt, f_ab = t.column("gt"), t.column("F_AB")
    mid = int(np.argmin(np.abs(gt - math.pi)))
    c.check("F_AB at pi", gt[mid] == math.pi and _rel(f_ab[mid], 1e4) <= 1e-6, f"{f_ab[mid]:.10g}")
    for sign in (-1, 1):
        k = int(np.argmin(np.abs(gt - (math.pi + sign * 0.3))))
        ok = abs(gt[k] - (math.pi + sign * 0.3)) <= 1e-12 and _rel(f_ab[k], 5050) <= 0.01
        c.check(f"F_AB at pi{sign * 0.3:+g}", ok, f"{f_ab[k]:.6g}")
    c.finish()


def test_criterion_5_exchange_dynamics():
    c = Criterion(5, "exchange dynamics, H-, N=100")
    half = 100**2 / 2
    for n_b, lo, hi in ((20, 0.9, math.inf), (0, 0.6, 0.8)):
        t = _scenario("exchange", n=100, n_b=n_b, sign="minus")
        ratio = t.column("F_AB").max() / half
        c.check(f"N_B={n_b} max F_AB/(N^2/2)", lo <= ratio <= hi, f"{ratio:.4f}")
    space = SpinSpace(4)
    fock = 8
    worst = 0.0
    for sign in ("minus", "plus"):
        dense = dense_exchange_hamiltonian(space, sign, fock)
        start = np.zeros(space.dim * fock, dtype=complex)
        start[4 * fock + 2] = 1.0
        for snap in evolve_exchange(space, ExchangeSpec.make(sign, 2, np.linspace(0, 3, 31))):
            ref = (expm_hermitian(dense, snap.gt) @ start).reshape(space.dim, fock)
            got = np.zeros_like(ref)
            w = snap.joint
            got[:, w.offset : w.offset + w.fock_dim] = w.amplitudes
            worst = max(worst, np.max(np.abs(got - ref)))
    c.check("sectors vs dense expm, N=4, N_B=2", worst <= 1e-9, f"{worst:.1e}")
    c.finish()


def test_criterion_6_qcrb_saturation():
    c = Criterion(6, "Cramer-Rao saturation at phase 1e-4")
    n = 100
    space = SpinSpace(n)
    jy = angular_momentum_operators(space).jy
    rho = case_state("II", space)
    # the lower edge is the bound itself; an exactly saturating signal lands on it up to roundoff
    lo = 1 - 1e-9
    value = exact_dicke_stats(rho, 1e-4).delta_phi * math.sqrt(qfi_purification(rho, jy))
    c.check("exact Dicke signal, case II", lo <= value <= 1 + 1e-4, f"1 {value - 1:+.2e}")
    joint = dephasing_purification(spin_coherent_state(space, math.pi / 2, math.pi / 2), math.sqrt(500), math.pi)
    f_ab = qfi_purification(partial_trace_to_probe(joint), jy)
    value = exact_parity_stats(joint, 1e-4).delta_phi * math.sqrt(f_ab)
    c.check("exact parity signal, pseudo-cat", lo <= value <= 1 + 1e-4, f"1 {value - 1:+.2e}")
    c.finish()


def test_criterion_7_homodyne_curves():
    c = Criterion(7, "homodyne readout, N=100, gt=1e-2")
    n = 100
    big = _scenario("sensitivity-dicke", n=n, beta2=1e6, gt=0.01)
    best = big.column("delta_phi").min()
    c.check("|beta|^2=1e6 min", best <= 1.05 * math.sqrt(2) / n, f"{best * n / math.sqrt(2):.4f} x sqrt2/N")
    small = _scenario("sensitivity-dicke", n=n, beta2=1e4, gt=0.01)
    best = small.column("delta_phi").min()
    c.check("|beta|^2=1e4 beats SQL", best < 1 / math.sqrt(n), f"{best:.4f}")
    near = _scenario("sensitivity-dicke", n=n, beta2=1e4, gt=0.01, phase_min=1e-5, phase_max=1e-2, phase_steps=4)
    dphi = near.column("delta_phi")
    diverges = bool(np.all(np.diff(dphi) < 0)) and dphi[0] > 1 / math.sqrt(n)
    c.check("diverges as phase -> 0", diverges, ", ".join(f"{v:.3g}" for v in dphi))
    band = _scenario("sensitivity-dicke", n=n, beta2=1e4, gt=0.01, phase_min=0.02, phase_max=0.3, phase_steps=60, phase_scale="lin")
    dev = np.max(np.abs(band.column("delta_phi") / band.column("delta_phi_linearised") - 1))
    c.check("linearised formula on [0.02, 0.3]", dev <= 0.05, f"max rel dev {dev:.3f}")
    c.finish()


def test_criterion_8_quadrature_parity_curves():
    c = Criterion(8, "quadrature parity readout, N=20, gt=pi")
    best = {b: _scenario("sensitivity-cat", n=20, beta2=b, gt="pi").column("delta_phi").min() for b in (30, 5)}
    c.check("|beta|^2=30 min", best[30] <= 0.0525, f"{best[30]:.6f}")
    c.check("|beta|^2=5 worse", best[5] > best[30], f"{best[5]:.6f}")
    c.finish()


def test_criterion_9_property_suites():
    c = Criterion(9, "property suites")
    rng = np.random.default_rng(2024)
    worst = 0.0
    for n in (1, 2, 7, 50, 200):
        o = angular_momentum_operators(SpinSpace(n))
        j = n / 2
        comm = np.max(np.abs(o.jx @ o.jy - o.jy @ o.jx - 1j * o.jz))
        cas = np.max(np.abs(o.jx @ o.jx + o.jy @ o.jy + o.jz @ o.jz - j * (j + 1) * np.eye(n + 1))) / max(1, n * n)
        worst = max(worst, comm / max(1, n), cas)
    c.check("SU(2) algebra and Casimir", worst <= 1e-12, f"{worst:.1e}")

    rhos = []
    for n in (3, 20):
        space = SpinSpace(n)
        rhos += [case_state(k, space) for k in ("I", "II", "III")]
        for _ in range(10):
            a = rng.normal(size=(n + 1, 3)) + 1j * rng.normal(size=(n + 1, 3))
            r = a @ a.conj().T
            rhos.append(r / np.trace(r).real)
        init = spin_coherent_state(space, math.pi / 2, 0.0)
        rhos += [partial_trace_to_probe(dephasing_purification(init, 5.0, gt)) for gt in np.linspace(0, 3, 7)]
        rhos += [s.rho for s in evolve_exchange(space, ExchangeSpec.make("minus", 2, np.linspace(0, 1, 7)))]
    slack = min(
        qfi_purification(r, angular_momentum_operators(SpinSpace.from_dim(r.shape[0])).jy)
        - qfi_mixed(r, angular_momentum_operators(SpinSpace.from_dim(r.shape[0])).jy)
        for r in rhos
    )
    c.check("convexity F_AB >= F_A", slack >= -1e-8, f"{len(rhos)} states, min gap {slack:.2e}")

    space = SpinSpace(20)
    norm = max(abs(husimi_q(case_state(k, space), 200, 200).integral() - 1) for k in ("I", "II", "III"))
    c.check("Husimi normalisation", norm <= 1e-6, f"{norm:.1e}")

    bad = 0.0
    for n in (1, 2, 11):
        o = angular_momentum_operators(SpinSpace(n))
        p = parity_operator(SpinSpace(n))
        bad = max(bad, np.max(np.abs(p @ p - np.eye(n + 1))), np.max(np.abs(p @ o.jy @ p + o.jy)))
    c.check("parity identities", bad <= 1e-12, f"{bad:.1e}")

    o = angular_momentum_operators(SpinSpace(4))
    fock, gt = 12, 0.77
    levels = np.arange(fock)
    u = expm_hermitian(np.kron(o.jz, np.diag(levels)).astype(complex), gt)
    lhs = u.conj().T @ np.kron(o.jy, np.eye(fock)) @ u
    rhs = np.kron(o.jx, np.diag(np.sin(gt * levels))) + np.kron(o.jy, np.diag(np.cos(gt * levels)))
    bch = np.max(np.abs(lhs - rhs))
    c.check("BCH joint-space identity N=4", bch <= 1e-10, f"{bch:.1e}")

    a = rng.normal(size=(101, 101)) + 1j * rng.normal(size=(101, 101))
    h = (a + a.conj().T) / 2
    w, v = hermitian_eig(h)
    res = np.max(np.abs(h @ v - v * w)) / np.max(np.abs(w))
    c.check("eigensolver residual", res <= 1e-10, f"{res:.1e}")

    flags = {"n": 30, "n_b": 4, "gt_steps": 41}
    same = format_csv(_scenario("exchange", **flags)) == format_csv(_scenario("exchange", **flags))
    same &= format_csv(_scenario("cases", n=20)) == format_csv(_scenario("cases", n=20))
    c.check("byte-identical CSV reruns", same)
    c.finish()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
