"""
Probe QFI versus purification QFI for three N-particle states
=============================================================

A coherent state, its azimuthal average (a Dicke mixture) and an equal
mixture of the two extreme Jy eigenstates. The purification bound 4Var(Jy)
grows from N to N^2 while the probe QFI stays at or below N.
"""

import numpy as np

from purimetry import SpinSpace, angular_momentum_operators, case_state, qfi_mixed, qfi_purification

print(f"{'N':>5} {'case':>5} {'F_A':>12} {'F_AB':>12} {'F_AB/N':>8}")
for n in (2, 10, 100):
    space = SpinSpace(n)
    jy = angular_momentum_operators(space).jy
    for which in ("I", "II", "III"):
        rho = case_state(which, space)
        f_a, f_ab = qfi_mixed(rho, jy), qfi_purification(rho, jy)
        print(f"{n:>5} {which:>5} {f_a:12.4f} {f_ab:12.1f} {f_ab / n:8.2f}")

# the Dicke mixture approaches N/2 from below
for n in (10, 100, 400):
    space = SpinSpace(n)
    f_a = qfi_mixed(case_state("II", space), angular_momentum_operators(space).jy)
    print(f"case II, N={n}: F_A/(N/2) = {f_a / (n / 2):.4f}")

# the Jy eigenstate mixture commutes with Jy, so a Jy rotation leaves it unchanged
space = SpinSpace(20)
rho, jy = case_state("III", space), angular_momentum_operators(space).jy
print("case III, ||[rho, Jy]|| =", np.linalg.norm(rho @ jy - jy @ rho))
