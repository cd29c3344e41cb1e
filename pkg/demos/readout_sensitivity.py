"""
Readouts that reach the purification bound
==========================================

Homodyne detection of the auxiliary for the dephased Jx eigenstate, and
a sign-of-quadrature parity readout for the pseudo-cat, compared with the
Heisenberg-type bounds sqrt(2)/N and 1/N.
"""

from pathlib import Path

import numpy as np

from purimetry.output import emit_svg, write_atomic
from purimetry.scenarios import resolve_config, run_scenario

here = Path(__file__).resolve().parent
n = 100

for beta2 in ("1e4", "1e6"):
    table = run_scenario(resolve_config("sensitivity-dicke", {"n": str(n), "beta2": beta2, "gt": "0.01"}))
    dphi = table.column("delta_phi")
    k = int(np.argmin(dphi))
    print(f"homodyne |beta|^2={beta2}: min dphi = {dphi[k]:.5f} at phi = {table.column('phi')[k]:.3g}"
          f"  (sqrt2/N = {np.sqrt(2) / n:.5f}, SQL = {1 / np.sqrt(n):.3f})")
    if beta2 == "1e4":
        svg = emit_svg(table, "phi", ("delta_phi", "delta_phi_linearised", "delta_phi_ideal"), log_y=True,
                       title="sensitivity-dicke")
        write_atomic(here / "sensitivity_dicke.svg", svg)

for beta2 in ("5", "30"):
    table = run_scenario(resolve_config("sensitivity-cat", {"n": "20", "beta2": beta2}))
    print(f"quadrature parity |beta|^2={beta2}: min dphi = {table.column('delta_phi').min():.5f}  (1/N = 0.05)")
