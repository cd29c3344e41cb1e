"""
Recovering the QFI by measuring the auxiliary mode
==================================================

Dephasing by exp(-i gt Jz b^dag b) with a coherent auxiliary: the probe
QFI collapses while the probe plus auxiliary keeps N(N+1)/2, and the
maximal Jy eigenstate revives to N^2 at gt = pi. Writes SVG plots next to
this script.
"""

from pathlib import Path

import numpy as np

from purimetry.output import emit_svg, write_atomic
from purimetry.scenarios import resolve_config, run_scenario

here = Path(__file__).resolve().parent

dicke = run_scenario(resolve_config("dephasing-dicke", {"n": "100", "beta2": "500"}))
gt, f_a, f_ab = dicke.column("gt"), dicke.column("F_A"), dicke.column("F_AB")
for t in (0.0, 0.05, 0.1, 0.2, 0.5):
    k = int(np.argmin(np.abs(gt - t)))
    print(f"gt={gt[k]:.3f}  F_A={f_a[k]:8.2f}  F_AB={f_ab[k]:8.2f}  purity={dicke.column('purity')[k]:.4f}")
write_atomic(here / "dephasing_dicke.svg", emit_svg(dicke, "gt", ("F_A", "F_AB"), title="dephasing-dicke"))

cat = run_scenario(resolve_config("pseudo-cat", {"n": "100", "beta2": "500", "gt_center": "pi"}))
gt, f_ab = cat.column("gt"), cat.column("F_AB")
print(f"pseudo-cat: F_AB at gt=pi is {f_ab[np.argmin(np.abs(gt - np.pi))]:.1f}, away from pi {f_ab[0]:.1f}")
write_atomic(here / "pseudo_cat.svg", emit_svg(cat, "gt", ("F_A", "F_AB"), title="pseudo-cat"))

for n_b in (0, 20):
    ex = run_scenario(resolve_config("exchange", {"n": "100", "n_b": str(n_b)}))
    ratio = ex.column("F_AB_over_half_N2")
    k = int(np.argmax(ratio))
    print(f"exchange N_B={n_b}: best F_AB/(N^2/2) = {ratio[k]:.3f} at gt = {ex.column('gt')[k]:.3f}")
