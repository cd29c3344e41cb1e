"""Metrology with purifications of mixed spin states.

Quantum Fisher information of mixed probes and their purifications in SU(2)
Mach-Zehnder interferometry, probe/auxiliary entangling dynamics, and the
measurement signals that reach the quantum Cramer-Rao bound.
"""

from .spin import (
    SpinSpace,
    SpinOperators,
    angular_momentum_operators,
    mz_unitary,
    parity_operator,
    rotation_operator,
    spin_coherent_state,
)
from .joint import (
    CoherentBranchState,
    JointState,
    ResourceBudgetError,
    TruncationError,
    WindowedFockState,
    coherent_overlap,
)
from .states import (
    HusimiField,
    JyDistribution,
    case_state,
    density_from_pure,
    husimi_q,
    jy_distribution,
    partial_trace_to_probe,
    purity,
    validate_density,
)
from .qfi import (
    CoherenceSpectrum,
    QfiBreakdown,
    analytic_qfi_dephasing,
    coherence_dephasing,
    coherence_spectrum,
    qfi_breakdown,
    qfi_mixed,
    qfi_purification,
    qfi_spin_coherent,
)
from .dynamics import (
    ExchangeSector,
    ExchangeSnapshot,
    ExchangeSpec,
    dephasing_purification,
    evolve_exchange,
    exchange_sector,
    exchange_sectors,
    to_windowed_fock,
    undepleted_pump_rotation,
)
from .estimation import (
    DickeMoments,
    SignalKind,
    SignalStats,
    analytic_homodyne_sensitivity,
    approx_homodyne_stats,
    approx_quadrature_parity_stats,
    best_sensitivity,
    dicke_moments,
    exact_dicke_stats,
    exact_parity_stats,
    fock_counting_stats,
    sensitivity_curve,
)

__version__ = "0.1.0"
