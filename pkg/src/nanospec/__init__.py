"""Spectral states of perturbed two-periodic Jacobi operators and zigzag
half-nanotubes: bound states, antibound states, resonances and virtual
states via the state polynomial, with brute-force oracles and a CLI.
"""

from .background import (
    Background,
    BandStructure,
    MINUS,
    PLUS,
    SheetPoint,
    band_edges,
    floquet_multipliers,
    fundamental_sequence,
    lyapunov,
    weyl_m,
)
from .closedform import (
    a_to_zero_resonance_limits,
    flat_band_spectrum,
    large_coupling_limit,
    large_v_scaled_roots,
    p1_states,
    p2_cubic,
    p2_limits,
)
from .jost import (
    Perturbation,
    StatePolynomial,
    jost_solution,
    jost_value,
    perturbed_fundamentals,
    state_polynomial,
)
from .polycore import Polynomial, roots
from .states import (
    StateRecord,
    StateReport,
    Tolerances,
    ValidationResult,
    find_states,
    resolvent_probe,
    unperturbed_state,
    validate_counts,
)
from .tube import ChannelSpec, TubeConfig, TubeReport, channels, field_param, field_sweep, tube_states

__version__ = "1.0.0"

__all__ = [
    "Background",
    "BandStructure",
    "SheetPoint",
    "PLUS",
    "MINUS",
    "band_edges",
    "lyapunov",
    "floquet_multipliers",
    "weyl_m",
    "fundamental_sequence",
    "Polynomial",
    "roots",
    "Perturbation",
    "StatePolynomial",
    "state_polynomial",
    "perturbed_fundamentals",
    "jost_value",
    "jost_solution",
    "StateRecord",
    "StateReport",
    "Tolerances",
    "ValidationResult",
    "find_states",
    "unperturbed_state",
    "resolvent_probe",
    "validate_counts",
    "p1_states",
    "p2_cubic",
    "p2_limits",
    "flat_band_spectrum",
    "a_to_zero_resonance_limits",
    "large_v_scaled_roots",
    "large_coupling_limit",
    "TubeConfig",
    "ChannelSpec",
    "TubeReport",
    "field_param",
    "channels",
    "tube_states",
    "field_sweep",
]
