"""Steady-state simulator for two coherently driven atoms in a lossy cavity.

Builds the driven-dissipative master equation, solves it to steady state
with certified Fock-cutoff convergence, and maps the radiance witness R
(with its six-regime classification), photon statistics and semiclassical
comparisons over parameter grids.
"""

from .model import (
    AtomCoupling,
    SystemParams,
    Superoperator,
    atom_couplings,
    build_h0,
    build_hamiltonian,
    build_hi,
    build_hl,
    build_liouvillian,
    collapse_operators,
    collective_G_H,
    dicke_couplings,
    hilbert_dims,
)
from .operators import (
    Operator,
    StateVector,
    annihilation,
    basis_ket,
    embed,
    expectation,
    identity,
    kron,
    spin_ops,
    unvec,
    vec,
)
from .steady import (
    CutoffExhaustedError,
    IntegrationFailureError,
    NonUniqueSteadyStateError,
    SingularSystemError,
    SolverError,
    SteadyStateResult,
    converge_cutoff,
    evolve,
    g2_zero,
    steady_state,
    trace_distance,
)
from .sweep import (
    Axis,
    ConfigError,
    SweepRow,
    SweepSpec,
    emit_csv,
    figure_preset,
    parse_config,
    run_sweep,
)
from .witness import (
    RadianceClass,
    RadiancePoint,
    ReferenceDarkError,
    SemiclassicalSingularityError,
    classify,
    quantumness_ratio,
    radiance_witness,
    semiclassical_field,
)

__version__ = "0.1.0"
