"""Steady-state solver, time-evolution oracle and Fock-cutoff certification.

The unique steady state of the generator L is obtained by replacing one row
of L with the trace constraint and solving the resulting sparse linear
system. Uniqueness is cross-checked by re-solving with a different replaced
row: a degenerate generator yields two different pseudo-solutions, which is
detected by their trace distance. ``evolve`` integrates the master equation
with an adaptive Runge-Kutta scheme and serves as an independent oracle for
the linear solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .model import SystemParams, Superoperator, build_liouvillian, hilbert_dims
from .operators import Operator, annihilation, embed, expectation, spin_ops, unvec, vec

__all__ = [
    "SteadyStateResult",
    "SolverError",
    "SingularSystemError",
    "NonUniqueSteadyStateError",
    "CutoffExhaustedError",
    "IntegrationFailureError",
    "steady_state",
    "evolve",
    "converge_cutoff",
    "g2_zero",
    "trace_distance",
]

RESIDUAL_TOL = 1e-9
UNIQUENESS_TOL = 1e-8
PHOTON_FLOOR = 1e-10
CONVERGENCE_ABS_FLOOR = 1e-12
CUTOFF_CAP = 60
CUTOFF_GROWTH = 1.5


class SolverError(Exception):
    """Base class for steady-state solver failures."""


class SingularSystemError(SolverError):
    """The trace-constrained linear solve failed or left a large residual."""


class NonUniqueSteadyStateError(SolverError):
    """Two different constrained solves disagree: degenerate steady state."""


class CutoffExhaustedError(SolverError):
    """Observables did not stabilize before the hard Fock-cutoff cap."""


class IntegrationFailureError(SolverError):
    """The master-equation integrator failed to reach the requested time."""


@dataclass
class SteadyStateResult:
    """Steady-state density matrix with derived observables.

    ``g2_zero`` and the observables are None when the result was produced
    without parameter context. ``cutoff_used`` is the Fock cutoff at which
    convergence was certified (or the cutoff of a direct solve).
    """

    rho: np.ndarray = field(repr=False)
    mean_photon: float | None
    coherent_amp: complex | None
    atomic_excitation: float | None
    g2_zero: float | None
    cutoff_used: int
    residual: float


def _constrained_solve(liouv: Superoperator, row: int) -> np.ndarray:
    """Solve L x = 0 with row ``row`` replaced by the unit-trace constraint."""
    d = liouv.dim
    n = d * d
    a = liouv.data.tocoo()
    keep = a.row != row
    rows = np.concatenate([a.row[keep], np.full(d, row, dtype=a.row.dtype)])
    cols = np.concatenate([a.col[keep], np.arange(d) * (d + 1)])
    vals = np.concatenate([a.data[keep], np.ones(d, dtype=np.complex128)])
    system = sp.csc_matrix((vals, (rows, cols)), shape=(n, n))
    rhs = np.zeros(n, dtype=np.complex128)
    rhs[row] = 1.0
    try:
        lu = spla.splu(system)
        x = lu.solve(rhs)
    except RuntimeError as exc:
        raise SingularSystemError(f"constrained solve failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("constrained solve produced non-finite entries")
    return x


def trace_distance(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """(1/2) trace norm of the Hermitian part of rho_a - rho_b."""
    diff = rho_a - rho_b
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def _observables(rho: np.ndarray, params: SystemParams):
    dims = hilbert_dims(params)
    cavity_site = len(dims) - 1
    state = Operator(dims, rho)
    a = embed(annihilation(params.fock_cutoff), cavity_site, dims)
    n_op = a.dag() @ a
    nbar = expectation(state, n_op).real
    if -1e-10 < nbar < 0.0:  # truncation noise on an empty cavity
        nbar = 0.0
    amp = expectation(state, a)
    _, sm, _ = spin_ops()
    exc = 0.0
    for i in range(params.n_atoms):
        smi = embed(sm, i, dims)
        exc += expectation(state, smi.dag() @ smi).real
    g2 = None
    if nbar >= PHOTON_FLOOR:
        aa = a @ a
        g2 = expectation(state, aa.dag() @ aa).real / (nbar * nbar)
    return nbar, amp, exc, g2


def _verify_unique(liouv: Superoperator, rho: np.ndarray):
    alt_row = liouv.dim * liouv.dim - 1
    x = _constrained_solve(liouv, alt_row)
    rho_alt = unvec(x, liouv.dim)
    rho_alt = 0.5 * (rho_alt + rho_alt.conj().T)
    dist = trace_distance(rho, rho_alt)
    if dist > UNIQUENESS_TOL:
        raise NonUniqueSteadyStateError(
            f"solves with two constraint rows differ by trace distance {dist:.3e}"
        )


def steady_state(
    liouv: Superoperator,
    params: SystemParams | None = None,
    *,
    check_unique: bool = True,
    cutoff_used: int | None = None,
    residual_tol: float = RESIDUAL_TOL,
) -> SteadyStateResult:
    """Unique trace-one solution of L vec(rho) = 0.

    When ``params`` is given the observable fields are filled from it;
    otherwise they are left as None and the caller provides context.
    """
    x = _constrained_solve(liouv, 0)
    rho = unvec(x, liouv.dim)
    rho = 0.5 * (rho + rho.conj().T)
    residual = float(np.linalg.norm(liouv.data @ vec(rho)))
    if residual > residual_tol:
        raise SingularSystemError(
            f"steady-state residual {residual:.3e} exceeds {residual_tol:.1e}"
        )
    if check_unique:
        _verify_unique(liouv, rho)
    nbar = amp = exc = g2 = None
    if params is not None:
        nbar, amp, exc, g2 = _observables(rho, params)
        if cutoff_used is None:
            cutoff_used = params.fock_cutoff
    return SteadyStateResult(
        rho=rho,
        mean_photon=nbar,
        coherent_amp=amp,
        atomic_excitation=exc,
        g2_zero=g2,
        cutoff_used=-1 if cutoff_used is None else cutoff_used,
        residual=residual,
    )


def evolve(
    rho0: np.ndarray,
    liouv: Superoperator,
    t: float,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> np.ndarray:
    """Propagate rho0 to time t (units of 1/kappa) under the generator.

    Uses an adaptive high-order Runge-Kutta integrator on the vectorized
    master equation; independent of the steady-state linear solve.
    """
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != (liouv.dim, liouv.dim):
        raise ValueError(f"rho0 shape {rho0.shape} does not match dim {liouv.dim}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return rho0.copy()
    data = liouv.data

    def rhs(_, y):
        return data @ y

    sol = solve_ivp(rhs, (0.0, t), vec(rho0), method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationFailureError(sol.message)
    rho_t = unvec(sol.y[:, -1], liouv.dim)
    drift = abs(np.trace(rho_t) - np.trace(rho0))
    if drift > 1e-8:
        raise IntegrationFailureError(f"trace drifted by {drift:.3e} during integration")
    return rho_t


def _starting_cutoff(params: SystemParams) -> int:
    # Scaled with the drive; intracavity occupation stays O(1) in this model
    # because the pump feeds the cavity through saturable atoms, so a small
    # multiple of eta/kappa is a safe ladder entry point.
    return max(4, math.ceil(2.0 * params.eta / params.kappa))


def _stable(old: float, new: float, rel_tol: float) -> bool:
    return abs(new - old) <= max(rel_tol * max(abs(old), abs(new)), CONVERGENCE_ABS_FLOOR)


def converge_cutoff(
    params: SystemParams,
    rel_tol: float = 1e-6,
    *,
    start: int | None = None,
    cap: int = CUTOFF_CAP,
    check_unique: bool = True,
) -> SteadyStateResult:
    """Solve at increasing Fock cutoffs until the observables stabilize.

    The cutoff grows by 50% (rounded up) per step. Convergence is certified
    when the mean photon number and |<a>| both change by less than
    ``rel_tol`` (relative, absolute floor 1e-12) under one growth step; the
    result of the smaller cutoff of the certified pair is returned, tagged
    with that cutoff. Raises :class:`CutoffExhaustedError` at the hard cap.
    """
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be > 0, got {rel_tol}")
    cutoff = start if start is not None else _starting_cutoff(params)
    cutoff = max(1, min(cutoff, cap))

    def solve_at(c: int):
        p = replace(params, fock_cutoff=c)
        liouv = build_liouvillian(p)
        return steady_state(liouv, p, check_unique=False, cutoff_used=c), liouv

    prev, prev_liouv = solve_at(cutoff)
    while cutoff < cap:
        nxt = min(math.ceil(CUTOFF_GROWTH * cutoff), cap)
        cur, cur_liouv = solve_at(nxt)
        if _stable(prev.mean_photon, cur.mean_photon, rel_tol) and _stable(
            abs(prev.coherent_amp), abs(cur.coherent_amp), rel_tol
        ):
            if check_unique:
                _verify_unique(prev_liouv, prev.rho)
            return prev
        prev, prev_liouv = cur, cur_liouv
        cutoff = nxt
    raise CutoffExhaustedError(
        f"observables not stable at rel_tol={rel_tol:g} up to fock_cutoff={cap}"
    )


def g2_zero(rho: np.ndarray, dims) -> float | None:
    """Zero-delay second-order photon correlation <adag adag a a>/<adag a>^2.

    Returns None (absent, not an error) when the cavity occupation is below
    the floor of 1e-10.
    """
    dims = tuple(int(d) for d in dims)
    state = Operator(dims, rho)
    a = embed(annihilation(dims[-1] - 1), len(dims) - 1, dims)
    nbar = expectation(state, a.dag() @ a).real
    if nbar < PHOTON_FLOOR:
        return None
    aa = a @ a
    return expectation(state, aa.dag() @ aa).real / (nbar * nbar)
