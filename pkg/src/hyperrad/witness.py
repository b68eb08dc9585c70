"""Radiance witness, regime classification and semiclassical comparison.

The witness compares the steady-state cavity occupation of the coupled
two-atom system against twice that of a single antinode atom with otherwise
identical parameters:

    R = (n2 - 2 n1) / (2 n1).

R = 0 marks uncorrelated scattering, R = 1 the N^2 scaling of collective
free-space emission, and R > 1 emission beyond that bound. Exact-point
classes are widened to tolerance bands since swept values never hit 0 or 1
exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .model import SystemParams, collective_G_H
from .steady import SteadyStateResult, converge_cutoff

__all__ = [
    "RadianceClass",
    "RadiancePoint",
    "ReferenceDarkError",
    "SemiclassicalSingularityError",
    "classify",
    "radiance_witness",
    "semiclassical_field",
    "quantumness_ratio",
]

REFERENCE_FLOOR = 1e-12
QUANTUMNESS_FLOOR = 1e-10
DEFAULT_CLASS_BAND = 1e-3


class ReferenceDarkError(Exception):
    """Single-atom reference cavity is dark; R is undefined at this point."""


class SemiclassicalSingularityError(Exception):
    """Parameters sit on a pole of the semiclassical response."""


class RadianceClass(enum.IntEnum):
    """Six radiation regimes, ordered by increasing witness value."""

    EXTREMELY_SUBRADIANT = 0
    SUBRADIANT = 1
    UNCORRELATED = 2
    ENHANCED = 3
    SUPERRADIANT = 4
    HYPERRADIANT = 5

    @property
    def token(self) -> str:
        """Lowercase token used in CSV output."""
        return self.name.lower()


def classify(R: float, band: float = DEFAULT_CLASS_BAND) -> RadianceClass:
    """Map a witness value to its regime.

    The exact points R = 0 and R = 1 become bands of half-width ``band``;
    the boundary R = -0.5 belongs to the subradiant class.
    """
    if not math.isfinite(R):
        raise ValueError(f"R must be finite, got {R!r}")
    if band <= 0:
        raise ValueError(f"band must be > 0, got {band}")
    if abs(R) <= band:
        return RadianceClass.UNCORRELATED
    if abs(R - 1.0) <= band:
        return RadianceClass.SUPERRADIANT
    if R < -0.5:
        return RadianceClass.EXTREMELY_SUBRADIANT
    if R < 0.0:
        return RadianceClass.SUBRADIANT
    if R < 1.0:
        return RadianceClass.ENHANCED
    return RadianceClass.HYPERRADIANT


def semiclassical_field(params: SystemParams) -> complex:
    """Weak-excitation cavity amplitude from factorized atom-field moments.

    Derived from the steady state of the first-moment equations with
    <a Sz> -> <a><Sz> and <Sz> -> -1/2:

        <a> = -(eta/g) * N G / [ (gamma/2 + i Delta)(kappa/2 + i delta)/g^2 + N H ]

    with (G, H) from :func:`collective_G_H`. Vanishes for an out-of-phase
    pair (G = 0), without drive, and in the decoupled limit g -> 0.
    """
    if params.eta == 0.0 or params.g == 0.0:
        return 0j
    n = params.n_atoms
    g_fac, h_fac = collective_G_H(params)
    denom = (
        (params.gamma / 2.0 + 1j * params.delta_a)
        * (params.kappa / 2.0 + 1j * params.delta_c)
        / params.g**2
        + n * h_fac
    )
    if abs(denom) < 1e-14:
        raise SemiclassicalSingularityError(
            "parameters sit on the pole of the semiclassical response"
        )
    return -(params.eta / params.g) * n * g_fac / denom


def quantumness_ratio(result: SteadyStateResult) -> float | None:
    """|<a>|^2 / <adag a>: unity for a coherent field, below for quantum light.

    None when the cavity occupation is under the floor.
    """
    if result.mean_photon is None or result.mean_photon < QUANTUMNESS_FLOOR:
        return None
    return abs(result.coherent_amp) ** 2 / result.mean_photon


@dataclass
class RadiancePoint:
    """Witness value with its classification and the raw observables behind it."""

    params: SystemParams
    R: float
    regime: RadianceClass
    n1: float
    n2: float
    g2: float | None
    quantumness: float | None
    semiclassical_amp: complex | None
    cutoff_used: int
    cutoff_used_ref: int
    residual: float
    residual_ref: float


def reference_params(params: SystemParams) -> SystemParams:
    """Single-atom reference: drop atom 2, keep all rates, atom at an antinode."""
    return replace(params, n_atoms=1, phi_z=0.0)


def radiance_witness(
    params: SystemParams,
    rel_tol: float = 1e-6,
    *,
    class_band: float = DEFAULT_CLASS_BAND,
    reference: SteadyStateResult | None = None,
) -> RadiancePoint:
    """Solve the two-atom system and its single-atom reference, then form R.

    Both solves run :func:`hyperrad.steady.converge_cutoff` at identical
    (g, gamma, eta, delta_a, delta_c). A precomputed ``reference`` result may
    be supplied (it is independent of phi_z, so sweep engines cache it).
    """
    if params.n_atoms != 2:
        raise ValueError("radiance_witness requires a two-atom parameter set")
    two = converge_cutoff(params, rel_tol)
    one = reference if reference is not None else converge_cutoff(
        reference_params(params), rel_tol
    )
    n1 = one.mean_photon
    n2 = two.mean_photon
    if n1 < REFERENCE_FLOOR:
        raise ReferenceDarkError(
            f"single-atom reference occupation {n1:.3e} below {REFERENCE_FLOOR:.0e}; "
            "R is undefined"
        )
    R = (n2 - 2.0 * n1) / (2.0 * n1)
    try:
        amp = semiclassical_field(params)
    except SemiclassicalSingularityError:
        amp = None
    return RadiancePoint(
        params=params,
        R=R,
        regime=classify(R, class_band),
        n1=n1,
        n2=n2,
        g2=two.g2_zero,
        quantumness=quantumness_ratio(two),
        semiclassical_amp=amp,
        cutoff_used=two.cutoff_used,
        cutoff_used_ref=one.cutoff_used,
        residual=two.residual,
        residual_ref=one.residual,
    )
