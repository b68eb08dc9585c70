"""Model builders for two coherently driven atoms coupled to a lossy cavity.

Units: hbar = 1 and the cavity decay rate kappa is the frequency unit, so
every rate in :class:`SystemParams` is dimensionless (a multiple of kappa).
The rotating-frame Hamiltonian has three parts,

* ``h0``: detuning terms  Delta * (Sz_1 + Sz_2) + delta * adag a,
* ``hi``: excitation-conserving atom-cavity exchange
  sum_i g_i (S+_i a + S-_i adag) with g_1 = g (antinode) and
  g_2 = g cos(phi_z) set by the axial position of the second atom,
* ``hl``: transverse coherent drive  eta * sum_i (S+_i + S-_i),

and dissipation enters through collapse operators sqrt(gamma) S-_i and
sqrt(kappa) a in the standard Lindblad form
(rate/2) (2 C rho Cdag - Cdag C rho - rho Cdag C).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np
import scipy.sparse as sp

from .operators import Operator, annihilation, embed, kron, spin_ops

__all__ = [
    "SystemParams",
    "AtomCoupling",
    "Superoperator",
    "hilbert_dims",
    "atom_couplings",
    "dicke_couplings",
    "collective_G_H",
    "build_h0",
    "build_hi",
    "build_hl",
    "build_hamiltonian",
    "collapse_operators",
    "build_liouvillian",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the driven atom-cavity system, in units of kappa.

    ``phi_z`` is the interatomic phase 2*pi*dz/lambda_C; any finite angle is
    accepted and stored reduced to [0, 2*pi). ``n_atoms`` selects the two-atom
    system or the single-atom reference (atom at an antinode). ``fock_cutoff``
    is the photon capacity of the truncated cavity space.
    """

    g: float
    gamma: float
    eta: float
    delta_c: float = 0.0
    delta_a: float = 0.0
    phi_z: float = 0.0
    n_atoms: int = 2
    fock_cutoff: int = 4
    kappa: float = 1.0

    def __post_init__(self):
        problems = []
        for name in ("g", "gamma", "eta", "delta_c", "delta_a", "phi_z", "kappa"):
            value = getattr(self, name)
            if not math.isfinite(value):
                problems.append(f"{name} must be finite, got {value!r}")
        if not problems:
            object.__setattr__(self, "phi_z", float(self.phi_z) % _TWO_PI)
        if self.g < 0:
            problems.append(f"g must be >= 0, got {self.g}")
        if self.gamma < 0:
            problems.append(f"gamma must be >= 0, got {self.gamma}")
        if self.eta < 0:
            problems.append(f"eta must be >= 0, got {self.eta}")
        if self.kappa <= 0:
            problems.append(f"kappa must be > 0, got {self.kappa}")
        if self.n_atoms not in (1, 2):
            problems.append(f"n_atoms must be 1 or 2, got {self.n_atoms}")
        if not isinstance(self.fock_cutoff, (int, np.integer)) or self.fock_cutoff < 1:
            problems.append(f"fock_cutoff must be an integer >= 1, got {self.fock_cutoff!r}")
        if problems:
            raise ValueError("; ".join(problems))


@dataclass(frozen=True)
class AtomCoupling:
    """Per-atom cavity couplings; atom 1 sits at an antinode so g1 = g."""

    g1: float
    g2: float


@dataclass(eq=False)
class Superoperator:
    """Generator of the dissipative dynamics acting on vectorized densities.

    ``data`` is the sparse dim^2 x dim^2 matrix L with
    d vec(rho)/dt = L vec(rho) in the column-major convention of
    :mod:`hyperrad.operators`.
    """

    dim: int
    data: sp.spmatrix = field(repr=False)

    def __post_init__(self):
        n = self.dim * self.dim
        if self.data.shape != (n, n):
            raise ValueError(
                f"superoperator shape {self.data.shape} does not match dim {self.dim}"
            )


def hilbert_dims(params: SystemParams) -> tuple[int, ...]:
    """Subsystem dimensions, ordered atom 1 (x) [atom 2 (x)] cavity."""
    nc = params.fock_cutoff + 1
    return (2, nc) if params.n_atoms == 1 else (2, 2, nc)


def atom_couplings(params: SystemParams) -> AtomCoupling:
    """Position-dependent couplings: g1 = g, g2 = g cos(phi_z).

    For a single atom only g1 is meaningful.
    """
    return AtomCoupling(g1=params.g, g2=params.g * math.cos(params.phi_z))


def dicke_couplings(params: SystemParams) -> tuple[float, float]:
    """Couplings of the symmetric/antisymmetric collective states to the cavity.

    Returns (g_plus, g_minus) = g (1 +- cos phi_z) / sqrt(2). Requires the
    two-atom system.
    """
    if params.n_atoms != 2:
        raise ValueError("dicke_couplings is defined for the two-atom system only")
    c = math.cos(params.phi_z)
    return (
        params.g * (1.0 + c) / math.sqrt(2.0),
        params.g * (1.0 - c) / math.sqrt(2.0),
    )


def collective_G_H(params: SystemParams) -> tuple[float, float]:
    """Collective overlap factors of the drive (G) and the cavity mode (H).

    G averages cos(2 pi z_i / lambda) over the atoms, H averages its square.
    For two atoms these reduce to G = (1 + cos phi_z)/2 and
    H = (1 + cos^2 phi_z)/2; a single antinode atom has G = H = 1.
    """
    if params.n_atoms == 1:
        return 1.0, 1.0
    c = math.cos(params.phi_z)
    return (1.0 + c) / 2.0, (1.0 + c * c) / 2.0


def _site_operators(params: SystemParams):
    """Embedded ladder/inversion operators and the cavity mode for params."""
    dims = hilbert_dims(params)
    cavity_site = len(dims) - 1
    sp_, sm_, sz_ = spin_ops()
    a = embed(annihilation(params.fock_cutoff), cavity_site, dims)
    sps = [embed(sp_, i, dims) for i in range(params.n_atoms)]
    sms = [embed(sm_, i, dims) for i in range(params.n_atoms)]
    szs = [embed(sz_, i, dims) for i in range(params.n_atoms)]
    return dims, a, sps, sms, szs


def build_h0(params: SystemParams) -> Operator:
    """Detuning term: delta_a * sum_i Sz_i + delta_c * adag a. Diagonal."""
    dims, a, _, _, szs = _site_operators(params)
    h = params.delta_a * reduce(Operator.__add__, szs) + params.delta_c * (a.dag() @ a)
    return h


def build_hi(params: SystemParams) -> Operator:
    """Atom-cavity exchange term: sum_i g_i (S+_i a + S-_i adag)."""
    _, a, sps, sms, _ = _site_operators(params)
    coup = atom_couplings(params)
    gs = (coup.g1, coup.g2)[: params.n_atoms]
    terms = [gi * (spi @ a + smi @ a.dag()) for gi, spi, smi in zip(gs, sps, sms)]
    return reduce(Operator.__add__, terms)


def build_hl(params: SystemParams) -> Operator:
    """Coherent drive term: eta * sum_i (S+_i + S-_i). Identity on the cavity."""
    _, _, sps, sms, _ = _site_operators(params)
    terms = [params.eta * (spi + smi) for spi, smi in zip(sps, sms)]
    return reduce(Operator.__add__, terms)


def build_hamiltonian(params: SystemParams) -> Operator:
    return build_h0(params) + build_hi(params) + build_hl(params)


def collapse_operators(params: SystemParams) -> list[Operator]:
    """Collapse operators sqrt(gamma) S-_i per atom and sqrt(kappa) a."""
    _, a, _, sms, _ = _site_operators(params)
    ops = [math.sqrt(params.gamma) * smi for smi in sms]
    ops.append(math.sqrt(params.kappa) * a)
    return ops


def _lift_left(m: sp.spmatrix, ident: sp.spmatrix) -> sp.spmatrix:
    # vec(M rho) = (I kron M) vec(rho)
    return sp.kron(ident, m, format="csr")


def _lift_right(m: sp.spmatrix, ident: sp.spmatrix) -> sp.spmatrix:
    # vec(rho M) = (M.T kron I) vec(rho)
    return sp.kron(m.T, ident, format="csr")


def _commutator_part(m: np.ndarray) -> sp.spmatrix:
    """Superoperator of -i [M, .]."""
    ms = sp.csr_matrix(m)
    ident = sp.identity(m.shape[0], dtype=np.complex128, format="csr")
    return -1j * (_lift_left(ms, ident) - _lift_right(ms, ident))


def _dissipator_part(c: np.ndarray) -> sp.spmatrix:
    """Superoperator of C . Cdag - (Cdag C . + . Cdag C)/2."""
    cs = sp.csr_matrix(c)
    ident = sp.identity(c.shape[0], dtype=np.complex128, format="csr")
    cdc = (cs.conj().T @ cs).tocsr()
    sandwich = sp.kron(cs.conj(), cs, format="csr")
    return sandwich - 0.5 * (_lift_left(cdc, ident) + _lift_right(cdc, ident))


@lru_cache(maxsize=32)
def _liouvillian_components(n_atoms: int, fock_cutoff: int):
    """Parameter-independent sparse pieces of the generator.

    The generator is linear in (delta_a, delta_c, g1, g2, eta, gamma, kappa),
    so it can be assembled per parameter point as a scalar combination of
    these cached components. Cached per (n_atoms, fock_cutoff).
    """
    probe = SystemParams(
        g=1.0, gamma=1.0, eta=1.0, n_atoms=n_atoms, fock_cutoff=fock_cutoff
    )
    _, a, sps, sms, _ = _site_operators(probe)
    sp_z = spin_ops()[2]
    dims = hilbert_dims(probe)
    szs = [embed(sp_z, i, dims) for i in range(n_atoms)]

    detune_atoms = _commutator_part(reduce(Operator.__add__, szs).data)
    detune_cavity = _commutator_part((a.dag() @ a).data)
    exchange = [
        _commutator_part((spi @ a + smi @ a.dag()).data)
        for spi, smi in zip(sps, sms)
    ]
    drive = _commutator_part(reduce(Operator.__add__, [p + m for p, m in zip(sps, sms)]).data)
    decay_atoms = reduce(lambda x, y: x + y, [_dissipator_part(smi.data) for smi in sms])
    decay_cavity = _dissipator_part(a.data)
    return detune_atoms, detune_cavity, exchange, drive, decay_atoms, decay_cavity


def build_liouvillian(params: SystemParams) -> Superoperator:
    """Vectorized generator L with d vec(rho)/dt = L vec(rho).

    Combines the commutator of h0 + hi + hl with the atomic decay and cavity
    decay dissipators, in the column-major vectorization convention.
    """
    detune_atoms, detune_cavity, exchange, drive, decay_atoms, decay_cavity = (
        _liouvillian_components(params.n_atoms, params.fock_cutoff)
    )
    coup = atom_couplings(params)
    gs = (coup.g1, coup.g2)[: params.n_atoms]
    data = (
        params.delta_a * detune_atoms
        + params.delta_c * detune_cavity
        + params.eta * drive
        + params.gamma * decay_atoms
        + params.kappa * decay_cavity
    )
    for gi, ex in zip(gs, exchange):
        data = data + gi * ex
    dim = 2 ** params.n_atoms * (params.fock_cutoff + 1)
    return Superoperator(dim=dim, data=data.tocsr())
