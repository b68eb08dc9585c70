"""Dense complex operator algebra on composite qubit/Fock spaces.

Conventions, fixed once and used everywhere:

* qubit basis ordering is ``{|g>, |e>}`` (ground first),
* Fock basis ordering is ``{|0>, ..., |n_max>}``,
* composite ordering is atom 1 (x) atom 2 (x) cavity,
* density matrices are vectorized column-major, so that
  ``vec(A @ rho @ B) == kron(B.T, A) @ vec(rho)``.

All operators are plain dense ``complex128`` matrices wrapped together with
the list of subsystem dimensions they act on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Operator",
    "StateVector",
    "annihilation",
    "spin_ops",
    "kron",
    "embed",
    "expectation",
    "identity",
    "basis_ket",
    "vec",
    "unvec",
]


def _as_complex(a) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Operator:
    """A square complex matrix tagged with the subsystem dimensions it acts on.

    Immutable after construction; the wrapped array is marked read-only, so
    instances can be shared freely across threads and worker processes.
    """

    dims: tuple[int, ...]
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "data", _as_complex(self.data))
        if any(d < 2 for d in self.dims):
            raise ValueError(f"subsystem dimensions must be >= 2, got {self.dims}")
        side = math.prod(self.dims)
        if self.data.shape != (side, side):
            raise ValueError(
                f"data shape {self.data.shape} does not match dims {self.dims} "
                f"(expected {(side, side)})"
            )

    @property
    def side(self) -> int:
        return self.data.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.dims, self.data.conj().T)

    def _check(self, other: "Operator"):
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.dims, self.data + other.data)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.dims, self.data - other.data)

    def __neg__(self) -> "Operator":
        return Operator(self.dims, -self.data)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.dims, self.data * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            if self.dims != other.dims:
                raise ValueError(f"dimension mismatch: {self.dims} vs {other.dims}")
            return StateVector(other.dims, self.data @ other.data)
        self._check(other)
        return Operator(self.dims, self.data @ other.data)


@dataclass(frozen=True)
class StateVector:
    """A ket on a composite space, tagged with subsystem dimensions."""

    dims: tuple[int, ...]
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "data", _as_complex(self.data))
        if self.data.shape != (math.prod(self.dims),):
            raise ValueError(
                f"vector length {self.data.shape} does not match dims {self.dims}"
            )

    def density(self) -> Operator:
        """Projector |psi><psi| as an Operator."""
        return Operator(self.dims, np.outer(self.data, self.data.conj()))

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))


def identity(*dims: int) -> Operator:
    side = math.prod(dims)
    return Operator(tuple(dims), np.eye(side, dtype=np.complex128))


def annihilation(cutoff: int) -> Operator:
    """Bosonic lowering operator on the truncated Fock space {|0>..|cutoff>}.

    Matrix elements <n-1|a|n> = sqrt(n); the space has dimension cutoff + 1.
    """
    if not isinstance(cutoff, (int, np.integer)) or cutoff < 1:
        raise ValueError(f"cutoff must be an integer >= 1, got {cutoff!r}")
    off = np.sqrt(np.arange(1, cutoff + 1, dtype=np.float64))
    return Operator((cutoff + 1,), np.diag(off, k=1))


def spin_ops() -> tuple[Operator, Operator, Operator]:
    """Single-qubit ladder and inversion operators (S+, S-, Sz).

    S+ = |e><g|, S- = |g><e|, Sz = (|e><e| - |g><g|)/2 in the {|g>, |e>} basis.
    """
    sp = Operator((2,), np.array([[0, 0], [1, 0]], dtype=np.complex128))
    sm = sp.dag()
    sz = Operator((2,), np.diag([-0.5, 0.5]).astype(np.complex128))
    return sp, sm, sz


def kron(a: Operator, b: Operator) -> Operator:
    """Kronecker product; dims are concatenated left-to-right."""
    return Operator(a.dims + b.dims, np.kron(a.data, b.data))


def embed(op: Operator, site: int, dims) -> Operator:
    """Lift a single-subsystem operator to the full space, identity elsewhere.

    ``site`` indexes into ``dims``; the ordering convention is
    atom 1 (x) atom 2 (x) cavity.
    """
    dims = tuple(int(d) for d in dims)
    if not 0 <= site < len(dims):
        raise IndexError(f"site {site} out of range for dims {dims}")
    if len(op.dims) != 1 or op.dims[0] != dims[site]:
        raise ValueError(
            f"operator dims {op.dims} do not match target dims[{site}] = {dims[site]}"
        )
    out = None
    for k, d in enumerate(dims):
        factor = op if k == site else identity(d)
        out = factor if out is None else kron(out, factor)
    return out


def expectation(rho: Operator, op: Operator) -> complex:
    """Tr(rho @ op)."""
    if rho.dims != op.dims:
        raise ValueError(f"dimension mismatch: {rho.dims} vs {op.dims}")
    return complex(np.einsum("ij,ji->", rho.data, op.data))


def basis_ket(dims, indices) -> StateVector:
    """Product basis ket |i_0, i_1, ...> on the composite space."""
    dims = tuple(int(d) for d in dims)
    indices = tuple(int(i) for i in indices)
    if len(indices) != len(dims):
        raise ValueError("one index per subsystem required")
    flat = int(np.ravel_multi_index(indices, dims))
    data = np.zeros(math.prod(dims), dtype=np.complex128)
    data[flat] = 1.0
    return StateVector(dims, data)


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-major (column-stacking) vectorization of a matrix."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, side: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(v).reshape((side, side), order="F")
