"""Dense operators on truncated composite Hilbert spaces.

Conventions used throughout the package:

* hbar = 1 and all frequencies are measured in units of the first resonator
  frequency, so time is in units of 1/omega_1.
* Fock factors are ordered |0>, |1>, ..., |N-1>.
* Qubit factors are ordered (|down>, |up>); sigma_z|up> = +|up> and
  sigma_plus = |up><down|.
* Tensor factors appear in the order listed in the :class:`SpaceLayout`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8


class LayoutError(ValueError):
    """Operands live on different spaces, or a factor has the wrong kind."""


class StateError(ValueError):
    """A density matrix violates hermiticity, normalisation or positivity."""


@dataclass(frozen=True)
class Factor:
    kind: str  # "resonator" or "qubit"
    dim: int

    def __post_init__(self):
        if self.kind not in ("resonator", "qubit"):
            raise LayoutError(f"unknown factor kind {self.kind!r}")
        if self.dim < 2:
            raise LayoutError("every factor needs dimension >= 2")
        if self.kind == "qubit" and self.dim != 2:
            raise LayoutError("qubit factors are two-dimensional")

    def __str__(self) -> str:
        return f"resonator({self.dim})" if self.kind == "resonator" else "qubit"


def resonator(n_fock: int) -> Factor:
    return Factor("resonator", int(n_fock))


def qubit() -> Factor:
    return Factor("qubit", 2)


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered tensor-product structure of a truncated Hilbert space."""

    factors: tuple[Factor, ...]

    def __init__(self, factors: Iterable[Factor]):
        factors = tuple(factors)
        if not factors:
            raise LayoutError("a layout needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, *factors: Factor) -> "SpaceLayout":
        return cls(factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def indices(self, kind: str) -> list[int]:
        return [i for i, f in enumerate(self.factors) if f.kind == kind]

    def sub(self, keep: Iterable[int]) -> "SpaceLayout":
        return SpaceLayout(self.factors[i] for i in sorted(keep))

    def identity(self) -> "Operator":
        return Operator(self, np.eye(self.dim, dtype=complex))

    def zeros(self) -> "Operator":
        return Operator(self, np.zeros((self.dim, self.dim), dtype=complex))

    def __str__(self) -> str:
        return " x ".join(str(f) for f in self.factors)


def _frozen(data) -> np.ndarray:
    arr = np.array(data, dtype=complex)
    arr.flags.writeable = False
    return arr


def _same_layout(*layouts: SpaceLayout) -> SpaceLayout:
    first = layouts[0]
    for other in layouts[1:]:
        if other != first:
            raise LayoutError(f"layout mismatch: {first} vs {other}")
    return first


@dataclass(frozen=True, eq=False)
class Operator:
    """Immutable dense complex matrix tagged with the space it acts on."""

    layout: SpaceLayout
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = _frozen(self.data)
        n = self.layout.dim
        if data.shape != (n, n):
            raise LayoutError(f"operator shape {data.shape} does not match layout dimension {n}")
        object.__setattr__(self, "data", data)

    def dag(self) -> "Operator":
        return Operator(self.layout, self.data.conj().T)

    def __add__(self, other: "Operator") -> "Operator":
        return compose(self, other, "add")

    def __sub__(self, other: "Operator") -> "Operator":
        return compose(self, other, "sub")

    def __matmul__(self, other: "Operator") -> "Operator":
        return compose(self, other, "mul")

    def __mul__(self, c: complex) -> "Operator":
        return scale(self, c)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return scale(self, -1.0)

    def __truediv__(self, c: complex) -> "Operator":
        return scale(self, 1.0 / c)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def __repr__(self) -> str:
        return f"Operator({self.layout})"


def compose(a: Operator, b: Operator, op: str) -> Operator:
    """Combine two operators on the same layout: add, sub, mul or commutator."""
    layout = _same_layout(a.layout, b.layout)
    if op == "add":
        data = a.data + b.data
    elif op == "sub":
        data = a.data - b.data
    elif op == "mul":
        data = a.data @ b.data
    elif op == "commutator":
        data = a.data @ b.data - b.data @ a.data
    else:
        raise ValueError(f"unknown operation {op!r}")
    return Operator(layout, data)


def scale(a: Operator, c: complex) -> Operator:
    return Operator(a.layout, a.data * c)


def dagger(a: Operator) -> Operator:
    return a.dag()


def commutator(a: Operator, b: Operator) -> Operator:
    return compose(a, b, "commutator")


def embed(layout: SpaceLayout, factor_index: int, local: np.ndarray) -> Operator:
    """Place ``local`` on one factor and identities everywhere else."""
    if not 0 <= factor_index < len(layout.factors):
        raise LayoutError(f"factor index {factor_index} out of range for {layout}")
    mats = [np.eye(d, dtype=complex) for d in layout.dims]
    mats[factor_index] = np.asarray(local, dtype=complex)
    return Operator(layout, reduce(np.kron, mats))


def _factor(layout: SpaceLayout, index: int, kind: str) -> Factor:
    if not 0 <= index < len(layout.factors):
        raise LayoutError(f"factor index {index} out of range for {layout}")
    f = layout.factors[index]
    if f.kind != kind:
        raise LayoutError(f"factor {index} is a {f.kind}, expected a {kind}")
    return f


def annihilation(layout: SpaceLayout, factor_index: int) -> Operator:
    """Truncated bosonic lowering operator a|n> = sqrt(n)|n-1> on one resonator factor."""
    n = _factor(layout, factor_index, "resonator").dim
    a = np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)
    return embed(layout, factor_index, a)


def number(layout: SpaceLayout, factor_index: int) -> Operator:
    n = _factor(layout, factor_index, "resonator").dim
    return embed(layout, factor_index, np.diag(np.arange(n, dtype=float)))


_PAULI = {
    # basis order (down, up)
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
    "plus": np.array([[0, 0], [1, 0]], dtype=complex),
    "minus": np.array([[0, 1], [0, 0]], dtype=complex),
}


def pauli(layout: SpaceLayout, factor_index: int, kind: str) -> Operator:
    """Embedded Pauli operator; ``kind`` is one of x, y, z, plus, minus.

    sigma_y is fixed by sigma_y = -i(sigma_plus - sigma_minus), which keeps
    [sigma_x, sigma_y] = 2i sigma_z in the (down, up) ordering.
    """
    _factor(layout, factor_index, "qubit")
    try:
        local = _PAULI[kind]
    except KeyError:
        raise ValueError(f"unknown Pauli kind {kind!r}") from None
    return embed(layout, factor_index, local)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density operator on a layout."""

    layout: SpaceLayout
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = _frozen(self.data)
        n = self.layout.dim
        if data.shape != (n, n):
            raise LayoutError(f"state shape {data.shape} does not match layout dimension {n}")
        object.__setattr__(self, "data", data)
        check_state(data)

    @classmethod
    def from_ket(cls, layout: SpaceLayout, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(layout, np.outer(psi, psi.conj()))

    @classmethod
    def product(cls, layout: SpaceLayout, kets: Sequence) -> "DensityMatrix":
        """Product of per-factor kets, one per factor in layout order."""
        if len(kets) != len(layout.factors):
            raise LayoutError("need one ket per factor")
        psi = reduce(np.kron, [np.asarray(k, dtype=complex) for k in kets])
        return cls.from_ket(layout, psi)

    @classmethod
    def maximally_mixed(cls, layout: SpaceLayout) -> "DensityMatrix":
        return cls(layout, np.eye(layout.dim) / layout.dim)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data.conj().T, self.data)))

    def __repr__(self) -> str:
        return f"DensityMatrix({self.layout})"


def check_state(data: np.ndarray, step: int | None = None) -> None:
    """Raise :class:`StateError` when hermiticity, trace or positivity fails."""
    where = "" if step is None else f" at step {step}"
    herm = np.max(np.abs(data - data.conj().T))
    if herm > HERMITIAN_TOL:
        raise StateError(f"state not Hermitian{where}: defect {herm:.3e}")
    tr = np.trace(data)
    if abs(tr - 1.0) > TRACE_TOL:
        raise StateError(f"state trace {tr.real:.12g}{where} deviates from 1")
    lam = np.linalg.eigvalsh(0.5 * (data + data.conj().T))[0]
    if lam < -POSITIVITY_TOL:
        raise StateError(f"state has negative eigenvalue {lam:.3e}{where}")


def fock(n_fock: int, n: int) -> np.ndarray:
    ket = np.zeros(n_fock, dtype=complex)
    ket[n] = 1.0
    return ket


def coherent(n_fock: int, beta: complex) -> np.ndarray:
    """Truncated coherent-state ket, renormalised on the Fock cutoff."""
    n = np.arange(n_fock)
    log_fact = np.array([0.0] + list(np.cumsum(np.log(np.arange(1, n_fock)))))
    if beta == 0:
        return fock(n_fock, 0)
    amp = np.exp(n * np.log(complex(beta)) - 0.5 * log_fact)
    return amp / np.linalg.norm(amp)


UP = np.array([0, 1], dtype=complex)
DOWN = np.array([1, 0], dtype=complex)


def expectation(rho: DensityMatrix, a: Operator) -> complex:
    _same_layout(rho.layout, a.layout)
    # trace(rho A) without forming the product
    return complex(np.sum(rho.data * a.data.T))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the factors listed in ``keep``."""
    keep = sorted(set(keep))
    if not keep:
        raise LayoutError("partial_trace needs at least one factor to keep")
    dims = rho.layout.dims
    n = len(dims)
    if any(not 0 <= k < n for k in keep):
        raise LayoutError(f"keep indices {keep} out of range for {rho.layout}")
    t = rho.data.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = int(np.prod([dims[i] for i in keep]))
    return DensityMatrix(rho.layout.sub(keep), reduced.reshape(d, d))
