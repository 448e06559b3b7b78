"""Drive engineering and the Hamiltonians of the two-resonator / two-qubit circuit.

Units: omega_1 = 1, hbar = 1. A layout for the circuit lists the resonator
factors first and then the qubit factors; resonator j couples to qubit j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qcore import LayoutError, Operator, SpaceLayout, annihilation, pauli, qubit, resonator

# "much greater than" is read as a ratio of at least this much.
HIERARCHY_RATIO = 2.0


# --------------------------------------------------------------------------
# Bessel functions of the first kind, orders 0 and 1
# --------------------------------------------------------------------------

_SERIES_TERMS = 40


def _bessel_series(order: int, x: float) -> float:
    """Ascending power series; accurate to ~1e-15 absolute for |x| <= 4."""
    half = 0.5 * x
    term = half**order / math.factorial(order)
    total = term
    h2 = half * half
    for k in range(1, _SERIES_TERMS):
        term *= -h2 / (k * (k + order))
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


def bessel_j0(x: float) -> float:
    if abs(x) > 4.0:
        raise ValueError("series evaluation is only used for |x| <= 4")
    return _bessel_series(0, x)


def bessel_j1(x: float) -> float:
    if abs(x) > 4.0:
        raise ValueError("series evaluation is only used for |x| <= 4")
    return _bessel_series(1, x)


# --------------------------------------------------------------------------
# Parameters
# --------------------------------------------------------------------------


class HierarchyError(ValueError):
    pass


def drive_frequencies(eps0: float, omega: float, delta: float) -> tuple[float, float]:
    """Two-tone drive frequencies Omega_pm = eps0 +/- (omega + delta)."""
    if not omega + delta > 0:
        raise HierarchyError(f"omega + delta = {omega + delta} must be positive")
    plus = eps0 + (omega + delta)
    minus = eps0 - (omega + delta)
    if minus <= 0:
        raise HierarchyError(f"Omega_minus = {minus} <= 0: need eps0 > omega + delta")
    return plus, minus


@dataclass(frozen=True)
class DriveParams:
    """Static gap plus two-tone modulation of one qubit."""

    eps0: float
    lambda_plus: float
    lambda_minus: float
    omega_plus: float
    omega_minus: float

    def __post_init__(self):
        # Omega > lambda is advisory (see check_hierarchy); positivity is not.
        for name in ("lambda_plus", "lambda_minus", "omega_plus", "omega_minus"):
            if getattr(self, name) <= 0:
                raise HierarchyError(f"{name} must be positive")

    @classmethod
    def derived(cls, eps0: float, lambda_plus: float, lambda_minus: float,
                omega: float, delta: float) -> "DriveParams":
        plus, minus = drive_frequencies(eps0, omega, delta)
        return cls(eps0, lambda_plus, lambda_minus, plus, minus)

    def phase(self, t):
        """f(t) = (eps0/2) t + sum_a (lambda_a/Omega_a) sin(Omega_a t)."""
        return (0.5 * self.eps0 * t
                + self.lambda_plus / self.omega_plus * np.sin(self.omega_plus * t)
                + self.lambda_minus / self.omega_minus * np.sin(self.omega_minus * t))


def _default_drive() -> DriveParams:
    return DriveParams.derived(5.0, 2.0, 2.0, 1.0, 0.1)


@dataclass(frozen=True)
class SystemParams:
    """Circuit parameters; defaults are the single-resonator validation set
    (eps0 = 5, gamma = 2, omega = 1, g = 0.05, delta = 0.1, lambda_pm = 2)."""

    omega1: float = 1.0
    omega2: float = 1.0
    g1: float = 0.05
    g2: float = 0.05
    J: float = 0.0
    delta: float = 0.1
    gamma1: float = 2.0
    gamma2: float = 2.0
    kappa1: float = 0.0
    kappa2: float = 0.0
    drives: tuple[DriveParams, ...] = field(default_factory=lambda: (_default_drive(), _default_drive()))

    def __post_init__(self):
        for name in ("omega1", "omega2", "g1", "g2", "J", "gamma1", "gamma2", "kappa1", "kappa2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        object.__setattr__(self, "drives", tuple(self.drives))
        if not self.drives:
            raise ValueError("at least one DriveParams is required")

    def g(self, j: int) -> float:
        return (self.g1, self.g2)[j]

    def omega(self, j: int) -> float:
        return (self.omega1, self.omega2)[j]

    def gamma(self, j: int) -> float:
        return (self.gamma1, self.gamma2)[j]

    def drive(self, j: int) -> DriveParams:
        return self.drives[j] if j < len(self.drives) else self.drives[-1]


@dataclass(frozen=True)
class GCoefficients:
    """Drive-induced weights of the co- and counter-rotating sidebands.

    Values produced by :func:`bessel_g` satisfy |G| <= 1; hand-built values
    (e.g. G_plus = cosh r for exact squeezing) are accepted as is.
    """

    g_plus: float
    g_minus: float

    @property
    def ratio(self) -> float:
        return self.g_minus / self.g_plus

    def swapped(self) -> "GCoefficients":
        return GCoefficients(self.g_minus, self.g_plus)


def bessel_g(drive: DriveParams) -> GCoefficients:
    """G_+ = J0(2l+/O+) J1(2l-/O-) and G_- = J0(2l-/O-) J1(2l+/O+)."""
    xp = 2.0 * drive.lambda_plus / drive.omega_plus
    xm = 2.0 * drive.lambda_minus / drive.omega_minus
    return GCoefficients(bessel_j0(xp) * bessel_j1(xm), bessel_j0(xm) * bessel_j1(xp))


def check_hierarchy(params: SystemParams) -> list[str]:
    """Advisory check of eps0 >> gamma >> omega >> g, J, delta and Omega > lambda.

        >>> check_hierarchy(SystemParams())
        []
    """
    r = HIERARCHY_RATIO
    warnings: list[str] = []

    def much_greater(big: float, small: float, label: str):
        if small != 0 and big < r * abs(small):
            warnings.append(f"{label}: {big:g} is not >= {r:g} x {abs(small):g}")

    omega = max(params.omega1, params.omega2)
    n_qubits = min(len(params.drives), 2)
    for j in range(n_qubits):
        d = params.drive(j)
        much_greater(d.eps0, params.gamma(j), f"qubit {j + 1}: eps0 >> gamma")
        much_greater(params.gamma(j), omega, f"qubit {j + 1}: gamma >> omega")
        much_greater(omega, params.g(j), f"qubit {j + 1}: omega >> g")
        if not d.omega_plus > d.lambda_plus:
            warnings.append(f"qubit {j + 1}: Omega_plus > lambda_plus violated")
        if not d.omega_minus > d.lambda_minus:
            warnings.append(f"qubit {j + 1}: Omega_minus > lambda_minus violated")
    much_greater(omega, params.J, "omega >> J")
    much_greater(omega, params.delta, "omega >> delta")
    return warnings


# --------------------------------------------------------------------------
# Layouts and Hamiltonians
# --------------------------------------------------------------------------


def circuit_layout(n_resonators: int, n_fock: int, with_qubits: bool = True) -> SpaceLayout:
    factors = [resonator(n_fock) for _ in range(n_resonators)]
    if with_qubits:
        factors += [qubit() for _ in range(n_resonators)]
    return SpaceLayout(factors)


def _split(layout: SpaceLayout, need_qubits: bool = True) -> tuple[list[int], list[int]]:
    res = layout.indices("resonator")
    qub = layout.indices("qubit")
    if len(res) not in (1, 2):
        raise LayoutError(f"expected one or two resonators, got {len(res)}")
    if need_qubits and len(qub) != len(res):
        raise LayoutError("each resonator needs its own qubit")
    return res, qub


class InteractionHamiltonian:
    """Callable t -> H_c(t) in the interaction picture with respect to H_0(t).

    The qubit phase uses the exact f(t), so no Bessel truncation enters. With
    ``modulated_coupling`` the resonator coupling is J(t) =
    J[cos((w1 + w2 + 2 delta) t) + cos((w1 - w2) t)] instead of a constant J.
    """

    def __init__(self, params: SystemParams, layout: SpaceLayout, modulated_coupling: bool = False):
        res, qub = _split(layout)
        self.params = params
        self.layout = layout
        self.modulated = modulated_coupling
        self._a = [annihilation(layout, i).data for i in res]
        self._sp = [pauli(layout, i, "plus").data for i in qub]
        self._drives = [params.drive(j) for j in range(len(res))]
        self._omegas = [params.omega(j) for j in range(len(res))]
        self._g = [params.g(j) for j in range(len(res))]
        self.max_frequency = max(d.omega_plus for d in self._drives)

    def matrix(self, t: float) -> np.ndarray:
        h = np.zeros((self.layout.dim, self.layout.dim), dtype=complex)
        for a, sp, d, w, g in zip(self._a, self._sp, self._drives, self._omegas, self._g):
            if g == 0:
                continue
            # g (sp e^{2if} + h.c.) a e^{-iwt} + h.c.
            x = np.exp(2j * d.phase(t))
            term = g * np.exp(-1j * w * t) * (x * sp + np.conj(x) * sp.conj().T) @ a
            h += term + term.conj().T
        p = self.params
        if len(self._a) == 2 and p.J != 0:
            a1, a2 = self._a
            w1, w2 = self._omegas
            coupling = p.J
            if self.modulated:
                coupling = p.J * (np.cos((w1 + w2 + 2 * p.delta) * t) + np.cos((w1 - w2) * t))
            term = coupling * (np.exp(1j * (w1 - w2) * t) * a1.conj().T @ a2
                               + np.exp(-1j * (w1 + w2) * t) * a1 @ a2)
            h += term + term.conj().T
        return h

    def __call__(self, t: float) -> Operator:
        return Operator(self.layout, self.matrix(t))


def full_interaction_hamiltonian(t: float, params: SystemParams, layout: SpaceLayout) -> Operator:
    return InteractionHamiltonian(params, layout)(t)


def _effective(params: SystemParams, layout: SpaceLayout, counter_rotating: bool) -> Operator:
    res, qub = _split(layout)
    h = layout.zeros()
    a = [annihilation(layout, i) for i in res]
    for j, aj in enumerate(a):
        h = h - params.delta * (aj.dag() @ aj)
        gj = params.g(j)
        if gj:
            coeff = bessel_g(params.drive(j))
            sp = pauli(layout, qub[j], "plus")
            term = gj * (coeff.g_plus * (sp @ aj) + coeff.g_minus * (sp @ aj.dag()))
            h = h + term + term.dag()
    if len(a) == 2 and params.J:
        a1, a2 = a
        hop = a1.dag() @ a2
        h = h + params.J * (hop + hop.dag())
        if counter_rotating:
            pair = a1 @ a2
            h = h + params.J * (pair + pair.dag())
    return h


def effective_hamiltonian_rwa(params: SystemParams, layout: SpaceLayout) -> Operator:
    """Number-conserving effective Hamiltonian in the frame rotating at delta.

    H = -delta sum a_j^+ a_j + J (a1^+ a2 + h.c.)
        + sum_j g_j [(G_j+ s_j^+ a_j + G_j- s_j^+ a_j^+) + h.c.]
    """
    if params.omega1 != params.omega2:
        raise ValueError("the effective description requires omega1 == omega2")
    return _effective(params, layout, counter_rotating=False)


def effective_hamiltonian_nonrwa(params: SystemParams, layout: SpaceLayout) -> Operator:
    """As :func:`effective_hamiltonian_rwa` but with J (a1 + a1^+)(a2 + a2^+) coupling."""
    res, _ = _split(layout)
    if len(res) != 2:
        raise LayoutError("the counter-rotating coupling needs two resonators")
    return _effective(params, layout, counter_rotating=True)
