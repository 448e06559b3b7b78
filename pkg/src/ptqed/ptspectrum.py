"""First-moment matrix of the loss/gain resonator pair and its PT phases.

The moments alpha = (<a1>, <a1^+>, <a2>, <a2^+>) obey i d(alpha)/dt = M alpha with

    M = [[ d - i g1,        0,   J,        J ],
         [        0, -d - i g1,  -J,       -J ],
         [        J,        J,  d + i g2,   0 ],
         [       -J,       -J,   0,  -d + i g2 ]]

where g1 (g2) is the effective loss (gain) rate of resonator 1 (2). This
matrix is generated by H = +d sum a^+a; the eliminated models in
:mod:`ptqed.lindblad` carry H = -d sum a^+a, whose moment matrix is M(-d).
M(d) and M(-d) are similar, so every spectral statement below holds for both.
"""

from __future__ import annotations

import cmath
import enum
import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .engineer import GCoefficients

REALITY_TOL = 1e-10
EP_GAP_TOL = 1e-6
EP_COND_TOL = 1e6
POLISH_TOL = 1e-12
CLUSTER_TOL = 1e-6

_P = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2))


class DominanceError(ValueError):
    """Resonator 1 must be loss dominated and resonator 2 gain dominated."""


class PolishingError(RuntimeError):
    pass


@dataclass(frozen=True)
class EffectiveRates:
    gamma_tilde_1: float
    gamma_tilde_2: float

    def __post_init__(self):
        if self.gamma_tilde_1 < 0 or self.gamma_tilde_2 < 0:
            raise ValueError("effective rates are magnitudes and must be >= 0")

    @classmethod
    def balanced(cls, rate: float) -> "EffectiveRates":
        return cls(rate, rate)

    @property
    def mean(self) -> float:
        return 0.5 * (self.gamma_tilde_1 + self.gamma_tilde_2)

    @property
    def offset(self) -> float:
        """Common imaginary shift (g2 - g1)/2 of all four eigenvalues."""
        return 0.5 * (self.gamma_tilde_2 - self.gamma_tilde_1)

    @property
    def is_balanced(self) -> bool:
        return self.gamma_tilde_1 == self.gamma_tilde_2


def _pair(x) -> tuple[float, float]:
    if np.ndim(x) == 0:
        return float(x), float(x)
    a, b = x
    return float(a), float(b)


def relaxation_rate(g: float, gamma: float, G: GCoefficients) -> float:
    """Signed first-moment decay rate (2g^2/gamma)(G_+^2 - G_-^2); negative means gain."""
    return 2 * g * g / gamma * (G.g_plus**2 - G.g_minus**2)


def effective_rates(g, gamma, G1: GCoefficients, G2: GCoefficients) -> EffectiveRates:
    """Loss magnitude of resonator 1 and gain magnitude of resonator 2.

    ``g`` and ``gamma`` are scalars (shared) or per-resonator pairs.
    """
    g1, g2 = _pair(g)
    ga1, ga2 = _pair(gamma)
    if G1.g_plus < G1.g_minus:
        raise DominanceError("resonator 1 is gain dominated (G_1- > G_1+); swap the roles")
    if G2.g_minus < G2.g_plus:
        raise DominanceError("resonator 2 is loss dominated (G_2+ > G_2-); swap the roles")
    return EffectiveRates(abs(relaxation_rate(g1, ga1, G1)), abs(relaxation_rate(g2, ga2, G2)))


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    data: np.ndarray
    mode: str
    delta: float
    J: float
    rates: EffectiveRates


def _check_mode(mode: str) -> None:
    if mode not in ("rwa", "nonrwa"):
        raise ValueError(f"unknown mode {mode!r}")


def build_m(delta: float, J: float, rates: EffectiveRates, mode: str = "nonrwa") -> MomentMatrix:
    _check_mode(mode)
    g1, g2 = rates.gamma_tilde_1, rates.gamma_tilde_2
    m = np.array([
        [delta - 1j * g1, 0, J, J],
        [0, -delta - 1j * g1, -J, -J],
        [J, J, delta + 1j * g2, 0],
        [-J, -J, 0, -delta + 1j * g2],
    ], dtype=complex)
    if mode == "rwa":
        m[0, 3] = m[1, 2] = m[2, 1] = m[3, 0] = 0
    m.flags.writeable = False
    return MomentMatrix(m, mode, float(delta), float(J), rates)


def pt_defect(m: MomentMatrix | np.ndarray) -> float:
    """max |P M* P - M| with P = sigma_x (x) I_2 swapping the two resonator blocks."""
    data = m.data if isinstance(m, MomentMatrix) else np.asarray(m)
    return float(np.max(np.abs(_P @ data.conj() @ _P - data)))


def _csqrt(z: complex) -> complex:
    # +0.0 imaginary part keeps negative reals on the principal branch (+i sqrt|z|)
    z = complex(z)
    return cmath.sqrt(complex(z.real, z.imag + 0.0))


def eigenvalues_closed_form(delta: float, J: float, rates: EffectiveRates,
                            mode: str = "nonrwa") -> np.ndarray:
    """All four eigenfrequencies in branch order (w_++, w_+-, w_-+, w_--).

    nonrwa: w_{s,t} = s [d^2 - gm^2 + t 2d sqrt(J^2 - gm^2)]^(1/2) + i off
    rwa:    w_{s,t} = s d + t sqrt(J^2 - gm^2) + i off
    with gm = (g1 + g2)/2 and off = (g2 - g1)/2; principal square roots.
    """
    _check_mode(mode)
    gm, off = rates.mean, rates.offset
    s = _csqrt(J * J - gm * gm)
    out = []
    for sign_outer, sign_inner in itertools.product((1, -1), (1, -1)):
        if mode == "nonrwa":
            w = sign_outer * _csqrt(delta * delta - gm * gm + sign_inner * 2 * delta * s)
        else:
            w = sign_outer * delta + sign_inner * s
        out.append(w + 1j * off)
    return np.array(out, dtype=complex)


def char_poly(a: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients (highest power first), Faddeev-LeVerrier."""
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    mk = np.zeros_like(a, dtype=complex)
    eye = np.eye(n)
    for k in range(1, n + 1):
        mk = a @ mk + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(a @ mk) / k
    return coeffs


def _polish(coeffs: np.ndarray, z: complex) -> tuple[complex, float]:
    deriv = np.polyder(coeffs)
    absc = np.abs(coeffs)

    def backward(zz):
        scale = np.polyval(absc, abs(zz))
        return abs(np.polyval(coeffs, zz)) / scale if scale else 0.0

    res = backward(z)
    for _ in range(50):
        if res < POLISH_TOL:
            break
        dp = np.polyval(deriv, z)
        if dp == 0:
            break
        z_new = z - np.polyval(coeffs, z) / dp
        res_new = backward(z_new)
        if res_new >= res:
            break
        z, res = z_new, res_new
    return z, res


def sort_eigenvalues(values) -> np.ndarray:
    values = list(values)
    values.sort(key=lambda z: (round(z.real, 9), z.imag))
    return np.array(values, dtype=complex)


def eigenvalues_numeric(m: MomentMatrix | np.ndarray) -> np.ndarray:
    """Roots of the characteristic quartic, Newton-polished and sorted by (Re, Im).

    Independent of any eigensolver applied to M itself: the polynomial comes
    from Faddeev-LeVerrier and its roots are refined until the relative
    backward residual |p(z)| / sum|c_k||z|^k drops below 1e-12.
    """
    data = m.data if isinstance(m, MomentMatrix) else np.asarray(m, dtype=complex)
    coeffs = char_poly(data)
    roots = []
    for z in np.roots(coeffs):
        z, res = _polish(coeffs, complex(z))
        if res >= POLISH_TOL:
            raise PolishingError(f"root {z} polished only to residual {res:.3e}")
        roots.append(z)
    return sort_eigenvalues(_merge_clusters(coeffs, roots))


def _merge_clusters(coeffs: np.ndarray, roots: list[complex]) -> list[complex]:
    """Replace near-coincident roots by their common multiple root.

    A k-fold root is only resolved to ~eps^(1/k) individually, but it is a
    simple root of the (k-1)-th derivative, where Newton converges to full
    precision from the cluster mean.
    """
    groups: list[list[int]] = []
    for i, z in enumerate(roots):
        for grp in groups:
            if any(abs(z - roots[j]) < CLUSTER_TOL * (1 + abs(z)) for j in grp):
                grp.append(i)
                break
        else:
            groups.append([i])
    out = list(roots)
    for grp in groups:
        if len(grp) == 1:
            continue
        deriv = coeffs
        for _ in range(len(grp) - 1):
            deriv = np.polyder(deriv)
        center, _ = _polish(deriv, complex(np.mean([roots[j] for j in grp])))
        if max(abs(center - roots[j]) for j in grp) < CLUSTER_TOL * (1 + abs(center)):
            for j in grp:
                out[j] = center
    return out


def match_multisets(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Smallest achievable max |a_i - b_pi(i)| over permutations."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise ValueError("multisets differ in size")
    best = np.inf
    for perm in itertools.permutations(range(len(b))):
        best = min(best, max(abs(a[i] - b[j]) for i, j in enumerate(perm)))
    return float(best)


def critical_couplings(delta: float, rates: EffectiveRates) -> tuple[float, float]:
    """(J_c1, J_c2): onset of the exact phase and onset of instability.

    J_c1 = gm and J_c2 = (4 gm^2 + 4 d^2)/(8 d), gm = (g1 + g2)/2; the
    balanced case is gm = g.
    """
    if delta <= 0:
        raise ValueError("J_c2 is finite only for delta > 0")
    gm = rates.mean
    return gm, (4 * gm * gm + 4 * delta * delta) / (8 * delta)


class Phase(str, enum.Enum):
    BROKEN = "BrokenPT"
    EXACT = "ExactPT"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class PhasePoint:
    J: float
    eigenvalues: tuple[complex, ...]
    phase: Phase
    is_ep: bool
    pt_defect: float
    min_gap: float
    condition: float
    mode: str


def _phase_from(eigs: np.ndarray, offset: float, mode: str) -> Phase:
    n_complex = int(np.sum(np.abs(eigs.imag - offset) > REALITY_TOL))
    if n_complex == 0:
        return Phase.EXACT
    if n_complex == len(eigs) or mode == "rwa":
        return Phase.BROKEN
    return Phase.UNSTABLE


def _min_gap(eigs: np.ndarray) -> float:
    return float(min(abs(x - y) for x, y in itertools.combinations(eigs, 2)))


def classify(delta: float, J: float, rates: EffectiveRates, mode: str = "nonrwa") -> PhasePoint:
    """Phase of M from the reality of its spectrum, plus an exceptional-point flag.

    is_ep requires both a minimum eigenvalue gap below 1e-6 and an eigenvector
    matrix condition number above 1e6.
    """
    m = build_m(delta, J, rates, mode)
    eigs = eigenvalues_closed_form(delta, J, rates, mode)
    gap = _min_gap(eigs)
    _, vecs = np.linalg.eig(m.data)
    cond = float(np.linalg.cond(vecs))
    if not np.isfinite(cond):
        cond = np.inf
    return PhasePoint(
        J=float(J),
        eigenvalues=tuple(complex(z) for z in eigs),
        phase=_phase_from(eigs, rates.offset, mode),
        is_ep=bool(gap < EP_GAP_TOL and cond > EP_COND_TOL),
        pt_defect=pt_defect(m),
        min_gap=gap,
        condition=cond,
        mode=mode,
    )


def sweep_spectrum(J_grid, delta: float, rates: EffectiveRates, mode: str = "nonrwa") -> list[PhasePoint]:
    grid = np.asarray(J_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("J grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("J grid must be strictly ascending")
    return [classify(delta, J, rates, mode) for J in grid]


@dataclass(frozen=True)
class Transition:
    J_before: float
    J_after: float
    before: Phase
    after: Phase

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.J_before + self.J_after)


def phase_transitions(points: Sequence[PhasePoint]) -> list[Transition]:
    """Adjacent grid points whose phases differ."""
    return [Transition(p.J, q.J, p.phase, q.phase)
            for p, q in zip(points, points[1:]) if p.phase != q.phase]
