"""Linear response of the resonator pair to a weak coherent input, and transmission.

Drive convention: <A_in>(t) = alpha exp(-i w_d t) on one port. Each resonator
leaks at rate kappa into its two feed lines. The first moments obey

    i d(x)/dt = (M - i kappa I) x + j(t),   j = -i sqrt(kappa) (A_in, A_in^*, 0, 0)

for an input on resonator 1, and the output field is A_out = A_in - i sqrt(kappa) <a>.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .ptspectrum import EffectiveRates, MomentMatrix, build_m

LOG_POWER_FLOOR = -12.0
LOG_POWER_CEIL = 2.0
STABILITY_TOL = 1e-12


class PoleError(ArithmeticError):
    pass


class UnstableError(ArithmeticError):
    pass


class Port(enum.Enum):
    P1L = "1L"
    P1R = "1R"
    P2L = "2L"
    P2R = "2R"

    @property
    def resonator(self) -> int:
        return 0 if self in (Port.P1L, Port.P1R) else 1

    @classmethod
    def parse(cls, text: str) -> "Port":
        t = text.upper().lstrip("P")
        for p in cls:
            if p.value == t:
                return p
        raise ValueError(f"unknown port {text!r}")


@dataclass(frozen=True)
class InputSignal:
    port: Port
    amplitude: complex
    omega_d: float
    kappa: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if self.amplitude == 0:
            raise ValueError("input amplitude must be non-zero")


def normal_modes(delta: float, omega_d: float, J: float, rates: EffectiveRates,
                 kappa: float) -> tuple[complex, complex]:
    """w_pm = (d - w_d) + [i(g2 - g1 - 2 kappa) +/- sqrt(4 J^2 - (g1 + g2)^2)]/2."""
    g1, g2 = rates.gamma_tilde_1, rates.gamma_tilde_2
    root = np.sqrt(complex(4 * J * J - (g1 + g2) ** 2))
    base = (delta - omega_d) + 0.5j * (g2 - g1 - 2 * kappa)
    return base + 0.5 * root, base - 0.5 * root


def rwa_response(delta: float, omega_d: float, J: float, rates: EffectiveRates,
                 kappa: float, alpha: complex = 1.0) -> tuple[complex, complex]:
    """Stationary <a_1>, <a_2> for an input on port 1L, rotating-wave coupling.

    a1 = i sqrt(k) alpha [(d - w_d) + i(g2 - k)] / (w+ w-)
    a2 = -i sqrt(k) alpha J / (w+ w-)
    """
    wp, wm = normal_modes(delta, omega_d, J, rates, kappa)
    den = wp * wm
    if den == 0:
        raise PoleError(f"normal-mode pole at w_d = {omega_d}, J = {J}")
    pre = 1j * math.sqrt(kappa) * alpha
    a1 = pre * ((delta - omega_d) + 1j * (rates.gamma_tilde_2 - kappa)) / den
    a2 = -pre * J / den
    return complex(a1), complex(a2)


def _source(signal: InputSignal) -> tuple[np.ndarray, np.ndarray]:
    """Right-hand sides of the -w_d and +w_d sideband equations."""
    i = 2 * signal.port.resonator
    minus = np.zeros(4, dtype=complex)
    plus = np.zeros(4, dtype=complex)
    s = 1j * math.sqrt(signal.kappa)
    minus[i] = s * signal.amplitude
    plus[i + 1] = s * np.conj(signal.amplitude)
    return minus, plus


def is_stable(m: MomentMatrix, kappa: float) -> bool:
    growth = np.max(np.linalg.eigvals(m.data - 1j * kappa * np.eye(4)).imag)
    return bool(growth <= STABILITY_TOL)


def harmonic_balance_system(m: MomentMatrix, signal: InputSignal) -> tuple[np.ndarray, np.ndarray]:
    """8x8 system for x(t) = X- e^{-i w_d t} + X+ e^{+i w_d t}; unknowns (X-, X+)."""
    a = m.data - 1j * signal.kappa * np.eye(4)
    w = signal.omega_d
    system = np.zeros((8, 8), dtype=complex)
    system[:4, :4] = a - w * np.eye(4)
    system[4:, 4:] = a + w * np.eye(4)
    minus, plus = _source(signal)
    return system, np.concatenate([minus, plus])


def numeric_response(m: MomentMatrix, signal: InputSignal, check_stability: bool = True) -> np.ndarray:
    """Stationary amplitudes of (<a1>, <a1^+>, <a2>, <a2^+>) at e^{-i w_d t}.

    Exact for the linear moment equations. The two sidebands decouple because
    <a> and <a^+> are carried as independent components; the +w_d block is
    solved anyway and must be the conjugate mirror of the -w_d block.
    """
    if check_stability and not is_stable(m, signal.kappa):
        raise UnstableError("the driven system has a growing mode; no stationary response")
    system, rhs = harmonic_balance_system(m, signal)
    if np.linalg.cond(system) > 1e14:
        raise PoleError(f"harmonic-balance system singular at w_d = {signal.omega_d}")
    x = np.linalg.solve(system, rhs)
    minus, plus = x[:4], x[4:]
    mirror = max(abs(minus[1] - np.conj(plus[0])), abs(minus[3] - np.conj(plus[2])))
    if mirror > 1e-9 * max(1.0, float(np.max(np.abs(x)))):
        raise ArithmeticError(f"sideband consistency violated by {mirror:.3e}")
    return minus


def time_domain_response(m: MomentMatrix, signal: InputSignal, t_end: float | None = None,
                         steps_per_period: int = 200) -> np.ndarray:
    """Oracle: integrate the driven moment equations and project onto e^{-i w_d t}.

    RK4 from rest up to about t_end (default 50/kappa, rounded up to whole
    drive periods), then the last period is projected with a discrete Fourier
    sum that is exact for the harmonics at +/- w_d.
    """
    if signal.omega_d <= 0:
        raise ValueError("the projection needs w_d > 0 to separate the sidebands")
    if signal.kappa <= 0 and t_end is None:
        raise ValueError("t_end required when kappa = 0")
    period = 2 * math.pi / signal.omega_d
    t_end = 50.0 / signal.kappa if t_end is None else t_end
    n_periods = max(2, math.ceil(t_end / period))
    h = period / steps_per_period
    a = m.data - 1j * signal.kappa * np.eye(4)
    minus, plus = _source(signal)
    w = signal.omega_d

    def rhs(t, x):
        # i dx/dt = A x - (minus e^{-iwt} + plus e^{iwt})
        return -1j * (a @ x - minus * np.exp(-1j * w * t) - plus * np.exp(1j * w * t))

    x = np.zeros(4, dtype=complex)
    n_steps = n_periods * steps_per_period
    acc = np.zeros(4, dtype=complex)
    for k in range(n_steps):
        t = k * h
        if k >= n_steps - steps_per_period:
            acc += x * np.exp(1j * w * t)
        k1 = rhs(t, x)
        k2 = rhs(t + h / 2, x + h / 2 * k1)
        k3 = rhs(t + h / 2, x + h / 2 * k2)
        k4 = rhs(t + h, x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return acc / steps_per_period


def transmission(signal: InputSignal, out_port: Port, response: np.ndarray) -> complex:
    """T = <A_out>/alpha on ``out_port``; the driven port itself gives the reflection."""
    a_in = signal.amplitude if out_port == signal.port else 0.0
    a_out = a_in - 1j * math.sqrt(signal.kappa) * response[2 * out_port.resonator]
    return complex(a_out / signal.amplitude)


def clip_log_power(t: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        raw = np.log(np.abs(t) ** 2)
    return np.clip(np.nan_to_num(raw, nan=LOG_POWER_FLOOR, neginf=LOG_POWER_FLOOR,
                                 posinf=LOG_POWER_CEIL), LOG_POWER_FLOOR, LOG_POWER_CEIL)


@dataclass(frozen=True)
class TransmissionPoint:
    omega_d: float
    J: float
    t_coeffs: dict
    log_power: float


@dataclass(frozen=True, eq=False)
class TransmissionMap:
    """T over a (J, w_d) grid; arrays are indexed [J, w_d]."""

    omega_d: np.ndarray
    J: np.ndarray
    t: dict  # Port -> complex array
    out_port: Port
    stable: np.ndarray
    delta: float
    mode: str

    @property
    def log_power(self) -> np.ndarray:
        return clip_log_power(self.t[self.out_port])

    def points(self) -> Iterator[TransmissionPoint]:
        lp = self.log_power
        for i, J in enumerate(self.J):
            for k, w in enumerate(self.omega_d):
                yield TransmissionPoint(float(w), float(J),
                                        {p: complex(v[i, k]) for p, v in self.t.items()},
                                        float(lp[i, k]))

    def ridges(self, rel_height: float = 1e-3) -> list[np.ndarray]:
        """Per-J local maxima of |T|^2 over w_d (endpoints included).

        Maxima weaker than ``rel_height`` times the column peak are dropped.
        Detection uses the unclipped power so clipping never creates plateaus.
        """
        power = np.abs(self.t[self.out_port]) ** 2
        return [find_ridges(self.omega_d, column, rel_height) for column in power]


def find_ridges(x: np.ndarray, y: np.ndarray, rel_height: float = 1e-3) -> np.ndarray:
    n = len(y)
    if n == 0:
        return np.array([])
    peak = np.max(y)
    out = []
    for k in range(n):
        left = y[k - 1] if k > 0 else -np.inf
        right = y[k + 1] if k < n - 1 else -np.inf
        if y[k] > left and y[k] >= right and y[k] >= rel_height * peak and peak > 0:
            out.append(x[k])
    return np.array(out)


def transmission_column(J: float, omega_d_grid, rates: EffectiveRates, kappa: float, mode: str,
                        delta: float = 1.0, in_port: Port = Port.P1L,
                        method: str = "numeric") -> tuple[dict, bool]:
    """All four T coefficients along the w_d grid at one coupling J."""
    w = np.asarray(omega_d_grid, dtype=float)
    m = build_m(delta, J, rates, mode)
    stable = is_stable(m, kappa)
    t = {p: np.zeros(w.size, dtype=complex) for p in Port}
    for k, wd in enumerate(w):
        signal = InputSignal(in_port, 1.0, float(wd), kappa)
        if method == "analytic":
            if mode != "rwa" or in_port.resonator != 0:
                raise ValueError("the analytic response covers rwa mode with input on resonator 1")
            a1, a2 = rwa_response(delta, wd, J, rates, kappa)
            resp = np.array([a1, 0, a2, 0])
        elif method == "numeric":
            resp = numeric_response(m, signal, check_stability=False)
        else:
            raise ValueError(f"unknown method {method!r}")
        for p in Port:
            t[p][k] = transmission(signal, p, resp)
    return t, stable


def transmission_map(omega_d_grid, J_grid, rates: EffectiveRates, kappa: float,
                     mode: str = "nonrwa", delta: float = 1.0, out_port: Port = Port.P2R,
                     in_port: Port = Port.P1L, method: str = "numeric") -> TransmissionMap:
    """T_{in, out} on the (J, w_d) grid. Unstable columns are still evaluated
    (formal stationary response) and flagged in ``stable``."""
    w = np.asarray(omega_d_grid, dtype=float)
    js = np.asarray(J_grid, dtype=float)
    if w.size == 0 or js.size == 0:
        raise ValueError("transmission grids must be non-empty")
    t = {p: np.zeros((js.size, w.size), dtype=complex) for p in Port}
    stable = np.zeros(js.size, dtype=bool)
    for i, J in enumerate(js):
        col, stable[i] = transmission_column(J, w, rates, kappa, mode, delta, in_port, method)
        for p in Port:
            t[p][i] = col[p]
    return TransmissionMap(w, js, t, out_port, stable, delta, mode)
