"""Lindblad master equations: evolution, steady states and adiabatic elimination.

The generator is

    d rho/dt = -i[H(t), rho] + sum_k r_k (c_k rho c_k^+ - 1/2 {c_k^+ c_k, rho})

with fixed-step RK4 for time evolution. Steady states come from the
vectorised (column-stacked) Liouvillian or from long-time integration.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Sequence, Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .engineer import GCoefficients, SystemParams
from .qcore import (
    DensityMatrix,
    LayoutError,
    Operator,
    SpaceLayout,
    StateError,
    annihilation,
    check_state,
    pauli,
    qubit,
    resonator,
)

DENSE_STEADY_STATE_MAX_DIM = 64
TAIL_TOL = 1e-6
STEADY_RESIDUAL_TOL = 1e-10
STEADY_T_MAX = 1e5
STEP_DOUBLING_TOL = 1e-6

HamiltonianSource = Union[Operator, Callable[[float], Operator]]


class ConvergenceError(RuntimeError):
    pass


class SteadyStateError(RuntimeError):
    pass


class DegenerateSteadyState(SteadyStateError):
    pass


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Hamiltonian (static or t -> Operator) plus (collapse operator, rate) pairs.

    ``max_frequency`` sets the default RK4 step; it is estimated from the
    operators when not given. ``info`` carries construction parameters that
    downstream diagnostics need (coupling, decay rate, jump operators).
    """

    layout: SpaceLayout
    hamiltonian: HamiltonianSource
    dissipators: tuple[tuple[Operator, float], ...] = ()
    max_frequency: float | None = None
    info: Mapping = field(default_factory=dict)

    def __post_init__(self):
        diss = tuple((c, float(r)) for c, r in self.dissipators)
        for c, r in diss:
            if r < 0:
                raise ValueError(f"dissipator rate {r} is negative")
            if c.layout != self.layout:
                raise LayoutError("collapse operator layout differs from the model layout")
        if isinstance(self.hamiltonian, Operator) and self.hamiltonian.layout != self.layout:
            raise LayoutError("Hamiltonian layout differs from the model layout")
        object.__setattr__(self, "dissipators", diss)
        object.__setattr__(self, "info", MappingProxyType(dict(self.info)))

    @property
    def is_static(self) -> bool:
        return isinstance(self.hamiltonian, Operator)

    def h_matrix(self, t: float) -> np.ndarray:
        if self.is_static:
            return self.hamiltonian.data
        h = self.hamiltonian
        if hasattr(h, "matrix"):
            return h.matrix(t)
        op = h(t)
        if op.layout != self.layout:
            raise LayoutError("time-dependent Hamiltonian returned an operator on another layout")
        return op.data

    def characteristic_frequency(self) -> float:
        if self.max_frequency is not None:
            return self.max_frequency
        scale = 0.0
        if self.is_static:
            # Liouvillian frequencies are differences of energies
            e = np.linalg.eigvalsh(self.hamiltonian.data)
            scale = float(e[-1] - e[0])
        for c, r in self.dissipators:
            scale = max(scale, r * np.linalg.norm(c.data, 2) ** 2)
        return max(scale, 1e-3)


def default_dt(model: LindbladModel) -> float:
    return 2 * math.pi / (50 * model.characteristic_frequency())


class _Generator:
    """Precomputed pieces of the Liouvillian acting on raw matrices."""

    def __init__(self, model: LindbladModel):
        self.model = model
        self.jumps = [(c.data, c.data.conj().T, r) for c, r in model.dissipators if r > 0]
        d = model.layout.dim
        damp = np.zeros((d, d), dtype=complex)
        for c, cd, r in self.jumps:
            damp += 0.5 * r * (cd @ c)
        self.damp = damp
        self.static_heff = None
        if model.is_static:
            self.static_heff = model.hamiltonian.data - 1j * damp

    def __call__(self, t: float, rho: np.ndarray) -> np.ndarray:
        heff = self.static_heff if self.static_heff is not None else self.model.h_matrix(t) - 1j * self.damp
        out = -1j * (heff @ rho)
        for c, cd, r in self.jumps:
            out += (0.5 * r) * (c @ rho @ cd)
        # X + X^+ is Hermitian bit for bit, so rounding never breaks hermiticity
        return out + out.conj().T


def _matrix(rho) -> np.ndarray:
    return rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def liouvillian_apply(model: LindbladModel, rho, t: float = 0.0) -> np.ndarray:
    """d rho/dt for the model at time t."""
    if isinstance(rho, DensityMatrix) and rho.layout != model.layout:
        raise LayoutError("state and model live on different layouts")
    data = _matrix(rho)
    if data.shape != (model.layout.dim,) * 2:
        raise LayoutError("state dimension does not match model layout")
    return _Generator(model)(t, data)


@dataclass
class TrajectoryResult:
    times: np.ndarray
    observables: dict[str, np.ndarray]
    final_state: DensityMatrix

    def __getitem__(self, name: str) -> np.ndarray:
        return self.observables[name]


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _cheap_check(rho: np.ndarray, step: int) -> None:
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > 1e-10:
        raise StateError(f"hermiticity lost at step {step} (defect {herm:.3e}); reduce dt")
    tr = np.trace(rho).real
    if abs(tr - 1) > 1e-8 or not np.isfinite(tr):
        raise StateError(f"trace {tr:.12g} at step {step}; reduce dt")


def integrate(
    model: LindbladModel,
    rho0: DensityMatrix,
    t_end: float,
    dt: float | None = None,
    observables: Mapping[str, Operator] | None = None,
    record_every: int = 1,
    positivity_every: int = 200,
) -> TrajectoryResult:
    """Fixed-step RK4 evolution from ``rho0`` up to ``t_end``.

    The step is adjusted so that an integer number of steps lands on t_end.
    Trace and hermiticity are checked every step, positivity every
    ``positivity_every`` steps and at the end; a breach raises StateError
    naming the step.
    """
    if rho0.layout != model.layout:
        raise LayoutError("initial state and model live on different layouts")
    dt = default_dt(model) if dt is None else dt
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = max(1, int(round(t_end / dt)))
    h = t_end / n_steps
    obs = dict(observables or {})
    for name, op in obs.items():
        if op.layout != model.layout:
            raise LayoutError(f"observable {name!r} lives on another layout")
    obs_t = {name: op.data.T.copy() for name, op in obs.items()}

    gen = _Generator(model)
    rho = rho0.data.copy()
    n_rec = n_steps // record_every + 1
    times = np.empty(n_rec)
    series = {name: np.empty(n_rec, dtype=complex) for name in obs}

    def record(k: int, t: float):
        times[k] = t
        for name, opt in obs_t.items():
            series[name][k] = np.sum(rho * opt)

    record(0, 0.0)
    k = 1
    for step in range(1, n_steps + 1):
        rho = _rk4_step(gen, (step - 1) * h, rho, h)
        _cheap_check(rho, step)
        if step % positivity_every == 0:
            check_state(rho, step)
        if step % record_every == 0:
            record(k, step * h)
            k += 1
    rho = 0.5 * (rho + rho.conj().T)
    check_state(rho, n_steps)
    return TrajectoryResult(times[:k], {n: s[:k] for n, s in series.items()},
                            DensityMatrix(model.layout, rho))


def step_doubling_deviation(
    model: LindbladModel,
    rho0: DensityMatrix,
    t_end: float,
    dt: float,
    observables: Mapping[str, Operator],
) -> float:
    """Largest change of any recorded observable when dt is halved."""
    coarse = integrate(model, rho0, t_end, dt, observables)
    fine = integrate(model, rho0, t_end, coarse.times[1] / 2, observables, record_every=2)
    return max(float(np.max(np.abs(coarse[n] - fine[n]))) for n in observables)


def integrate_checked(model, rho0, t_end, dt=None, observables=None, tol: float = STEP_DOUBLING_TOL):
    """:func:`integrate` gated by a step-doubling self-convergence test."""
    dt = default_dt(model) if dt is None else dt
    obs = dict(observables or {})
    result = integrate(model, rho0, t_end, dt, obs)
    if obs:
        fine = integrate(model, rho0, t_end, result.times[1] / 2, obs, record_every=2)
        dev = max(float(np.max(np.abs(result[n] - fine[n]))) for n in obs)
        if dev > tol:
            raise ConvergenceError(f"step doubling changed observables by {dev:.3e} > {tol:g}; reduce dt")
    return result


# --------------------------------------------------------------------------
# Adiabatically eliminated models
# --------------------------------------------------------------------------


def _check_g(G: GCoefficients, where: str) -> None:
    if G.g_plus == G.g_minus:
        warnings.warn(f"{where}: G_plus == G_minus, relaxation rate vanishes", RuntimeWarning, stacklevel=3)


def jump_operator(a: Operator, G: GCoefficients) -> Operator:
    """b = G_+ a + G_- a^+."""
    return G.g_plus * a + G.g_minus * a.dag()


def adiabatic_single_resonator_model(g: float, gamma: float, G: GCoefficients, delta: float,
                                     n_fock: int) -> LindbladModel:
    """Resonator-only model after eliminating a strongly damped qubit.

    d mu/dt = -i[-delta a^+a, mu] + (2 g^2/gamma)(2 b mu b^+ - {b^+ b, mu}),
    i.e. a single dissipator b at rate 4 g^2/gamma.
    """
    _check_g(G, "adiabatic_single_resonator_model")
    layout = SpaceLayout.of(resonator(n_fock))
    a = annihilation(layout, 0)
    b = jump_operator(a, G)
    rate = 4 * g * g / gamma
    return LindbladModel(layout, -delta * (a.dag() @ a), ((b, rate),),
                         info={"g": g, "gamma": gamma, "delta": delta, "G": (G,), "b": (b,)})


def single_resonator_full_model(g: float, gamma: float, G: GCoefficients, delta: float,
                                n_fock: int) -> LindbladModel:
    """Resonator plus damped qubit with the engineered effective coupling.

    H = -delta a^+a + g (sigma_+ b + sigma_- b^+), qubit decay gamma D[sigma_-].
    This is the reference that the single-resonator adiabatic model approximates.
    """
    layout = SpaceLayout.of(resonator(n_fock), qubit())
    a = annihilation(layout, 0)
    b = jump_operator(a, G)
    spl, smi = pauli(layout, 1, "plus"), pauli(layout, 1, "minus")
    h = -delta * (a.dag() @ a) + g * (spl @ b + smi @ b.dag())
    return LindbladModel(layout, h, ((smi, gamma),),
                         info={"g": g, "gamma": gamma, "delta": delta, "G": (G,), "b": (b,)})


def adiabatic_two_resonator_model(params: SystemParams, G1: GCoefficients, G2: GCoefficients,
                                  mode: str, n_fock: int) -> LindbladModel:
    """Two resonators with engineered loss/gain jump operators b_j.

    mode "nonrwa" couples through J (a1 + a1^+)(a2 + a2^+); "rwa" keeps only
    J (a1^+ a2 + h.c.). Rates are 4 g_j^2/gamma_j.
    """
    if mode not in ("rwa", "nonrwa"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_g(G1, "adiabatic_two_resonator_model (resonator 1)")
    _check_g(G2, "adiabatic_two_resonator_model (resonator 2)")
    layout = SpaceLayout.of(resonator(n_fock), resonator(n_fock))
    a1, a2 = annihilation(layout, 0), annihilation(layout, 1)
    h = -params.delta * (a1.dag() @ a1 + a2.dag() @ a2)
    if mode == "nonrwa":
        h = h + params.J * ((a1 + a1.dag()) @ (a2 + a2.dag()))
    else:
        hop = a1.dag() @ a2
        h = h + params.J * (hop + hop.dag())
    b1, b2 = jump_operator(a1, G1), jump_operator(a2, G2)
    diss = ((b1, 4 * params.g1**2 / params.gamma1), (b2, 4 * params.g2**2 / params.gamma2))
    return LindbladModel(layout, h, diss, info={
        "g": (params.g1, params.g2), "gamma": (params.gamma1, params.gamma2),
        "delta": params.delta, "J": params.J, "mode": mode, "G": (G1, G2), "b": (b1, b2)})


# --------------------------------------------------------------------------
# Steady states
# --------------------------------------------------------------------------


def vectorized_liouvillian(model: LindbladModel, sparse: bool = False):
    """Superoperator L with vec(d rho/dt) = L vec(rho), column stacking.

    Uses vec(A X B) = (B^T kron A) vec(X).
    """
    if not model.is_static:
        raise ValueError("a steady state needs a time-independent Hamiltonian")
    d = model.layout.dim
    if sparse:
        kron, eye, conv = sp.kron, sp.identity(d, dtype=complex, format="csr"), sp.csr_matrix
    else:
        kron, eye, conv = np.kron, np.eye(d, dtype=complex), np.asarray
    gen = _Generator(model)
    heff = conv(gen.static_heff)
    superop = -1j * kron(eye, heff) + 1j * kron(conv(gen.static_heff.conj()), eye)
    for c, cd, r in gen.jumps:
        superop = superop + r * kron(conv(c.conj()), conv(c))
    return superop.tocsc() if sparse else superop


def _normalise(vec: np.ndarray, layout: SpaceLayout) -> DensityMatrix:
    d = layout.dim
    rho = vec.reshape(d, d, order="F")
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    return DensityMatrix(layout, rho)


def _bordered_rhs(d: int) -> tuple[np.ndarray, np.ndarray]:
    trace_row = np.zeros(d * d, dtype=complex)
    trace_row[:: d + 1] = 1.0
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    return trace_row, rhs


def _steady_dense(model: LindbladModel) -> DensityMatrix:
    d = model.layout.dim
    superop = vectorized_liouvillian(model)
    trace_row, rhs = _bordered_rhs(d)
    # Row 0 is redundant because trace preservation makes the diagonal rows dependent.
    superop[0, :] = trace_row
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(superop, check_finite=False, overwrite_a=True)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= 1e-12 * pivots.max():
        raise DegenerateSteadyState("the Liouvillian has more than one stationary state")
    vec = sla.lu_solve((lu, piv), rhs)
    return _normalise(vec, model.layout)


def _steady_sparse(model: LindbladModel) -> DensityMatrix:
    d = model.layout.dim
    superop = vectorized_liouvillian(model, sparse=True).tolil()
    trace_row, rhs = _bordered_rhs(d)
    superop[0, :] = trace_row
    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            vec = spla.spsolve(superop.tocsc(), rhs)
        except (spla.MatrixRankWarning, RuntimeError):  # SuperLU: "factor is exactly singular"
            raise DegenerateSteadyState("the Liouvillian has more than one stationary state") from None
    if not np.all(np.isfinite(vec)):
        raise DegenerateSteadyState("sparse solve failed: singular bordered Liouvillian")
    return _normalise(vec, model.layout)


def _steady_integrate(model: LindbladModel, rho0: DensityMatrix | None, t_max: float,
                      dt: float | None) -> DensityMatrix:
    gen = _Generator(model)
    d = model.layout.dim
    rho = (rho0.data if rho0 is not None else np.eye(d) / d).astype(complex)
    h = default_dt(model) if dt is None else dt
    t = 0.0
    step = 0
    while t < t_max:
        rho = _rk4_step(gen, t, rho, h)
        t += h
        step += 1
        if step % 50 == 0:
            _cheap_check(rho, step)
            if np.max(np.abs(gen(t, rho))) < STEADY_RESIDUAL_TOL:
                return _normalise(rho.ravel(order="F"), model.layout)
    raise SteadyStateError(f"no convergence to a steady state by t = {t_max:g}")


def _tail_check(rho: DensityMatrix, tol: float) -> None:
    pops = np.real(np.diag(rho.data)).reshape(rho.layout.dims)
    for i in rho.layout.indices("resonator"):
        axes = tuple(k for k in range(len(rho.layout.dims)) if k != i)
        marginal = pops.sum(axis=axes) if axes else pops
        tail = float(marginal[-2:].sum())
        if tail >= tol:
            raise SteadyStateError(
                f"no steady state within the Fock truncation: top two levels of factor {i} "
                f"hold {tail:.3e} (>= {tol:g}); the mode is gain dominated or n_fock is too small")


def steady_state(model: LindbladModel, method: str = "auto", tail_tol: float | None = TAIL_TOL,
                 t_max: float = STEADY_T_MAX, dt: float | None = None,
                 rho0: DensityMatrix | None = None) -> DensityMatrix:
    """Stationary state of a static model.

    ``method``: "dense" (bordered LU of the vectorised Liouvillian), "sparse"
    (sparse direct solve of the same system), "integrate" (RK4 until
    max|d rho/dt| < 1e-10) or "auto" (dense up to dimension 64, sparse above).
    Resonator tails are checked afterwards unless ``tail_tol`` is None.
    """
    if not model.is_static:
        raise ValueError("a steady state needs a time-independent Hamiltonian")
    if method == "auto":
        method = "dense" if model.layout.dim <= DENSE_STEADY_STATE_MAX_DIM else "sparse"
    if method == "dense":
        rho = _steady_dense(model)
    elif method == "sparse":
        rho = _steady_sparse(model)
    elif method == "integrate":
        rho = _steady_integrate(model, rho0, t_max, dt)
    else:
        raise ValueError(f"unknown steady-state method {method!r}")
    if tail_tol is not None:
        _tail_check(rho, tail_tol)
    return rho


# --------------------------------------------------------------------------
# Validity of the adiabatic elimination
# --------------------------------------------------------------------------


def _resolve_observable(model: LindbladModel, observable, rho: DensityMatrix) -> complex:
    if isinstance(observable, Operator):
        return complex(np.sum(rho.data * observable.data.T))
    if observable == "n":
        a = annihilation(model.layout, model.layout.indices("resonator")[0])
        return complex(np.sum(rho.data * (a.dag() @ a).data.T))
    if observable == "qubit_excitation":
        qubits = model.layout.indices("qubit")
        if qubits:
            sp_ = pauli(model.layout, qubits[0], "plus")
            return complex(np.sum(rho.data * (sp_ @ sp_.dag()).data.T))
        # slaved qubit: sigma_- ~ -(2ig/gamma) b, hence <s+ s-> ~ (2g/gamma)^2 <b^+ b>
        info = model.info
        g = info["g"][0] if isinstance(info["g"], tuple) else info["g"]
        gamma = info["gamma"][0] if isinstance(info["gamma"], tuple) else info["gamma"]
        b = info["b"][0]
        return (2 * g / gamma) ** 2 * complex(np.sum(rho.data * (b.dag() @ b).data.T))
    raise ValueError(f"unknown observable {observable!r}")


def adiabatic_error_report(full_model: LindbladModel, reduced_model: LindbladModel,
                           observable="n", t_end: float | None = None,
                           floor: float = 1e-12, tail_tol: float | None = TAIL_TOL) -> float:
    """Relative steady-state discrepancy |O_full - O_red| / max(|O_full|, floor).

    ``observable`` is "n" (photon number of the first resonator),
    "qubit_excitation" (sigma_+ sigma_- of the first qubit; the reduced model
    supplies its slaved estimate (2g/gamma)^2 <b^+ b>) or a pair of operators
    (full, reduced). ``t_end`` switches both solves to long-time integration
    with that horizon.
    """
    kw = {"tail_tol": tail_tol}
    if t_end is not None:
        kw.update(method="integrate", t_max=t_end)
    rho_full = steady_state(full_model, **kw)
    rho_red = steady_state(reduced_model, **kw)
    if isinstance(observable, tuple):
        o_full = _resolve_observable(full_model, observable[0], rho_full)
        o_red = _resolve_observable(reduced_model, observable[1], rho_red)
    else:
        o_full = _resolve_observable(full_model, observable, rho_full)
        o_red = _resolve_observable(reduced_model, observable, rho_red)
    return abs(o_full - o_red) / max(abs(o_full), floor)


def squeezed_vacuum_occupation(G: GCoefficients) -> float:
    """Stationary <a^+a> = G_-^2 / (G_+^2 - G_-^2) of the loss-dominated jump b."""
    return G.g_minus**2 / (G.g_plus**2 - G.g_minus**2)


def moment_trajectory(model: LindbladModel, rho0: DensityMatrix, t_end: float, dt: float):
    """Times and first moments (<a_1>, <a_1^+>, <a_2>, <a_2^+>, ...) of a resonator model."""
    obs = {}
    for k, i in enumerate(model.layout.indices("resonator")):
        a = annihilation(model.layout, i)
        obs[f"a{k + 1}"] = a
        obs[f"a{k + 1}_dag"] = a.dag()
    res = integrate(model, rho0, t_end, dt, obs)
    return res.times, np.stack([res[name] for name in obs], axis=1)


def initial_state(layout: SpaceLayout, kets: Sequence) -> DensityMatrix:
    return DensityMatrix.product(layout, kets)


# --------------------------------------------------------------------------
# Validation harnesses
# --------------------------------------------------------------------------


@dataclass
class DynamicsComparison:
    times: np.ndarray
    full: dict[str, np.ndarray]
    effective: dict[str, np.ndarray]
    step_doubling: float

    def max_deviation(self, name: str = "N") -> float:
        return float(np.max(np.abs(self.full[name] - self.effective[name])))


def dynamics_comparison(params: SystemParams, n_fock: int = 20, t_end: float = 50.0,
                        dt: float | None = None, record_every: int = 1,
                        step_doubling: bool = True) -> DynamicsComparison:
    """Single resonator + qubit from |up>|1>: exact drive vs. RWA effective Hamiltonian.

    Both runs are unitary. <N> and <sigma_z> do not depend on the rotating
    frame, so the interaction-picture and effective-frame curves compare directly.
    With ``step_doubling`` the full run is repeated at dt/2 and the largest
    observable change is reported (ConvergenceError above 1e-6).
    """
    from .engineer import InteractionHamiltonian, circuit_layout, effective_hamiltonian_rwa
    from .qcore import UP, fock, number

    layout = circuit_layout(1, n_fock)
    rho0 = DensityMatrix.product(layout, [fock(n_fock, 1), UP])
    obs = {"N": number(layout, 0), "sz": pauli(layout, 1, "z"), "sx": pauli(layout, 1, "x")}
    h_full = InteractionHamiltonian(params, layout)
    full_model = LindbladModel(layout, h_full, max_frequency=h_full.max_frequency)
    dt = default_dt(full_model) if dt is None else dt
    full = integrate(full_model, rho0, t_end, dt, obs, record_every=record_every)
    dev = 0.0
    if step_doubling:
        fine = integrate(full_model, rho0, t_end, full.times[1] / (2 * record_every) if record_every > 1
                         else full.times[1] / 2, obs, record_every=2 * record_every)
        dev = max(float(np.max(np.abs(full[n] - fine[n]))) for n in ("N", "sz"))
        if dev > STEP_DOUBLING_TOL:
            raise ConvergenceError(f"step doubling changed observables by {dev:.3e}; reduce dt")
    eff_model = LindbladModel(layout, effective_hamiltonian_rwa(params, layout))
    eff = integrate(eff_model, rho0, t_end, dt, obs, record_every=record_every)
    return DynamicsComparison(full.times, {k: v.real for k, v in full.observables.items()},
                              {k: v.real for k, v in eff.observables.items()}, dev)


@dataclass(frozen=True)
class AdiabaticPoint:
    gamma: float
    ratio: float
    n_full: float
    n_reduced: float
    qubit_full: float
    qubit_reduced: float

    @staticmethod
    def _rel(full: float, reduced: float) -> float:
        return abs(full - reduced) / max(abs(full), 1e-12)

    @property
    def n_rel_error(self) -> float:
        return self._rel(self.n_full, self.n_reduced)

    @property
    def qubit_rel_error(self) -> float:
        return self._rel(self.qubit_full, self.qubit_reduced)


def adiabatic_point(g: float, gamma: float, ratio: float, g_plus: float, delta: float,
                    n_fock: int) -> AdiabaticPoint:
    """Steady-state comparison at G_- = ratio * G_+ for one qubit decay rate.

    Reports <a^+a> from both models and <sigma_+ sigma_-> from the full model
    against the slaved estimate of the reduced one.
    """
    G = GCoefficients(g_plus, ratio * g_plus)
    full = single_resonator_full_model(g, gamma, G, delta, n_fock)
    red = adiabatic_single_resonator_model(g, gamma, G, delta, n_fock)
    rho_f, rho_r = steady_state(full), steady_state(red)
    return AdiabaticPoint(
        gamma, ratio,
        _resolve_observable(full, "n", rho_f).real, _resolve_observable(red, "n", rho_r).real,
        _resolve_observable(full, "qubit_excitation", rho_f).real,
        _resolve_observable(red, "qubit_excitation", rho_r).real,
    )
