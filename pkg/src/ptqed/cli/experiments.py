"""Experiment definitions: validation, independent work items and table assembly.

Work items are plain tuples handled by module-level functions so the same
code runs inline (``--jobs 1``) and in worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from ..engineer import (
    DriveParams,
    GCoefficients,
    HierarchyError,
    SystemParams,
    bessel_g,
    check_hierarchy,
)
from ..inout import Port, clip_log_power, find_ridges, transmission_column
from ..lindblad import adiabatic_point, dynamics_comparison, squeezed_vacuum_occupation
from ..ptspectrum import EffectiveRates, classify, critical_couplings, relaxation_rate
from .config import ConfigError, RunConfig
from .table import ResultTable


@dataclass
class Output:
    stem: str
    table: ResultTable
    plot: dict | None = None  # keyword arguments for table.plot_script


# --------------------------------------------------------------------------
# Config -> physics objects
# --------------------------------------------------------------------------


def system_params(cfg: RunConfig) -> SystemParams:
    s = cfg.section("system")
    try:
        drives = tuple(
            DriveParams.derived(s[f"eps0_{j}"], s[f"lambda_plus_{j}"], s[f"lambda_minus_{j}"],
                                s[f"omega{j}"], s["delta"])
            for j in (1, 2))
        for d in drives:
            for lam, om in ((d.lambda_plus, d.omega_plus), (d.lambda_minus, d.omega_minus)):
                if 2 * lam / om > 4:
                    raise HierarchyError(f"Bessel argument 2 lambda/Omega = {2 * lam / om:g} exceeds 4")
        return SystemParams(
            omega1=s["omega1"], omega2=s["omega2"], g1=s["g1"], g2=s["g2"], J=s["J"],
            delta=s["delta"], gamma1=s["gamma1"], gamma2=s["gamma2"],
            kappa1=s["kappa1"], kappa2=s["kappa2"], drives=drives)
    except ValueError as exc:
        raise ConfigError(f"system parameters: {exc}") from None


def rates(cfg: RunConfig) -> EffectiveRates:
    try:
        return EffectiveRates(cfg["moments.gamma_tilde_1"], cfg["moments.gamma_tilde_2"])
    except ValueError as exc:
        raise ConfigError(f"moments: {exc}") from None


def grid(cfg: RunConfig, axis: str, label: str) -> np.ndarray:
    start, stop, count = (cfg[f"numerics.{axis}_{k}"] for k in ("start", "stop", "count"))
    if count < 1:
        raise ConfigError(f"{label} grid is empty (numerics.{axis}_count = {count})")
    if count > 1 and not stop > start:
        raise ConfigError(f"{label} grid must ascend (numerics.{axis}_stop > numerics.{axis}_start)")
    return np.linspace(start, stop, count)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _positive_delta(cfg: RunConfig) -> None:
    _require(cfg["moments.delta"] > 0, "moments.delta must be > 0 for the critical couplings")


# --------------------------------------------------------------------------
# gcoeffs
# --------------------------------------------------------------------------


def _validate_gcoeffs(cfg):
    system_params(cfg)


def _tasks_gcoeffs(cfg):
    return [("gcoeffs", system_params(cfg))]


def _work_gcoeffs(task):
    params = task[1]
    row = []
    for j in range(2):
        d = params.drive(j)
        G = bessel_g(d)
        row += [d.omega_plus, d.omega_minus, G.g_plus, G.g_minus, G.ratio,
                relaxation_rate(params.g(j), params.gamma(j), G)]
    return row


def _build_gcoeffs(cfg, results):
    cols = []
    for suffix in ("", "_2"):
        cols += [f"omega_plus{suffix}", f"omega_minus{suffix}", f"g_plus{suffix}", f"g_minus{suffix}",
                 f"ratio{suffix}", f"relaxation_rate{suffix}"]
    warnings = check_hierarchy(system_params(cfg))
    meta = {"hierarchy_warnings": "; ".join(warnings) if warnings else "none"}
    return [Output("gcoeffs", ResultTable("gcoeffs", cols, [results[0]], meta))]


# --------------------------------------------------------------------------
# dynamics
# --------------------------------------------------------------------------


def _validate_dynamics(cfg):
    system_params(cfg)
    _require(cfg["numerics.t_end"] > 0, "numerics.t_end must be > 0")
    _require(cfg["numerics.dt"] >= 0, "numerics.dt must be >= 0 (0 = automatic)")
    _require(cfg["numerics.n_fock"] >= 2, "numerics.n_fock must be >= 2")
    _require(cfg["numerics.record_every"] >= 1, "numerics.record_every must be >= 1")


def _tasks_dynamics(cfg):
    dt = cfg["numerics.dt"] or None
    return [("dynamics", system_params(cfg), cfg["numerics.n_fock"], cfg["numerics.t_end"], dt,
             cfg["numerics.record_every"], cfg["numerics.step_doubling"])]


def _work_dynamics(task):
    _, params, n_fock, t_end, dt, every, doubling = task
    c = dynamics_comparison(params, n_fock, t_end, dt, every, doubling)
    rows = [[float(t), float(c.full["N"][k]), float(c.effective["N"][k]),
             float(c.full["sz"][k]), float(c.effective["sz"][k]),
             float(c.full["sx"][k]), float(c.effective["sx"][k])]
            for k, t in enumerate(c.times)]
    return rows, c.max_deviation("N"), c.max_deviation("sz"), c.step_doubling


def _build_dynamics(cfg, results):
    rows, dev_n, dev_sz, sd = results[0]
    cols = ["t", "N_full", "N_eff", "sz_full", "sz_eff", "sx_full", "sx_eff"]
    warnings = check_hierarchy(system_params(cfg))
    meta = {"max_dev_N": dev_n, "max_dev_sz": dev_sz, "step_doubling_change": sd,
            "hierarchy_warnings": "; ".join(warnings) if warnings else "none"}
    table = ResultTable("dynamics", cols, rows, meta)
    return [Output("dynamics", table, {"x": "t", "ys": ["N_full", "N_eff"]})]


# --------------------------------------------------------------------------
# adiabatic
# --------------------------------------------------------------------------


def _validate_adiabatic(cfg):
    ratios = grid(cfg, "ratio", "G-/G+ ratio")
    _require(bool(np.all((ratios > 0) & (ratios < 1))), "ratios must lie in (0, 1) (loss dominated)")
    _require(len(cfg["numerics.gammas"]) > 0, "numerics.gammas is empty")
    _require(all(g > 0 for g in cfg["numerics.gammas"]), "numerics.gammas must be > 0")
    _require(cfg["numerics.adiabatic_g"] > 0, "numerics.adiabatic_g must be > 0")
    _require(cfg["numerics.adiabatic_g_plus"] > 0, "numerics.adiabatic_g_plus must be > 0")
    _require(cfg["numerics.adiabatic_n_fock"] >= 2, "numerics.adiabatic_n_fock must be >= 2")


def _tasks_adiabatic(cfg):
    ratios = grid(cfg, "ratio", "G-/G+ ratio")
    return [("adiabatic", cfg["numerics.adiabatic_g"], gamma, float(r), cfg["numerics.adiabatic_g_plus"],
             cfg["numerics.adiabatic_delta"], cfg["numerics.adiabatic_n_fock"])
            for gamma in cfg["numerics.gammas"] for r in ratios]


def _work_adiabatic(task):
    _, g, gamma, ratio, g_plus, delta, n_fock = task
    p = adiabatic_point(g, gamma, ratio, g_plus, delta, n_fock)
    G = GCoefficients(g_plus, ratio * g_plus)
    return [float(gamma), float(ratio), p.n_full, p.n_reduced, p.n_rel_error,
            p.qubit_full, p.qubit_reduced, p.qubit_rel_error, squeezed_vacuum_occupation(G)]


def _build_adiabatic(cfg, results):
    cols = ["gamma", "ratio", "n_full", "n_reduced", "n_rel_error",
            "qubit_full", "qubit_reduced", "qubit_rel_error", "n_squeezed_formula"]
    meta = {"g": cfg["numerics.adiabatic_g"], "g_plus": cfg["numerics.adiabatic_g_plus"],
            "delta": cfg["numerics.adiabatic_delta"], "n_fock": cfg["numerics.adiabatic_n_fock"]}
    table = ResultTable("adiabatic", cols, list(results), meta)
    return [Output("adiabatic", table, {"x": "ratio", "ys": ["n_rel_error", "qubit_rel_error"]})]


# --------------------------------------------------------------------------
# spectrum
# --------------------------------------------------------------------------


def _validate_spectrum(cfg):
    grid(cfg, "j", "J")
    rates(cfg)
    _positive_delta(cfg)


def _tasks_spectrum(cfg):
    r, d, mode = rates(cfg), cfg["moments.delta"], cfg["moments.mode"]
    return [("spectrum", float(J), d, r, mode) for J in grid(cfg, "j", "J")]


def _work_spectrum(task):
    _, J, delta, r, mode = task
    p = classify(delta, J, r, mode)
    pp, pm = p.eigenvalues[0], p.eigenvalues[1]
    return [J, pp.real, pm.real, pp.imag, pm.imag, p.phase.value, p.is_ep, mode]


def _build_spectrum(cfg, results):
    jc1, jc2 = critical_couplings(cfg["moments.delta"], rates(cfg))
    cols = ["J", "re_w_pp", "re_w_pm", "im_w_pp", "im_w_pm", "phase", "is_ep", "mode"]
    meta = {"delta": cfg["moments.delta"], "gamma_tilde_1": cfg["moments.gamma_tilde_1"],
            "gamma_tilde_2": cfg["moments.gamma_tilde_2"], "J_c1": jc1, "J_c2": jc2}
    table = ResultTable("spectrum", cols, list(results), meta)
    return [Output("spectrum", table, {"x": "J", "ys": ["re_w_pp", "re_w_pm", "im_w_pp", "im_w_pm"]})]


# --------------------------------------------------------------------------
# phase-diagram
# --------------------------------------------------------------------------


def _validate_phase_diagram(cfg):
    grid(cfg, "j", "J")
    gt = grid(cfg, "gt1", "gamma_tilde_1")
    _require(gt[0] >= 0, "gamma_tilde_1 grid must be >= 0")
    _require(gt[0] + cfg["numerics.gt_offset"] >= 0, "gamma_tilde_2 = gamma_tilde_1 + offset must be >= 0")
    _positive_delta(cfg)


def _tasks_phase_diagram(cfg):
    js = tuple(float(J) for J in grid(cfg, "j", "J"))
    off = cfg["numerics.gt_offset"]
    return [("phase-diagram", float(g1), float(g1) + off, js, cfg["moments.delta"], cfg["moments.mode"])
            for g1 in grid(cfg, "gt1", "gamma_tilde_1")]


_PHASE_CODE = {"BrokenPT": 0, "ExactPT": 1, "Unstable": 2}


def _work_phase_diagram(task):
    _, g1, g2, js, delta, mode = task
    r = EffectiveRates(g1, g2)
    jc1, jc2 = critical_couplings(delta, r)
    rows = []
    for J in js:
        p = classify(delta, J, r, mode)
        rows.append([g1, g2, J, p.phase.value, _PHASE_CODE[p.phase.value], p.is_ep, jc1, jc2])
    return rows


def _build_phase_diagram(cfg, results):
    cols = ["gamma_tilde_1", "gamma_tilde_2", "J", "phase", "phase_code", "is_ep", "J_c1", "J_c2"]
    rows = [row for block in results for row in block]
    meta = {"delta": cfg["moments.delta"], "mode": cfg["moments.mode"], "gt_offset": cfg["numerics.gt_offset"]}
    table = ResultTable("phase-diagram", cols, rows, meta)
    return [Output("phase-diagram", table, {"x": "J", "ys": ["gamma_tilde_1"], "kind": "map", "z": "phase_code"})]


# --------------------------------------------------------------------------
# transmission
# --------------------------------------------------------------------------


def _validate_transmission(cfg):
    grid(cfg, "j", "J")
    grid(cfg, "wd", "drive-frequency")
    rates(cfg)
    _require(cfg["moments.kappa"] >= 0, "moments.kappa must be >= 0")
    _positive_delta(cfg)


def _tasks_transmission(cfg):
    w = tuple(float(x) for x in grid(cfg, "wd", "drive-frequency"))
    return [("transmission", float(J), w, rates(cfg), cfg["moments.kappa"], cfg["moments.mode"],
             cfg["moments.delta"], cfg["moments.in_port"], cfg["moments.out_port"])
            for J in grid(cfg, "j", "J")]


def _work_transmission(task):
    _, J, w, r, kappa, mode, delta, in_port, out_port = task
    cols, stable = transmission_column(J, w, r, kappa, mode, delta, Port.parse(in_port))
    t = cols[Port.parse(out_port)]
    lp = clip_log_power(t)
    rows = [[J, wd, float(z.real), float(z.imag), float(v), stable] for wd, z, v in zip(w, t, lp)]
    ridges = find_ridges(np.asarray(w), np.abs(t) ** 2)
    p = classify(delta, J, r, mode)
    ridge_rows = [[J, k, float(x), p.eigenvalues[0].real, p.eigenvalues[1].real, p.phase.value]
                  for k, x in enumerate(ridges)]
    return rows, ridge_rows


def _build_transmission(cfg, results):
    rows = [row for block, _ in results for row in block]
    ridge_rows = [row for _, block in results for row in block]
    meta = {"delta": cfg["moments.delta"], "gamma_tilde_1": cfg["moments.gamma_tilde_1"],
            "gamma_tilde_2": cfg["moments.gamma_tilde_2"], "kappa": cfg["moments.kappa"],
            "mode": cfg["moments.mode"], "in_port": cfg["moments.in_port"],
            "out_port": cfg["moments.out_port"], "log_power_clip": "[-12, 2]"}
    tmap = ResultTable("transmission", ["J", "omega_d", "re_T", "im_T", "log_power", "stable"], rows, meta)
    ridges = ResultTable("transmission_ridges",
                         ["J", "ridge_index", "omega_d", "re_w_pp", "re_w_pm", "phase"], ridge_rows, dict(meta))
    return [Output("transmission", tmap, {"x": "omega_d", "ys": ["J"], "kind": "map", "z": "log_power"}),
            Output("transmission_ridges", ridges, {"x": "J", "ys": ["omega_d", "re_w_pp", "re_w_pm"]})]


# --------------------------------------------------------------------------
# Registry
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    validate: Callable[[RunConfig], None]
    tasks: Callable[[RunConfig], list]
    build: Callable[[RunConfig, list], list[Output]]


_WORKERS: dict[str, Callable[[tuple], Any]] = {
    "gcoeffs": _work_gcoeffs,
    "dynamics": _work_dynamics,
    "adiabatic": _work_adiabatic,
    "spectrum": _work_spectrum,
    "phase-diagram": _work_phase_diagram,
    "transmission": _work_transmission,
}


def run_task(task: tuple) -> Any:
    return _WORKERS[task[0]](task)


EXPERIMENTS: dict[str, Experiment] = {
    "gcoeffs": Experiment("gcoeffs", "drive-induced sideband weights G+, G- and their ratio",
                          _validate_gcoeffs, _tasks_gcoeffs, _build_gcoeffs),
    "dynamics": Experiment("dynamics", "<N>, <sz>, <sx> from |up>|1>: exact drive vs effective RWA Hamiltonian",
                           _validate_dynamics, _tasks_dynamics, _build_dynamics),
    "adiabatic": Experiment("adiabatic", "steady-state error of the adiabatic elimination vs G-/G+",
                            _validate_adiabatic, _tasks_adiabatic, _build_adiabatic),
    "spectrum": Experiment("spectrum", "moment-matrix eigenfrequencies and PT phase vs J",
                           _validate_spectrum, _tasks_spectrum, _build_spectrum),
    "phase-diagram": Experiment("phase-diagram", "PT phase over (J, gamma_tilde_1) with fixed gain-loss offset",
                                _validate_phase_diagram, _tasks_phase_diagram, _build_phase_diagram),
    "transmission": Experiment("transmission", "log transmitted power over (J, w_d) plus ridge positions",
                               _validate_transmission, _tasks_transmission, _build_transmission),
}
