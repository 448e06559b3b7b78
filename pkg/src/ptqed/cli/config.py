"""Flat ``section.key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment; blank lines are ignored.
Every key except ``experiment`` has a default (see :data:`SCHEMA`). Unknown
keys are rejected so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

EXPERIMENTS = ("gcoeffs", "dynamics", "adiabatic", "spectrum", "phase-diagram", "transmission")


class ConfigError(ValueError):
    pass


def _float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _int(text: str) -> int:
    return int(text)


def _bool(text: str) -> bool:
    t = text.lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError("expected true or false")


def _float_list(text: str) -> tuple[float, ...]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    return tuple(_float(s) for s in items)


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    return parse


def _text(text: str) -> str:
    return text


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    default: Any
    doc: str


# Defaults: system.* is the loss-dominated single-resonator drive set,
# moments.* the balanced moment-matrix set (g~ = 0.1, delta = 1, kappa = 0.02).
SCHEMA: dict[str, Key] = {
    "system.omega1": Key(_float, 1.0, "resonator 1 frequency (sets the unit)"),
    "system.omega2": Key(_float, 1.0, "resonator 2 frequency"),
    "system.g1": Key(_float, 0.05, "qubit-resonator coupling 1"),
    "system.g2": Key(_float, 0.05, "qubit-resonator coupling 2"),
    "system.J": Key(_float, 0.0, "resonator-resonator coupling"),
    "system.delta": Key(_float, 0.1, "detuning delta"),
    "system.gamma1": Key(_float, 2.0, "qubit 1 decay rate"),
    "system.gamma2": Key(_float, 2.0, "qubit 2 decay rate"),
    "system.kappa1": Key(_float, 0.0, "resonator 1 leakage"),
    "system.kappa2": Key(_float, 0.0, "resonator 2 leakage"),
    "system.eps0_1": Key(_float, 5.0, "qubit 1 static gap"),
    "system.eps0_2": Key(_float, 5.0, "qubit 2 static gap"),
    "system.lambda_plus_1": Key(_float, 2.0, "qubit 1 drive amplitude at Omega_+"),
    "system.lambda_minus_1": Key(_float, 2.0, "qubit 1 drive amplitude at Omega_-"),
    "system.lambda_plus_2": Key(_float, 2.0, "qubit 2 drive amplitude at Omega_+"),
    "system.lambda_minus_2": Key(_float, 2.0, "qubit 2 drive amplitude at Omega_-"),
    "moments.delta": Key(_float, 1.0, "detuning in the moment matrix"),
    "moments.gamma_tilde_1": Key(_float, 0.1, "effective loss of resonator 1"),
    "moments.gamma_tilde_2": Key(_float, 0.1, "effective gain of resonator 2"),
    "moments.kappa": Key(_float, 0.02, "feed-line leakage per resonator"),
    "moments.mode": Key(_choice("nonrwa", "rwa"), "nonrwa", "resonator coupling form"),
    "moments.in_port": Key(_choice("1L", "1R", "2L", "2R"), "1L", "driven port"),
    "moments.out_port": Key(_choice("1L", "1R", "2L", "2R"), "2R", "detected port"),
    "numerics.dt": Key(_float, 0.0, "RK4 step; 0 selects 2 pi/(50 max frequency)"),
    "numerics.t_end": Key(_float, 50.0, "trajectory length"),
    "numerics.n_fock": Key(_int, 20, "Fock truncation for dynamics"),
    "numerics.record_every": Key(_int, 1, "keep every n-th RK4 step"),
    "numerics.step_doubling": Key(_bool, True, "gate dynamics on a dt/2 rerun"),
    "numerics.j_start": Key(_float, 0.0, "J grid start"),
    "numerics.j_stop": Key(_float, 1.0, "J grid stop (inclusive)"),
    "numerics.j_count": Key(_int, 201, "J grid points"),
    "numerics.wd_start": Key(_float, 0.0, "drive-frequency grid start"),
    "numerics.wd_stop": Key(_float, 2.0, "drive-frequency grid stop (inclusive)"),
    "numerics.wd_count": Key(_int, 201, "drive-frequency grid points"),
    "numerics.gt1_start": Key(_float, 0.0, "phase diagram: gamma_tilde_1 start"),
    "numerics.gt1_stop": Key(_float, 0.5, "phase diagram: gamma_tilde_1 stop"),
    "numerics.gt1_count": Key(_int, 51, "phase diagram: gamma_tilde_1 points"),
    "numerics.gt_offset": Key(_float, 0.0, "phase diagram: gamma_tilde_2 - gamma_tilde_1"),
    "numerics.ratio_start": Key(_float, 0.1, "adiabatic: first G-/G+ ratio"),
    "numerics.ratio_stop": Key(_float, 0.9, "adiabatic: last G-/G+ ratio"),
    "numerics.ratio_count": Key(_int, 9, "adiabatic: number of ratios"),
    "numerics.gammas": Key(_float_list, (1.0, 10.0), "adiabatic: qubit decay rates"),
    "numerics.adiabatic_g": Key(_float, 0.05, "adiabatic: qubit-resonator coupling"),
    "numerics.adiabatic_g_plus": Key(_float, 0.4, "adiabatic: G_+ (G_- = ratio G_+)"),
    "numerics.adiabatic_delta": Key(_float, 0.01, "adiabatic: detuning (non-zero)"),
    "numerics.adiabatic_n_fock": Key(_int, 80, "adiabatic: Fock truncation"),
    "output.dir": Key(_text, ".", "output directory"),
    "output.format": Key(_choice("csv", "json"), "csv", "table format"),
    "output.emit_plot_script": Key(_bool, False, "also write a matplotlib script"),
}

_SECTIONS = ("system", "moments", "numerics", "output")


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


@dataclass
class RunConfig:
    experiment: str
    values: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        full = {k: entry.default for k, entry in SCHEMA.items()}
        full.update(self.values)
        self.values = full

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def section(self, name: str) -> dict[str, Any]:
        prefix = name + "."
        return {k[len(prefix):]: v for k, v in self.values.items() if k.startswith(prefix)}

    def dump(self, include_output: bool = True) -> str:
        lines = [f"experiment = {self.experiment}"]
        for sec in _SECTIONS:
            if sec == "output" and not include_output:
                continue
            lines += [f"{k} = {format_value(v)}" for k, v in self.values.items() if k.startswith(sec + ".")]
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        """sha256 of the canonical form without output settings."""
        return hashlib.sha256(self.dump(include_output=False).encode()).hexdigest()


def parse_config(text: str, source: str = "<config>", experiment: str | None = None) -> RunConfig:
    """Parse config text; ``experiment`` is used when the file names none."""
    values: dict[str, Any] = {}
    found_experiment = None
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        seen.add(key)
        if key == "experiment":
            if value not in EXPERIMENTS:
                raise ConfigError(f"{source}:{lineno}: unknown experiment {value!r}")
            found_experiment = value
            continue
        entry = SCHEMA.get(key)
        if entry is None:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = entry.parse(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value {value!r} for {key}: {exc}") from None
    if found_experiment is None:
        if experiment is None:
            raise ConfigError(f"{source}: missing 'experiment'")
        found_experiment = experiment
    elif experiment is not None and experiment != found_experiment:
        raise ConfigError(f"{source}: experiment {found_experiment!r} does not match requested {experiment!r}")
    return RunConfig(found_experiment, values)


def load_config(path, experiment: str | None = None) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from None
    return parse_config(text, str(p), experiment)


def dump_config(cfg: RunConfig) -> str:
    return cfg.dump()
