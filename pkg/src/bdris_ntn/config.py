"""Scenario constants, solver options and the flat ``key = value`` config format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

SPEED_OF_LIGHT = 299_792_458.0

PATHLOSS_MODELS = ("normalized", "physical")


class ConfigError(ValueError):
    """Raised for malformed config files or values violating an invariant."""


def dbm_to_w(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def w_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class SolverOptions:
    """Iteration limits, step sizes and tolerances of the alternating solver.

    Bisection tolerances are relative to the target they bracket (the
    per-user power cap, or the total power budget).
    """

    max_ao_iterations: int = 40
    max_ris_iterations: int = 80
    step_size: float = 0.2
    dual_step: float = 0.1
    ao_tolerance: float = 1e-5
    phase_tolerance: float = 1e-5
    constraint_tolerance: float = 1e-6
    bisect_tol_lambda: float = 1e-6
    bisect_tol_nu: float = 1e-6
    max_bisect: int = 60
    max_halvings: int = 10
    retraction: str = "svd"

    def __post_init__(self):
        for name in ("step_size", "dual_step", "ao_tolerance", "phase_tolerance",
                     "constraint_tolerance", "bisect_tol_lambda", "bisect_tol_nu"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be strictly positive")
        for name in ("max_ao_iterations", "max_ris_iterations", "max_bisect"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.max_halvings < 0:
            raise ConfigError("max_halvings must be non-negative")
        if self.retraction not in ("svd", "lowrank"):
            raise ConfigError("retraction must be 'svd' or 'lowrank'")


def _square_grid(m: int) -> tuple[int, int]:
    mx = int(math.isqrt(m))
    while m % mx:
        mx -= 1
    return m // mx, mx


@dataclass(frozen=True)
class SystemConfig:
    """All scenario constants. Powers are stored in watts, distances in metres."""

    num_users: int = 4
    ris_elements: int = 64
    grid_x: int | None = None
    grid_y: int | None = None
    haps_power_w: float = dbm_to_w(35.0)
    noise_w: float = dbm_to_w(-90.0)
    leo_power_w: float = dbm_to_w(40.0)
    interference_cap_w: float = 1e-2
    pathloss_exponent: float = 2.7
    rician_factor: float = 10.0
    carrier_hz: float = 2e9
    haps_speed: float = 30.0
    leo_speed: float = 7500.0
    block_duration: float = 1e-3
    element_spacing: float | None = None
    sut_distance_range: tuple[float, float] = (20_000.0, 22_000.0)
    put_distance_range: tuple[float, float] = (20_000.0, 22_000.0)
    leo_distance_range: tuple[float, float] = (500_000.0, 550_000.0)
    pathloss_model: str = "normalized"
    reference_distance_m: float = 1000.0
    block_index: int = 1
    trials: int = 1000
    seed: int = 20250908
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if self.num_users < 1 or self.ris_elements < 1:
            raise ConfigError("num_users and ris_elements must be at least 1")
        mx, my = self.grid
        if mx * my != self.ris_elements:
            raise ConfigError(
                f"grid_x * grid_y = {mx * my} does not match ris_elements = {self.ris_elements}")
        for name in ("haps_power_w", "noise_w", "leo_power_w", "interference_cap_w",
                     "carrier_hz", "block_duration", "reference_distance_m"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be strictly positive")
        if not 2.0 <= self.pathloss_exponent <= 4.0:
            raise ConfigError("pathloss_exponent must lie in [2, 4]")
        if self.rician_factor < 0:
            raise ConfigError("rician_factor must be non-negative")
        if self.haps_speed < 0 or self.leo_speed < 0:
            raise ConfigError("speeds must be non-negative")
        if not 0 < self.spacing <= self.wavelength / 2 * (1 + 1e-12):
            raise ConfigError("element_spacing must lie in (0, wavelength/2]")
        for name in ("sut_distance_range", "put_distance_range", "leo_distance_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ConfigError(f"{name} must satisfy 0 < low <= high")
        if self.pathloss_model not in PATHLOSS_MODELS:
            raise ConfigError(f"pathloss_model must be one of {PATHLOSS_MODELS}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.block_index < 0:
            raise ConfigError("block_index must be non-negative")

    @property
    def grid(self) -> tuple[int, int]:
        if self.grid_x is None and self.grid_y is None:
            return _square_grid(self.ris_elements)
        if self.grid_x is None:
            return self.ris_elements // self.grid_y, self.grid_y
        if self.grid_y is None:
            return self.grid_x, self.ris_elements // self.grid_x
        return self.grid_x, self.grid_y

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def spacing(self) -> float:
        return self.wavelength / 2 if self.element_spacing is None else self.element_spacing

    @property
    def phase_step(self) -> float:
        """Inter-element phase increment 2*pi*f_c*q/c."""
        return 2 * math.pi * self.carrier_hz * self.spacing / SPEED_OF_LIGHT

    @property
    def leo_power_per_put(self) -> float:
        return self.leo_power_w / self.num_users

    def replace(self, **changes) -> SystemConfig:
        """Copy with changes; ``ris_elements`` changes reset an implied grid."""
        if "ris_elements" in changes and "grid_x" not in changes and "grid_y" not in changes:
            changes.setdefault("grid_x", None)
            changes.setdefault("grid_y", None)
        solver_changes = {k: changes.pop(k) for k in list(changes) if k in _SOLVER_KEYS}
        if solver_changes:
            changes["solver"] = dataclasses.replace(self.solver, **solver_changes)
        return dataclasses.replace(self, **changes)


_SOLVER_KEYS = {f.name for f in dataclasses.fields(SolverOptions)}

# config-file key -> (field name, converter)
_DBM_KEYS = {
    "haps_power_dbm": "haps_power_w",
    "noise_dbm": "noise_w",
    "leo_power_dbm": "leo_power_w",
}
_ALIASES = {
    "monte_carlo_trials": "trials",
    "interference_threshold_w": "interference_cap_w",
    "riemannian_step_size": "step_size",
    "dual_ascent_step": "dual_step",
    "dual_bisection_tolerance": "bisect_tol_nu",
    "max_bisection_iterations": "max_bisect",
}
_RANGE_FIELDS = {"sut_distance_range", "put_distance_range", "leo_distance_range"}
_STR_FIELDS = {"pathloss_model", "retraction"}


def _field_types() -> dict[str, type]:
    types: dict[str, type] = {}
    defaults_sys = SystemConfig()
    defaults_solver = SolverOptions()
    for f in dataclasses.fields(SystemConfig):
        if f.name == "solver":
            continue
        types[f.name] = type(getattr(defaults_sys, f.name))
    for f in dataclasses.fields(SolverOptions):
        types[f.name] = type(getattr(defaults_solver, f.name))
    types["grid_x"] = types["grid_y"] = int
    types["element_spacing"] = float
    return types


def _parse_value(name: str, raw: str, typ: type, lineno: int):
    try:
        if name in _RANGE_FIELDS:
            parts = [p.strip() for p in raw.split(",")]
            if len(parts) != 2:
                raise ValueError("expected 'low, high'")
            return float(parts[0]), float(parts[1])
        if name in _STR_FIELDS:
            return raw
        if typ is int:
            value = float(raw)
            if not value.is_integer():
                raise ValueError("expected an integer")
            return int(value)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: bad value for {name!r}: {raw!r} ({exc})") from None


def parse_config(text: str) -> SystemConfig:
    """Parse flat ``key = value`` text. Blank lines and ``#`` comments are ignored."""
    types = _field_types()
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key in _DBM_KEYS:
            name = _DBM_KEYS[key]
            values[name] = dbm_to_w(_parse_value(key, raw, float, lineno))
            continue
        name = _ALIASES.get(key, key)
        if name not in types or name == "solver":
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[name] = _parse_value(name, raw, types[name], lineno)
        if name == "bisect_tol_nu" and key == "dual_bisection_tolerance":
            values["bisect_tol_lambda"] = values[name]

    solver_values = {k: values.pop(k) for k in list(values) if k in _SOLVER_KEYS}
    try:
        return SystemConfig(solver=SolverOptions(**solver_values), **values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> SystemConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
