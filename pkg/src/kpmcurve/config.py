"""Flat ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored.  Lists are comma separated.
Keys (defaults in parentheses):

    kappa          four increasing reals           (-1.5, -0.75, 0.5, 2)
    epsilon        perturbation, >= 0              (0.01)
    weights        w13, w23, w14, w24, all > 0     (1, 1, 1, 1)
    C              imaginary parts of the theta shift (0, 0, 0, 0)
    t0             divisor normalization time      (0, 0, 0)
    grid           x_min, x_max, n_x, y_min, y_max, n_y   (-60, 60, 61, 0, 120, 61)
    t_values       times for render                (0)
    residual_grid  grid for the KP residual check  (-10, 10, 5, -10, 10, 5)
    residual_t     times for the KP residual check (-1, 0, 1)
    concordance_eps  epsilons for the concordance check (0.1, 0.01, 0.001)
    precision      standard | extended             (standard)
    tol.<check>    tolerance override for one check
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .checks import TOLERANCES
from .numerics.precision import MODES


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    kappa: tuple = (-1.5, -0.75, 0.5, 2.0)
    epsilon: float = 0.01
    weights: tuple = (1.0, 1.0, 1.0, 1.0)
    C: tuple = (0.0, 0.0, 0.0, 0.0)
    t0: tuple = (0.0, 0.0, 0.0)
    grid: tuple = (-60.0, 60.0, 61, 0.0, 120.0, 61)
    t_values: tuple = (0.0,)
    residual_grid: tuple = (-10.0, 10.0, 5, -10.0, 10.0, 5)
    residual_t: tuple = (-1.0, 0.0, 1.0)
    concordance_eps: tuple = (0.1, 0.01, 0.001)
    precision: str = "standard"
    tolerances: dict = field(default_factory=dict)

    def render_grid(self):
        return tuple(self.grid) + (self.t_values,)

    def check_grid(self):
        return tuple(self.residual_grid) + (self.residual_t,)

    def tolerance(self, name: str) -> float:
        return float(self.tolerances.get(name, TOLERANCES[self.precision][name]))

    def with_precision(self, mode: str) -> "RunConfig":
        if mode not in MODES:
            raise ConfigError(f"--precision: unknown mode {mode!r}")
        return replace(self, precision=mode)


def _reals(text, n, where, key):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if n is not None and len(parts) != n:
        raise ConfigError(f"{where}: {key} needs {n} values, got {len(parts)}")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"{where}: {key}: {exc}") from None
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{where}: {key}: values must be finite")
    if not vals:
        raise ConfigError(f"{where}: {key}: empty list")
    return vals


def _grid(text, where, key):
    g = _reals(text, 6, where, key)
    nx, ny = g[2], g[5]
    if nx != int(nx) or ny != int(ny) or nx < 1 or ny < 1:
        raise ConfigError(f"{where}: {key}: n_x and n_y must be positive integers")
    if not (g[0] < g[1] or nx == 1) or not (g[3] < g[4] or ny == 1):
        raise ConfigError(f"{where}: {key}: need x_min < x_max and y_min < y_max")
    return (g[0], g[1], int(nx), g[3], g[4], int(ny))


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    vals = {}
    tols = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{n}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in vals or key in tols:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        if key.startswith("tol."):
            name = key[4:]
            if name not in TOLERANCES["standard"]:
                raise ConfigError(f"{where}: unknown check {name!r}")
            (tols[name],) = _reals(value, 1, where, key)
            if tols[name] < 0:
                raise ConfigError(f"{where}: {key} must be >= 0")
            continue
        vals[key] = (value, where)

    out = {}
    for key, (value, where) in vals.items():
        if key == "kappa":
            k = _reals(value, 4, where, key)
            if any(b <= a for a, b in zip(k, k[1:])):
                raise ConfigError(f"{where}: kappa must be strictly increasing, got {k}")
            out[key] = k
        elif key == "epsilon":
            (e,) = _reals(value, 1, where, key)
            if e < 0:
                raise ConfigError(f"{where}: epsilon must be >= 0")
            out[key] = e
        elif key == "weights":
            w = _reals(value, 4, where, key)
            if any(v <= 0 for v in w):
                raise ConfigError(f"{where}: weights must be positive")
            out[key] = w
        elif key == "C":
            out[key] = _reals(value, 4, where, key)
        elif key == "t0":
            out[key] = _reals(value, 3, where, key)
        elif key in ("grid", "residual_grid"):
            out[key] = _grid(value, where, key)
        elif key in ("t_values", "residual_t", "concordance_eps"):
            out[key] = _reals(value, None, where, key)
        elif key == "precision":
            if value not in MODES:
                raise ConfigError(f"{where}: precision must be one of {sorted(MODES)}")
            out[key] = value
        else:
            raise ConfigError(f"{where}: unknown key {key!r}")
    return RunConfig(**out, tolerances=tols)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
