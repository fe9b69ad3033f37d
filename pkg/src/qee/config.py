"""YAML run configuration for the ``qee`` command line.

Complex matrix entries are written either as plain numbers or as ``[re, im]``
pairs.  See ``configs/schema.md`` in the repository for the full layout.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .dephasing import (
    DephasingModel,
    EnvComponent,
    FactoredEnvironment,
    QubitAmplitudes,
)
from .oracles import random_instance
from .spinbath import SpinBathConfig, time_grid

MODES = ("simulate", "figure1", "figure2", "verify", "bench")
SCENARIO_TYPES = ("spin_bath", "model", "factored", "random")


class ConfigError(ValueError):
    """Invalid or unparseable configuration; ``where`` names the field or line."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def load_yaml(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config ({exc.strerror})") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(where, f"YAML parse error: {problem}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(str(path), "top level must be a mapping")
    return data


def digest(data: Any) -> str:
    canon = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# -- field readers ---------------------------------------------------------------


def _get(d: dict, key: str, where: str, default=None, required: bool = False):
    if key not in d or d[key] is None:
        if required:
            raise ConfigError(f"{where}.{key}", "required field missing")
        return default
    return d[key]


def read_float(d: dict, key: str, where: str, default=None, required=False, positive=False) -> float:
    raw = _get(d, key, where, default, required)
    if raw is None:
        return None
    try:
        val = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}", f"expected a number, got {raw!r}") from None
    if not math.isfinite(val):
        raise ConfigError(f"{where}.{key}", "must be finite")
    if positive and val <= 0:
        raise ConfigError(f"{where}.{key}", f"must be positive, got {val}")
    return val


def read_int(d: dict, key: str, where: str, default=None, required=False, minimum=None) -> int:
    raw = _get(d, key, where, default, required)
    if raw is None:
        return None
    if isinstance(raw, bool) or not isinstance(raw, (int, float)) or int(raw) != raw:
        raise ConfigError(f"{where}.{key}", f"expected an integer, got {raw!r}")
    val = int(raw)
    if minimum is not None and val < minimum:
        raise ConfigError(f"{where}.{key}", f"must be >= {minimum}, got {val}")
    return val


def read_float_list(d: dict, key: str, where: str, default=None) -> list[float] | None:
    raw = _get(d, key, where, default)
    if raw is None:
        return None
    if not isinstance(raw, (list, tuple)) or not raw:
        raise ConfigError(f"{where}.{key}", "expected a non-empty list")
    return [read_float({"v": x}, "v", f"{where}.{key}[{i}]") for i, x in enumerate(raw)]


def read_int_list(d: dict, key: str, where: str, default=None, minimum=None) -> list[int] | None:
    raw = _get(d, key, where, default)
    if raw is None:
        return None
    if not isinstance(raw, (list, tuple)) or not raw:
        raise ConfigError(f"{where}.{key}", "expected a non-empty list")
    return [read_int({"v": x}, "v", f"{where}.{key}[{i}]", minimum=minimum) for i, x in enumerate(raw)]


def parse_complex(raw, where: str) -> complex:
    if isinstance(raw, bool):
        raise ConfigError(where, f"expected a number or [re, im], got {raw!r}")
    if isinstance(raw, (int, float)):
        val = complex(raw)
    elif isinstance(raw, (list, tuple)) and len(raw) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw
    ):
        val = complex(raw[0], raw[1])
    else:
        raise ConfigError(where, f"expected a number or [re, im], got {raw!r}")
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise ConfigError(where, "must be finite")
    return val


def parse_matrix(raw, where: str) -> np.ndarray:
    if not isinstance(raw, (list, tuple)) or not raw or not all(isinstance(r, (list, tuple)) for r in raw):
        raise ConfigError(where, "expected a square matrix as a list of rows")
    n = len(raw)
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(raw):
        if len(row) != n:
            raise ConfigError(f"{where}[{i}]", f"row has {len(row)} entries, expected {n}")
        for j, x in enumerate(row):
            out[i, j] = parse_complex(x, f"{where}[{i}][{j}]")
    return out


def parse_amps(raw, where: str) -> QubitAmplitudes:
    if raw is None:
        return QubitAmplitudes.equal()
    if not isinstance(raw, dict):
        raise ConfigError(where, "expected a mapping with keys a and b")
    if "phase" in raw and "a" not in raw:
        return QubitAmplitudes.equal(read_float(raw, "phase", where))
    a = parse_complex(_get(raw, "a", where, required=True), f"{where}.a")
    b = parse_complex(_get(raw, "b", where, required=True), f"{where}.b")
    if abs(a) == 0 and abs(b) == 0:
        raise ConfigError(where, "amplitudes cannot both vanish")
    return QubitAmplitudes.normalized(a, b)


# -- scenario --------------------------------------------------------------------


@dataclass
class Scenario:
    kind: str
    amps: QubitAmplitudes
    times: np.ndarray
    spin_bath: SpinBathConfig | None = None
    model: DephasingModel | None = None
    factored: FactoredEnvironment | None = None
    per_component: bool = False
    env_dim: int | None = None
    rank: int | None = None


def _time_grid(raw, where: str, points_override: int | None) -> tuple[float, float, int]:
    if not isinstance(raw, dict):
        raise ConfigError(where, "expected a mapping with start, end, points")
    start = read_float(raw, "start", where, default=0.0)
    end = read_float(raw, "end", where, required=True)
    points = read_int(raw, "points", where, required=points_override is None, minimum=2)
    if points_override is not None:
        points = points_override
    unit = _get(raw, "unit", where, default="1")
    if str(unit) not in ("1", "pi"):
        raise ConfigError(f"{where}.unit", f"expected 1 or pi, got {unit!r}")
    if str(unit) == "pi":
        start, end = start * math.pi, end * math.pi
    if end < start:
        raise ConfigError(f"{where}.end", "must not precede start")
    return start, end, points


def parse_scenario(raw, seed: int, points_override: int | None = None, where: str = "scenario") -> Scenario:
    if not isinstance(raw, dict):
        raise ConfigError(where, "expected a mapping")
    kind = _get(raw, "type", where, default="spin_bath")
    if kind not in SCENARIO_TYPES:
        raise ConfigError(f"{where}.type", f"unknown scenario type {kind!r}; expected one of {SCENARIO_TYPES}")
    amps = parse_amps(raw.get("amps"), f"{where}.amps")
    grid = _time_grid(_get(raw, "time_grid", where, required=True), f"{where}.time_grid", points_override)
    per_component = bool(raw.get("per_component", False))
    try:
        if kind == "spin_bath":
            K = read_int(raw, "K", where, required=True, minimum=1)
            occ = read_float_list(raw, "occupations", where)
            if occ is None:
                occ = [read_float(raw, "c0", where, required=True)] * K
            cfg = SpinBathConfig(
                K=K,
                occupations=occ,
                omega_max=read_float(raw, "omega_max", where, default=1.0, positive=True),
                explicit_omegas=read_float_list(raw, "omegas", where),
                amps=amps,
                time_grid=grid,
            )
            return Scenario(kind, amps, cfg.times, spin_bath=cfg, per_component=per_component)
        times = time_grid(*grid)
        if kind == "model":
            model = DephasingModel(
                parse_matrix(_get(raw, "V0", where, required=True), f"{where}.V0"),
                parse_matrix(_get(raw, "V1", where, required=True), f"{where}.V1"),
                parse_matrix(_get(raw, "initial_env", where, required=True), f"{where}.initial_env"),
            )
            return Scenario(kind, amps, times, model=model, env_dim=model.env_dim)
        if kind == "factored":
            comps_raw = _get(raw, "components", where, required=True)
            if not isinstance(comps_raw, list) or not comps_raw:
                raise ConfigError(f"{where}.components", "expected a non-empty list")
            comps = []
            for i, c in enumerate(comps_raw):
                w = f"{where}.components[{i}]"
                if not isinstance(c, dict):
                    raise ConfigError(w, "expected a mapping")
                comps.append(EnvComponent(
                    parse_matrix(_get(c, "initial", w, required=True), f"{w}.initial"),
                    parse_matrix(_get(c, "V0", w, required=True), f"{w}.V0"),
                    parse_matrix(_get(c, "V1", w, required=True), f"{w}.V1"),
                ))
            return Scenario(kind, amps, times, factored=FactoredEnvironment(tuple(comps)),
                            per_component=per_component)
        # random
        env_dim = read_int(raw, "env_dim", where, required=True, minimum=1)
        rank = read_int(raw, "rank", where, default=env_dim, minimum=1)
        if rank > env_dim:
            raise ConfigError(f"{where}.rank", f"must not exceed env_dim={env_dim}")
        if "amps" not in raw:
            model, amps = random_instance(env_dim, rank, seed)
        else:
            model, _ = random_instance(env_dim, rank, seed)
        return Scenario(kind, amps, times, model=model, env_dim=env_dim, rank=rank)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(where, str(exc)) from exc


# -- top level -------------------------------------------------------------------


@dataclass
class RunConfig:
    mode: str
    raw: dict
    seed: int = 0
    output: str | None = None
    points: int | None = None
    tolerances: dict[str, float] = field(default_factory=dict)

    def section(self, name: str) -> dict:
        sec = self.raw.get(name) or {}
        if not isinstance(sec, dict):
            raise ConfigError(name, "expected a mapping")
        return sec

    def resolved(self) -> dict:
        """Everything that determines the output, for the metadata digest."""
        return {"mode": self.mode, "seed": self.seed, "points": self.points, "config": self.raw,
                "tolerances": self.tolerances}


def build_run_config(mode: str, raw: dict, seed: int | None = None, output: str | None = None,
                     points: int | None = None) -> RunConfig:
    if mode not in MODES:
        raise ConfigError("mode", f"unknown mode {mode!r}")
    declared = raw.get("mode")
    if declared is not None and declared != mode:
        raise ConfigError("mode", f"config declares mode {declared!r} but command is {mode!r}")
    file_seed = read_int(raw, "seed", "config", default=0)
    tol_raw = raw.get("tolerances") or {}
    if not isinstance(tol_raw, dict):
        raise ConfigError("tolerances", "expected a mapping")
    tolerances = {str(k): read_float(tol_raw, k, "tolerances") for k in tol_raw}
    if points is not None and points < 2:
        raise ConfigError("--points", "must be at least 2")
    return RunConfig(
        mode=mode,
        raw=raw,
        seed=file_seed if seed is None else seed,
        output=output if output is not None else raw.get("output"),
        points=points,
        tolerances=tolerances,
    )
