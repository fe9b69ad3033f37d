"""``qee`` command line: sweeps to CSV, figure data, verification, benchmarks.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 resource guard (environment too large for the full-matrix path).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .bench import run_bench, scaling_exponent
from .csvio import fmt, write_table
from .config import (
    ConfigError,
    RunConfig,
    build_run_config,
    digest,
    load_yaml,
    parse_scenario,
    read_float,
    read_float_list,
    read_int,
    read_int_list,
)
from .dephasing import MAX_FULL_DIM, DimensionGuardError, evolve, evolve_factored
from .linalg import fidelity
from .measure import coherence_factor, qee_from_fidelity, qubit_purity
from .spinbath import SpinBathConfig, run_sweep
from .verify import DEFAULT_COUNTS, THRESHOLDS, run_all

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3

FIG1_C0 = [0.6, 0.7, 0.8, 0.9, 1.0]
FIG2_C0 = [1.0, 0.8, 0.7, 0.6]
FIG2_J = [1, 2, 3, 4]


def write_csv(path: Path, cfg: RunConfig, columns, rows, extra_meta: dict | None = None) -> None:
    meta = {
        "version": f"qee {__version__}",
        "command": cfg.mode,
        "config_digest": digest(cfg.resolved()),
        "seed": cfg.seed,
        **(extra_meta or {}),
    }
    write_table(path, columns, rows, meta)


def thread_cap() -> int:
    raw = os.environ.get("QEE_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("QEE_THREADS", f"expected a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("QEE_THREADS", f"expected a positive integer, got {raw!r}")
    return n


def _parallel_map(fn, items):
    n = min(thread_cap(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# -- simulate --------------------------------------------------------------------


def simulate_rows(cfg: RunConfig):
    """Compute ``(columns, rows)`` for a simulate run."""
    scen = parse_scenario(cfg.raw.get("scenario"), cfg.seed, cfg.points)
    amps = scen.amps
    if scen.kind == "spin_bath":
        res = run_sweep(scen.spin_bath, per_component=scen.per_component)
        cols = ["t", "qee", "coherence", "qubit_purity", "fidelity_total"]
        data = [res.times, res.qee, res.coherence, res.qubit_purity, res.fidelity]
        if scen.per_component:
            cols += [f"fidelity_{k + 1}" for k in range(scen.spin_bath.K)]
            data += list(res.per_component_fidelity)
        return cols, list(zip(*data))

    if scen.kind == "factored":
        env = scen.factored
        a2b2 = abs(amps.a) ** 2 * abs(amps.b) ** 2

        def point(t):
            parts = evolve_factored(env, amps, t)
            fids = [fidelity(p.R00, p.R11) for p in parts]
            total = float(np.prod(fids))
            coh = min(abs(np.prod([p.tr_R01 for p in parts])), 1.0)
            row = [t, qee_from_fidelity(amps, total), coh, 1 - 2 * a2b2 * (1 - coh**2), total]
            return row + (fids if scen.per_component else [])

        cols = ["t", "qee", "coherence", "qubit_purity", "fidelity_total"]
        if scen.per_component:
            cols += [f"fidelity_{k + 1}" for k in range(len(env.components))]
        return cols, _parallel_map(point, list(scen.times))

    model = scen.model
    if 2 * model.env_dim > MAX_FULL_DIM:
        raise DimensionGuardError(
            f"environment dimension {model.env_dim} exceeds the full-matrix cap "
            f"(2N <= {MAX_FULL_DIM}); describe the environment with scenario.type: factored"
        )
    model.generators

    def point(t):
        st = evolve(model, amps, t)
        f = fidelity(st.R00, st.R11)
        return [t, qee_from_fidelity(amps, f), coherence_factor(st), qubit_purity(st), f]

    return ["t", "qee", "coherence", "qubit_purity", "fidelity_total"], _parallel_map(point, list(scen.times))


def cmd_simulate(cfg: RunConfig) -> int:
    if "scenario" not in cfg.raw:
        raise ConfigError("scenario", "simulate needs a scenario section")
    cols, rows = simulate_rows(cfg)
    out = Path(cfg.output or "simulate.csv")
    write_csv(out, cfg, cols, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


# -- figures ---------------------------------------------------------------------


def _fig_grid(sec: dict, where: str, omega_max: float, default_points: int, default_horizon: float, cfg: RunConfig):
    points = cfg.points or read_int(sec, "points", where, default=default_points, minimum=2)
    horizon = read_float(sec, "horizon", where, default=default_horizon, positive=True)
    return (0.0, horizon / omega_max, points)


def cmd_figure1(cfg: RunConfig) -> int:
    sec = cfg.section("figure1")
    w = "figure1"
    K = read_int(sec, "K", w, default=10, minimum=1)
    c0_list = read_float_list(sec, "c0_list", w, default=FIG1_C0)
    omega_max = read_float(sec, "omega_max", w, default=1.0, positive=True)
    grid = _fig_grid(sec, w, omega_max, 1000, 2 * np.pi, cfg)
    outdir = Path(cfg.output or "figure1")
    try:
        runs = [run_sweep(SpinBathConfig.uniform(K, c0, omega_max=omega_max, time_grid=grid)) for c0 in c0_list]
    except ValueError as exc:
        raise ConfigError(w, str(exc)) from exc
    meta = {"K": K, "omega_max": fmt(omega_max)}
    for c0, res in zip(c0_list, runs):
        write_csv(outdir / f"qee_c0_{c0:g}.csv", cfg, ["t", "qee"], zip(res.times, res.qee),
                  {**meta, "c0": fmt(c0)})
    res = runs[0]
    write_csv(outdir / "coherence.csv", cfg, ["t", "coherence"], zip(res.times, res.coherence), meta)
    count = len(runs) + 1

    K_list = read_int_list(sec, "K_list", w, minimum=1)
    if K_list:
        c0 = read_float(sec, "bottom_c0", w, default=0.6)
        for k in K_list:
            r = run_sweep(SpinBathConfig.uniform(k, c0, omega_max=omega_max, time_grid=grid))
            write_csv(outdir / f"K{k}_c0_{c0:g}.csv", cfg, ["t", "qee", "coherence"],
                      zip(r.times, r.qee, r.coherence), {"K": k, "omega_max": fmt(omega_max), "c0": fmt(c0)})
            count += 1
    print(f"wrote {count} files to {outdir}")
    return EXIT_OK


def figure2_horizon(K: int) -> float:
    """Half the bath recurrence time, in units of ``1 / omega_max``.

    With ``w_k = k w_1`` every bath qubit recurs at ``w_1 t = pi``; half of that
    is ``omega_max t = pi K (K + 1) / 4``, and ``pi / (2 w_j)`` equals the
    horizon divided by ``j``.
    """
    return np.pi * K * (K + 1) / 4.0


def _fig2_config(K, j, c0, omega_max, grid):
    if not 1 <= j <= K:
        raise ConfigError("figure2.j", f"pure qubit index {j} outside 1..{K}")
    occ = [c0] * K
    occ[j - 1] = 1.0
    try:
        return SpinBathConfig(K=K, occupations=occ, omega_max=omega_max, time_grid=grid)
    except ValueError as exc:
        raise ConfigError("figure2", str(exc)) from exc


def cmd_figure2(cfg: RunConfig) -> int:
    sec = cfg.section("figure2")
    w = "figure2"
    K = read_int(sec, "K", w, default=10, minimum=1)
    j = read_int(sec, "j", w, default=2)
    c0 = read_float(sec, "c0", w, default=0.6)
    c0_list = read_float_list(sec, "c0_list", w, default=FIG2_C0)
    j_list = read_int_list(sec, "j_list", w, default=[x for x in FIG2_J if x <= K])
    omega_max = read_float(sec, "omega_max", w, default=1.0, positive=True)
    grid = _fig_grid(sec, w, omega_max, 1201, figure2_horizon(K), cfg)
    for jj in [j, *j_list]:
        if not 1 <= jj <= K:
            raise ConfigError("figure2.j", f"pure qubit index {jj} outside 1..{K}")
    outdir = Path(cfg.output or "figure2")
    meta = {"K": K, "omega_max": fmt(omega_max)}
    count = 0
    for cc in c0_list:
        r = run_sweep(_fig2_config(K, j, cc, omega_max, grid))
        write_csv(outdir / f"top_j{j}_c0_{cc:g}.csv", cfg, ["t", "qee"], zip(r.times, r.qee),
                  {**meta, "j": j, "c0": fmt(cc)})
        count += 1
    for jj in j_list:
        r = run_sweep(_fig2_config(K, jj, c0, omega_max, grid))
        write_csv(outdir / f"bottom_c0_{c0:g}_j{jj}.csv", cfg, ["t", "qee"], zip(r.times, r.qee),
                  {**meta, "j": jj, "c0": fmt(c0)})
        count += 1
    write_csv(outdir / "coherence.csv", cfg, ["t", "coherence"], zip(r.times, r.coherence), meta)
    print(f"wrote {count + 1} files to {outdir}")
    return EXIT_OK


# -- verify / bench --------------------------------------------------------------


def cmd_verify(cfg: RunConfig) -> int:
    sec = cfg.section("verify")
    counts_raw = sec.get("counts") or {}
    if not isinstance(counts_raw, dict):
        raise ConfigError("verify.counts", "expected a mapping")
    counts = {}
    for k in counts_raw:
        if k not in DEFAULT_COUNTS:
            raise ConfigError(f"verify.counts.{k}", f"unknown suite; expected one of {sorted(DEFAULT_COUNTS)}")
        counts[k] = read_int(counts_raw, k, "verify.counts", minimum=1)
    for k in cfg.tolerances:
        if k not in THRESHOLDS:
            raise ConfigError(f"tolerances.{k}", f"unknown check; expected one of {sorted(THRESHOLDS)}")
    reports = run_all(cfg.seed, counts, cfg.tolerances)
    for r in reports:
        print(r.line())
    n_pass = sum(r.passed for r in reports)
    print(f"{n_pass}/{len(reports)} checks passed")
    out = Path(cfg.output or "verify.csv")
    write_csv(out, cfg, ["name", "passed", "observed", "threshold", "details"],
              [(r.name, r.passed, r.observed, r.threshold, r.details) for r in reports])
    return EXIT_OK if n_pass == len(reports) else EXIT_VERIFY


def cmd_bench(cfg: RunConfig) -> int:
    sec = cfg.section("bench")
    w = "bench"
    K_list = read_int_list(sec, "K_list", w, default=[3, 5, 8, 10, 20, 40, 80], minimum=1)
    points = cfg.points or read_int(sec, "points", w, default=20, minimum=2)
    repeats = read_int(sec, "repeats", w, default=5, minimum=5)
    full_max_K = read_int(sec, "full_max_K", w, default=8, minimum=1)
    if 2 * 2**full_max_K > MAX_FULL_DIM:
        raise ConfigError("bench.full_max_K", f"full-matrix entries are capped at 2N <= {MAX_FULL_DIM}")
    rows = run_bench(K_list, points, repeats, full_max_K)
    for r in rows:
        print(f"K={r.K:4d}  factored={r.t_factored:.4g}s  full={fmt(r.t_full_measure)}  "
              f"negativity={fmt(r.t_negativity)}")
    big = [(r.K, r.t_factored) for r in rows if r.K >= 10]
    meta = {"points": points, "repeats": repeats}
    if len(big) >= 2:
        expo = scaling_exponent(*zip(*big))
        meta["factored_scaling_exponent"] = f"{expo:.4f}"
        print(f"factored-path scaling exponent in K (K >= 10): {expo:.3f}")
    out = Path(cfg.output or "bench.csv")
    write_csv(out, cfg, ["K", "t_factored", "t_full_measure", "t_negativity"],
              [(r.K, r.t_factored, r.t_full_measure, r.t_negativity) for r in rows], meta)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "figure1": cmd_figure1,
    "figure2": cmd_figure2,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qee", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qee {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="YAML run configuration")
        s.add_argument("--out", help="output CSV file (directory for figure commands)")
        s.add_argument("--seed", type=int, help="overrides the config seed")
        s.add_argument("--points", type=int, help="overrides the number of time points")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        raw = load_yaml(args.config) if args.config else {}
        cfg = build_run_config(args.command, raw, args.seed, args.out, args.points)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"qee: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionGuardError as exc:
        print(f"qee: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
