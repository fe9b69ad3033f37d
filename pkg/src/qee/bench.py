"""Timing of the factored measure against full-space evaluation and negativity."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

import numpy as np

from .dephasing import MAX_FULL_DIM, assemble_full, evolve, evolve_factored
from .measure import qee_factored, qee_state
from .oracles import negativity
from .spinbath import SpinBathConfig


@dataclass
class BenchRow:
    K: int
    t_factored: float
    t_full_measure: float | None
    t_negativity: float | None


def _median_time(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def bench_one(K: int, n_points: int, repeats: int = 5, full_max_K: int = 8, c0: float = 0.6) -> BenchRow:
    """Median wall-clock seconds for one sweep of ``n_points`` time points."""
    cfg = SpinBathConfig.uniform(K, c0, time_grid=(0.0, 2 * np.pi, n_points))
    env = cfg.environment()
    times = cfg.times
    amps = cfg.amps

    def factored():
        for t in times:
            qee_factored(amps, evolve_factored(env, amps, t))

    t_fact = _median_time(factored, repeats)
    if K > full_max_K or 2 * 2**K > MAX_FULL_DIM:
        return BenchRow(K, t_fact, None, None)

    model = env.to_model()
    model.generators  # decomposed once, outside the timed region

    def full_measure():
        for t in times:
            qee_state(evolve(model, amps, t))

    def full_negativity():
        for t in times:
            negativity(assemble_full(evolve(model, amps, t)))

    return BenchRow(K, t_fact, _median_time(full_measure, repeats), _median_time(full_negativity, repeats))


def scaling_exponent(Ks, seconds) -> float:
    """Least-squares slope of log(time) against log(K)."""
    slope, _ = np.polyfit(np.log(np.asarray(Ks, float)), np.log(np.asarray(seconds, float)), 1)
    return float(slope)


def run_bench(K_list, n_points: int, repeats: int = 5, full_max_K: int = 8) -> list[BenchRow]:
    return [bench_one(K, n_points, repeats, full_max_K) for K in K_list]
