"""Central qubit coupled to K non-interacting environment qubits.

Each bath qubit starts in ``diag(c0, 1 - c0)`` and evolves as
``w1 = exp(i w t)|+><+| + exp(-i w t)|-><-|`` when the central qubit is in
``|1>`` and not at all when it is in ``|0>``.  All quantities here have closed
forms, vectorized over time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dephasing import EnvComponent, FactoredEnvironment, QubitAmplitudes

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


def omega_schedule(K: int, omega_max: float) -> np.ndarray:
    """Linear frequency ladder ``w_k = 2 w_m k / (K (K + 1))`` summing to ``w_m``."""
    if K < 1:
        raise ValueError(f"K must be positive, got {K}")
    k = np.arange(1, K + 1, dtype=float)
    return 2.0 * omega_max * k / (K * (K + 1))


def spin_generator(omega: float) -> np.ndarray:
    """Hermitian generator whose propagator is :func:`spin_propagator`."""
    return -omega * SIGMA_X


def spin_propagator(omega: float, t: float) -> np.ndarray:
    c, s = np.cos(omega * t), np.sin(omega * t)
    # e^{iwt}|+><+| + e^{-iwt}|-><-| = cos(wt) 1 + i sin(wt) sigma_x
    return np.array([[c, 1j * s], [1j * s, c]])


def initial_state(c0: float) -> np.ndarray:
    return np.diag([c0, 1.0 - c0]).astype(complex)


def conditional_R11(c0: float, omega: float, t: float) -> np.ndarray:
    c1 = 1.0 - c0
    c, s = np.cos(omega * t), np.sin(omega * t)
    off = (c0 - c1) * s * c
    return np.array([
        [c0 * c * c + c1 * s * s, -1j * off],
        [1j * off, c0 * s * s + c1 * c * c],
    ])


def component_fidelity(c0, omega, t):
    """Closed-form fidelity between ``R00`` and ``R11`` of one bath qubit.

    Broadcasts over array arguments.
    """
    c0 = np.asarray(c0, dtype=float)
    c1 = 1.0 - c0
    cos2 = np.cos(np.multiply(omega, t)) ** 2
    sin2 = 1.0 - cos2
    delta = (c0**2 - c1**2) ** 2 * cos2**2 + 4 * c0 * c1 * (c0 - c1) ** 2 * cos2 * sin2
    root = np.sqrt(np.maximum(delta, 0.0))
    base = (c0**2 + c1**2) * cos2 + 2 * c0 * c1 * sin2
    lam_p = np.maximum(0.5 * (base + root), 0.0)
    lam_m = np.maximum(0.5 * (base - root), 0.0)
    return np.clip((np.sqrt(lam_p) + np.sqrt(lam_m)) ** 2, 0.0, 1.0)


def bath_coherence(omegas, t):
    """Signed decoherence factor ``prod_k cos(w_k t)``; broadcasts over ``t``."""
    om = np.asarray(omegas, dtype=float)
    tt = np.asarray(t, dtype=float)
    return np.prod(np.cos(np.multiply.outer(om, tt)), axis=0)


def bath_purity(occupations) -> float:
    c0 = np.asarray(occupations, dtype=float)
    return float(np.prod(1.0 - 2.0 * c0 * (1.0 - c0)))


@dataclass
class SpinBathConfig:
    K: int
    occupations: Sequence[float]
    omega_max: float = 1.0
    explicit_omegas: Sequence[float] | None = None
    amps: QubitAmplitudes = field(default_factory=QubitAmplitudes.equal)
    time_grid: tuple[float, float, int] = (0.0, 2 * np.pi, 1000)

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be positive, got {self.K}")
        if len(self.occupations) != self.K:
            raise ValueError(f"expected {self.K} occupations, got {len(self.occupations)}")
        if any(not 0.0 <= c <= 1.0 for c in self.occupations):
            raise ValueError("occupations must lie in [0, 1]")
        if self.explicit_omegas is not None:
            if len(self.explicit_omegas) != self.K:
                raise ValueError(f"expected {self.K} omegas, got {len(self.explicit_omegas)}")
            if any(w <= 0 for w in self.explicit_omegas):
                raise ValueError("omegas must be positive")
        elif self.omega_max <= 0:
            raise ValueError("omega_max must be positive")
        start, end, n = self.time_grid
        if int(n) < 2:
            raise ValueError("time grid needs at least 2 points")
        if not (np.isfinite(start) and np.isfinite(end)):
            raise ValueError("time grid bounds must be finite")

    @classmethod
    def uniform(cls, K: int, c0: float, **kw) -> "SpinBathConfig":
        return cls(K=K, occupations=[c0] * K, **kw)

    @property
    def omegas(self) -> np.ndarray:
        if self.explicit_omegas is not None:
            return np.asarray(self.explicit_omegas, dtype=float)
        return omega_schedule(self.K, self.omega_max)

    @property
    def times(self) -> np.ndarray:
        return time_grid(*self.time_grid)

    def environment(self) -> FactoredEnvironment:
        """The same bath as a generic factored environment."""
        zero = np.zeros((2, 2), dtype=complex)
        return FactoredEnvironment(tuple(
            EnvComponent(initial_state(c), zero, spin_generator(w))
            for c, w in zip(self.occupations, self.omegas)
        ))


def time_grid(start: float, end: float, n: int) -> np.ndarray:
    # start + (end - start) * i / (n - 1) hits exact fractions of the span
    i = np.arange(int(n), dtype=float)
    return start + (end - start) * i / (int(n) - 1)


@dataclass
class SweepResult:
    times: np.ndarray
    qee: np.ndarray
    coherence: np.ndarray
    qubit_purity: np.ndarray
    fidelity: np.ndarray
    coherence_signed: np.ndarray
    per_component_fidelity: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.times)


def run_sweep(config: SpinBathConfig, per_component: bool = False) -> SweepResult:
    t = config.times
    c0 = np.asarray(config.occupations, dtype=float)[:, None]
    fids = component_fidelity(c0, config.omegas[:, None], t[None, :])
    total = np.prod(fids, axis=0)
    amps = config.amps
    weight = amps.weight
    qee = np.clip(weight * (1.0 - total), 0.0, 1.0)
    coh_signed = bath_coherence(config.omegas, t)
    coh = np.minimum(np.abs(coh_signed), 1.0)
    a2, b2 = abs(amps.a) ** 2, abs(amps.b) ** 2
    purity = 1.0 - 2.0 * a2 * b2 * (1.0 - coh**2)
    return SweepResult(
        times=t,
        qee=qee,
        coherence=coh,
        qubit_purity=purity,
        fidelity=total,
        coherence_signed=coh_signed,
        per_component_fidelity=fids if per_component else None,
    )


def recurrence_time(omegas) -> float:
    """First time at which every bath qubit is back in its initial state.

    Only defined for integer-ratio ladders such as :func:`omega_schedule`
    (``w_k = k w_1``); each ``w_k t`` is then a multiple of pi.
    """
    om = np.asarray(omegas, dtype=float)
    ratios = om / om[0]
    if not np.allclose(ratios, np.round(ratios)):
        raise ValueError("frequencies are not integer multiples of the first one")
    return float(np.pi / om[0])
