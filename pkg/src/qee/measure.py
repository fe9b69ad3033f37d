"""Qubit-environment entanglement for pure-dephasing states.

The measure is ``E = 4 |a|^2 |b|^2 (1 - F(R00, R11))`` with ``F`` the Uhlmann
fidelity of the two conditional environment states.  It is evaluated from the
blocks alone; the joint matrix is never built here.
"""

from __future__ import annotations

import logging
import warnings
from typing import Iterable

import numpy as np

from .dephasing import JointDephasingState, QubitAmplitudes, reduced_qubit
from .linalg import check_density, fidelity, linear_entropy

logger = logging.getLogger(__name__)

OVERSHOOT_LOG = 1e-9
SPECTRUM_WARN = 1e-8


class SpectrumMismatchWarning(UserWarning):
    """Conditional states whose spectra differ cannot share an initial state."""


def _clamp(value: float, what: str) -> float:
    if value < -OVERSHOOT_LOG or value > 1 + OVERSHOOT_LOG:
        logger.warning("%s evaluated to %.3e before clamping to [0, 1]", what, value)
    return min(max(value, 0.0), 1.0)


def qee_from_fidelity(amps: QubitAmplitudes, fid: float) -> float:
    return _clamp(amps.weight * (1.0 - fid), "qee")


def qee(amps: QubitAmplitudes, R00, R11, check_spectra: bool = True) -> float:
    """Entanglement measure from the two conditional environment states.

    When ``check_spectra`` is set, a :class:`SpectrumMismatchWarning` is issued
    if the two states cannot come from a common initial state (spectra differing
    by more than 1e-8).  Environment channels produce such pairs legitimately.
    The formula is evaluated regardless.
    """
    r0 = check_density(R00, "R00")
    r1 = check_density(R11, "R11")
    if r0.shape != r1.shape:
        raise ValueError(f"dimension mismatch: {r0.shape} vs {r1.shape}")
    if check_spectra:
        gap = float(np.max(np.abs(np.linalg.eigvalsh(r0) - np.linalg.eigvalsh(r1))))
        if gap > SPECTRUM_WARN:
            warnings.warn(
                f"conditional states have different spectra (max gap {gap:.3e})",
                SpectrumMismatchWarning,
                stacklevel=2,
            )
    return qee_from_fidelity(amps, fidelity(r0, r1, clamp=False))


def qee_state(state: JointDephasingState) -> float:
    return qee(state.amps, state.R00, state.R11)


def qee_factored(amps: QubitAmplitudes, pairs: Iterable) -> float:
    """Measure for product conditional states, one fidelity per component.

    ``pairs`` holds ``(R00_k, R11_k)`` tuples (or objects with ``R00`` and
    ``R11`` attributes).  Only component-sized matrices are diagonalized.
    """
    total = 1.0
    count = 0
    for p in pairs:
        r0, r1 = (p.R00, p.R11) if hasattr(p, "R00") else p
        total *= fidelity(r0, r1)
        count += 1
    if count == 0:
        raise ValueError("qee_factored needs at least one component")
    return qee_from_fidelity(amps, total)


def is_separable(R00, R11, tol: float = 1e-10) -> bool:
    return bool(np.linalg.norm(np.asarray(R00) - np.asarray(R11)) <= tol)


def coherence_factor(state: JointDephasingState) -> float:
    """``|tr R01|``."""
    return min(float(abs(np.trace(state.R01))), 1.0)


def qubit_purity(state: JointDephasingState) -> float:
    a2 = abs(state.amps.a) ** 2
    b2 = abs(state.amps.b) ** 2
    c = coherence_factor(state)
    return float(1.0 - 2.0 * a2 * b2 * (1.0 - c * c))


def pure_state_entanglement(amps: QubitAmplitudes, env_vector, w0, w1) -> float:
    """Twice the linear entropy of the qubit for a pure initial environment."""
    psi = np.asarray(env_vector, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"environment vector has norm {norm:.12g}, expected 1")
    overlap = np.vdot(np.asarray(w1) @ psi, np.asarray(w0) @ psi)
    return _clamp(amps.weight * (1.0 - abs(overlap) ** 2), "pure-state entanglement")


def twice_linear_entropy(state: JointDephasingState) -> float:
    return 2.0 * linear_entropy(reduced_qubit(state))
