"""Pure-dephasing qubit-environment states and their evolution.

The joint state is held in pointer-state block form: the qubit amplitudes
``(a, b)`` plus the four environment blocks ``R_ij = w_i R(0) w_j^H``.  The full
``2N x 2N`` matrix is only built on request (:func:`assemble_full`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .linalg import (
    SpectralGenerator,
    as_square,
    check_density,
    check_hermitian,
    check_unitary,
    kron_all,
)

MAX_FULL_DIM = 4096


class DimensionGuardError(RuntimeError):
    """Raised when a full joint matrix would exceed the materialization cap."""


@dataclass(frozen=True)
class QubitAmplitudes:
    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        norm = abs(a) ** 2 + abs(b) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|a|^2 + |b|^2 = {norm!r}, expected 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def equal(cls, phase: float = 0.0) -> "QubitAmplitudes":
        return cls(1 / np.sqrt(2), np.exp(1j * phase) / np.sqrt(2))

    @classmethod
    def normalized(cls, a: complex, b: complex) -> "QubitAmplitudes":
        n = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
        return cls(a / n, b / n)

    @property
    def weight(self) -> float:
        """``4 |a|^2 |b|^2``, the prefactor of the measure."""
        return 4.0 * abs(self.a) ** 2 * abs(self.b) ** 2

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b])


@dataclass(frozen=True, eq=False)
class DephasingModel:
    """Environment generators conditional on the qubit pointer states.

    Free qubit energies and the free environment Hamiltonian are expected to be
    already folded into ``V0`` and ``V1``.
    """

    V0: np.ndarray
    V1: np.ndarray
    initial_env: np.ndarray

    def __post_init__(self):
        V0 = check_hermitian(self.V0, "V0")
        V1 = check_hermitian(self.V1, "V1")
        R0 = check_density(self.initial_env, "initial_env")
        if not (V0.shape == V1.shape == R0.shape):
            raise ValueError(f"dimension mismatch: V0 {V0.shape}, V1 {V1.shape}, R(0) {R0.shape}")
        object.__setattr__(self, "V0", V0)
        object.__setattr__(self, "V1", V1)
        object.__setattr__(self, "initial_env", R0)

    @property
    def env_dim(self) -> int:
        return self.V0.shape[0]

    @cached_property
    def generators(self) -> tuple[SpectralGenerator, SpectralGenerator]:
        return SpectralGenerator(self.V0), SpectralGenerator(self.V1)


@dataclass(frozen=True, eq=False)
class JointDephasingState:
    """Joint state ``[[|a|^2 R00, a b* R01], [a* b R10, |b|^2 R11]]``.

    ``pointer_basis`` holds the pointer states as columns, in the lab frame; it
    only departs from the identity after a qubit-side unitary.
    """

    amps: QubitAmplitudes
    R00: np.ndarray
    R01: np.ndarray
    R10: np.ndarray
    R11: np.ndarray
    pointer_basis: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))

    @property
    def env_dim(self) -> int:
        return self.R00.shape[0]

    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.R00, self.R01, self.R10, self.R11

    def validate(self, atol: float = 1e-9) -> None:
        """Check the block invariants; raises ``ValueError`` on violation."""
        check_density(self.R00, "R00")
        check_density(self.R11, "R11")
        if np.max(np.abs(self.R10 - self.R01.conj().T)) > 1e-12 * max(1, self.env_dim):
            raise ValueError("R10 is not the adjoint of R01")
        if abs(np.trace(self.R01)) > 1 + 1e-10:
            raise ValueError(f"|tr R01| = {abs(np.trace(self.R01))} exceeds 1")
        if 2 * self.env_dim <= MAX_FULL_DIM:
            sigma = assemble_full(self)
            vals = np.linalg.eigvalsh(sigma)
            if vals.min() < -atol:
                raise ValueError(f"joint matrix not PSD: min eigenvalue {vals.min():.3e}")
            if abs(np.trace(sigma) - 1) > atol:
                raise ValueError("joint matrix trace differs from 1")


def evolve_propagators(initial_env, amps: QubitAmplitudes, w0, w1) -> JointDephasingState:
    """Joint state for directly supplied conditional propagators."""
    R = np.asarray(initial_env, dtype=complex)
    w0 = np.asarray(w0, dtype=complex)
    w1 = np.asarray(w1, dtype=complex)
    Rw0 = w0 @ R
    Rw1 = w1 @ R
    R00 = Rw0 @ w0.conj().T
    R11 = Rw1 @ w1.conj().T
    R01 = Rw0 @ w1.conj().T
    # exact Hermiticity of the diagonal blocks, exact adjoint relation off-diagonal
    R00 = 0.5 * (R00 + R00.conj().T)
    R11 = 0.5 * (R11 + R11.conj().T)
    return JointDephasingState(amps, R00, R01, R01.conj().T.copy(), R11)


def build_propagators(model: DephasingModel, t: float) -> tuple[np.ndarray, np.ndarray]:
    g0, g1 = model.generators
    return g0.propagator(t), g1.propagator(t)


def evolve(model: DephasingModel, amps: QubitAmplitudes, t: float) -> JointDephasingState:
    w0, w1 = build_propagators(model, t)
    return evolve_propagators(model.initial_env, amps, w0, w1)


def assemble_full(state: JointDephasingState) -> np.ndarray:
    """Materialize the ``2N x 2N`` joint density matrix (qubit index major)."""
    n = state.env_dim
    if 2 * n > MAX_FULL_DIM:
        raise DimensionGuardError(
            f"joint dimension {2 * n} exceeds {MAX_FULL_DIM}; use the factored path instead"
        )
    a, b = state.amps.a, state.amps.b
    sigma = np.block([
        [abs(a) ** 2 * state.R00, a * np.conj(b) * state.R01],
        [np.conj(a) * b * state.R10, abs(b) ** 2 * state.R11],
    ])
    if not np.allclose(state.pointer_basis, np.eye(2)):
        P = np.kron(state.pointer_basis, np.eye(n))
        sigma = P @ sigma @ P.conj().T
    return sigma


def reduced_qubit(state: JointDephasingState) -> np.ndarray:
    """Qubit density matrix in the pointer basis."""
    a, b = state.amps.a, state.amps.b
    off = a * np.conj(b) * np.trace(state.R01)
    return np.array([[abs(a) ** 2, off], [np.conj(off), abs(b) ** 2]])


def asymmetrize(model: DephasingModel, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Equivalent propagator pair ``(1, w1 w0^H)`` acting on ``R00(t)``.

    ``R11(t) = w R00(t) w^H`` with ``w = w1 w0^H``, so the blocks at time ``t``
    are reproduced by leaving ``R00(t)`` alone and applying ``w`` to it.
    """
    w0, w1 = build_propagators(model, t)
    return np.eye(model.env_dim, dtype=complex), w1 @ w0.conj().T


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: tuple

    def __post_init__(self):
        ops = tuple(as_square(k, "Kraus operator") for k in self.operators)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        if len({k.shape for k in ops}) != 1:
            raise ValueError("Kraus operators have mixed dimensions")
        object.__setattr__(self, "operators", ops)
        defect = self.completeness_defect()
        if defect > 1e-9:
            raise ValueError(f"channel is not trace preserving: ||sum K^H K - 1|| = {defect:.3e}")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def completeness_defect(self) -> float:
        s = sum(k.conj().T @ k for k in self.operators)
        return float(np.linalg.norm(s - np.eye(self.dim)))

    def __call__(self, m: np.ndarray) -> np.ndarray:
        return sum(k @ m @ k.conj().T for k in self.operators)


def apply_env_channel(state: JointDephasingState, ch: KrausChannel) -> JointDephasingState:
    if ch.dim != state.env_dim:
        raise ValueError(f"channel dim {ch.dim} does not match environment dim {state.env_dim}")
    R00, R11 = ch(state.R00), ch(state.R11)
    R01 = ch(state.R01)
    return JointDephasingState(
        state.amps,
        0.5 * (R00 + R00.conj().T),
        R01,
        R01.conj().T.copy(),
        0.5 * (R11 + R11.conj().T),
        state.pointer_basis,
    )


def _extract_blocks(sigma: np.ndarray, basis: np.ndarray, prev: QubitAmplitudes, prev_blocks):
    n = sigma.shape[0] // 2
    P = np.kron(basis, np.eye(n))
    s = P.conj().T @ sigma @ P
    B00, B01, B10, B11 = s[:n, :n], s[:n, n:], s[n:, :n], s[n:, n:]
    p0 = float(np.real(np.trace(B00)))
    p1 = float(np.real(np.trace(B11)))
    # pointer-frame moduli come from the diagonal traces; phases carry over
    ph_a = prev.a / abs(prev.a) if abs(prev.a) > 0 else 1.0
    ph_b = prev.b / abs(prev.b) if abs(prev.b) > 0 else 1.0
    amps = QubitAmplitudes.normalized(np.sqrt(max(p0, 0.0)) * ph_a, np.sqrt(max(p1, 0.0)) * ph_b)
    R00 = B00 / p0 if p0 > 1e-14 else prev_blocks[0]
    R11 = B11 / p1 if p1 > 1e-14 else prev_blocks[3]
    ab = amps.a * np.conj(amps.b)
    R01 = B01 / ab if abs(ab) > 1e-14 else prev_blocks[1]
    return JointDephasingState(
        amps,
        0.5 * (R00 + R00.conj().T),
        R01,
        R01.conj().T.copy(),
        0.5 * (R11 + R11.conj().T),
        basis,
    )


def apply_local_unitary(state: JointDephasingState, side: str, U) -> JointDephasingState:
    """Apply a local unitary on ``side`` ("qubit" or "environment").

    On the environment every block is conjugated by ``U``.  On the qubit the
    full matrix is conjugated by ``U (x) 1`` and the blocks are re-read in the
    rotated pointer basis ``U @ pointer_basis``.
    """
    U = check_unitary(U, "U")
    if side in ("environment", "env"):
        if U.shape[0] != state.env_dim:
            raise ValueError(f"environment unitary has dim {U.shape[0]}, expected {state.env_dim}")
        Uh = U.conj().T
        R01 = U @ state.R01 @ Uh
        R00 = U @ state.R00 @ Uh
        R11 = U @ state.R11 @ Uh
        return JointDephasingState(
            state.amps,
            0.5 * (R00 + R00.conj().T),
            R01,
            R01.conj().T.copy(),
            0.5 * (R11 + R11.conj().T),
            state.pointer_basis,
        )
    if side == "qubit":
        if U.shape != (2, 2):
            raise ValueError(f"qubit unitary must be 2x2, got {U.shape}")
        sigma = assemble_full(state)
        Q = np.kron(U, np.eye(state.env_dim))
        rotated = Q @ sigma @ Q.conj().T
        return _extract_blocks(rotated, U @ state.pointer_basis, state.amps, state.blocks())
    raise ValueError(f"side must be 'qubit' or 'environment', got {side!r}")


# -- product environments ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EnvComponent:
    initial: np.ndarray
    V0: np.ndarray
    V1: np.ndarray

    def __post_init__(self):
        R = check_density(self.initial, "component initial state")
        V0 = check_hermitian(self.V0, "component V0")
        V1 = check_hermitian(self.V1, "component V1")
        if not (R.shape == V0.shape == V1.shape):
            raise ValueError("component dimensions disagree")
        object.__setattr__(self, "initial", R)
        object.__setattr__(self, "V0", V0)
        object.__setattr__(self, "V1", V1)

    @property
    def dim(self) -> int:
        return self.initial.shape[0]

    @cached_property
    def generators(self) -> tuple[SpectralGenerator, SpectralGenerator]:
        return SpectralGenerator(self.V0), SpectralGenerator(self.V1)


@dataclass(frozen=True)
class ComponentBlocks:
    R00: np.ndarray
    R01: np.ndarray
    R11: np.ndarray

    @property
    def tr_R01(self) -> complex:
        return complex(np.trace(self.R01))


@dataclass(frozen=True, eq=False)
class FactoredEnvironment:
    """Uncorrelated environment components with independent generators."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("a factored environment needs at least one component")
        object.__setattr__(self, "components", comps)

    @property
    def dims(self) -> list[int]:
        return [c.dim for c in self.components]

    @property
    def total_dim(self) -> int:
        # Python ints, so no overflow for large K
        n = 1
        for d in self.dims:
            n *= d
        return n

    def to_model(self) -> DephasingModel:
        """Materialize the equivalent full-space model (small environments only)."""
        if 2 * self.total_dim > MAX_FULL_DIM:
            raise DimensionGuardError(
                f"environment dimension {self.total_dim} too large to materialize"
            )
        dims = self.dims

        def lift(k, op):
            mats = [np.eye(d) for d in dims]
            mats[k] = op
            return kron_all(mats)

        V0 = sum(lift(k, c.V0) for k, c in enumerate(self.components))
        V1 = sum(lift(k, c.V1) for k, c in enumerate(self.components))
        R0 = kron_all([c.initial for c in self.components])
        return DephasingModel(V0, V1, R0)


def evolve_factored(env: FactoredEnvironment, amps: QubitAmplitudes, t: float) -> list[ComponentBlocks]:
    """Per-component conditional blocks at time ``t``.

    ``amps`` does not enter the blocks; it is accepted so the call mirrors
    :func:`evolve`.
    """
    out = []
    for comp in env.components:
        g0, g1 = comp.generators
        w0, w1 = g0.propagator(t), g1.propagator(t)
        st = evolve_propagators(comp.initial, amps, w0, w1)
        out.append(ComponentBlocks(st.R00, st.R01, st.R11))
    return out


def product_blocks(blocks: Sequence[ComponentBlocks]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tensor the per-component blocks into full-space ``(R00, R01, R11)``."""
    return (
        kron_all([b.R00 for b in blocks]),
        kron_all([b.R01 for b in blocks]),
        kron_all([b.R11 for b in blocks]),
    )
