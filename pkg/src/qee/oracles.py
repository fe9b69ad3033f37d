"""Brute-force cross-checks and seeded random generators.

Everything here works on the full joint matrix or on explicit constructions,
independently of the block formula in :mod:`qee.measure`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dephasing import DephasingModel, KrausChannel, QubitAmplitudes
from .linalg import check_hermitian, eigh_sorted


@dataclass(frozen=True)
class OracleReport:
    name: str
    passed: bool
    observed: float
    threshold: float
    details: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: observed={self.observed:.3e} threshold={self.threshold:.1e} {self.details}"


def partial_transpose_qubit(sigma) -> np.ndarray:
    """Partial transpose on the qubit factor of a ``2N x 2N`` joint matrix.

    With the qubit index major, this swaps the two off-diagonal ``N x N``
    blocks.
    """
    s = np.asarray(sigma, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        raise ValueError(f"expected an even-dimensional square matrix, got {s.shape}")
    n = s.shape[0] // 2
    out = s.copy()
    out[:n, n:] = s[n:, :n]
    out[n:, :n] = s[:n, n:]
    return out


def negativity(sigma) -> float:
    """Sum of the moduli of the negative partial-transpose eigenvalues."""
    pt = partial_transpose_qubit(sigma)
    vals = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(-np.sum(vals[vals < 0]))


def strictly_orthogonal(R00, R11, tol: float = 1e-10) -> bool:
    return bool(np.linalg.norm(np.asarray(R00) @ np.asarray(R11)) <= tol)


def bell_block_verify(amps: QubitAmplitudes, R00, w, tol: float = 1e-9) -> OracleReport:
    """Certify that the joint state is a mixture of Bell-type states.

    Diagonalizes ``R00``, maps each populated eigenvector through ``w`` and
    checks that every mapped vector is orthogonal to every populated
    eigenvector.  Checking all pairs, not only ``<n|w|n>``, is what makes every
    pure-state decomposition maximally entangled.
    """
    if abs(abs(amps.a) - abs(amps.b)) > tol:
        raise ValueError(f"equal superposition required, got |a|={abs(amps.a):.6g}, |b|={abs(amps.b):.6g}")
    R = check_hermitian(R00, "R00")
    w = np.asarray(w, dtype=complex)
    vals, vecs = eigh_sorted(R)
    populated = vecs[:, vals > tol]
    rank = populated.shape[1]
    overlaps = populated.conj().T @ (w @ populated)
    worst = float(np.max(np.abs(overlaps))) if rank else 0.0
    diag = float(np.max(np.abs(np.diag(overlaps)))) if rank else 0.0
    return OracleReport(
        name="bell_block",
        passed=bool(rank > 0 and worst <= tol),
        observed=worst,
        threshold=tol,
        details=f"rank={rank} dim={R.shape[0]} max|<n|w|n>|={diag:.3e}",
    )


# -- random ensembles ----------------------------------------------------------


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = _ginibre(rng, dim, dim)
    return 0.5 * (g + g.conj().T)


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    g = _ginibre(rng, dim, rank)
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    # Haar measure needs the phases of diag(r) divided out
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = _ginibre(rng, dim, 1).ravel()
    return v / np.linalg.norm(v)


def random_amplitudes(rng: np.random.Generator) -> QubitAmplitudes:
    v = random_pure(rng, 2)
    return QubitAmplitudes.normalized(v[0], v[1])


def random_instance(env_dim: int, rank: int, seed: int) -> tuple[DephasingModel, QubitAmplitudes]:
    """Seeded random model: Gaussian Hermitian generators, rank-limited R(0)."""
    if not 1 <= rank <= env_dim:
        raise ValueError(f"rank must lie in [1, {env_dim}], got {rank}")
    rng = np.random.default_rng(seed)
    V0 = random_hermitian(rng, env_dim)
    V1 = random_hermitian(rng, env_dim)
    R0 = random_density(rng, env_dim, rank)
    return DephasingModel(V0, V1, R0), random_amplitudes(rng)


def random_channel(dim: int, n_kraus: int, seed: int) -> KrausChannel:
    """Kraus operators cut from a random isometry ``C^dim -> C^(n_kraus*dim)``."""
    if n_kraus < 1:
        raise ValueError("n_kraus must be at least 1")
    rng = np.random.default_rng(seed)
    iso, r = np.linalg.qr(_ginibre(rng, n_kraus * dim, dim))
    iso = iso * (np.diag(r) / np.abs(np.diag(r)))
    return KrausChannel(tuple(iso[m * dim:(m + 1) * dim] for m in range(n_kraus)))


def strict_orthogonality_instance(
    env_dim: int, rank: int, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Random ``R(0)`` and propagators ``(w0, w1)`` with orthogonal conditional supports.

    Requires ``rank <= env_dim // 2``.
    """
    if not 1 <= rank <= env_dim // 2:
        raise ValueError(f"strict orthogonality needs 1 <= rank <= {env_dim // 2}, got {rank}")
    rng = np.random.default_rng(seed)
    frame = random_unitary(rng, env_dim)
    spectrum = rng.dirichlet(np.ones(rank))
    R0 = (frame[:, :rank] * spectrum) @ frame[:, :rank].conj().T
    # w sends the support onto part of its complement, then anything unitary on the rest
    perm = np.roll(np.eye(env_dim), rank, axis=0)
    w = frame @ perm @ frame.conj().T
    w0 = random_unitary(rng, env_dim)
    w1 = w0 @ w
    return 0.5 * (R0 + R0.conj().T), w0, w1
