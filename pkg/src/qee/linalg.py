"""Dense complex-matrix primitives: spectra, roots, propagators, fidelity."""

from __future__ import annotations

import numpy as np

HERMITIAN_ATOL = 1e-12
PSD_CLIP = 1e-10
TRACE_ATOL = 1e-10


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


def as_square(m, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m, name: str = "matrix", atol: float = HERMITIAN_ATOL) -> np.ndarray:
    arr = as_square(m, name)
    defect = hermiticity_defect(arr)
    # round-off in products grows with the entry scale
    if defect > atol * max(1.0, float(np.max(np.abs(arr)))) * arr.shape[0]:
        raise NotHermitianError(
            f"{name} is not Hermitian: max |M - M^H| = {defect:.3e} (tolerance {atol:.1e})"
        )
    return arr


def check_density(rho, name: str = "density matrix") -> np.ndarray:
    arr = check_hermitian(rho, name)
    tr = np.trace(arr)
    if abs(tr - 1.0) > TRACE_ATOL * arr.shape[0]:
        raise ValueError(f"{name} has trace {tr.real:.12g}, expected 1")
    return arr


def _fix_phases(vecs: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    # first component with non-negligible modulus becomes real positive
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = int(np.argmax(np.abs(col) > tol * np.max(np.abs(col))))
        ph = col[idx] / abs(col[idx])
        out[:, k] = col / ph
    return out


def eigh_sorted(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    return vals[::-1], vecs[:, ::-1]


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted in
    descending order and each eigenvector column phase-fixed so that its first
    non-negligible component is real and positive, giving reproducible output.

    Raises
    ------
    NotHermitianError
        If ``m`` deviates from its conjugate transpose beyond tolerance.
    """
    arr = check_hermitian(m)
    vals, vecs = eigh_sorted(arr)
    return vals, _fix_phases(vecs)


def _clip_spectrum(vals: np.ndarray, name: str) -> np.ndarray:
    if vals.size and vals.min() < -PSD_CLIP:
        raise NotPSDError(f"{name} is not positive semidefinite: min eigenvalue {vals.min():.3e}")
    return np.clip(vals, 0.0, None)


def _sqrt_unchecked(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    vals, vecs = eigh_sorted(m)
    vals = _clip_spectrum(vals, name)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def psd_sqrt(m) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as round-off and clipped to zero;
    anything more negative is rejected with :class:`NotPSDError`.
    """
    arr = check_hermitian(m)
    return _sqrt_unchecked(arr)


class SpectralGenerator:
    """A Hermitian generator decomposed once, exponentiated at any time.

    ``propagator(t)`` returns ``exp(-i V t)`` (units with hbar = 1).
    """

    def __init__(self, generator):
        self.matrix = check_hermitian(generator, "generator")
        self.energies, self.basis = eigh_sorted(self.matrix)
        self.dim = self.matrix.shape[0]

    def propagator(self, t: float) -> np.ndarray:
        t = float(t)
        if not np.isfinite(t):
            raise ValueError(f"time must be finite, got {t}")
        phases = np.exp(-1j * self.energies * t)
        return (self.basis * phases) @ self.basis.conj().T


def propagator(V, t: float) -> np.ndarray:
    """Unitary ``exp(-i V t)`` of a Hermitian generator ``V``."""
    return SpectralGenerator(V).propagator(t)


def unitarity_defect(u) -> float:
    u = np.asarray(u, dtype=complex)
    return float(np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])))


def check_unitary(u, name: str = "unitary", atol: float = 1e-10) -> np.ndarray:
    arr = as_square(u, name)
    defect = unitarity_defect(arr)
    if defect > atol * max(1, arr.shape[0]):
        raise ValueError(f"{name} is not unitary: ||U U^H - 1||_F = {defect:.3e}")
    return arr


def _round_off_cut(vals: np.ndarray) -> float:
    return 64 * np.finfo(float).eps * len(vals) * max(float(vals.max(initial=0.0)), 0.0)


def _fidelity_raw(rho1: np.ndarray, rho2: np.ndarray) -> float:
    vals, vecs = eigh_sorted(rho1)
    vals = _clip_spectrum(vals, "rho1")
    # work on the support of rho1: sqrt of round-off eigenvalues would add ~1e-8 errors
    keep = vals > _round_off_cut(vals)
    half = vecs[:, keep] * np.sqrt(vals[keep])
    inner = half.conj().T @ rho2 @ half
    mu = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    mu = _clip_spectrum(mu, "sqrt(rho1) rho2 sqrt(rho1)")
    mu[mu <= _round_off_cut(mu)] = 0.0
    return float(np.sum(np.sqrt(mu)) ** 2)


def fidelity(rho1, rho2, clamp: bool = True) -> float:
    """Uhlmann fidelity ``[tr sqrt(sqrt(rho1) rho2 sqrt(rho1))]**2``.

    Computed spectrally. The result is clamped to ``[0, 1]`` unless
    ``clamp=False``, which exposes round-off overshoot.
    """
    r1 = check_density(rho1, "rho1")
    r2 = check_density(rho2, "rho2")
    if r1.shape != r2.shape:
        raise ValueError(f"dimension mismatch: {r1.shape} vs {r2.shape}")
    f = _fidelity_raw(r1, r2)
    return min(max(f, 0.0), 1.0) if clamp else f


def purity(rho) -> float:
    """``tr rho**2``."""
    r = as_square(rho)
    # tr(rho rho) for Hermitian rho is the squared Frobenius norm
    return float(np.real(np.vdot(r.conj().T, r)))


def linear_entropy(rho) -> float:
    return 1.0 - purity(rho)


def kron_all(mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out
