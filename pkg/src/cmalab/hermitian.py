"""Small dense complex-Hermitian linear algebra.

Everything here operates on tiny matrices (complex dimension of the
ambient space, so n <= ~6) and favours plain, checkable algorithms:
eigenvalues come from a cyclic Jacobi sweep, log-determinants from
Cholesky pivots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotPositiveDefinite, SingularForm

__all__ = [
    "HermitianForm",
    "herm_det",
    "herm_inverse",
    "psd_report",
    "log_det",
    "jacobi_eigenvalues",
]


@dataclass(frozen=True)
class HermitianForm:
    """An n x n complex Hermitian matrix, symmetrized on construction."""

    entries: np.ndarray = field(repr=False)

    def __init__(self, entries):
        a = np.asarray(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        # finite-difference Hessians carry O(h^2) asymmetry; average it away
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __add__(self, other):
        if isinstance(other, HermitianForm):
            return HermitianForm(self.entries + other.entries)
        return NotImplemented

    def shifted(self, c: float) -> "HermitianForm":
        """Return self + c * identity."""
        return HermitianForm(self.entries + c * np.eye(self.dim))


def herm_det(h: HermitianForm) -> float:
    """Determinant of a Hermitian matrix; the imaginary residue is discarded."""
    d = np.linalg.det(h.entries)
    scale = max(abs(d), 1.0)
    assert abs(d.imag) <= 1e-12 * scale, "Hermitian determinant should be real"
    return float(d.real)


def _det_scale(h: HermitianForm) -> float:
    m = float(np.max(np.abs(h.entries)))
    if m == 0.0:
        return 1.0
    return m ** h.dim


def herm_inverse(h: HermitianForm) -> HermitianForm:
    """Inverse, re-symmetrized; raises SingularForm near rank deficiency."""
    d = herm_det(h)
    if abs(d) < 1e-14 * _det_scale(h):
        raise SingularForm(f"determinant {d:.3e} below tolerance")
    return HermitianForm(np.linalg.inv(h.entries))


def jacobi_eigenvalues(h: HermitianForm, tol: float = 1e-14, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns eigenvalues sorted ascending.  Adequate and accurate for the
    tiny dimensions used here.
    """
    a = np.array(h.entries, dtype=complex)
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real])
    scale = max(float(np.max(np.abs(a))), 1e-300)
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                off = max(off, abs(apq))
                if abs(apq) <= tol * scale:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # factor the phase out of a[p,q], then a real Jacobi rotation
                phase = apq / abs(apq)
                tau = (aqq - app) / (2.0 * abs(apq))
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                cols_p = a[:, p].copy()
                cols_q = a[:, q].copy()
                a[:, p] = c * cols_p - s * np.conj(phase) * cols_q
                a[:, q] = s * cols_p + c * np.conj(phase) * cols_q
                rows_p = a[p, :].copy()
                rows_q = a[q, :].copy()
                a[p, :] = c * rows_p - s * phase * rows_q
                a[q, :] = s * rows_p + c * phase * rows_q
        if off <= tol * scale:
            break
    return np.sort(np.diag(a).real)


def psd_report(h: HermitianForm, tol: float) -> dict:
    """Positivity report: min eigenvalue plus PSD / PD verdicts at tolerance."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    eigs = jacobi_eigenvalues(h)
    mn = float(eigs[0])
    return {
        "min_eigenvalue": mn,
        "is_psd": mn >= -tol,
        "is_pd": mn > tol,
    }


def log_det(h: HermitianForm) -> float:
    """log det via Cholesky pivots; stable for ill-conditioned PD matrices."""
    try:
        chol = np.linalg.cholesky(h.entries)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    diag = np.diag(chol).real
    if np.any(diag <= 0):
        raise NotPositiveDefinite("nonpositive Cholesky pivot")
    return float(2.0 * np.sum(np.log(diag)))
