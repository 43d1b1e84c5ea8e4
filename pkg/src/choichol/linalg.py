"""Dense complex linear algebra primitives.

Matrices are plain 2-D ``numpy`` arrays of dtype ``complex128``. Indices are
0-based. Spectral functions act on Hermitian input through its eigenbasis, so
their results do not depend on how the eigensolver picks vectors inside a
degenerate eigenspace.

Vectorisation is row-major throughout the package: ``vec(m)[a*cols + c]`` is
``m[a, c]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidMatrix,
    NonSquare,
    NotHermitian,
    NotPSD,
    NumericalFailure,
)

HERM_TOL = 1e-10
PSD_TOL = 1e-10
RANK_TOL_PER_DIM = 1e-12


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite complex 2-D array (copy-free when possible)."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise InvalidMatrix(f"expected a 2-D matrix, got array with shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidMatrix(f"matrix dimensions must be positive, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    return a


def _square(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {a.shape}")
    return a


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def elementary(i: int, j: int, rows: int, cols: int | None = None) -> np.ndarray:
    """The matrix unit with a single one at ``(i, j)``."""
    e = np.zeros((rows, rows if cols is None else cols), dtype=np.complex128)
    e[i, j] = 1.0
    return e


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # columns are orthonormal

    def apply(self, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Return ``U diag(g(λ)) U*``."""
        u = self.eigenvectors
        return (u * g(self.eigenvalues)) @ u.conj().T

    def reconstruct(self) -> np.ndarray:
        return self.apply(lambda lam: lam)


def hermitian_eig(m, herm_tol: float = HERM_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrised as ``(m + m*)/2`` before it reaches the solver.

    Raises
    ------
    NonSquare
        If ``m`` is not square.
    NotHermitian
        If ``‖m − m*‖_F > herm_tol · ‖m‖_F``.
    NumericalFailure
        If LAPACK fails to converge.
    """
    a = _square(m)
    scale = np.linalg.norm(a)
    skew = np.linalg.norm(a - a.conj().T)
    if skew > herm_tol * scale:
        raise NotHermitian(f"‖m − m*‖ = {skew:.3e} exceeds {herm_tol:.1e}·‖m‖ = {herm_tol * scale:.3e}")
    try:
        lam, u = np.linalg.eigh(hermitian_part(a))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK non-convergence
        raise NumericalFailure(str(exc)) from exc
    return EigenDecomposition(lam, u)


def _psd_eig(m, herm_tol: float, psd_tol: float) -> EigenDecomposition:
    eig = hermitian_eig(m, herm_tol)
    lam = eig.eigenvalues
    norm = float(np.max(np.abs(lam)))
    if lam[0] < -psd_tol * norm:
        raise NotPSD(f"eigenvalue {lam[0]:.3e} below −{psd_tol:.1e}·‖m‖")
    return eig


def psd_sqrt(m, herm_tol: float = HERM_TOL, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Unique positive square root.

    Eigenvalues in ``[−psd_tol·‖m‖, 0)`` are clamped to zero; anything more
    negative raises :class:`NotPSD`.
    """
    eig = _psd_eig(m, herm_tol, psd_tol)
    return eig.apply(lambda lam: np.sqrt(np.clip(lam, 0.0, None)))


def _pinv_weights(lam: np.ndarray, cutoff: float) -> np.ndarray:
    out = np.zeros_like(lam)
    keep = lam > cutoff
    out[keep] = 1.0 / lam[keep]
    return out


def pinv_psd(
    m,
    rank_tol: float | None = None,
    herm_tol: float = HERM_TOL,
    psd_tol: float = PSD_TOL,
) -> np.ndarray:
    """Moore–Penrose pseudo-inverse of a positive semidefinite matrix.

    Eigenvalues ``λ > rank_tol · λ_max`` are inverted, the rest are mapped to
    zero. ``rank_tol`` defaults to ``dim · 1e-12``. The zero matrix maps to
    itself.
    """
    eig = _psd_eig(m, herm_tol, psd_tol)
    lam = eig.eigenvalues
    if rank_tol is None:
        rank_tol = lam.size * RANK_TOL_PER_DIM
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    lam_max = float(lam[-1])
    if lam_max <= 0.0:
        return np.zeros_like(eig.eigenvectors)
    return eig.apply(lambda t: _pinv_weights(t, rank_tol * lam_max))


def pinv_approximant(m, n: int, rank_tol: float | None = None, herm_tol: float = HERM_TOL) -> np.ndarray:
    """Regularised inverse ``U diag(h_n(λ)) U*`` with ``h_n(t) = t/(t² + 2⁻ⁿ)``.

    Converges to :func:`pinv_psd` as ``n`` grows; the error on an eigenvalue
    ``λ > 0`` is at most ``2⁻ⁿ/λ³``. Meant as an independent check on the
    pseudo-inverse, not as a production path.

    For large ``n``, ``2⁻ⁿ`` is comparable to the rounding noise on a zero
    eigenvalue and ``h_n`` of that noise is O(1). Passing ``rank_tol`` zeroes
    eigenvalues with ``|λ| ≤ rank_tol · λ_max`` first, matching the cutoff of
    :func:`pinv_psd`.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    eig = hermitian_eig(m, herm_tol)
    eps = 2.0 ** (-n)
    lam = eig.eigenvalues
    if rank_tol is not None:
        lam = np.where(np.abs(lam) > rank_tol * max(float(lam[-1]), 0.0), lam, 0.0)
    return EigenDecomposition(lam, eig.eigenvectors).apply(lambda t: t / (t * t + eps))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dim_a: int, dim_b: int, keep: Literal["first", "second"] = "first") -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``C^dim_a ⊗ C^dim_b``.

    ``keep="first"`` traces out the second factor and returns a ``dim_a``
    square matrix; ``keep="second"`` does the opposite.
    """
    a = _square(m)
    if dim_a < 1 or dim_b < 1 or a.shape[0] != dim_a * dim_b:
        raise DimensionMismatch(f"matrix of size {a.shape[0]} is not {dim_a}·{dim_b}")
    t = a.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "first":
        return np.einsum("ibjb->ij", t)
    if keep == "second":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'first' or 'second', not {keep!r}")


def vec(m) -> np.ndarray:
    """Stack rows into a column vector of shape ``(rows·cols, 1)``."""
    return as_matrix(m).reshape(-1, 1)


def unvec(v, rows: int, cols: int) -> np.ndarray:
    a = np.asarray(v, dtype=np.complex128)
    if a.size != rows * cols or (a.ndim == 2 and a.shape[1] != 1) or a.ndim > 2:
        raise DimensionMismatch(f"cannot unvec array of shape {a.shape} into {rows}×{cols}")
    return a.reshape(rows, cols).copy()


def op_norm(m: np.ndarray) -> float:
    """Spectral norm (largest singular value); 0 for empty input."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))
