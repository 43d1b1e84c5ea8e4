"""Bi-partite (block) Cholesky decomposition of positive block matrices.

For a positive ``(N·d)×(N·d)`` matrix ``C`` with ``d×d`` blocks ``C_ij`` this
computes ``C = L̂ D L̂* = L L*`` where ``L̂`` is block lower uni-triangular,
``D`` block diagonal and positive, and ``L_ij = L̂_ij √D_jj``. Divisions by
diagonal blocks are replaced by Moore–Penrose pseudo-inverses, so rank
deficient input is fine. Rows are produced in the given basis order with no
pivoting; row ``i`` only depends on rows ``< i`` and on ``C_i1 … C_ii``,
which is what makes the factorisation canonical and incrementally
extendable (:func:`extend_cholesky`).

Floating point needs two cutoffs that exact arithmetic does not:

* eigenvalues of a Schur complement ``D_ii`` at or below
  ``rank_tol · scale`` are set to zero before ``√`` and ``†`` are taken;
* an eigenvalue below ``−schur_tol · scale`` means the input was not
  positive and raises :class:`NotPSDBlock`.

``scale`` defaults to ``max_i ‖C_ii‖``, which for positive ``C`` lies within a
factor ``N`` of ``‖C‖``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import BlockMatrix, ChannelSpec
from .errors import DimensionMismatch, NotPSDBlock, NotUniTriangular
from .linalg import RANK_TOL_PER_DIM, hermitian_eig, hermitian_part, op_norm

SCHUR_TOL = 1e-8


@dataclass(frozen=True)
class CholeskyFactors:
    """Blocks of ``C = L̂ D L̂* = L L*``; all block arrays are ``(N, N, d, d)``.

    ``D`` has shape ``(N, d, d)``; ``D_spectrum`` holds the clamped
    eigenvalues of each ``D_ii`` (all ``≥ 0``), ``D_pinv`` their
    pseudo-inverses. ``R_hat`` holds the blocks of ``L̂⁻¹``.
    """

    L_hat: np.ndarray
    D: np.ndarray
    L: np.ndarray
    R_hat: np.ndarray
    D_spectrum: np.ndarray
    D_pinv: np.ndarray
    scale: float
    rank_tol: float
    schur_tol: float

    @property
    def n_blocks(self) -> int:
        return self.L.shape[0]

    @property
    def block_dim(self) -> int:
        return self.L.shape[2]

    @property
    def cutoff(self) -> float:
        return self.rank_tol * self.scale

    def lower(self) -> BlockMatrix:
        """``L`` as a dense block matrix."""
        return BlockMatrix.from_blocks(self.L)

    def lower_unit(self) -> BlockMatrix:
        return BlockMatrix.from_blocks(self.L_hat)

    def diagonal(self) -> BlockMatrix:
        n, d = self.n_blocks, self.block_dim
        blocks = np.zeros((n, n, d, d), dtype=np.complex128)
        for i in range(n):
            blocks[i, i] = self.D[i]
        return BlockMatrix.from_blocks(blocks)


def _as_blocks(entries) -> np.ndarray:
    if isinstance(entries, ChannelSpec):
        return entries.entries
    if isinstance(entries, BlockMatrix):
        return entries.blocks()
    b = np.asarray(entries, dtype=np.complex128)
    if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[2] != b.shape[3] or 0 in b.shape:
        raise DimensionMismatch(f"expected (N, N, d, d) blocks, got shape {b.shape}")
    return b


def _empty(n: int, d: int) -> dict:
    eye = np.eye(d, dtype=np.complex128)
    unit = np.zeros((n, n, d, d), dtype=np.complex128)
    for i in range(n):
        unit[i, i] = eye
    return {
        "L_hat": unit,
        "D": np.zeros((n, d, d), dtype=np.complex128),
        "L": np.zeros((n, n, d, d), dtype=np.complex128),
        "R_hat": unit.copy(),
        "D_spectrum": np.zeros((n, d)),
        "D_pinv": np.zeros((n, d, d), dtype=np.complex128),
    }


def _inverse_row(L_hat: np.ndarray, R_hat: np.ndarray, i: int) -> None:
    # row i of L̂⁻¹ from rows < i: R̂_ij = −Σ_{k=j}^{i−1} L̂_ik R̂_kj
    for j in range(i):
        acc = np.zeros_like(R_hat[i, j])
        for k in range(j, i):
            acc += L_hat[i, k] @ R_hat[k, j]
        R_hat[i, j] = -acc


def _factor_row(f: dict, i: int, row: np.ndarray, cutoff: float, schur_tol: float, scale: float) -> None:
    """Fill row ``i`` of every factor from ``row[k] = C_ik`` (``k ≤ i``)."""
    L_hat, L, R_hat = f["L_hat"], f["L"], f["R_hat"]

    for j in range(i):
        acc = np.zeros_like(row[0])
        for k in range(i):
            acc += row[k] @ R_hat[j, k].conj().T
        L_hat[i, j] = acc @ f["D_pinv"][j]
        L[i, j] = L_hat[i, j] @ L[j, j]

    schur = row[i].copy()
    for j in range(i):
        schur -= L[i, j] @ L[i, j].conj().T
    eig = hermitian_eig(hermitian_part(schur))
    lam, u = eig.eigenvalues, eig.eigenvectors
    if lam[0] < -schur_tol * scale:
        raise NotPSDBlock(
            f"Schur complement D[{i}] has eigenvalue {lam[0]:.3e} below "
            f"−{schur_tol:.1e}·scale; the block matrix is not positive",
            block=i,
            min_eigenvalue=float(lam[0]),
        )
    lam = np.where(lam > cutoff, lam, 0.0)
    inv = np.zeros_like(lam)
    inv[lam > 0] = 1.0 / lam[lam > 0]
    uh = u.conj().T
    f["D_spectrum"][i] = lam
    f["D"][i] = (u * lam) @ uh
    f["D_pinv"][i] = (u * inv) @ uh
    L[i, i] = (u * np.sqrt(lam)) @ uh

    _inverse_row(L_hat, R_hat, i)


def _default_rank_tol(d: int) -> float:
    return d * RANK_TOL_PER_DIM


def choi_cholesky(
    entries,
    *,
    rank_tol: float | None = None,
    schur_tol: float = SCHUR_TOL,
    scale: float | None = None,
) -> CholeskyFactors:
    """Factorise a positive block matrix given by its ``(N, N, d, d)`` blocks.

    ``entries`` may also be a :class:`ChannelSpec` or :class:`BlockMatrix`.
    Only the blocks on and below the diagonal are read.

    Parameters
    ----------
    rank_tol
        Relative cutoff for the spectra of the Schur complements; defaults to
        ``d · 1e-12``.
    schur_tol
        Relative negativity allowed before :class:`NotPSDBlock` is raised.
    scale
        Reference magnitude for both tolerances; defaults to ``max_i ‖C_ii‖``.
    """
    blocks = _as_blocks(entries)
    n, d = blocks.shape[0], blocks.shape[2]
    if rank_tol is None:
        rank_tol = _default_rank_tol(d)
    if scale is None:
        scale = max(op_norm(blocks[i, i]) for i in range(n))
    f = _empty(n, d)
    for i in range(n):
        _factor_row(f, i, blocks[i, : i + 1], rank_tol * scale, schur_tol, scale)
    return CholeskyFactors(**f, scale=float(scale), rank_tol=rank_tol, schur_tol=schur_tol)


def extend_cholesky(factors: CholeskyFactors, row) -> CholeskyFactors:
    """Append one block row ``C_{N+1,1} … C_{N+1,N+1}`` to an existing factorisation.

    Earlier rows are reused untouched. ``scale`` grows to cover the new
    diagonal block if needed, so pass an explicit ``scale`` to
    :func:`choi_cholesky` when bit-identical agreement with a direct
    factorisation is required.
    """
    n, d = factors.n_blocks, factors.block_dim
    row = np.asarray(row, dtype=np.complex128)
    if row.shape != (n + 1, d, d):
        raise DimensionMismatch(f"expected a block row of shape {(n + 1, d, d)}, got {row.shape}")
    scale = max(factors.scale, op_norm(row[n]))
    f = _empty(n + 1, d)
    for key in ("L_hat", "L", "R_hat"):
        f[key][:n, :n] = getattr(factors, key)
    for key in ("D", "D_spectrum", "D_pinv"):
        f[key][:n] = getattr(factors, key)
    _factor_row(f, n, row, factors.rank_tol * scale, factors.schur_tol, scale)
    return CholeskyFactors(**f, scale=float(scale), rank_tol=factors.rank_tol, schur_tol=factors.schur_tol)


def reconstruct(factors: CholeskyFactors) -> BlockMatrix:
    """``L L*`` as a block matrix."""
    n, d = factors.n_blocks, factors.block_dim
    low = factors.lower().data
    return BlockMatrix(n, d, low @ low.conj().T)


def reconstruct_ldl(factors: CholeskyFactors) -> BlockMatrix:
    """``L̂ D L̂*`` as a block matrix."""
    n, d = factors.n_blocks, factors.block_dim
    lh = factors.lower_unit().data
    return BlockMatrix(n, d, lh @ factors.diagonal().data @ lh.conj().T)


def uni_triangular_inverse(L_hat, tol: float = 0.0) -> np.ndarray:
    """Blocks of the inverse of a block lower uni-triangular matrix.

    The inverse is again lower uni-triangular; it is built row by row, each
    row from the rows above it.

    Raises
    ------
    NotUniTriangular
        If a diagonal block differs from the identity, or a block above the
        diagonal is non-zero, by more than ``tol`` (entrywise).
    """
    lh = _as_blocks(L_hat)
    n, d = lh.shape[0], lh.shape[2]
    eye = np.eye(d)
    for i in range(n):
        if np.max(np.abs(lh[i, i] - eye)) > tol:
            raise NotUniTriangular(f"diagonal block {i} is not the identity")
        for j in range(i + 1, n):
            if np.max(np.abs(lh[i, j])) > tol:
                raise NotUniTriangular(f"block ({i}, {j}) above the diagonal is non-zero")
    r = np.zeros_like(lh)
    for i in range(n):
        r[i, i] = eye
    for i in range(n):
        _inverse_row(lh, r, i)
    return r
