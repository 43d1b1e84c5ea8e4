"""Completely positive maps given by their values on matrix units.

A map ``Φ`` from ``N×N`` to ``d×d`` matrices is stored as the entry family
``C[i, j] = Φ(E_ij)``, a ``(N, N, d, d)`` array. Everything else (Choi
matrix, application to a state, CP and TP checks) is derived from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyKrausList,
    IndexOutOfRange,
    ShapeMismatch,
)
from .linalg import as_matrix

TOL = 1e-10


@dataclass(frozen=True)
class BlockMatrix:
    """An ``(N·d)×(N·d)`` matrix read as an ``N×N`` grid of ``d×d`` blocks.

    Block ``(i, j)`` occupies rows ``i·d:(i+1)·d`` and columns ``j·d:(j+1)·d``,
    i.e. the first tensor factor is the outer (block) index.
    """

    n_blocks: int
    block_dim: int
    data: np.ndarray

    def __post_init__(self):
        size = self.n_blocks * self.block_dim
        if self.data.shape != (size, size):
            raise DimensionMismatch(
                f"block matrix data has shape {self.data.shape}, expected {(size, size)}"
            )

    @classmethod
    def from_blocks(cls, blocks) -> "BlockMatrix":
        b = np.asarray(blocks, dtype=np.complex128)
        if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[2] != b.shape[3]:
            raise DimensionMismatch(f"expected (N, N, d, d) blocks, got shape {b.shape}")
        n, _, d, _ = b.shape
        data = b.transpose(0, 2, 1, 3).reshape(n * d, n * d)
        return cls(n, d, data)

    def block(self, i: int, j: int) -> np.ndarray:
        d = self.block_dim
        return self.data[i * d:(i + 1) * d, j * d:(j + 1) * d]

    def blocks(self) -> np.ndarray:
        n, d = self.n_blocks, self.block_dim
        return self.data.reshape(n, d, n, d).transpose(0, 2, 1, 3).copy()

    def leading(self, n: int) -> "BlockMatrix":
        """Principal submatrix on the first ``n`` blocks."""
        if not 1 <= n <= self.n_blocks:
            raise IndexOutOfRange(f"n={n} outside 1..{self.n_blocks}")
        k = n * self.block_dim
        return BlockMatrix(n, self.block_dim, self.data[:k, :k].copy())


@dataclass(frozen=True)
class ChannelSpec:
    """Linear map ``Φ`` given by ``entries[i, j] = Φ(E_ij)``.

    ``kraus_trace_preserving`` is only set by :func:`from_kraus`, where it
    records whether ``Σ w*w`` equals the identity.
    """

    entries: np.ndarray
    kraus_trace_preserving: bool | None = field(default=None, compare=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.complex128)
        if e.ndim != 4 or e.shape[0] != e.shape[1] or e.shape[2] != e.shape[3]:
            raise ShapeMismatch(f"entries must have shape (N, N, d, d), got {e.shape}")
        if 0 in e.shape:
            raise ShapeMismatch("dimensions must be positive")
        if not np.all(np.isfinite(e)):
            raise ShapeMismatch("entries contain non-finite values")
        object.__setattr__(self, "entries", e)

    @property
    def dim_in(self) -> int:
        return self.entries.shape[0]

    @property
    def dim_out(self) -> int:
        return self.entries.shape[2]

    def scaled(self, factor: float) -> "ChannelSpec":
        return ChannelSpec(self.entries * factor)


def from_kraus(kraus: Sequence) -> ChannelSpec:
    """Entry family of ``s ↦ Σ_k w_k s w_k*`` for ``d×N`` operators ``w_k``."""
    ops = [as_matrix(w) for w in kraus]
    if not ops:
        raise EmptyKrausList("at least one Kraus operator is required")
    shape = ops[0].shape
    for w in ops:
        if w.shape != shape:
            raise ShapeMismatch(f"Kraus operators disagree in shape: {shape} vs {w.shape}")
    d, n = shape
    w = np.stack(ops)  # (K, d, N)
    # Φ(E_ij) = Σ_k w_k[:, i] w_k[:, j]*
    entries = np.einsum("kai,kbj->ijab", w, w.conj())
    gram = np.einsum("kai,kaj->ij", w.conj(), w)
    tp = bool(np.max(np.abs(gram - np.eye(n))) <= TOL)
    return ChannelSpec(entries, kraus_trace_preserving=tp)


def choi_matrix(ch: ChannelSpec, n: int | None = None) -> BlockMatrix:
    """Choi matrix ``Σ_{i,j<n} E_ij ⊗ Φ(E_ij)`` over the first ``n`` basis vectors."""
    if n is None:
        n = ch.dim_in
    if not 1 <= n <= ch.dim_in:
        raise IndexOutOfRange(f"n={n} outside 1..{ch.dim_in}")
    return BlockMatrix.from_blocks(ch.entries[:n, :n])


@dataclass(frozen=True)
class CPCheck:
    verdict: bool
    min_eigenvalue: float

    def __bool__(self):
        return self.verdict


def is_cp(ch: ChannelSpec, tol: float = TOL) -> CPCheck:
    """Choi criterion: ``Φ`` is CP iff its Choi matrix is positive.

    Every principal block submatrix of a positive matrix is positive, so the
    full matrix is the only one that needs checking. A non-Hermitian Choi
    matrix fails the check outright (``min_eigenvalue`` is then that of its
    Hermitian part).
    """
    c = choi_matrix(ch).data
    norm = float(np.linalg.norm(c, 2))
    lam = np.linalg.eigvalsh(0.5 * (c + c.conj().T))
    lam_min = float(lam[0])
    hermitian = np.linalg.norm(c - c.conj().T) <= tol * norm
    return CPCheck(bool(hermitian and lam_min >= -tol * norm), lam_min)


def hermiticity_residual(ch: ChannelSpec) -> float:
    """``max_ij ‖C_ji − C_ij*‖`` relative to ``max_ij ‖C_ij‖``."""
    e = ch.entries
    diff = e.transpose(1, 0, 2, 3) - e.conj().transpose(0, 1, 3, 2)
    scale = float(np.max(np.abs(e)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(diff))) / scale


def is_hermitian_preserving(ch: ChannelSpec, tol: float = TOL) -> bool:
    return hermiticity_residual(ch) <= tol


def trace_residual(ch: ChannelSpec) -> float:
    """``max_ij |tr C_ij − δ_ij|``."""
    traces = np.einsum("ijaa->ij", ch.entries)
    return float(np.max(np.abs(traces - np.eye(ch.dim_in))))


def is_tp(ch: ChannelSpec, tol: float = TOL) -> bool:
    return trace_residual(ch) <= tol


def _state(ch: ChannelSpec, s) -> np.ndarray:
    s = as_matrix(s)
    if s.shape != (ch.dim_in, ch.dim_in):
        raise DimensionMismatch(f"input has shape {s.shape}, channel expects {ch.dim_in}×{ch.dim_in}")
    return s


def apply_channel(ch: ChannelSpec, s) -> np.ndarray:
    """``Φ(s) = Σ_ij s[i, j] C_ij``."""
    s = _state(ch, s)
    return np.einsum("ij,ijab->ab", s, ch.entries)


def apply_via_choi(ch: ChannelSpec, s) -> np.ndarray:
    """``Φ(s) = (|O⟩ ⊗ 1)* (s ⊗ Choi) (|O⟩ ⊗ 1)`` with ``O = Σ e_i ⊗ e_i``.

    Evaluated literally with dense Kronecker products, as an independent
    route to :func:`apply_channel`.
    """
    s = _state(ch, s)
    n, d = ch.dim_in, ch.dim_out
    omega = np.eye(n, dtype=np.complex128).reshape(n * n, 1)
    lift = np.kron(omega, np.eye(d))
    return lift.conj().T @ np.kron(s, choi_matrix(ch).data) @ lift


def apply_universal_psi(rho, n: int, d: int) -> np.ndarray:
    """The universal CPTP map on Hilbert–Schmidt operators ``w: C^N⊗C^d → C^d``.

    ``rho`` acts on the coordinate space of ``d×(N·d)`` matrices under the
    row-major ``vec``, so a row index of ``rho`` is ``(a, c)`` with output
    row ``a`` and joint column ``c``. The map contracts ``c``:
    ``Ψ(rho)[a, a'] = Σ_c rho[(a, c), (a', c)]``, which sends
    ``vec(w1) vec(w2)*`` to ``w1 w2*``.
    """
    r = as_matrix(rho)
    m = n * d
    if r.shape != (d * m, d * m):
        raise DimensionMismatch(f"operator of shape {r.shape} does not act on {n}·{d}² coordinates")
    return np.einsum("acbc->ab", r.reshape(d, m, d, m))
