"""Resolutions and dilations of completely positive maps.

A resolution of ``Φ`` is a family of Hilbert–Schmidt operators
``ζ_n: C^N ⊗ C^d → C^d`` with ``ζ_i ζ_j* = Φ(E_ij)``. It is read off the rows
of the bi-partite Cholesky factor: ``ζ_n = Σ_{k≤n} ⟨e_k| ⊗ L_nk``. Stacking
``vec(ζ_n)`` as columns gives the dilation operator ``V``, and then
``Φ(s) = Ψ(V s V*)`` with ``Ψ`` the universal map of
:func:`choichol.channels.apply_universal_psi`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSpec, apply_universal_psi, from_kraus, is_cp
from .cholesky import SCHUR_TOL, CholeskyFactors, choi_cholesky
from .errors import DimensionMismatch, NotCP, NotIsometry, NotPSDBlock, UnitarityFailure
from .linalg import as_matrix, op_norm

ISOMETRY_TOL = 1e-9


@dataclass(frozen=True)
class Resolution:
    """``zetas[n]`` is ``ζ_n`` as a ``d×(N·d)`` matrix; column ``k·d + b`` is ``(e_k, e_b)``."""

    zetas: np.ndarray
    factors: CholeskyFactors | None = None

    @property
    def n_blocks(self) -> int:
        return self.zetas.shape[0]

    @property
    def dim_out(self) -> int:
        return self.zetas.shape[1]

    def gram(self) -> np.ndarray:
        """Hilbert–Schmidt Gram matrix ``G[i, j] = ⟨ζ_i, ζ_j⟩ = tr(ζ_i* ζ_j)``."""
        z = self.zetas
        return np.einsum("iab,jab->ij", z.conj(), z)

    def separation(self) -> np.ndarray:
        """All products ``ζ_i ζ_j*`` as an ``(N, N, d, d)`` array."""
        z = self.zetas
        return np.einsum("iac,jbc->ijab", z, z.conj())


def zetas_from_lower(L: np.ndarray) -> np.ndarray:
    """``ζ_n = Σ_k ⟨e_k| ⊗ L_nk`` for every row ``n`` of a block array ``L``."""
    n, _, d, _ = L.shape
    # ⟨e_k| ⊗ X places X in column block k
    return L.transpose(0, 2, 1, 3).reshape(n, d, n * d).copy()


def resolution(
    ch: ChannelSpec,
    *,
    cp_tol: float = 1e-10,
    rank_tol: float | None = None,
    schur_tol: float = SCHUR_TOL,
) -> Resolution:
    """Resolution of a CP map via its Choi–Cholesky factorisation.

    Raises
    ------
    NotCP
        If the Choi matrix fails :func:`is_cp`, or a Schur complement goes
        negative during the factorisation.
    """
    check = is_cp(ch, cp_tol)
    if not check:
        raise NotCP(
            f"map is not completely positive: min Choi eigenvalue {check.min_eigenvalue:.3e}",
            min_eigenvalue=check.min_eigenvalue,
        )
    try:
        factors = choi_cholesky(ch, rank_tol=rank_tol, schur_tol=schur_tol)
    except NotPSDBlock as exc:
        raise NotCP(str(exc), min_eigenvalue=exc.min_eigenvalue) from exc
    return Resolution(zetas_from_lower(factors.L), factors)


@dataclass(frozen=True)
class DilationOperator:
    V: np.ndarray
    dim_in: int
    dim_out: int
    isometry_residual: float  # ‖V*V − I‖
    sigma_max: float
    tol: float = ISOMETRY_TOL

    @property
    def is_isometry(self) -> bool:
        return self.isometry_residual <= self.tol

    @property
    def is_contraction(self) -> bool:
        return self.sigma_max <= 1.0 + self.tol

    @classmethod
    def from_matrix(cls, V, dim_in: int, dim_out: int, tol: float = ISOMETRY_TOL) -> "DilationOperator":
        V = as_matrix(V)
        if V.shape != (dim_in * dim_out * dim_out, dim_in):
            raise DimensionMismatch(
                f"V has shape {V.shape}, expected {(dim_in * dim_out * dim_out, dim_in)}"
            )
        residual = op_norm(V.conj().T @ V - np.eye(dim_in))
        return cls(V, dim_in, dim_out, residual, op_norm(V), tol)


def dilation_operator(res: Resolution, ch: ChannelSpec | None = None, tol: float = ISOMETRY_TOL) -> DilationOperator:
    """Operator ``V`` with ``V e_n = ζ_n``; column ``n`` is the row-major ``vec(ζ_n)``."""
    n, d = res.n_blocks, res.dim_out
    if ch is not None and (ch.dim_in, ch.dim_out) != (n, d):
        raise DimensionMismatch(
            f"resolution is for dimensions {(n, d)}, channel has {(ch.dim_in, ch.dim_out)}"
        )
    V = res.zetas.reshape(n, d * n * d).T.copy()
    return DilationOperator.from_matrix(V, n, d, tol)


def dilate(ch: ChannelSpec, **kwargs) -> DilationOperator:
    """:func:`resolution` followed by :func:`dilation_operator`."""
    return dilation_operator(resolution(ch, **kwargs), ch)


def reconstruct_channel(V, s, n: int | None = None, d: int | None = None) -> np.ndarray:
    """``Ψ(V s V*)``, equal to ``Φ(s)`` when ``V`` dilates ``Φ``."""
    if isinstance(V, DilationOperator):
        n, d, V = V.dim_in, V.dim_out, V.V
    V = as_matrix(V)
    s = as_matrix(s)
    if n is None or d is None:
        raise ValueError("n and d are required when V is a bare matrix")
    if V.shape != (n * d * d, n) or s.shape != (n, n):
        raise DimensionMismatch(f"V {V.shape} and s {s.shape} do not fit N={n}, d={d}")
    return apply_universal_psi(V @ s @ V.conj().T, n, d)


@dataclass(frozen=True)
class HalmosUnitary:
    """``U = [[V, 1 − VV*], [0, V*]]`` from ``C^N ⊕ ℋ`` onto ``ℋ ⊕ C^N``.

    For ``ι(s) = s ⊕ 0`` the leading ``ℋ`` block of ``U ι(s) U*`` is
    ``V s V*``.
    """

    U: np.ndarray
    dim_in: int
    dim_hs: int
    unitarity_residual: float

    def dilate(self, s) -> np.ndarray:
        """The ``ℋ`` block of ``U (s ⊕ 0) U*``."""
        s = as_matrix(s)
        if s.shape != (self.dim_in, self.dim_in):
            raise DimensionMismatch(f"s has shape {s.shape}, expected {self.dim_in}×{self.dim_in}")
        embedded = np.zeros_like(self.U)
        embedded[: self.dim_in, : self.dim_in] = s
        out = self.U @ embedded @ self.U.conj().T
        return out[: self.dim_hs, : self.dim_hs]


def halmos_unitary(V, tol: float = ISOMETRY_TOL) -> HalmosUnitary:
    """Unitary extension of an isometry ``V``.

    Raises
    ------
    NotIsometry
        If ``‖V*V − I‖ > tol``.
    UnitarityFailure
        If the assembled matrix misses ``U*U = UU* = I`` by more than ``tol``.
    """
    if isinstance(V, DilationOperator):
        V = V.V
    V = as_matrix(V)
    m, n = V.shape
    residual = op_norm(V.conj().T @ V - np.eye(n))
    if residual > tol:
        raise NotIsometry(f"‖V*V − I‖ = {residual:.3e} exceeds {tol:.1e}", residual=residual)
    U = np.zeros((m + n, m + n), dtype=np.complex128)
    U[:m, :n] = V
    U[:m, n:] = np.eye(m) - V @ V.conj().T
    U[m:, n:] = V.conj().T
    eye = np.eye(m + n)
    res = max(op_norm(U.conj().T @ U - eye), op_norm(U @ U.conj().T - eye))
    if res > tol:
        raise UnitarityFailure(f"unitarity residual {res:.3e} exceeds {tol:.1e}")
    return HalmosUnitary(U, n, m, res)


def adjoint_reference(V_iso, tol: float = 1e-10) -> Resolution:
    """Closed-form resolution of ``s ↦ V s V*`` for an isometry ``V``.

    All of it sits in the first column block: ``ζ_n = ⟨e_1| ⊗ V E_n1 V*``.
    No factorisation is run.
    """
    V = as_matrix(V_iso)
    d, n = V.shape
    residual = op_norm(V.conj().T @ V - np.eye(n))
    if residual > tol:
        raise NotIsometry(f"‖V*V − I‖ = {residual:.3e} exceeds {tol:.1e}", residual=residual)
    L = np.zeros((n, n, d, d), dtype=np.complex128)
    for i in range(n):
        # V E_i1 V* = v_i v_1*
        L[i, 0] = np.outer(V[:, i], V[:, 0].conj())
    return Resolution(zetas_from_lower(L))


def adjoint_channel(V_iso) -> ChannelSpec:
    return from_kraus([V_iso])
