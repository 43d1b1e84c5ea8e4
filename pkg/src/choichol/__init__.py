"""Canonical dilations of completely positive maps via bi-partite Cholesky factorisation."""

__version__ = "0.1.0"

from .channels import (
    BlockMatrix,
    ChannelSpec,
    apply_channel,
    apply_universal_psi,
    apply_via_choi,
    choi_matrix,
    from_kraus,
    is_cp,
    is_hermitian_preserving,
    is_tp,
)
from .cholesky import CholeskyFactors, choi_cholesky, extend_cholesky, reconstruct, uni_triangular_inverse
from .dilation import (
    DilationOperator,
    HalmosUnitary,
    Resolution,
    adjoint_reference,
    dilate,
    dilation_operator,
    halmos_unitary,
    reconstruct_channel,
    resolution,
)
from .linalg import hermitian_eig, kron, partial_trace, pinv_approximant, pinv_psd, psd_sqrt, unvec, vec
