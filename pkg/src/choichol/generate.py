"""Seeded random test objects.

Channels are drawn in Stinespring form ``Φ(s) = tr_env(W s W*)`` with a
random isometry ``W: C^N → C^d ⊗ C^env``, so they are CPTP by construction
and make an independent oracle for the verifiers.
"""

from __future__ import annotations

import numpy as np

from .channels import ChannelSpec, from_kraus
from .errors import InvalidDimensions


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rows: int, cols: int, rng) -> np.ndarray:
    rng = rng_from(rng)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_isometry(rows: int, cols: int, rng) -> np.ndarray:
    """Orthonormalise a Gaussian ``rows×cols`` matrix (``cols ≤ rows``).

    The phases of ``R``'s diagonal are folded back into ``Q`` so the result
    is Haar distributed and a deterministic function of the Gaussian draw.
    """
    if cols > rows:
        raise InvalidDimensions(f"no isometry from dimension {cols} into {rows}")
    q, r = np.linalg.qr(ginibre(rows, cols, rng))
    diag = np.diagonal(r)
    phases = np.where(diag == 0, 1.0, diag / np.abs(np.where(diag == 0, 1.0, diag)))
    return q * phases


def stinespring_kraus(w: np.ndarray, d: int, env: int) -> list[np.ndarray]:
    """Split an isometry into ``C^d ⊗ C^env`` into its ``env`` Kraus operators."""
    n = w.shape[1]
    blocks = w.reshape(d, env, n)
    return [blocks[:, k, :].copy() for k in range(env)]


def random_cptp_kraus(dim_in: int, dim_out: int, env: int, seed=None) -> list[np.ndarray]:
    if min(dim_in, dim_out, env) < 1:
        raise InvalidDimensions("all dimensions must be at least 1")
    if dim_in > dim_out * env:
        raise InvalidDimensions(
            f"dim_in={dim_in} exceeds dim_out·env={dim_out * env}; no isometry exists"
        )
    w = random_isometry(dim_out * env, dim_in, seed)
    return stinespring_kraus(w, dim_out, env)


def random_cptp(dim_in: int, dim_out: int, env: int, seed=None) -> ChannelSpec:
    return from_kraus(random_cptp_kraus(dim_in, dim_out, env, seed))


def random_cp(dim_in: int, dim_out: int, n_kraus: int, seed=None) -> ChannelSpec:
    """CP map with Gaussian Kraus operators; neither TP nor contractive in general."""
    rng = rng_from(seed)
    return from_kraus([ginibre(dim_out, dim_in, rng) for _ in range(n_kraus)])


def random_psd(dim: int, rank: int | None, rng) -> np.ndarray:
    rng = rng_from(rng)
    m = ginibre(dim, dim if rank is None else rank, rng)
    return m @ m.conj().T


def random_density(dim: int, rng) -> np.ndarray:
    rho = random_psd(dim, None, rng)
    return rho / np.trace(rho).real
