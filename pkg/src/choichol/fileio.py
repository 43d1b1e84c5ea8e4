"""JSON file formats for channels, factors and dilations.

Complex scalars are ``[re, im]`` pairs and matrices are row-major nested
lists. Floats are written with Python's shortest round-trip ``repr``, so a
write/read cycle reproduces every entry bit for bit. Output is laid out with
one matrix row per line and a fixed key order, so identical objects always
serialise to identical bytes.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .channels import ChannelSpec, from_kraus
from .errors import ChoiCholError, DimensionMismatch, ParseError

FORMAT_VERSION = "1"
REPRESENTATIONS = ("entries", "kraus")


def encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj: Any, rows: int | None = None, cols: int | None = None, what: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ParseError(f"{what}: expected a non-empty list of rows")
    width = len(obj[0])
    out = np.empty((len(obj), width), dtype=np.complex128)
    for r, row in enumerate(obj):
        if len(row) != width:
            raise ParseError(f"{what}: ragged rows")
        for c, z in enumerate(row):
            if (
                not isinstance(z, list)
                or len(z) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)
            ):
                raise ParseError(f"{what}[{r}][{c}]: expected [re, im]")
            if not all(math.isfinite(x) for x in z):
                raise ParseError(f"{what}[{r}][{c}]: non-finite value")
            out[r, c] = complex(z[0], z[1])
    if (rows is not None and out.shape[0] != rows) or (cols is not None and out.shape[1] != cols):
        raise DimensionMismatch(f"{what}: shape {out.shape} does not match declared ({rows}, {cols})")
    return out


def _is_leaf(obj) -> bool:
    # scalars, [re, im] pairs and matrix rows of pairs stay on one line
    if not isinstance(obj, list):
        return not isinstance(obj, dict)
    return all(not isinstance(z, (list, dict)) for z in obj) or all(
        isinstance(z, list) and all(not isinstance(x, (list, dict)) for x in z) for z in obj
    )


def _dumps(obj, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list) and obj and not _is_leaf(obj):
        items = [inner + _dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj, separators=(", ", ": "), allow_nan=False)


def dumps(doc: dict) -> str:
    return _dumps(doc) + "\n"


def write_json(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def channel_document(ch: ChannelSpec | None = None, kraus=None) -> dict:
    """File document for a channel, in ``entries`` form or, given Kraus operators, ``kraus`` form."""
    if kraus is not None:
        ops = [np.asarray(w, dtype=np.complex128) for w in kraus]
        d, n = ops[0].shape
        return {
            "format_version": FORMAT_VERSION,
            "dim_in": n,
            "dim_out": d,
            "representation": "kraus",
            "data": [encode_matrix(w) for w in ops],
        }
    if ch is None:
        raise ValueError("need a channel or a Kraus list")
    n = ch.dim_in
    return {
        "format_version": FORMAT_VERSION,
        "dim_in": n,
        "dim_out": ch.dim_out,
        "representation": "entries",
        "data": [[encode_matrix(ch.entries[i, j]) for j in range(n)] for i in range(n)],
    }


def _positive_int(doc: dict, key: str) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ParseError(f"{key!r} must be a positive integer")
    return v


def parse_channel(doc: Any) -> ChannelSpec:
    if not isinstance(doc, dict):
        raise ParseError("channel file must contain a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}")
    n = _positive_int(doc, "dim_in")
    d = _positive_int(doc, "dim_out")
    rep = doc.get("representation")
    data = doc.get("data")
    if rep not in REPRESENTATIONS:
        raise ParseError(f"representation must be one of {REPRESENTATIONS}, got {rep!r}")
    if not isinstance(data, list):
        raise ParseError("'data' must be a list")
    if rep == "kraus":
        if not data:
            raise ParseError("'data' must hold at least one Kraus operator")
        return from_kraus([decode_matrix(w, d, n, f"kraus[{k}]") for k, w in enumerate(data)])
    if len(data) != n or not all(isinstance(row, list) and len(row) == n for row in data):
        raise DimensionMismatch(f"'data' must be a {n}×{n} array of blocks")
    entries = np.empty((n, n, d, d), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            entries[i, j] = decode_matrix(data[i][j], d, d, f"data[{i}][{j}]")
    return ChannelSpec(entries)


def read_channel(path) -> ChannelSpec:
    """Load a channel file.

    Raises
    ------
    ParseError
        On unreadable, malformed or unsupported input.
    DimensionMismatch
        When the declared dimensions disagree with the arrays.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    try:
        return parse_channel(doc)
    except ChoiCholError:
        raise
    except (TypeError, ValueError) as exc:  # pragma: no cover - defensive
        raise ParseError(f"{path}: {exc}") from exc


def write_channel(path, ch: ChannelSpec | None = None, kraus=None) -> None:
    write_json(channel_document(ch, kraus), path)


def factors_document(factors) -> dict:
    n = factors.n_blocks
    return {
        "format_version": FORMAT_VERSION,
        "kind": "cholesky_factors",
        "n_blocks": n,
        "block_dim": factors.block_dim,
        "L": [[encode_matrix(factors.L[i, j]) for j in range(n)] for i in range(n)],
        "D": [encode_matrix(factors.D[i]) for i in range(n)],
        "L_hat": [[encode_matrix(factors.L_hat[i, j]) for j in range(n)] for i in range(n)],
    }


def dilation_document(dil, unitary=None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "dilation",
        "dim_in": dil.dim_in,
        "dim_out": dil.dim_out,
        "V": encode_matrix(dil.V),
    }
    if unitary is not None:
        doc["U"] = encode_matrix(unitary.U)
    return doc


def read_blocks(obj: Any, n: int, d: int, what: str) -> np.ndarray:
    """Decode an ``n×n`` nested array of ``d×d`` matrices (as in factor files)."""
    if not isinstance(obj, list) or len(obj) != n:
        raise ParseError(f"{what}: expected {n} block rows")
    out = np.empty((n, n, d, d), dtype=np.complex128)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f"{what}[{i}]: expected {n} blocks")
        for j, blk in enumerate(row):
            out[i, j] = decode_matrix(blk, d, d, f"{what}[{i}][{j}]")
    return out
