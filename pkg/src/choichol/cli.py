"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 map not CP, 3 map not TP
where an isometry is required, 4 round-trip residual above tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .channels import (
    ChannelSpec,
    apply_channel,
    choi_matrix,
    from_kraus,
    hermiticity_residual,
    is_cp,
    trace_residual,
)
from .cholesky import choi_cholesky, reconstruct
from .dilation import DilationOperator, dilation_operator, halmos_unitary, reconstruct_channel, resolution
from .errors import ChoiCholError, NotCP, NotIsometry
from .fileio import channel_document, dilation_document, dumps, factors_document, read_channel
from .generate import random_cptp_kraus, random_density, rng_from
from .linalg import elementary, op_norm

EXIT_OK = 0
EXIT_IO = 1
EXIT_NOT_CP = 2
EXIT_NOT_TP = 3
EXIT_RESIDUAL = 4

CP_TOL = 1e-10
ROUNDTRIP_TOL = 1e-8


def _emit(args, report: dict) -> None:
    if args.json:
        print(json.dumps(report, indent=2, allow_nan=False))
        return
    for key, value in report.items():
        if isinstance(value, float):
            value = f"{value:.6e}"
        elif isinstance(value, list):
            value = " ".join(f"{v:.3e}" if isinstance(v, float) else str(v) for v in value)
        print(f"{key}: {value}")


def _write(args, doc: dict) -> None:
    text = dumps(doc)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


def _require_cp(ch: ChannelSpec, tol: float) -> None:
    check = is_cp(ch, tol)
    if not check:
        raise NotCP(
            f"map is not completely positive (min Choi eigenvalue {check.min_eigenvalue:.6e})",
            min_eigenvalue=check.min_eigenvalue,
        )


def cmd_inspect(args) -> int:
    tol = _tol(args, CP_TOL)
    start = time.perf_counter()
    ch = read_channel(args.path)
    check = is_cp(ch, tol)
    tr_res = trace_residual(ch)
    herm_res = hermiticity_residual(ch)
    _emit(args, {
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "cp": check.verdict,
        "min_eigenvalue": check.min_eigenvalue,
        "tp": tr_res <= tol,
        "trace_residual": tr_res,
        "hermitian_preserving": herm_res <= tol,
        "hermiticity_residual": herm_res,
        "elapsed_s": time.perf_counter() - start,
    })
    return EXIT_OK if check else EXIT_NOT_CP


def cmd_decompose(args) -> int:
    tol = _tol(args, CP_TOL)
    start = time.perf_counter()
    ch = read_channel(args.path)
    _require_cp(ch, tol)
    factors = choi_cholesky(ch)
    c = choi_matrix(ch).data
    norm = op_norm(c)
    residual = op_norm(reconstruct(factors).data - c) / norm if norm > 0 else 0.0
    n = ch.dim_in
    if args.output is not None:
        _write(args, factors_document(factors))
    _emit(args, {
        "dim_in": n,
        "dim_out": ch.dim_out,
        "reconstruction_residual": residual,
        "L_block_norms": [op_norm(factors.L[i, j]) for i in range(n) for j in range(i + 1)],
        "D_block_norms": [op_norm(factors.D[i]) for i in range(n)],
        "elapsed_s": time.perf_counter() - start,
    })
    return EXIT_OK


def cmd_dilate(args) -> int:
    tol = _tol(args, CP_TOL)
    start = time.perf_counter()
    ch = read_channel(args.path)
    dil = dilation_operator(resolution(ch, cp_tol=tol), ch)
    report = {
        "dim_in": dil.dim_in,
        "dim_out": dil.dim_out,
        "V_shape": list(dil.V.shape),
        "isometry_residual": dil.isometry_residual,
        "sigma_max": dil.sigma_max,
        "is_isometry": dil.is_isometry,
        "is_contraction": dil.is_contraction,
    }
    unitary = None
    if args.unitary:
        try:
            unitary = halmos_unitary(dil)
        except NotIsometry as exc:
            print(f"error: {exc}", file=sys.stderr)
            report["error"] = str(exc)
            _emit(args, report)
            return EXIT_NOT_TP
        report["unitarity_residual"] = unitary.unitarity_residual
        report["U_shape"] = list(unitary.U.shape)
    if args.output is not None:
        _write(args, dilation_document(dil, unitary))
    report["elapsed_s"] = time.perf_counter() - start
    _emit(args, report)
    return EXIT_OK


def roundtrip_residual(ch: ChannelSpec, dil: DilationOperator, samples: int, seed) -> float:
    """Max of ``‖Ψ(V s V*) − Φ(s)‖`` over all matrix units and ``samples`` random states."""
    n = ch.dim_in
    rng = rng_from(seed)
    inputs = [elementary(i, j, n) for i in range(n) for j in range(n)]
    inputs += [random_density(n, rng) for _ in range(samples)]
    return max(op_norm(reconstruct_channel(dil, s) - apply_channel(ch, s)) for s in inputs)


def cmd_roundtrip(args) -> int:
    tol = _tol(args, ROUNDTRIP_TOL)
    start = time.perf_counter()
    ch = read_channel(args.path)
    dil = dilation_operator(resolution(ch), ch)
    if args.inject_error:
        # negative control: perturb V deterministically before evaluating
        V = dil.V.copy()
        V[0, 0] += args.inject_error
        dil = DilationOperator.from_matrix(V, dil.dim_in, dil.dim_out)
    residual = roundtrip_residual(ch, dil, args.samples, args.seed)
    ok = residual <= tol
    _emit(args, {
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "samples": args.samples,
        "seed": args.seed,
        "max_residual": residual,
        "tol": tol,
        "passed": ok,
        "elapsed_s": time.perf_counter() - start,
    })
    return EXIT_OK if ok else EXIT_RESIDUAL


def cmd_random(args) -> int:
    kraus = random_cptp_kraus(args.dim_in, args.dim_out, args.env, args.seed)
    if args.representation == "kraus":
        doc = channel_document(kraus=kraus)
    else:
        doc = channel_document(from_kraus(kraus))
    _write(args, doc)
    return EXIT_OK


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--tol", type=float, default=default, help="tolerance override")
    parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="print the report as JSON")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0,
                        help="random seed (non-negative integer)")
    parser.add_argument("--output", "-o", default=default, help="output file ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="choichol",
        description="Choi–Cholesky decomposition and dilation of completely positive maps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        _global_options(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("inspect", cmd_inspect, "check CP / TP / Hermiticity preservation")
    p.add_argument("path")
    p = add("decompose", cmd_decompose, "bi-partite Cholesky factors of the Choi matrix")
    p.add_argument("path")
    p = add("dilate", cmd_dilate, "dilation operator V (and Halmos unitary U)")
    p.add_argument("path")
    p.add_argument("--unitary", action="store_true", help="also build the unitary extension")
    p = add("roundtrip", cmd_roundtrip, "check Φ(s) = Ψ(V s V*) numerically")
    p.add_argument("path")
    p.add_argument("--samples", type=int, default=5, help="number of random density matrices")
    p.add_argument("--inject-error", type=float, default=0.0, help=argparse.SUPPRESS)
    p = add("random", cmd_random, "write a seeded random CPTP channel")
    p.add_argument("--dim-in", type=int, required=True)
    p.add_argument("--dim-out", type=int, required=True)
    p.add_argument("--env", type=int, default=1)
    p.add_argument("--representation", choices=("entries", "kraus"), default="entries")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.seed < 0:
            parser.error("--seed must be non-negative")
    except SystemExit as exc:
        # argparse uses 2 for usage errors, which is reserved for "not CP"
        return EXIT_IO if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NotCP as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CP
    except (ChoiCholError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
