"""Command line entry point: ``tfoc run|norm|quantize|fio|schatten``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigurationError
from .fio import Amplitude3D, fio_matrix, parse_phase
from .grid import Signal
from .harness.reports import to_json
from .harness.runner import EXIT_CONFIG, EXIT_OK, run_all
from .io import read_table, write_table
from .modspace import MixedNormSpec, mod_norm
from .quantize import OperatorMatrix, Symbol2D, kernel_from_symbol
from .schatten import schatten_norms
from .stft import gaussian_window
from .weights import parse_weight


def _emit(obj) -> None:
    sys.stdout.write(to_json(obj))


def cmd_run(args) -> int:
    code, reports = run_all(args.config, args.output_dir)
    if code == EXIT_CONFIG:
        return code
    for r in reports:
        status = "pass" if r["pass"] else r["status"] if r["status"] == "aborted" else "fail"
        print(f"{r['experiment_id']}: {status}")
    return code


def cmd_norm(args) -> int:
    grid, vals = read_table(args.signal, ndim=1)
    spec = MixedNormSpec(args.p, args.q, parse_weight(args.weight, 2))
    value = mod_norm(Signal(vals, grid), gaussian_window(grid), spec, measure=args.measure)
    _emit({"N": grid.n_points, "spec": spec.label(), "norm": value})
    return EXIT_OK


def _kernel_out(args, T) -> int:
    if args.output:
        write_table(args.output, T.entries, T.grid)
    sigma = schatten_norms(T)
    _emit({"N": T.grid.n_points, "l2_kernel_norm": T.l2_kernel_norm, "operator_norm": sigma.norm("inf"),
           "output": args.output})
    return EXIT_OK


def cmd_quantize(args) -> int:
    grid, vals = read_table(args.symbol, ndim=2)
    return _kernel_out(args, kernel_from_symbol(Symbol2D(vals, grid), args.t))


def cmd_fio(args) -> int:
    phi = parse_phase(args.phase)
    grid, vals = read_table(args.symbol, ndim=2)
    return _kernel_out(args, fio_matrix(Amplitude3D.from_symbol(Symbol2D(vals, grid)), phi))


def cmd_schatten(args) -> int:
    grid, vals = read_table(args.kernel, ndim=2)
    rep = schatten_norms(OperatorMatrix(vals, grid))
    _emit({"N": grid.n_points, "norms": rep.norms, "sigma_max": float(rep.singular_values[0])})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfoc", description="Time-frequency operator toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the experiments in a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("norm", help="weighted mixed modulation norm of a signal table")
    p.add_argument("--signal", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--weight", default="1")
    p.add_argument("--measure", choices=["quadrature", "counting"], default="quadrature")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("quantize", help="kernel of the t-quantization of a symbol table")
    p.add_argument("--symbol", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("fio", help="kernel of the oscillatory operator with amplitude a(x, zeta)")
    p.add_argument("--phase", required=True)
    p.add_argument("--symbol", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_fio)

    p = sub.add_parser("schatten", help="Schatten norms of a kernel table")
    p.add_argument("--kernel", required=True)
    p.set_defaults(func=cmd_schatten)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
