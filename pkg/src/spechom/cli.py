"""Command-line driver.

Every subcommand reads the same flat key=value config file; flags
override individual entries.  Failures print a machine-readable category
to stderr and map onto stable exit codes, so scripts can branch on the
kind of failure without parsing prose.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .csvio import write_grid_csv
from .errors import ConfigError, SpechomError
from .experiments import (
    build_coefficient,
    load_config,
    run_kernel_sweep,
    run_panels_2d,
    run_sweep_1d,
    run_sweep_2d,
    with_overrides,
)
from .homogenize1d import extract_diagonal, homogenize_kernel_1d, offdiag_mass
from .homogenize2d import homogenize_2d
from .spectral import build_projection

EXIT_CODES = {
    "invalid-config": 2,
    "invalid-cutoff": 3,
    "dimension-mismatch": 4,
    "degenerate-coefficient": 5,
    "ill-conditioned": 6,
    "undefined-ratio": 7,
    "memory-guard": 8,
    "io-error": 9,
    "internal": 1,
}


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        if len(parts) == 1:
            return int(parts[0]), 1
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError:
        pass
    raise ConfigError(f"--grid expects N or NXxNY, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spechom",
        description="Effective coarse-scale diffusion coefficients "
        "by spectral fine-mode elimination.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, cutoff: bool = False) -> None:
        p.add_argument("--config", required=True, help="key=value config file")
        p.add_argument("--seed", type=int, default=None, help="override seed")
        p.add_argument("--grid", default=None, help="override grid: N or NXxNY")
        p.add_argument("--tol", type=float, default=None, help="override tolerance")
        p.add_argument("--out", default=None, help="output directory")
        if cutoff:
            p.add_argument(
                "--cutoff", type=int, required=True, help="coarse cutoff |k| <= c"
            )

    common(sub.add_parser("gen-coeff", help="generate and export a coefficient"))
    common(sub.add_parser("homog1d", help="1D effective coefficient"), cutoff=True)
    common(sub.add_parser("homog2d", help="2D effective tensor"), cutoff=True)
    common(sub.add_parser("sweep1d", help="1D bandwidth sweep"))
    common(sub.add_parser("sweep2d", help="2D bandwidth sweep"))
    common(sub.add_parser("kernel", help="coupling-kernel bandwidth sweep"))
    common(sub.add_parser("panels2d", help="export 2D comparison panels"))
    return parser


def _out_dir(args: argparse.Namespace, config) -> Path:
    target = args.out if args.out is not None else config.out
    if target is None:
        raise ConfigError("no output directory: pass --out or set out in the config")
    path = Path(target)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _run(args: argparse.Namespace) -> None:
    config = load_config(args.config)
    grid_override = _parse_grid(args.grid) if args.grid is not None else None
    config = with_overrides(
        config, seed=args.seed, grid=grid_override, tol=args.tol, out=args.out
    )

    if args.command == "gen-coeff":
        coeff = build_coefficient(config)
        target = _out_dir(args, config)
        write_grid_csv(target / "coefficient.csv", coeff.values, "coefficient")
        print(f"wrote {target / 'coefficient.csv'}")
        return

    if args.command == "homog1d":
        coeff = build_coefficient(config)
        basis = build_projection(config.grid, args.cutoff)
        kernel = homogenize_kernel_1d(coeff, basis, tol=config.tol)
        effective = extract_diagonal(kernel)
        target = _out_dir(args, config)
        write_grid_csv(target / "effective.csv", effective.values, "effective")
        write_grid_csv(target / "kernel.csv", kernel.matrix, "kernel")
        print(
            f"cutoff {args.cutoff}: normalization {effective.normalization:.6g}, "
            f"offdiag mass {offdiag_mass(kernel):.6g}"
        )
        return

    if args.command == "homog2d":
        coeff = build_coefficient(config)
        basis = build_projection(config.grid, args.cutoff)
        tensor = homogenize_2d(coeff, basis, tol=config.tol)
        target = _out_dir(args, config)
        for name in ("xx", "xy", "yx", "yy"):
            write_grid_csv(
                target / f"effective_{name}.csv", getattr(tensor, name), name
            )
        print(
            f"cutoff {args.cutoff}: path {tensor.diagnostics['path']}, "
            f"symmetry residual {tensor.symmetry_residual:.3e}"
        )
        return

    runners = {
        "sweep1d": run_sweep_1d,
        "sweep2d": run_sweep_2d,
        "kernel": run_kernel_sweep,
        "panels2d": run_panels_2d,
    }
    target = _out_dir(args, config)
    records = runners[args.command](config, out_dir=target)
    count = len(records) if not isinstance(records, dict) else len(records) - 1
    print(f"{args.command}: {count} outputs written to {target}")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _run(args)
    except SpechomError as exc:
        print(f"spechom: error category={exc.category}: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        print(f"spechom: error category=io-error: {exc}", file=sys.stderr)
        return EXIT_CODES["io-error"]
    return 0


if __name__ == "__main__":
    sys.exit(main())
