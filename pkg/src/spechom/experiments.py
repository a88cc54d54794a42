"""Sweep drivers: generate a coefficient, score models, write CSV.

An :class:`ExperimentConfig` fully determines a run; given the same
config (seed included) every byte of CSV output is reproduced.  Bandwidth
is quoted as a percentage of the Nyquist wavenumber, converted to an
integer cutoff per axis with half-up rounding; every scheduled cutoff
must respect the two-thirds dealiasing rule, checked before any
computation starts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .coefficients import (
    CoefficientField,
    gen_filtered_random,
    gen_periodic,
    gen_sparse_annulus,
)
from .csvio import format_float, write_grid_csv, write_sweep_csv
from .errors import (
    BlockSizeLimitError,
    ConfigError,
    DegenerateCoefficientError,
    IllConditionedError,
)
from .homogenize1d import (
    HomogenizedKernel,
    extract_diagonal,
    homogenize_kernel_1d,
    offdiag_mass,
    raw_filter_1d,
)
from .homogenize2d import homogenize_2d, isotropic_tensor, raw_filter_2d
from .solvers import (
    BoundaryConditions2D,
    coarse_compare,
    exact_diffusion_1d,
    solve_diffusion_2d_fd,
)
from .spectral import GridSpec, build_projection

DEFAULT_SCHEDULE_1D = tuple(float(p) for p in range(0, 65, 5))
DEFAULT_SCHEDULE_2D = tuple(float(p) for p in range(0, 70, 10))

_KINDS_1D = ("sweep1d", "kernel")
_KINDS_2D = ("sweep2d", "panels2d")
_GENERATORS = ("periodic", "filtered_random", "sparse_annulus")


def percent_to_cutoff(percent: float, n: int) -> int:
    """Integer cutoff for a retained bandwidth quoted as % of Nyquist.

    Rounds half away from zero so schedules are platform-independent.
    """
    if percent < 0:
        raise ConfigError(f"bandwidth percent must be >= 0, got {percent}")
    return int(percent * n / 200.0 + 0.5)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment run."""

    kind: str
    n_x: int
    generator: str
    n_y: int = 1
    seed: int = 0
    low: float = 1.0
    high: float = 4.0
    period_cells: int = 8
    water_level: float = 0.1
    amplitude: float = 1.0
    k_min: int = 8
    k_max: int = 12
    bandwidths: tuple[float, ...] = ()
    tol: float = 1e-10
    compare_projected: bool = False
    out: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS_1D + _KINDS_2D:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.generator not in _GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}")
        if self.kind in _KINDS_1D and self.n_y != 1:
            raise ConfigError(f"{self.kind} is one-dimensional, drop ny")
        if self.kind in _KINDS_2D and self.n_y == 1:
            raise ConfigError(f"{self.kind} needs a 2D grid, set ny")
        if self.tol <= 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")

        schedule = self.bandwidths
        if not schedule:
            if self.kind == "panels2d":
                raise ConfigError("panels2d needs exactly one bandwidth")
            schedule = (
                DEFAULT_SCHEDULE_1D if self.kind in _KINDS_1D else DEFAULT_SCHEDULE_2D
            )
        schedule = tuple(sorted(dict.fromkeys(float(p) for p in schedule)))
        if self.kind == "panels2d" and len(schedule) != 1:
            raise ConfigError(
                f"panels2d needs exactly one bandwidth, got {len(schedule)}"
            )
        object.__setattr__(self, "bandwidths", schedule)

        # reject the whole schedule up front if any cutoff leaves the
        # dealiased band on either axis
        for percent in schedule:
            cutoff = self.cutoff_for(percent)
            for label, n in (("n_x", self.n_x), ("n_y", self.n_y)):
                if label == "n_y" and self.n_y == 1:
                    continue
                if 3 * cutoff > n:
                    raise ConfigError(
                        f"bandwidth {percent}% gives cutoff {cutoff}, above "
                        f"the two-thirds limit {n // 3} for {label}={n}"
                    )

    def cutoff_for(self, percent: float) -> int:
        """Cutoff shared by both axes, derived from the x resolution."""
        return percent_to_cutoff(percent, self.n_x)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.n_x, self.n_y)


_BOOLEANS = {"true": True, "false": False, "1": True, "0": False}

_PARSERS = {
    "kind": str,
    "nx": int,
    "ny": int,
    "generator": str,
    "seed": int,
    "low": float,
    "high": float,
    "period_cells": int,
    "water_level": float,
    "amplitude": float,
    "k_min": int,
    "k_max": int,
    "bandwidths": lambda text: tuple(float(p) for p in text.split(",") if p.strip()),
    "tol": float,
    "compare_projected": lambda text: _BOOLEANS[text.strip().lower()],
    "out": str,
}

_KEY_TO_FIELD = {"nx": "n_x", "ny": "n_y"}


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` comments and blanks ignored."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in mapping:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    """Build a validated config from string key/value pairs."""
    unknown = sorted(set(mapping) - set(_PARSERS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for key, text in mapping.items():
        try:
            value = _PARSERS[key](text)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad value for {key!r}: {text!r}") from exc
        kwargs[_KEY_TO_FIELD.get(key, key)] = value
    missing = [k for k in ("kind", "nx", "generator") if k not in mapping]
    if missing:
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    return config_from_mapping(parse_config_text(Path(path).read_text()))


def build_coefficient(config: ExperimentConfig) -> CoefficientField:
    """Instantiate the coefficient field the config describes."""
    grid = config.grid
    if config.generator == "periodic":
        return gen_periodic(grid, config.low, config.high, config.period_cells)
    if config.generator == "filtered_random":
        return gen_filtered_random(grid, config.seed, config.water_level)
    return gen_sparse_annulus(
        grid,
        config.seed,
        config.k_min,
        config.k_max,
        config.amplitude,
        config.water_level,
    )


@dataclass(frozen=True)
class SweepRecord:
    """Score of one model at one bandwidth; errors are None when flagged."""

    bandwidth_pct: float
    method: str
    l1: float | None
    l2: float | None
    flags: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class KernelRecord:
    bandwidth_pct: float
    offdiag_mass: float
    kernel: HomogenizedKernel


def _provenance_diagnostics(config: ExperimentConfig) -> dict:
    return {"generator": config.generator, "seed": config.seed}


def _resolve_out(config: ExperimentConfig, out_dir: str | Path | None) -> Path | None:
    target = out_dir if out_dir is not None else config.out
    if target is None:
        return None
    path = Path(target)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_run_log(
    path: Path, config: ExperimentConfig, coeff: CoefficientField, lines: list[str],
    elapsed: float,
) -> None:
    with open(path / "run_log.txt", "w", newline="") as handle:
        handle.write(f"kind: {config.kind}\n")
        for cfg_field in fields(config):
            handle.write(f"config {cfg_field.name} = {getattr(config, cfg_field.name)}\n")
        for key in sorted(coeff.provenance):
            handle.write(f"coefficient {key} = {coeff.provenance[key]}\n")
        for line in lines:
            handle.write(line + "\n")
        handle.write(f"wall_seconds: {elapsed:.3f}\n")


def run_sweep_1d(
    config: ExperimentConfig, out_dir: str | Path | None = None
) -> list[SweepRecord]:
    """Score homogenized and raw-filtered models against the 1D truth."""
    if config.kind != "sweep1d":
        raise ConfigError(f"config kind is {config.kind!r}, expected 'sweep1d'")
    started = time.perf_counter()
    coeff = build_coefficient(config)
    reference = exact_diffusion_1d(coeff)
    records: list[SweepRecord] = []
    for percent in config.bandwidths:
        basis = build_projection(config.grid, config.cutoff_for(percent))
        compare_basis = basis if config.compare_projected else None

        try:
            kernel = homogenize_kernel_1d(coeff, basis, tol=config.tol)
            effective = extract_diagonal(kernel)
            model = exact_diffusion_1d(effective.as_field())
            l1, l2 = coarse_compare(reference, model, compare_basis)
            records.append(
                SweepRecord(
                    bandwidth_pct=percent,
                    method="homogenized",
                    l1=l1,
                    l2=l2,
                    diagnostics={
                        **_provenance_diagnostics(config),
                        "normalization": effective.normalization,
                        "solve_residual": kernel.solve_residual,
                        "imag_residual": kernel.imag_residual,
                        "min_coefficient": effective.min_value,
                    },
                )
            )
        except (DegenerateCoefficientError, IllConditionedError) as exc:
            records.append(_flagged(percent, "homogenized", exc, config))

        try:
            filtered = raw_filter_1d(coeff, basis)
            model = exact_diffusion_1d(filtered)
            l1, l2 = coarse_compare(reference, model, compare_basis)
            records.append(
                SweepRecord(
                    bandwidth_pct=percent,
                    method="raw-filtered",
                    l1=l1,
                    l2=l2,
                    diagnostics={
                        **_provenance_diagnostics(config),
                        "min_coefficient": filtered.min_value,
                    },
                )
            )
        except DegenerateCoefficientError as exc:
            records.append(_flagged(percent, "raw-filtered", exc, config))

    target = _resolve_out(config, out_dir)
    if target is not None:
        write_sweep_csv(target / "sweep.csv", records)
        _write_run_log(
            target, config, coeff, [_record_line(r) for r in records],
            time.perf_counter() - started,
        )
    return records


def _flagged(
    percent: float, method: str, exc: Exception, config: ExperimentConfig
) -> SweepRecord:
    return SweepRecord(
        bandwidth_pct=percent,
        method=method,
        l1=None,
        l2=None,
        flags=(exc.category,),
        diagnostics={**_provenance_diagnostics(config), "message": str(exc)},
    )


def _record_line(record: SweepRecord) -> str:
    l2 = "null" if record.l2 is None else format_float(record.l2)
    flags = ",".join(record.flags) or "-"
    return (
        f"record bandwidth={record.bandwidth_pct:g} method={record.method} "
        f"l2={l2} flags={flags}"
    )


def run_kernel_sweep(
    config: ExperimentConfig, out_dir: str | Path | None = None
) -> list[KernelRecord]:
    """Export the coupling kernel and its off-diagonal mass per bandwidth."""
    if config.kind != "kernel":
        raise ConfigError(f"config kind is {config.kind!r}, expected 'kernel'")
    started = time.perf_counter()
    coeff = build_coefficient(config)
    records: list[KernelRecord] = []
    for percent in config.bandwidths:
        basis = build_projection(config.grid, config.cutoff_for(percent))
        kernel = homogenize_kernel_1d(coeff, basis, tol=config.tol)
        records.append(
            KernelRecord(
                bandwidth_pct=percent,
                offdiag_mass=offdiag_mass(kernel),
                kernel=kernel,
            )
        )

    target = _resolve_out(config, out_dir)
    if target is not None:
        for record in records:
            write_grid_csv(
                target / f"kernel_{record.bandwidth_pct:g}pct.csv",
                record.kernel.matrix,
                "kernel",
            )
        with open(target / "offdiag_mass.csv", "w", newline="") as handle:
            handle.write("bandwidth_pct,offdiag_mass\n")
            for record in records:
                handle.write(
                    f"{format_float(record.bandwidth_pct)},"
                    f"{format_float(record.offdiag_mass)}\n"
                )
        lines = [
            f"record bandwidth={r.bandwidth_pct:g} "
            f"offdiag_mass={format_float(r.offdiag_mass)}"
            for r in records
        ]
        _write_run_log(target, config, coeff, lines, time.perf_counter() - started)
    return records


def run_sweep_2d(
    config: ExperimentConfig, out_dir: str | Path | None = None
) -> list[SweepRecord]:
    """Score homogenized tensors and raw filtering against the 2D truth.

    The reference is the finite-difference solve with the full scalar
    coefficient as an isotropic tensor; both models are solved with the
    same scheme and boundary conditions (unit step left to right).
    """
    if config.kind != "sweep2d":
        raise ConfigError(f"config kind is {config.kind!r}, expected 'sweep2d'")
    started = time.perf_counter()
    coeff = build_coefficient(config)
    bc = BoundaryConditions2D()
    reference = solve_diffusion_2d_fd(isotropic_tensor(coeff), bc, tol=config.tol)
    records: list[SweepRecord] = []
    for percent in config.bandwidths:
        basis = build_projection(config.grid, config.cutoff_for(percent))
        compare_basis = basis if config.compare_projected else None

        try:
            tensor = homogenize_2d(coeff, basis, tol=config.tol)
            model = solve_diffusion_2d_fd(tensor, bc, tol=config.tol)
            l1, l2 = coarse_compare(reference, model, compare_basis)
            flags = ()
            if model.diagnostics["indefinite_points"] > 0:
                flags = ("indefinite-tensor",)
            records.append(
                SweepRecord(
                    bandwidth_pct=percent,
                    method="homogenized",
                    l1=l1,
                    l2=l2,
                    flags=flags,
                    diagnostics={
                        **_provenance_diagnostics(config),
                        "normalization": tensor.normalization,
                        "solve_residual": tensor.diagnostics["solve_residual"],
                        "path": tensor.diagnostics["path"],
                        "fd_residual": model.residual,
                        "indefinite_points": model.diagnostics["indefinite_points"],
                    },
                )
            )
        except (
            DegenerateCoefficientError,
            IllConditionedError,
            BlockSizeLimitError,
        ) as exc:
            records.append(_flagged(percent, "homogenized", exc, config))

        try:
            filtered = raw_filter_2d(coeff, basis)
            model = solve_diffusion_2d_fd(filtered, bc, tol=config.tol)
            l1, l2 = coarse_compare(reference, model, compare_basis)
            records.append(
                SweepRecord(
                    bandwidth_pct=percent,
                    method="raw-filtered",
                    l1=l1,
                    l2=l2,
                    diagnostics={
                        **_provenance_diagnostics(config),
                        "fd_residual": model.residual,
                    },
                )
            )
        except DegenerateCoefficientError as exc:
            records.append(_flagged(percent, "raw-filtered", exc, config))

    target = _resolve_out(config, out_dir)
    if target is not None:
        write_sweep_csv(target / "sweep.csv", records)
        _write_run_log(
            target, config, coeff, [_record_line(r) for r in records],
            time.perf_counter() - started,
        )
    return records


def run_panels_2d(
    config: ExperimentConfig, out_dir: str | Path | None = None
) -> dict:
    """Single-bandwidth 2D run exporting the six comparison panels.

    Panels: the coefficient, the homogenized xx component, the filtered
    coefficient, the exact solution, and the two difference maps (model
    minus exact).  Returns the arrays keyed by panel name, plus
    diagnostics including a maximum-principle check on the exact solve.
    """
    if config.kind != "panels2d":
        raise ConfigError(f"config kind is {config.kind!r}, expected 'panels2d'")
    started = time.perf_counter()
    coeff = build_coefficient(config)
    percent = config.bandwidths[0]
    basis = build_projection(config.grid, config.cutoff_for(percent))
    bc = BoundaryConditions2D()

    reference = solve_diffusion_2d_fd(isotropic_tensor(coeff), bc, tol=config.tol)
    tensor = homogenize_2d(coeff, basis, tol=config.tol)
    homog_solve = solve_diffusion_2d_fd(tensor, bc, tol=config.tol)
    filtered = raw_filter_2d(coeff, basis)
    filt_solve = solve_diffusion_2d_fd(filtered, bc, tol=config.tol)

    lo, hi = min(bc.left, bc.right), max(bc.left, bc.right)
    panels = {
        "coefficient": coeff.values,
        "homogenized_xx": tensor.xx,
        "filtered": filtered.xx,
        "exact_u": reference.u,
        "diff_homogenized": homog_solve.u - reference.u,
        "diff_filtered": filt_solve.u - reference.u,
    }
    diagnostics = {
        **_provenance_diagnostics(config),
        "bandwidth_pct": percent,
        "normalization": tensor.normalization,
        "max_principle_ok": bool(
            reference.u.min() >= lo - 1e-10 and reference.u.max() <= hi + 1e-10
        ),
        "fd_residual": reference.residual,
    }

    target = _resolve_out(config, out_dir)
    if target is not None:
        for name, values in panels.items():
            write_grid_csv(target / f"{name}.csv", values, name)
        lines = [f"diagnostic {k} = {v}" for k, v in sorted(diagnostics.items())]
        _write_run_log(target, config, coeff, lines, time.perf_counter() - started)
    return {**panels, "diagnostics": diagnostics}


def with_overrides(
    config: ExperimentConfig,
    seed: int | None = None,
    grid: tuple[int, int] | None = None,
    tol: float | None = None,
    out: str | None = None,
) -> ExperimentConfig:
    """Copy a config with command-line overrides applied."""
    changes: dict = {}
    if seed is not None:
        changes["seed"] = seed
    if grid is not None:
        changes["n_x"], changes["n_y"] = grid
    if tol is not None:
        changes["tol"] = tol
    if out is not None:
        changes["out"] = out
    return replace(config, **changes) if changes else config
