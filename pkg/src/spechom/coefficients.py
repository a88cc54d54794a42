"""Strictly positive coefficient fields and their generators.

Each generator is deterministic given its arguments: random draws come
from ``numpy.random.default_rng(seed)`` (PCG64) and every stochastic
field records the generator name, seed, and parameters in ``provenance``
so a run can be reproduced bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateCoefficientError, DimensionMismatchError
from .spectral import (
    GridSpec,
    dealias_mask,
    from_spectrum,
    signed_wavenumbers,
    to_spectrum,
)


@dataclass(frozen=True)
class CoefficientField:
    """A real, strictly positive scalar field on a periodic grid.

    ``provenance`` is a plain mapping (generator name, seed, parameters)
    treated as read-only; it travels with the field into experiment logs.
    """

    grid: GridSpec
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise DimensionMismatchError(
                f"values shape {values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DegenerateCoefficientError("coefficient contains non-finite values")
        if values.min() <= 0.0:
            raise DegenerateCoefficientError(
                f"coefficient must be strictly positive, min = {values.min():.6e}"
            )
        object.__setattr__(self, "values", values)

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    @property
    def max_value(self) -> float:
        return float(self.values.max())

    @property
    def contrast(self) -> float:
        """Ratio max/min, the natural conditioning measure for elimination."""
        return self.max_value / self.min_value


def gen_periodic(
    grid: GridSpec,
    low: float,
    high: float,
    period_cells: int,
) -> CoefficientField:
    """Square wave along x: ``low`` on the first half of each period,
    ``high`` on the second, constant along y.

    ``period_cells`` must be even and divide ``n_x`` so the wave closes
    periodically with equal measure for both phases.
    """
    if low <= 0.0 or high <= 0.0:
        raise DegenerateCoefficientError(
            f"phases must be positive, got low={low}, high={high}"
        )
    if period_cells < 2 or period_cells % 2 != 0:
        raise ConfigError(f"period_cells must be even and >= 2, got {period_cells}")
    if grid.n_x % period_cells != 0:
        raise ConfigError(
            f"period_cells={period_cells} does not divide n_x={grid.n_x}"
        )
    phase = (np.arange(grid.n_x) % period_cells) < period_cells // 2
    line = np.where(phase, low, high).astype(float)
    values = line if grid.ndim == 1 else np.repeat(line[:, None], grid.n_y, axis=1)
    return CoefficientField(
        grid=grid,
        values=values,
        provenance={
            "generator": "periodic",
            "low": low,
            "high": high,
            "period_cells": period_cells,
        },
    )


def _retained_mask(grid: GridSpec) -> np.ndarray:
    if grid.ndim == 1:
        return dealias_mask(grid.n_x)
    return dealias_mask(grid.n_x)[:, None] & dealias_mask(grid.n_y)[None, :]


def _real_field(grid: GridSpec, coeffs: np.ndarray) -> np.ndarray:
    out = from_spectrum(grid, coeffs)
    scale = np.max(np.abs(out))
    if scale > 0 and np.max(np.abs(out.imag)) > 1e-12 * scale:
        raise ValueError("spectrum lost conjugate symmetry")
    return out.real


def gen_filtered_random(
    grid: GridSpec,
    seed: int,
    water_level: float = 0.1,
) -> CoefficientField:
    """Uniform noise low-passed by the two-thirds rule, shifted positive.

    After filtering, the field is raised so its minimum sits exactly at
    ``water_level``; the shift touches only the mean mode, so the retained
    fluctuation content is unchanged.
    """
    if water_level <= 0.0:
        raise DegenerateCoefficientError(
            f"water_level must be positive, got {water_level}"
        )
    rng = np.random.default_rng(seed)
    raw = rng.random(grid.shape)
    coeffs = np.where(_retained_mask(grid), to_spectrum(grid, raw), 0.0)
    values = _real_field(grid, coeffs)
    values = values - values.min() + water_level
    return CoefficientField(
        grid=grid,
        values=values,
        provenance={
            "generator": "filtered_random",
            "seed": seed,
            "water_level": water_level,
        },
    )


def gen_sparse_annulus(
    grid: GridSpec,
    seed: int,
    k_min: int,
    k_max: int,
    amplitude: float = 1.0,
    water_level: float = 0.1,
) -> CoefficientField:
    """Random-phase field supported on the annulus ``k_min <= |k| <= k_max``.

    Every mode in the annulus gets modulus ``amplitude`` and a phase drawn
    uniformly; conjugate partners are paired explicitly so the field is
    real by construction.  The annulus must sit strictly inside the
    two-thirds band (``3 * k_max < n``) on every axis, and the result is
    shifted so its minimum is ``water_level``.
    """
    if not (0 < k_min <= k_max):
        raise ConfigError(f"need 0 < k_min <= k_max, got [{k_min}, {k_max}]")
    for label, n in (("n_x", grid.n_x), ("n_y", grid.n_y)):
        if label == "n_y" and grid.ndim == 1:
            continue
        if 3 * k_max >= n:
            raise ConfigError(
                f"annulus k_max={k_max} must satisfy 3*k_max < {label}={n}"
            )
    if amplitude <= 0.0:
        raise ConfigError(f"amplitude must be positive, got {amplitude}")
    if water_level <= 0.0:
        raise DegenerateCoefficientError(
            f"water_level must be positive, got {water_level}"
        )

    rng = np.random.default_rng(seed)
    kx = signed_wavenumbers(grid.n_x)
    if grid.ndim == 1:
        radius2 = kx.astype(np.int64) ** 2
    else:
        ky = signed_wavenumbers(grid.n_y)
        radius2 = (
            kx.astype(np.int64)[:, None] ** 2 + ky.astype(np.int64)[None, :] ** 2
        )
    annulus = (radius2 >= k_min * k_min) & (radius2 <= k_max * k_max)

    coeffs = np.zeros(grid.shape, dtype=complex)
    # walk the half-plane (positive leading wavenumber) and mirror each
    # draw onto its conjugate partner; the annulus excludes dc and sits
    # well below Nyquist, so every partner is present and distinct
    if grid.ndim == 1:
        half = annulus & (kx > 0)
        for idx in np.flatnonzero(half):
            phase = rng.uniform(0.0, 2.0 * np.pi)
            coeffs[idx] = amplitude * np.exp(1j * phase)
            coeffs[_mirror_index(grid.n_x, idx)] = np.conj(coeffs[idx])
    else:
        half = annulus & ((kx[:, None] > 0) | ((kx[:, None] == 0) & (ky[None, :] > 0)))
        for ix, iy in np.argwhere(half):
            phase = rng.uniform(0.0, 2.0 * np.pi)
            coeffs[ix, iy] = amplitude * np.exp(1j * phase)
            coeffs[_mirror_index(grid.n_x, ix), _mirror_index(grid.n_y, iy)] = np.conj(
                coeffs[ix, iy]
            )

    values = _real_field(grid, coeffs)
    values = values - values.min() + water_level
    return CoefficientField(
        grid=grid,
        values=values,
        provenance={
            "generator": "sparse_annulus",
            "seed": seed,
            "k_min": k_min,
            "k_max": k_max,
            "amplitude": amplitude,
            "water_level": water_level,
        },
    )


def _mirror_index(n: int, idx: int) -> int:
    # index of wavenumber -k in the signed ordering (valid for |k| < n/2)
    k = idx - (n // 2) + 1
    return (-k) + (n // 2) - 1
