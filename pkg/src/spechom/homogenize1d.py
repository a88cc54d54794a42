"""Effective one-dimensional coefficients by fine-mode elimination.

The multiplication operator of a periodic coefficient ``a`` is expressed
in the unitary Fourier basis, split into coarse and fine blocks by a
projection basis, and the fine block is eliminated through its Schur
complement.  Conjugating the eliminated operator back to the grid gives a
dense coupling kernel; its diagonal, rescaled by the retained fraction of
modes, is the effective pointwise coefficient.  Keeping only the mean
mode reproduces the harmonic mean, and keeping everything reproduces the
original coefficient, so the family interpolates between the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .coefficients import CoefficientField
from .errors import (
    DegenerateCoefficientError,
    DimensionMismatchError,
    IllConditionedError,
    UndefinedRatioError,
)
from .spectral import GridSpec, ProjectionBasis, coarse_project, to_spectrum

#: relative contrast max(a)/min(a) beyond which elimination is refused
DEFAULT_CONDITION_LIMIT = 1e13

#: target relative residual for the fine-block solve
DEFAULT_SOLVE_TOL = 1e-10


def convolution_block(
    spectrum: np.ndarray, rows_k: np.ndarray, cols_k: np.ndarray
) -> np.ndarray:
    """Block of the Fourier-space multiplication operator of a field.

    In the unitary convention, multiplication by ``a`` couples wavenumbers
    ``k`` and ``k'`` with weight ``a_hat(k - k') / sqrt(n)``; differences
    wrap modulo n.  ``spectrum`` is the signed-ordered transform of ``a``.
    """
    n = spectrum.shape[0]
    diff = rows_k[:, None] - cols_k[None, :]
    return spectrum[(diff + n // 2 - 1) % n] / np.sqrt(n)


@dataclass(frozen=True)
class HomogenizedKernel:
    """Grid-space coupling kernel after eliminating the fine band.

    ``matrix`` is the real n-by-n kernel; the residual fields record how
    sharply the exact symmetries held before the real part was taken.
    """

    grid: GridSpec
    basis: ProjectionBasis
    matrix: np.ndarray
    imag_residual: float
    hermitian_residual: float
    solve_residual: float

    @property
    def coarse_count(self) -> int:
        return self.basis.coarse_count


def homogenize_kernel_1d(
    coeff: CoefficientField,
    basis: ProjectionBasis,
    tol: float = DEFAULT_SOLVE_TOL,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> HomogenizedKernel:
    """Eliminate the fine band of ``coeff`` and return the grid kernel.

    The fine-fine block is Hermitian positive definite whenever the
    coefficient is positive (its spectrum lies between min(a) and max(a)),
    so it is factored by Cholesky; the solve is iteratively refined until
    the relative residual drops below ``tol``.
    """
    grid = coeff.grid
    if grid.ndim != 1:
        raise DimensionMismatchError("homogenize_kernel_1d requires a 1D grid")
    if basis.grid != grid:
        raise DimensionMismatchError("coefficient and basis use different grids")

    contrast = coeff.contrast
    if contrast > condition_limit:
        raise IllConditionedError(
            f"fine block condition bound {contrast:.3e} exceeds "
            f"{condition_limit:.1e} (min coefficient {coeff.min_value:.6e})"
        )

    n = grid.n_x
    part = basis.x
    if part.k_q == 0:
        # empty fine set: the eliminated operator is multiplication itself
        return HomogenizedKernel(
            grid=grid,
            basis=basis,
            matrix=np.diag(coeff.values),
            imag_residual=0.0,
            hermitian_residual=0.0,
            solve_residual=0.0,
        )

    spectrum = to_spectrum(grid, coeff.values)
    coarse_k = part.coarse_k
    fine_k = part.fine_k

    coarse_block = convolution_block(spectrum, coarse_k, coarse_k)
    coupling = convolution_block(spectrum, fine_k, coarse_k)
    fine_block = convolution_block(spectrum, fine_k, fine_k)

    try:
        factor = cho_factor(fine_block)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(
            f"fine block is numerically singular "
            f"(min coefficient {coeff.min_value:.6e})"
        ) from exc

    corrector = cho_solve(factor, coupling)
    scale = np.linalg.norm(coupling)
    residual = 0.0
    if scale > 0.0:
        residual = np.linalg.norm(coupling - fine_block @ corrector) / scale
        for _ in range(4):
            if residual <= tol:
                break
            corrector += cho_solve(factor, coupling - fine_block @ corrector)
            residual = np.linalg.norm(coupling - fine_block @ corrector) / scale
        if residual > tol:
            raise IllConditionedError(
                f"fine-block solve stalled at relative residual {residual:.3e} "
                f"(min coefficient {coeff.min_value:.6e})"
            )

    core = coarse_block - coupling.conj().T @ corrector

    # conjugate back to the grid through the coarse synthesis rows
    rows = np.exp(-2j * np.pi * np.outer(coarse_k, np.arange(n)) / n) / np.sqrt(n)
    kernel = rows.conj().T @ core @ rows

    herm = np.max(np.abs(kernel - kernel.conj().T))
    imag = np.max(np.abs(kernel.imag))
    peak = np.max(np.abs(kernel))
    return HomogenizedKernel(
        grid=grid,
        basis=basis,
        matrix=kernel.real,
        imag_residual=float(imag / peak) if peak > 0 else 0.0,
        hermitian_residual=float(herm / peak) if peak > 0 else 0.0,
        solve_residual=float(residual),
    )


@dataclass(frozen=True)
class HomogenizedCoefficient1D:
    """Pointwise effective coefficient with its normalization on record."""

    grid: GridSpec
    basis: ProjectionBasis
    values: np.ndarray
    normalization: float

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    def as_field(self) -> CoefficientField:
        """Repackage as a coefficient field (fails if positivity was lost)."""
        return CoefficientField(
            grid=self.grid,
            values=self.values,
            provenance={
                "generator": "homogenized",
                "cutoff": self.basis.x.cutoff,
                "normalization": self.normalization,
            },
        )


def extract_diagonal(kernel: HomogenizedKernel) -> HomogenizedCoefficient1D:
    """Diagonal of the kernel rescaled so constants are fixed points.

    The coarse projector thins the identity by a factor k_p / n, so the
    diagonal is multiplied by n / k_p; with that scaling a constant
    coefficient is reproduced exactly at every cutoff.
    """
    scale = kernel.grid.n_x / kernel.basis.coarse_count
    return HomogenizedCoefficient1D(
        grid=kernel.grid,
        basis=kernel.basis,
        values=scale * np.diag(kernel.matrix).copy(),
        normalization=float(scale),
    )


def raw_filter_1d(coeff: CoefficientField, basis: ProjectionBasis) -> CoefficientField:
    """Plain low-pass of the coefficient onto the coarse band.

    The naive competitor to elimination: no corrector, just truncation.
    Filtering can undershoot zero for rough fields, which is reported as a
    degenerate coefficient rather than papered over.
    """
    if basis.grid != coeff.grid:
        raise DimensionMismatchError("coefficient and basis use different grids")
    filtered = coarse_project(coeff.values, basis)
    if filtered.min() <= 0.0:
        raise DegenerateCoefficientError(
            f"low-pass coefficient lost positivity (min {filtered.min():.6e})"
        )
    return CoefficientField(
        grid=coeff.grid,
        values=filtered,
        provenance={
            "generator": "raw_filter",
            "cutoff": basis.x.cutoff,
            "parent": coeff.provenance.get("generator", "unknown"),
        },
    )


def offdiag_mass(kernel: HomogenizedKernel) -> float:
    """Fraction of the kernel's Frobenius mass living off the diagonal.

    Zero means the effective operator is a pointwise multiplication; the
    fraction grows as elimination smears coupling across the grid.
    """
    total = np.linalg.norm(kernel.matrix)
    if total == 0.0:
        raise UndefinedRatioError("kernel is identically zero")
    off = kernel.matrix - np.diag(np.diag(kernel.matrix))
    return float(np.linalg.norm(off) / total)
