"""Grids, Fourier transforms, and coarse/fine projection bases.

All fields live on uniform periodic grids over the unit interval or unit
square, sampled at ``x_j = j / n``.  Spectra use the unitary transform
(``norm="ortho"``) with coefficients stored in signed wavenumber order

    k = -n/2 + 1, ..., -1, 0, 1, ..., n/2

so index ``m`` holds wavenumber ``k = m - n//2 + 1`` and the Nyquist mode
``+n/2`` sits last.  A projection basis splits that ladder into a coarse
band ``|k| <= cutoff`` and its complement; the coarse band always contains
the mean mode, never the Nyquist mode, and is symmetric under conjugation,
so projections of real fields stay real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidCutoffError

NORMALIZATION = "unitary"


def signed_wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in storage order for an n-point axis."""
    return np.arange(-(n // 2) + 1, n // 2 + 1)


def _spectral_order(n: int) -> np.ndarray:
    # positions of the signed ladder inside numpy's native fft layout
    return signed_wavenumbers(n) % n


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on the unit interval (``n_y == 1``) or square.

    Both extents must be even and at least 4 so that every axis has a
    well-defined Nyquist mode and a nonempty symmetric band below it.
    """

    n_x: int
    n_y: int = 1

    def __post_init__(self) -> None:
        for label, n in (("n_x", self.n_x), ("n_y", self.n_y)):
            if label == "n_y" and n == 1:
                continue
            if n < 4 or n % 2 != 0:
                raise DimensionMismatchError(
                    f"{label} must be even and >= 4, got {n}"
                )

    @property
    def ndim(self) -> int:
        return 1 if self.n_y == 1 else 2

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_x,) if self.ndim == 1 else (self.n_x, self.n_y)

    @property
    def size(self) -> int:
        return self.n_x * self.n_y

    @property
    def h_x(self) -> float:
        return 1.0 / self.n_x

    @property
    def h_y(self) -> float:
        return 1.0 / self.n_y

    def nodes_x(self) -> np.ndarray:
        return np.arange(self.n_x) / self.n_x

    def nodes_y(self) -> np.ndarray:
        return np.arange(self.n_y) / self.n_y


def _check_field(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise DimensionMismatchError(
            f"field shape {values.shape} does not match grid {grid.shape}"
        )
    return values


def to_spectrum(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    """Unitary DFT of a grid field, reordered onto the signed ladder."""
    values = _check_field(grid, values)
    if grid.ndim == 1:
        return np.fft.fft(values, norm="ortho")[_spectral_order(grid.n_x)]
    coeffs = np.fft.fft2(values, norm="ortho")
    return coeffs[np.ix_(_spectral_order(grid.n_x), _spectral_order(grid.n_y))]


def from_spectrum(grid: GridSpec, coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_spectrum`; returns a complex field."""
    coeffs = _check_field(grid, coeffs)
    if grid.ndim == 1:
        native = np.empty(grid.n_x, dtype=complex)
        native[_spectral_order(grid.n_x)] = coeffs
        return np.fft.ifft(native, norm="ortho")
    native = np.empty(grid.shape, dtype=complex)
    native[np.ix_(_spectral_order(grid.n_x), _spectral_order(grid.n_y))] = coeffs
    return np.fft.ifft2(native, norm="ortho")


@dataclass(frozen=True)
class AxisPartition:
    """Coarse/fine split of one axis of the signed wavenumber ladder.

    ``cutoff`` is the largest retained |k|, or ``None`` when the whole
    ladder (Nyquist included) counts as coarse and the fine set is empty.
    """

    n: int
    cutoff: int | None

    @property
    def k_values(self) -> np.ndarray:
        return signed_wavenumbers(self.n)

    @property
    def coarse_mask(self) -> np.ndarray:
        if self.cutoff is None:
            return np.ones(self.n, dtype=bool)
        return np.abs(self.k_values) <= self.cutoff

    @property
    def coarse_k(self) -> np.ndarray:
        return self.k_values[self.coarse_mask]

    @property
    def fine_k(self) -> np.ndarray:
        return self.k_values[~self.coarse_mask]

    @property
    def k_p(self) -> int:
        """Number of retained (coarse) modes."""
        return self.n if self.cutoff is None else 2 * self.cutoff + 1

    @property
    def k_q(self) -> int:
        """Number of eliminated (fine) modes."""
        return self.n - self.k_p

    def derivative_values(self) -> np.ndarray:
        """Diagonal of d/dx over the full ladder: ``2*pi*i*k``."""
        return 2j * np.pi * self.k_values


def _make_partition(n: int, cutoff: int) -> AxisPartition:
    if not isinstance(cutoff, (int, np.integer)):
        raise InvalidCutoffError(f"cutoff must be an integer, got {cutoff!r}")
    if cutoff < 0 or 2 * cutoff >= n:
        raise InvalidCutoffError(
            f"cutoff must satisfy 0 <= cutoff < n/2, got {cutoff} with n={n}"
        )
    return AxisPartition(n=n, cutoff=int(cutoff))


@dataclass(frozen=True)
class ProjectionBasis:
    """Per-axis coarse/fine partitions attached to a grid.

    For 2D grids the coarse subspace is the tensor product of the two
    coarse bands, so the fine complement collects every mode that is fine
    along at least one axis.
    """

    grid: GridSpec
    x: AxisPartition
    y: AxisPartition | None = None

    def __post_init__(self) -> None:
        if self.x.n != self.grid.n_x:
            raise DimensionMismatchError("x partition does not match grid")
        if self.grid.ndim == 2:
            if self.y is None or self.y.n != self.grid.n_y:
                raise DimensionMismatchError("y partition does not match grid")
        elif self.y is not None:
            raise DimensionMismatchError("1D grid cannot carry a y partition")

    @property
    def is_full(self) -> bool:
        full_x = self.x.cutoff is None
        if self.grid.ndim == 1:
            return full_x
        return full_x and self.y.cutoff is None

    @property
    def coarse_mask(self) -> np.ndarray:
        """Boolean mask over the full spectral array marking coarse modes."""
        if self.grid.ndim == 1:
            return self.x.coarse_mask
        return self.x.coarse_mask[:, None] & self.y.coarse_mask[None, :]

    @property
    def coarse_count(self) -> int:
        return self.x.k_p if self.grid.ndim == 1 else self.x.k_p * self.y.k_p

    @property
    def fine_count(self) -> int:
        return self.grid.size - self.coarse_count


def build_projection(grid: GridSpec, cutoff: int | tuple[int, int]) -> ProjectionBasis:
    """Build the coarse/fine basis for ``|k| <= cutoff`` on each axis.

    A single integer applies to every axis; a pair sets the x and y
    cutoffs separately.  Cutoffs at or above n/2 are rejected because the
    coarse band must never swallow the unpaired Nyquist mode.
    """
    if grid.ndim == 1:
        if isinstance(cutoff, tuple):
            raise InvalidCutoffError("1D grid takes a single cutoff")
        return ProjectionBasis(grid=grid, x=_make_partition(grid.n_x, cutoff))
    if isinstance(cutoff, tuple):
        cx, cy = cutoff
    else:
        cx = cy = cutoff
    return ProjectionBasis(
        grid=grid,
        x=_make_partition(grid.n_x, cx),
        y=_make_partition(grid.n_y, cy),
    )


def full_projection(grid: GridSpec) -> ProjectionBasis:
    """Basis in which every mode is coarse and the fine set is empty.

    This is the only way to make the eliminated subspace trivial: even the
    widest legal cutoff (n/2 - 1) leaves the Nyquist mode to eliminate,
    which is not the same operator as keeping everything.
    """
    if grid.ndim == 1:
        return ProjectionBasis(grid=grid, x=AxisPartition(grid.n_x, None))
    return ProjectionBasis(
        grid=grid,
        x=AxisPartition(grid.n_x, None),
        y=AxisPartition(grid.n_y, None),
    )


@dataclass(frozen=True)
class SpectralVector:
    """A field expressed in the signed spectral ordering of a basis.

    ``values`` has the full grid shape; the attached basis says which
    entries belong to the coarse band.  ``normalization`` records the
    transform convention the coefficients were produced with.
    """

    values: np.ndarray
    basis: ProjectionBasis
    normalization: str = NORMALIZATION

    @property
    def coarse_values(self) -> np.ndarray:
        return self.values[self.basis.coarse_mask]

    @property
    def fine_values(self) -> np.ndarray:
        return self.values[~self.basis.coarse_mask]

    def tags(self) -> np.ndarray:
        """Array of ``"coarse"``/``"fine"`` labels aligned with values."""
        return np.where(self.basis.coarse_mask, "coarse", "fine")


def forward(values: np.ndarray, basis: ProjectionBasis) -> SpectralVector:
    """Transform a grid field into spectral coordinates of ``basis``."""
    return SpectralVector(values=to_spectrum(basis.grid, values), basis=basis)


def inverse(vec: SpectralVector) -> np.ndarray:
    """Transform spectral coordinates back to the grid (complex output)."""
    return from_spectrum(vec.basis.grid, vec.values)


def _project_real(grid: GridSpec, coeffs: np.ndarray, keep: np.ndarray) -> np.ndarray:
    kept = np.where(keep, coeffs, 0.0)
    field = from_spectrum(grid, kept)
    # measure realness against the input's scale: a projection may send a
    # real field to (numerical) zero, and rounding dust in that zero is fine
    scale = np.max(np.abs(coeffs))
    imag = np.max(np.abs(field.imag))
    if scale > 0 and imag > 1e-12 * scale:
        # conjugate-symmetric masks keep real fields real; anything else
        # means the input was not a real field to begin with
        raise ValueError(
            f"projection of a real field produced imaginary residual {imag:.3e}"
        )
    return field.real


def coarse_project(values: np.ndarray, basis: ProjectionBasis) -> np.ndarray:
    """Zero all fine modes of a real field and return the real result."""
    values = _check_field(basis.grid, values)
    coeffs = to_spectrum(basis.grid, values)
    return _project_real(basis.grid, coeffs, basis.coarse_mask)


def fine_project(values: np.ndarray, basis: ProjectionBasis) -> np.ndarray:
    """Complement of :func:`coarse_project`."""
    values = _check_field(basis.grid, values)
    coeffs = to_spectrum(basis.grid, values)
    return _project_real(basis.grid, coeffs, ~basis.coarse_mask)


def derivative_spectrum(basis: ProjectionBasis, axis: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Coarse and fine diagonals of d/dx (or d/dy) along one axis.

    Returns ``(coarse, fine)`` with entries ``2*pi*i*k`` restricted to the
    respective band of that axis, in ascending-k order.
    """
    if axis == 0:
        part = basis.x
    elif axis == 1:
        if basis.grid.ndim != 2:
            raise DimensionMismatchError("axis=1 requires a 2D basis")
        part = basis.y
    else:
        raise DimensionMismatchError(f"axis must be 0 or 1, got {axis}")
    diag = part.derivative_values()
    return diag[part.coarse_mask], diag[~part.coarse_mask]


def spectral_derivative(grid: GridSpec, values: np.ndarray, axis: int = 0) -> np.ndarray:
    """Differentiate a real periodic field along one axis via its spectrum."""
    values = _check_field(grid, values)
    coeffs = to_spectrum(grid, values)
    k = signed_wavenumbers(grid.n_x if axis == 0 else grid.n_y)
    if grid.ndim == 1:
        coeffs = coeffs * (2j * np.pi * k)
    elif axis == 0:
        coeffs = coeffs * (2j * np.pi * k)[:, None]
    else:
        coeffs = coeffs * (2j * np.pi * k)[None, :]
    return from_spectrum(grid, coeffs).real


def dealias_mask(n: int) -> np.ndarray:
    """Two-thirds-rule retention mask over the signed ladder of one axis.

    Keeps modes with ``3 * |k| <= n`` and zeroes the rest, the classical
    remedy for quadratic aliasing; for grids the mask applies per axis.
    """
    return 3 * np.abs(signed_wavenumbers(n)) <= n
