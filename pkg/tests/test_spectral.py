"""Transform conventions, band projections, and operator identities.

The slow-loop DFT oracle at the top is the reference for every transform
test; nothing below it is allowed to call np.fft directly.
"""

import numpy as np
import pytest

from spechom import (
    DimensionMismatchError,
    GridSpec,
    InvalidCutoffError,
    ProjectionBasis,
    build_projection,
    coarse_project,
    dealias_mask,
    derivative_spectrum,
    fine_project,
    forward,
    from_spectrum,
    full_projection,
    inverse,
    signed_wavenumbers,
    spectral_derivative,
    to_spectrum,
)


def _dft_oracle_1d(values):
    """Literal unitary DFT on the signed ladder, one mode at a time."""
    n = values.shape[0]
    ks = signed_wavenumbers(n)
    out = np.zeros(n, dtype=complex)
    for m, k in enumerate(ks):
        for x in range(n):
            out[m] += values[x] * np.exp(-2j * np.pi * k * x / n)
    return out / np.sqrt(n)


def _dft_oracle_2d(values):
    nx, ny = values.shape
    kxs = signed_wavenumbers(nx)
    kys = signed_wavenumbers(ny)
    out = np.zeros((nx, ny), dtype=complex)
    for mx, kx in enumerate(kxs):
        for my, ky in enumerate(kys):
            for x in range(nx):
                for y in range(ny):
                    out[mx, my] += values[x, y] * np.exp(
                        -2j * np.pi * (kx * x / nx + ky * y / ny)
                    )
    return out / np.sqrt(nx * ny)


def test_signed_wavenumbers_small_cases():
    assert signed_wavenumbers(4).tolist() == [-1, 0, 1, 2]
    assert signed_wavenumbers(8).tolist() == [-3, -2, -1, 0, 1, 2, 3, 4]


def test_to_spectrum_matches_slow_dft_1d():
    rng = np.random.default_rng(11)
    grid = GridSpec(8)
    values = rng.standard_normal(8)
    assert np.allclose(to_spectrum(grid, values), _dft_oracle_1d(values), atol=1e-12)


def test_to_spectrum_matches_slow_dft_2d():
    rng = np.random.default_rng(12)
    grid = GridSpec(6, 4)
    values = rng.standard_normal((6, 4))
    assert np.allclose(to_spectrum(grid, values), _dft_oracle_2d(values), atol=1e-12)


def test_round_trip_is_identity():
    rng = np.random.default_rng(13)
    for grid in (GridSpec(16), GridSpec(8, 12)):
        values = rng.standard_normal(grid.shape)
        back = from_spectrum(grid, to_spectrum(grid, values))
        assert np.max(np.abs(back.imag)) < 1e-13
        assert np.allclose(back.real, values, atol=1e-13)


def test_transform_preserves_energy():
    """The unitary scaling keeps the l2 norm on both sides."""
    rng = np.random.default_rng(14)
    grid = GridSpec(32)
    values = rng.standard_normal(32)
    assert np.isclose(
        np.linalg.norm(to_spectrum(grid, values)), np.linalg.norm(values)
    )


def test_grid_validation():
    with pytest.raises(DimensionMismatchError):
        GridSpec(7)
    with pytest.raises(DimensionMismatchError):
        GridSpec(2)
    with pytest.raises(DimensionMismatchError):
        GridSpec(8, 6).__class__(8, 5)
    # n_y == 1 is the 1D marker, not a 2D extent
    assert GridSpec(8).ndim == 1
    assert GridSpec(8, 4).ndim == 2


def test_band_membership_small_example():
    grid = GridSpec(8)
    basis = build_projection(grid, 1)
    part = basis.x
    assert part.coarse_k.tolist() == [-1, 0, 1]
    assert part.fine_k.tolist() == [-3, -2, 2, 3, 4]
    assert part.k_p == 3 and part.k_q == 5

    wide = build_projection(grid, 3)
    assert wide.x.coarse_k.tolist() == [-3, -2, -1, 0, 1, 2, 3]
    # the band never contains the lone +n/2 mode
    assert wide.x.fine_k.tolist() == [4]


def test_cutoff_bounds():
    grid = GridSpec(8)
    with pytest.raises(InvalidCutoffError):
        build_projection(grid, -1)
    with pytest.raises(InvalidCutoffError):
        build_projection(grid, 4)
    with pytest.raises(InvalidCutoffError):
        build_projection(grid, 1.5)
    # widest legal band still leaves one fine mode
    basis = build_projection(grid, 3)
    assert not basis.is_full
    assert basis.fine_count == 1


def test_full_projection_keeps_everything():
    grid = GridSpec(12, 8)
    basis = full_projection(grid)
    assert basis.is_full
    assert basis.coarse_count == grid.size
    assert basis.fine_count == 0
    rng = np.random.default_rng(15)
    values = rng.standard_normal(grid.shape)
    assert np.allclose(coarse_project(values, basis), values, atol=1e-13)
    assert np.allclose(fine_project(values, basis), 0.0, atol=1e-13)


@pytest.mark.parametrize("n", [32, 64, 128])
def test_projector_identities_1d(n):
    """Idempotence, complementarity, and annihilation on random vectors."""
    rng = np.random.default_rng(n)
    grid = GridSpec(n)
    basis = build_projection(grid, n // 8)
    for _ in range(10):
        v = rng.standard_normal(n)
        p = coarse_project(v, basis)
        q = fine_project(v, basis)
        assert np.allclose(p + q, v, atol=1e-12)
        assert np.allclose(coarse_project(p, basis), p, atol=1e-12)
        assert np.allclose(fine_project(q, basis), q, atol=1e-12)
        assert np.max(np.abs(coarse_project(q, basis))) < 1e-12
        assert np.max(np.abs(fine_project(p, basis))) < 1e-12


def test_projector_identities_2d_and_axis_commutation():
    """A 2D band projection equals the two axis filters in either order."""
    rng = np.random.default_rng(21)
    grid = GridSpec(16, 16)
    basis = build_projection(grid, (3, 2))
    x_only = build_projection(grid, (3, 7))
    y_only = build_projection(grid, (7, 2))
    for _ in range(10):
        v = rng.standard_normal((16, 16))
        both = coarse_project(v, basis)
        xy = coarse_project(coarse_project(v, x_only), y_only)
        yx = coarse_project(coarse_project(v, y_only), x_only)
        assert np.allclose(both, xy, atol=1e-12)
        assert np.allclose(both, yx, atol=1e-12)
        assert np.allclose(both + fine_project(v, basis), v, atol=1e-12)


def test_projection_keeps_low_modes_and_kills_high_modes():
    grid = GridSpec(64)
    x = grid.nodes_x()
    basis = build_projection(grid, 4)
    keep = np.cos(2 * np.pi * 3 * x)
    kill = np.sin(2 * np.pi * 9 * x)
    assert np.allclose(coarse_project(keep, basis), keep, atol=1e-12)
    assert np.max(np.abs(coarse_project(kill, basis))) < 1e-12


def test_spectral_vector_round_trip():
    rng = np.random.default_rng(22)
    grid = GridSpec(8, 8)
    basis = build_projection(grid, (2, 2))
    values = rng.standard_normal((8, 8))
    vec = forward(values, basis)
    assert vec.values.shape == (8, 8)
    assert np.allclose(inverse(vec), values, atol=1e-12)


def test_derivative_diagonal_values():
    grid = GridSpec(16)
    basis = build_projection(grid, 3)
    coarse, fine = derivative_spectrum(basis, axis=0)
    assert np.allclose(coarse, 2j * np.pi * basis.x.coarse_k)
    assert np.allclose(fine, 2j * np.pi * basis.x.fine_k)
    with pytest.raises(DimensionMismatchError):
        derivative_spectrum(basis, axis=1)


def test_spectral_derivative_of_trig():
    grid = GridSpec(64)
    x = grid.nodes_x()
    d = spectral_derivative(grid, np.sin(2 * np.pi * x))
    assert np.allclose(d, 2 * np.pi * np.cos(2 * np.pi * x), atol=1e-10)

    grid2 = GridSpec(32, 32)
    xx, yy = np.meshgrid(grid2.nodes_x(), grid2.nodes_y(), indexing="ij")
    f = np.cos(2 * np.pi * xx) * np.sin(2 * np.pi * 2 * yy)
    dy = spectral_derivative(grid2, f, axis=1)
    expected = 4 * np.pi * np.cos(2 * np.pi * xx) * np.cos(2 * np.pi * 2 * yy)
    assert np.allclose(dy, expected, atol=1e-9)


def test_dealias_mask_small_example():
    # 3|k| <= n with n = 8 keeps |k| <= 2 on the ladder -3 .. 4
    assert dealias_mask(8).tolist() == [
        False, True, True, True, True, True, False, False,
    ]


def test_basis_rejects_mismatched_parts():
    grid = GridSpec(8)
    part = build_projection(grid, 2).x
    with pytest.raises(DimensionMismatchError):
        ProjectionBasis(GridSpec(16), part)
    with pytest.raises(InvalidCutoffError):
        build_projection(grid, (2, 2))
