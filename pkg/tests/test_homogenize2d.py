"""2D tensor elimination against a loop-built dense oracle.

The oracle assembles every operator block entry by entry from the mode
lists, inverts with plain np.linalg.inv, and evaluates the grid fields
point by point. Production may choose chunked or separable routes; both
have to land on the oracle's numbers.
"""

import numpy as np
import pytest

from spechom import (
    BlockSizeLimitError,
    CoefficientField,
    DimensionMismatchError,
    GridSpec,
    IllConditionedError,
    build_projection,
    decompose_blocks,
    full_projection,
    gen_periodic,
    homogenize_2d,
    isotropic_tensor,
    raw_filter_2d,
    reassemble_blocks,
    subspace_modes,
    to_spectrum,
    from_spectrum,
)


def _conv_entry(spectrum, kxi, kyi, kxj, kyj):
    nx, ny = spectrum.shape
    px = (kxi - kxj + nx // 2 - 1) % nx
    py = (kyi - kyj + ny // 2 - 1) % ny
    return spectrum[px, py]


def _mode_matrix(spectrum, rows, cols):
    """Multiplication operator between two (kx, ky) mode lists."""
    nx, ny = spectrum.shape
    out = np.zeros((len(rows), len(cols)), dtype=complex)
    for i, (kxi, kyi) in enumerate(rows):
        for j, (kxj, kyj) in enumerate(cols):
            out[i, j] = _conv_entry(spectrum, kxi, kyi, kxj, kyj)
    return out / np.sqrt(nx * ny)


def _dense_tensor_oracle(coeff, cutoffs):
    """Effective tensor fields from first principles."""
    grid = coeff.grid
    nx, ny = grid.n_x, grid.n_y
    spectrum = to_spectrum(grid, coeff.values)
    basis = build_projection(grid, cutoffs)
    pp, qp, pq, qq = subspace_modes(basis)
    coarse = list(zip(pp.kx.tolist(), pp.ky.tolist()))
    fine = []
    for ms in (qp, pq, qq):
        fine.extend(zip(ms.kx.tolist(), ms.ky.tolist()))

    d_block = _mode_matrix(spectrum, coarse, coarse)
    c_block = _mode_matrix(spectrum, coarse, fine)
    b_block = _mode_matrix(spectrum, fine, coarse)
    a_ff = _mode_matrix(spectrum, fine, fine)

    kx_f = 2j * np.pi * np.array([k for k, _ in fine], dtype=float)
    ky_f = 2j * np.pi * np.array([k for _, k in fine], dtype=float)
    m_block = (
        np.diag(kx_f) @ a_ff @ np.diag(kx_f) + np.diag(ky_f) @ a_ff @ np.diag(ky_f)
    )
    m_inv = np.linalg.inv(m_block)

    diags = {"x": kx_f, "y": ky_f}
    scale = grid.size / pp.dim
    fields = {}
    for alpha in ("x", "y"):
        for beta in ("x", "y"):
            core = (c_block * diags[alpha][None, :]) @ m_inv @ (
                diags[beta][:, None] * b_block
            )
            kern = (d_block if alpha == beta else 0.0) - core
            field = np.zeros((nx, ny))
            for x in range(nx):
                for y in range(ny):
                    synth = np.exp(
                        -2j
                        * np.pi
                        * (pp.kx * x / nx + pp.ky * y / ny)
                    ) / np.sqrt(grid.size)
                    field[x, y] = (synth.conj() @ kern @ synth).real * scale
            fields[alpha + beta] = field
    return fields


def _random_coeff(n, seed):
    rng = np.random.default_rng(seed)
    return CoefficientField(GridSpec(n, n), 1.0 + rng.random((n, n)))


@pytest.mark.parametrize("n,cutoffs", [(8, (1, 1)), (8, (2, 1)), (16, (2, 2))])
def test_tensor_matches_dense_oracle(n, cutoffs):
    coeff = _random_coeff(n, 700 + n)
    oracle = _dense_tensor_oracle(coeff, cutoffs)
    tensor = homogenize_2d(coeff, build_projection(coeff.grid, cutoffs))
    assert np.max(np.abs(tensor.xx - oracle["xx"])) < 1e-10
    assert np.max(np.abs(tensor.yy - oracle["yy"])) < 1e-10
    assert np.max(np.abs(tensor.xy - oracle["xy"])) < 1e-10
    assert np.max(np.abs(tensor.yx - oracle["yx"])) < 1e-10


def test_separable_route_agrees_with_dense_and_oracle():
    """A y-invariant coefficient takes the factored route; forcing the
    dense route must not change a digit that matters."""
    grid = GridSpec(16, 16)
    profile = 1.0 + np.linspace(0.0, 1.0, 16) ** 2
    coeff = CoefficientField(grid, np.tile(profile[:, None], (1, 16)))
    basis = build_projection(grid, (3, 3))
    auto = homogenize_2d(coeff, basis)
    dense = homogenize_2d(coeff, basis, force_dense=True)
    assert auto.diagnostics["path"] == "separable"
    assert dense.diagnostics["path"] == "dense"
    for name in ("xx", "xy", "yx", "yy"):
        assert np.max(np.abs(getattr(auto, name) - getattr(dense, name))) < 1e-12
    oracle = _dense_tensor_oracle(coeff, (3, 3))
    assert np.max(np.abs(auto.xx - oracle["xx"])) < 1e-10
    assert np.max(np.abs(auto.yy - oracle["yy"])) < 1e-10


def test_mean_mode_retention_splits_harmonic_and_arithmetic():
    """Keeping only the mean mode of a y-invariant (1, 4) stripe pattern
    gives the harmonic mean across the stripes and the arithmetic mean
    along them, with no cross coupling."""
    grid = GridSpec(32, 32)
    coeff = gen_periodic(grid, 1.0, 4.0, 8)
    tensor = homogenize_2d(coeff, build_projection(grid, 0))
    assert np.allclose(tensor.xx, 1.6, atol=1e-10)
    assert np.allclose(tensor.yy, 2.5, atol=1e-10)
    assert np.max(np.abs(tensor.xy)) < 1e-10
    assert np.max(np.abs(tensor.yx)) < 1e-10


def test_constant_coefficient_is_a_fixed_point_2d():
    grid = GridSpec(16, 16)
    coeff = CoefficientField(grid, np.full((16, 16), 2.25))
    for cutoffs in ((0, 0), (2, 1), (3, 3)):
        tensor = homogenize_2d(coeff, build_projection(grid, cutoffs))
        assert np.max(np.abs(tensor.xx - 2.25)) < 1e-10
        assert np.max(np.abs(tensor.yy - 2.25)) < 1e-10
        assert np.max(np.abs(tensor.xy)) < 1e-10
        assert np.max(np.abs(tensor.yx)) < 1e-10


def test_full_retention_keeps_the_pointwise_tensor():
    coeff = _random_coeff(8, 800)
    tensor = homogenize_2d(coeff, full_projection(coeff.grid))
    assert np.allclose(tensor.xx, coeff.values, atol=1e-13)
    assert np.allclose(tensor.yy, coeff.values, atol=1e-13)
    assert np.max(np.abs(tensor.xy)) == 0.0
    assert np.max(np.abs(tensor.yx)) == 0.0


def test_off_diagonal_components_are_equal():
    coeff = _random_coeff(12, 900)
    tensor = homogenize_2d(coeff, build_projection(coeff.grid, (2, 2)))
    assert tensor.symmetry_residual < 1e-12
    assert np.allclose(tensor.xy, tensor.yx, atol=1e-12)


def test_subspace_mode_bookkeeping():
    basis = build_projection(GridSpec(8, 8), (1, 2))
    pp, qp, pq, qq = subspace_modes(basis)
    assert (pp.dim, qp.dim, pq.dim, qq.dim) == (15, 25, 9, 15)
    assert pp.dim + qp.dim + pq.dim + qq.dim == 64
    seen = set()
    for ms in (pp, qp, pq, qq):
        seen.update(zip(ms.kx.tolist(), ms.ky.tolist()))
    assert len(seen) == 64
    # PP runs x-outermost, matching row-major grid layout
    assert pp.kx.tolist()[:5] == [-1, -1, -1, -1, -1]


def test_block_decomposition_reassembles_to_the_oracle():
    coeff = _random_coeff(8, 1000)
    basis = build_projection(coeff.grid, (1, 1))
    decomp = decompose_blocks(coeff, basis)
    full, modes = reassemble_blocks(decomp)
    spectrum = to_spectrum(coeff.grid, coeff.values)
    pairs = list(zip(modes.kx.tolist(), modes.ky.tolist()))
    oracle = _mode_matrix(spectrum, pairs, pairs)
    assert np.max(np.abs(full - oracle)) < 1e-12
    assert decomp.block("PP", "QQ").shape == (9, 25)


def test_block_cap_refuses_oversized_requests():
    coeff = _random_coeff(16, 1100)
    with pytest.raises(BlockSizeLimitError):
        decompose_blocks(coeff, build_projection(coeff.grid, (1, 1)), block_cap=10)
    with pytest.raises(BlockSizeLimitError):
        homogenize_2d(
            coeff, build_projection(coeff.grid, (1, 1)), block_cap=10
        )


def test_raw_filter_2d_matches_band_truncation():
    coeff = _random_coeff(16, 1200)
    basis = build_projection(coeff.grid, (3, 2))
    tensor = raw_filter_2d(coeff, basis)
    spectrum = to_spectrum(coeff.grid, coeff.values)
    spectrum[~basis.coarse_mask] = 0.0
    truncated = from_spectrum(coeff.grid, spectrum).real
    assert np.allclose(tensor.xx, truncated, atol=1e-13)
    assert np.allclose(tensor.yy, truncated, atol=1e-13)
    assert np.max(np.abs(tensor.xy)) == 0.0


def test_isotropic_tensor_wraps_a_scalar_field():
    coeff = _random_coeff(8, 1300)
    tensor = isotropic_tensor(coeff)
    assert np.array_equal(tensor.xx, coeff.values)
    assert np.array_equal(tensor.yy, coeff.values)
    assert np.max(np.abs(tensor.xy)) == 0.0
    assert np.min(tensor.determinant()) > 0.0


def test_dimension_guards():
    coeff1d = CoefficientField(GridSpec(16), np.ones(16))
    with pytest.raises(DimensionMismatchError):
        homogenize_2d(coeff1d, build_projection(GridSpec(16), 2))
    with pytest.raises(DimensionMismatchError):
        isotropic_tensor(coeff1d)


def test_extreme_contrast_is_rejected_2d():
    grid = GridSpec(8, 8)
    values = np.full((8, 8), 10.0)
    values[2, 2] = 1e-14
    coeff = CoefficientField(grid, values)
    with pytest.raises(IllConditionedError):
        homogenize_2d(coeff, build_projection(grid, (1, 1)))
