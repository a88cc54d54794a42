"""Effective coarse-scale diffusion coefficients from spectral projection.

The package splits periodic fields into coarse and fine Fourier bands,
eliminates the fine band of the diffusion operator exactly through its
Schur complement, and reads off pointwise effective coefficients that can
be handed to ordinary coarse solvers.  Reference solvers and sweep
drivers quantify how the effective models compare with naive low-pass
filtering.
"""

from .coefficients import (
    CoefficientField,
    gen_filtered_random,
    gen_periodic,
    gen_sparse_annulus,
)
from .errors import (
    BlockSizeLimitError,
    ConfigError,
    DegenerateCoefficientError,
    DimensionMismatchError,
    IllConditionedError,
    InvalidCutoffError,
    SpechomError,
    UndefinedRatioError,
)
from .experiments import (
    ExperimentConfig,
    KernelRecord,
    SweepRecord,
    build_coefficient,
    config_from_mapping,
    load_config,
    parse_config_text,
    percent_to_cutoff,
    run_kernel_sweep,
    run_panels_2d,
    run_sweep_1d,
    run_sweep_2d,
)
from .homogenize1d import (
    HomogenizedCoefficient1D,
    HomogenizedKernel,
    extract_diagonal,
    homogenize_kernel_1d,
    offdiag_mass,
    raw_filter_1d,
)
from .homogenize2d import (
    BlockDecomposition,
    TensorCoefficient2D,
    decompose_blocks,
    homogenize_2d,
    isotropic_tensor,
    raw_filter_2d,
    reassemble_blocks,
    subspace_modes,
)
from .solvers import (
    BoundaryConditions2D,
    SolveResult,
    coarse_compare,
    exact_diffusion_1d,
    solve_diffusion_2d_fd,
)
from .spectral import (
    AxisPartition,
    GridSpec,
    ProjectionBasis,
    SpectralVector,
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

__version__ = "0.1.0"
