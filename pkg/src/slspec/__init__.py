"""Spectra, norming constants and two-spectra recovery for Sturm-Liouville
operators whose potential is the derivative of a square-integrable profile."""

from .core import (
    INF,
    BoundaryData,
    InvalidBoundary,
    InvalidPotential,
    PiecewiseSigma,
    SlspecError,
    SpectralData,
    Spectrum,
    gauge_transform,
    project_sigma,
    regime_for_bc,
)
from .forward import (
    NearPoleError,
    QuadratureError,
    SpectrumSearchError,
    TailModel,
    char_value,
    compute_spectrum,
    norming_constants,
    resolvent_trace_ratio,
)
from .ode import (
    LEFT_TO_RIGHT,
    RIGHT_TO_LEFT,
    AmbiguousCount,
    StateVector,
    TransferMatrix,
    cell_transfer,
    count_below,
    propagate,
    prufer_theta,
    sample_solution,
)
from .products import (
    MultipleZeroError,
    ZeroSequence,
    product_derivative_at_zero,
    product_eval,
)
from .reconstruct import (
    ReconstructionResult,
    StagnationError,
    reconstruct_sigma,
    reconstruction_problem,
    roundtrip_report,
)
from .reduction import (
    AsymptoticsViolation,
    MalformedInput,
    NoFiniteGap,
    PositivityViolation,
    RegimePair,
    ValidationReport,
    estimate_h_gap,
    norming_from_two_spectra,
    validate_pair,
)
from .riesz import (
    FrequencySystem,
    NotRieszLike,
    expand_in_basis,
    fourier_diff,
    gram_matrix,
)

__version__ = "0.1.0"
