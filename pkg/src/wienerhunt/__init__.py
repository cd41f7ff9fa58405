"""Unsupervised, myopic Wiener-Hunt deconvolution by Gibbs sampling.

Jointly estimates a deconvolved image, the noise and smoothness precisions
and the parameters of a Gaussian PSF. All heavy computation happens in the
Fourier domain, where the circulant models are diagonal.
"""

from .analysis import (
    PosteriorSummary,
    RadialSpectrum,
    SweepResult,
    chain_summary,
    error_index,
    parameter_sweep,
    radial_spectrum,
    wiener_hunt,
)
from .errors import (
    DegenerateUpdate,
    DomainError,
    EmptyChain,
    NonConvergence,
    NonDifferentialOperator,
    ShapeMismatch,
    SingularCovariance,
    SingularMatrix,
    SingularPrior,
    StencilTooLarge,
    SymmetryViolation,
    TooLarge,
    ZeroReference,
)
from .model import PsfBox, PsfParams, apply_forward, gaussian_psf_transfer, simulate_data
from .priors import (
    HyperParams,
    PrecisionState,
    PriorMode,
    gamma_logpdf,
    gamma_sample,
    precision_diagonal,
    prior_image_logpdf,
    psf_prior_sample,
    sample_prior_image,
)
from .sampler import (
    ChainRecord,
    GibbsResult,
    SamplerConfig,
    convergence_metric,
    image_conditional_moments,
    mh_psf_step,
    precision_updates,
    run_gibbs,
    sample_image,
)
from .spectral import LAPLACIAN, dft2, diagonalize_kernel, idft2, sample_white_spectral

__version__ = "0.1.0"
