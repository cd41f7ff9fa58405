"""Image prior, Gamma hyperpriors and the uniform PSF prior.

The image prior is a circulant Gaussian field whose Fourier precision is

    gamma_0 at the null frequency,  gamma_1 * |d_n|**2 elsewhere,

with ``d`` the eigenvalues of a differential stencil (``d_0 == 0``). The two
precisions act on disjoint frequency sets, so the log-determinant splits as
``log gamma_0 + (N - 1) log gamma_1 + sum_{n != 0} log |d_n|**2``.

Gamma laws are parametrized by shape ``alpha`` and *scale* ``beta``
(mean ``alpha * beta``). Improper limits are encoded by ``beta = inf``:
Jeffreys is ``(0, inf)``, the flat law on ``[0, inf)`` is ``(1, inf)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import DomainError, NonDifferentialOperator, SingularPrior
from .model import PsfBox, PsfParams

DIFFERENTIAL_ATOL = 1e-12


class PriorMode(enum.Enum):
    """How the null-frequency precision ``gamma_0`` is handled.

    ``FULL`` samples it from its conditional law. ``MARGINALIZED`` integrates
    it out, which amounts to holding it at 0; this is only proper when the
    instrument transmits the null frequency.
    """

    FULL = "full"
    MARGINALIZED = "marginalized"


@dataclass(frozen=True)
class HyperParams:
    """Shape/scale pairs of the three precision hyperpriors."""

    alpha_eps: float = 0.0
    beta_eps: float = math.inf
    alpha_0: float = 0.0
    beta_0: float = math.inf
    alpha_1: float = 0.0
    beta_1: float = math.inf

    def __post_init__(self):
        for a, b in self.pairs().values():
            if not (a >= 0 and b >= 0) or math.isnan(a) or math.isnan(b) or math.isinf(a):
                raise DomainError(f"invalid Gamma hyperparameters ({a}, {b})")

    def pairs(self) -> dict[str, tuple[float, float]]:
        return {
            "eps": (self.alpha_eps, self.beta_eps),
            "0": (self.alpha_0, self.beta_0),
            "1": (self.alpha_1, self.beta_1),
        }

    @classmethod
    def jeffreys(cls) -> "HyperParams":
        return cls()

    @classmethod
    def uniform(cls) -> "HyperParams":
        inf = math.inf
        return cls(1.0, inf, 1.0, inf, 1.0, inf)


@dataclass(frozen=True)
class PrecisionState:
    gamma_eps: float
    gamma_0: float
    gamma_1: float


def check_differential(d: np.ndarray, atol: float = DIFFERENTIAL_ATOL) -> None:
    if abs(d[0, 0]) > atol:
        raise NonDifferentialOperator(f"null-frequency gain is {d[0, 0]!r}, expected 0")


def laplacian_diagonal(side: int) -> np.ndarray:
    return spectral.diagonalize_kernel(spectral.LAPLACIAN, side)


def precision_diagonal(state: PrecisionState, d: np.ndarray) -> np.ndarray:
    """Fourier precision of the image prior, real and nonnegative."""
    check_differential(d)
    lam = state.gamma_1 * np.abs(d) ** 2
    lam[0, 0] = state.gamma_0
    return lam


def energy_precision_diagonal(state: PrecisionState, d: np.ndarray) -> np.ndarray:
    """Alternative ``gamma_0 + gamma_1 |d|^2`` precision (energy penalty on every frequency).

    Its determinant does not factor into a gamma_0 part and a gamma_1 part;
    kept for comparison.
    """
    return state.gamma_0 + state.gamma_1 * np.abs(d) ** 2


def log_det_precision(state: PrecisionState, d: np.ndarray) -> float:
    """Separable log-determinant of :func:`precision_diagonal`."""
    check_differential(d)
    if state.gamma_0 <= 0 or state.gamma_1 <= 0:
        raise SingularPrior("precisions must be positive")
    d2 = np.abs(d) ** 2
    d2_star = np.delete(d2.ravel(), 0)
    if np.any(d2_star == 0):
        raise SingularPrior("differential operator has a non-null zero frequency")
    n = d.size
    return math.log(state.gamma_0) + (n - 1) * math.log(state.gamma_1) + float(np.sum(np.log(d2_star)))


def gamma_logpdf(g: float, alpha: float, beta: float) -> float:
    """Log-density of the Gamma law with shape ``alpha`` and scale ``beta``."""
    if not (alpha > 0 and 0 < beta < math.inf):
        raise DomainError(f"invalid Gamma parameters ({alpha}, {beta})")
    if not g > 0:
        raise DomainError("Gamma density is defined for g > 0")
    return -alpha * math.log(beta) - math.lgamma(alpha) + (alpha - 1) * math.log(g) - g / beta


def gamma_sample(alpha: float, beta: float, rng: np.random.Generator) -> float:
    if not (alpha > 0 and 0 < beta < math.inf):
        raise DomainError(f"invalid Gamma parameters ({alpha}, {beta})")
    return float(rng.gamma(alpha, beta))


def gamma_marginal_logpdf(x, precision, alpha: float, beta: float) -> float:
    """Log-density of a zero-mean Gaussian with precision ``gamma * precision``
    after integrating ``gamma ~ Gamma(alpha, beta)``.

    The result is a multivariate Student law with ``2 alpha`` degrees of
    freedom. ``precision`` is a matrix (or a scalar for 1-D ``x``).
    """
    if not (alpha > 0 and 0 < beta < math.inf):
        raise DomainError(f"invalid Gamma parameters ({alpha}, {beta})")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    gam = np.atleast_2d(np.asarray(precision, dtype=float))
    n = x.size
    sign, logdet = np.linalg.slogdet(gam)
    if sign <= 0:
        raise DomainError("precision matrix must be positive definite")
    q = float(x @ gam @ x)
    return (
        0.5 * n * math.log(beta)
        + 0.5 * logdet
        + math.lgamma(alpha + 0.5 * n)
        - 0.5 * n * math.log(2 * math.pi)
        - math.lgamma(alpha)
        - (alpha + 0.5 * n) * math.log1p(0.5 * beta * q)
    )


def psf_prior_sample(box: PsfBox, rng: np.random.Generator) -> PsfParams:
    lo, hi = box.low, box.high
    return PsfParams.from_array(lo + rng.random(3) * (hi - lo))


def psf_prior_logpdf(params: PsfParams, box: PsfBox) -> float:
    if not box.contains(params):
        return -math.inf
    return -float(np.sum(np.log(box.high - box.low)))


def sample_prior_image(state: PrecisionState, d: np.ndarray, side: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a smooth Gaussian field: white spectral noise scaled by the prior std."""
    if d.shape != (side, side):
        raise ValueError(f"operator diagonal has shape {d.shape}, expected {(side, side)}")
    lam = precision_diagonal(state, d)
    if np.any(lam <= 0):
        raise SingularPrior("prior precision has zero entries; cannot sample")
    return spectral.idft2(spectral.sample_white_spectral(side, rng) / np.sqrt(lam))


def prior_image_logpdf(x, state: PrecisionState, d: np.ndarray) -> float:
    """Log-density of the image prior, normalizing constant included."""
    xhat = spectral.dft2(x)
    if xhat.shape != d.shape:
        raise ValueError("image and operator shapes differ")
    n = xhat.size
    log_det = log_det_precision(state, d)
    penalty = state.gamma_0 * abs(xhat[0, 0]) ** 2 + state.gamma_1 * float(np.sum(np.abs(d * xhat) ** 2))
    return -0.5 * n * math.log(2 * math.pi) + 0.5 * log_det - 0.5 * penalty
