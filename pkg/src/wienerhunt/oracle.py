"""Dense-matrix reference computations for small images.

Everything here works on explicit ``N x N`` matrices (``N = side**2``,
row-major pixel order) and is independent of the per-frequency shortcuts
used elsewhere. It is slow and meant for cross-checking on grids up to
16 x 16.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import SingularMatrix, TooLarge
from .model import PsfParams, gaussian_psf_transfer
from .priors import PrecisionState, log_det_precision, prior_image_logpdf
from .sampler import image_conditional_moments

MAX_SIDE = 16


def _check_side(side: int) -> None:
    if side > MAX_SIDE:
        raise TooLarge(f"dense oracle limited to side <= {MAX_SIDE}, got {side}")


def dft_matrix(side: int) -> np.ndarray:
    """Unitary 2-D DFT as a dense matrix acting on ``x.ravel()``."""
    _check_side(side)
    k = np.arange(side)
    f1 = np.exp(-2j * np.pi * np.outer(k, k) / side) / math.sqrt(side)
    return np.kron(f1, f1)


def dense_operator(kernel, side: int, anchor=None) -> np.ndarray:
    """BCCB matrix of circular convolution with ``kernel``.

    Column ``j`` is the response to a unit impulse at pixel ``j``.
    """
    _check_side(side)
    base = spectral.embed_kernel(kernel, side, anchor)
    n = side * side
    out = np.empty((n, n))
    for j in range(n):
        a, b = divmod(j, side)
        out[:, j] = np.roll(base, (a, b), axis=(0, 1)).ravel()
    return out


def dense_from_transfer(h: np.ndarray) -> np.ndarray:
    """Real matrix ``F^H diag(h) F`` for a Hermitian transfer ``h``."""
    side = h.shape[0]
    f = dft_matrix(side)
    return (f.conj().T @ (h.ravel()[:, None] * f)).real


def null_projector(side: int) -> np.ndarray:
    """``F^H diag(1, 0, ..., 0) F``: projection on the constant image."""
    f = dft_matrix(side)
    lam = np.zeros(side * side)
    lam[0] = 1.0
    return (f.conj().T @ (lam[:, None] * f)).real


def dense_image_conditional(y, H, D, state: PrecisionState) -> tuple[np.ndarray, np.ndarray]:
    """Spatial-domain Gaussian conditional of the image.

    Precision ``gamma_eps H^T H + gamma_0 P0 + gamma_1 D^T D`` with ``P0`` the
    null-frequency projector. Returns ``(mean, covariance)`` with the mean
    reshaped to an image.
    """
    y = np.asarray(y, dtype=float)
    side = y.shape[0]
    _check_side(side)
    q = state.gamma_eps * H.T @ H + state.gamma_0 * null_projector(side) + state.gamma_1 * D.T @ D
    try:
        chol = np.linalg.cholesky(q)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("posterior precision is not positive definite") from exc
    eye = np.eye(q.shape[0])
    lower_inv = np.linalg.solve(chol, eye)
    cov = lower_inv.T @ lower_inv
    mean = state.gamma_eps * cov @ (H.T @ y.ravel())
    return mean.reshape(side, side), cov


def dense_prior_logpdf(x, D, state: PrecisionState) -> float:
    """Gaussian log-density with precision ``gamma_0 P0 + gamma_1 D^T D``."""
    x = np.asarray(x, dtype=float)
    side = x.shape[0]
    _check_side(side)
    p = state.gamma_0 * null_projector(side) + state.gamma_1 * D.T @ D
    try:
        chol = np.linalg.cholesky(p)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("prior precision is not positive definite") from exc
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    v = x.ravel()
    return -0.5 * v.size * math.log(2 * math.pi) + 0.5 * log_det - 0.5 * float(v @ p @ v)


def dense_log_det(D, state: PrecisionState) -> float:
    side = math.isqrt(D.shape[0])
    p = state.gamma_0 * null_projector(side) + state.gamma_1 * D.T @ D
    sign, val = np.linalg.slogdet(p)
    if sign <= 0:
        raise SingularMatrix("prior precision is not positive definite")
    return float(val)


@dataclass
class CheckResult:
    name: str
    seed: int
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tol)


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def check_instance(seed: int, side: int = 8, corrupt: bool = False) -> list[CheckResult]:
    """Compare spectral computations with dense ones on one random instance.

    ``corrupt`` perturbs the spectral smoothness diagonal before comparing;
    used to make sure the checks can fail.
    """
    _check_side(side)
    rng = np.random.default_rng(seed)
    state = PrecisionState(*rng.uniform(0.2, 3.0, size=3))
    psf = PsfParams(rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0), rng.uniform(0, math.pi))
    h = gaussian_psf_transfer(psf, side)
    d = spectral.diagonalize_kernel(spectral.LAPLACIAN, side)
    d_spec = d.copy()
    if corrupt:
        d_spec[1, 0] *= 1.5
        d_spec[-1, 0] *= 1.5
    x = rng.standard_normal((side, side)) * 5
    y = rng.standard_normal((side, side)) * 5

    H = dense_from_transfer(h)
    D = dense_operator(spectral.LAPLACIAN, side)
    mean, cov = dense_image_conditional(y, H, D, state)
    mu, sigma2 = image_conditional_moments(spectral.dft2(y), h, state, d_spec)
    f = dft_matrix(side)
    cov_hat = f @ cov @ f.conj().T

    results = [
        CheckResult("conditional_mean", seed, _rel(mu, spectral.dft2(mean)), 1e-10),
        CheckResult("conditional_variance", seed, _rel(sigma2.ravel(), np.diag(cov_hat).real), 1e-10),
        CheckResult(
            "conditional_cov_diagonal",
            seed,
            float(np.max(np.abs(cov_hat - np.diag(np.diag(cov_hat)))) / np.max(np.abs(cov_hat))),
            1e-10,
        ),
        CheckResult(
            "prior_logpdf",
            seed,
            abs(prior_image_logpdf(x, state, d_spec) - dense_prior_logpdf(x, D, state))
            / abs(dense_prior_logpdf(x, D, state)),
            1e-8,
        ),
        CheckResult(
            "log_det",
            seed,
            abs(log_det_precision(state, d_spec) - dense_log_det(D, state)) / abs(dense_log_det(D, state)),
            1e-8,
        ),
        CheckResult(
            "operator_eigenvalues",
            seed,
            _rel(np.diag(f @ D @ f.conj().T), d_spec.ravel()),
            1e-10,
        ),
    ]
    return results


def run_oracle_checks(seed: int = 0, side: int = 8, n_seeds: int = 20, corrupt: bool = False) -> list[CheckResult]:
    _check_side(side)
    out = []
    for s in range(seed, seed + n_seeds):
        out.extend(check_instance(s, side, corrupt))
    return out
