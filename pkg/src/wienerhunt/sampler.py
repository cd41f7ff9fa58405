"""Gibbs sampler for the image, the precisions and the PSF parameters.

One iteration, in this order:

1. image: Gaussian draw in the Fourier domain, independent per frequency;
2. precisions: conjugate Gamma draws for ``gamma_eps``, ``gamma_1`` and,
   in :attr:`PriorMode.FULL` only, ``gamma_0``;
3. PSF parameters (myopic mode only): independent Metropolis-Hastings with
   the uniform prior as proposal.

The estimate is the running mean of the image draws, kept in the Fourier
domain and transformed back once at the end.

Random numbers come from a single ``numpy.random.Generator`` seeded with
``SamplerConfig.seed`` and are consumed per iteration as: ``side**2``
standard normals (image), one Gamma for ``gamma_eps``, one for ``gamma_1``,
one for ``gamma_0`` (full mode), then for each M-H proposal the proposed
value(s) followed by one uniform for the accept test.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import spectral
from .errors import DegenerateUpdate, NonConvergence, SingularCovariance
from .model import PARAM_NAMES, GaussianTransfer, PsfBox, PsfParams
from .priors import HyperParams, PrecisionState, PriorMode, check_differential

PROPOSALS = ("componentwise", "joint")
NORMS = ("l1", "l2")


def _abs2(a: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(a):
        return a.real * a.real + a.imag * a.imag
    return a * a


def _sqnorm(a: np.ndarray) -> float:
    return float(np.sum(_abs2(a)))


@dataclass
class SamplerConfig:
    """Settings of one Gibbs run.

    Leave ``psf_known`` unset for myopic estimation (``psf_box`` then
    required); set it to hold the PSF fixed and skip the M-H step.

    ``proposal`` selects how the PSF vector is proposed: ``"componentwise"``
    runs one independent M-H test per parameter, ``"joint"`` proposes the
    whole vector at once. ``convergence_norm`` is the norm used by the
    stopping rule on the spectral running mean.

    ``transfer`` overrides the Gaussian PSF: a callable ``(params, side)``
    returning the transfer diagonal.
    """

    prior_mode: PriorMode = PriorMode.MARGINALIZED
    hyper: HyperParams = field(default_factory=HyperParams.jeffreys)
    psf_box: PsfBox | None = None
    psf_known: PsfParams | None = None
    convergence_tol: float = 5e-5
    max_iters: int = 100_000
    burn_in: int = 0
    seed: int = 0
    proposal: str = "componentwise"
    convergence_norm: str = "l1"
    init: PrecisionState = PrecisionState(1.0, 1.0, 1.0)
    transfer: Callable[[PsfParams, int], np.ndarray] | None = None

    def __post_init__(self):
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if self.max_iters < 1 or self.burn_in < 0:
            raise ValueError("max_iters must be >= 1 and burn_in >= 0")
        if self.burn_in >= self.max_iters:
            raise ValueError("burn_in must be smaller than max_iters")
        if self.psf_known is None and self.psf_box is None:
            raise ValueError("myopic mode needs psf_box; otherwise set psf_known")
        if self.proposal not in PROPOSALS:
            raise ValueError(f"proposal must be one of {PROPOSALS}")
        if self.convergence_norm not in NORMS:
            raise ValueError(f"convergence_norm must be one of {NORMS}")
        if self.init.gamma_eps <= 0 or self.init.gamma_1 <= 0:
            raise ValueError("initial gamma_eps and gamma_1 must be positive")
        self.prior_mode = PriorMode(self.prior_mode)

    @property
    def myopic(self) -> bool:
        return self.psf_known is None


@dataclass
class ChainRecord:
    """Per-iteration draws and bookkeeping of a Gibbs run.

    ``w`` and ``accepted`` are ``None`` when the PSF was known. ``accepted``
    has one column per PSF parameter; with joint proposals all three columns
    are equal.
    """

    gamma_eps: np.ndarray
    gamma_0: np.ndarray
    gamma_1: np.ndarray
    w: np.ndarray | None
    accepted: np.ndarray | None
    convergence: np.ndarray
    mean_spectrum: np.ndarray
    n_iter: int
    converged: bool
    burn_in: int = 0
    proposal: str = "componentwise"
    wall_time: float = 0.0

    def __len__(self) -> int:
        return self.n_iter

    def acceptance_rates(self) -> np.ndarray | None:
        """Fraction of accepted proposals for each PSF parameter."""
        if self.accepted is None:
            return None
        return self.accepted.mean(axis=0)

    def overall_acceptance(self) -> float | None:
        """Accepted proposals over all proposals made."""
        if self.accepted is None:
            return None
        if self.proposal == "joint":
            return float(self.accepted[:, 0].mean())
        return float(self.accepted.mean())

    def columns(self) -> dict[str, np.ndarray]:
        cols = {
            "gamma_eps": self.gamma_eps,
            "gamma_0": self.gamma_0,
            "gamma_1": self.gamma_1,
        }
        if self.w is not None:
            for i, name in enumerate(PARAM_NAMES):
                cols[name] = self.w[:, i]
            for i, name in enumerate(PARAM_NAMES):
                cols[f"accepted_{name}"] = self.accepted[:, i]
        return cols


class GibbsResult(NamedTuple):
    estimate: np.ndarray
    chains: ChainRecord
    posterior_std: np.ndarray


class GammaPosterior(NamedTuple):
    """Conditional ``(alpha, beta)`` pairs of the three precisions."""

    eps: tuple[float, float]
    zero: tuple[float, float] | None
    one: tuple[float, float]


def image_conditional_moments(yhat, h, state: PrecisionState, lap) -> tuple[np.ndarray, np.ndarray]:
    """Mean and per-frequency variance of the image given everything else.

    The mean is the Wiener-Hunt solution for the current precisions and PSF.

    Raises
    ------
    SingularCovariance
        If some frequency has zero total precision.
    """
    yhat, h, lap = np.asarray(yhat), np.asarray(h), np.asarray(lap)
    den = state.gamma_eps * _abs2(h) + state.gamma_1 * _abs2(lap)
    den[0, 0] += state.gamma_0
    if not np.all(den > 0):
        raise SingularCovariance(
            "zero posterior precision; the null frequency needs gamma_0 > 0 when h_0 == 0"
        )
    sigma2 = 1.0 / den
    mu = state.gamma_eps * sigma2 * np.conj(h) * yhat
    return mu, sigma2


def sample_image(mu, sigma2, rng: np.random.Generator) -> np.ndarray:
    sigma2 = np.asarray(sigma2)
    if not np.all(sigma2 > 0):
        raise SingularCovariance("variances must be positive")
    return mu + np.sqrt(sigma2) * spectral.sample_white_spectral(sigma2.shape[0], rng)


def _update(alpha: float, beta: float, count: float, sqnorm: float) -> tuple[float, float]:
    inv_beta = 0.0 if math.isinf(beta) else (math.inf if beta == 0 else 1.0 / beta)
    inv_new = inv_beta + 0.5 * sqnorm
    if inv_new == 0:
        raise DegenerateUpdate("zero residual with an improper scale prior")
    return alpha + 0.5 * count, 1.0 / inv_new


def _gamma_posterior(
    n: int, resid: float, x0sq: float, smooth: float, hyper: HyperParams, include_zero: bool
) -> GammaPosterior:
    return GammaPosterior(
        eps=_update(hyper.alpha_eps, hyper.beta_eps, n, resid),
        zero=_update(hyper.alpha_0, hyper.beta_0, 1, x0sq) if include_zero else None,
        one=_update(hyper.alpha_1, hyper.beta_1, n - 1, smooth),
    )


def precision_updates(yhat, h, xhat, lap, hyper: HyperParams, include_zero: bool = True) -> GammaPosterior:
    """Conjugate Gamma parameters of the precisions given the image draw."""
    yhat, xhat = np.asarray(yhat), np.asarray(xhat)
    resid = _sqnorm(yhat - np.asarray(h) * xhat)
    smooth = _sqnorm(np.asarray(lap) * xhat)
    x0sq = abs(xhat[0, 0]) ** 2
    return _gamma_posterior(xhat.size, resid, x0sq, smooth, hyper, include_zero)


def _draw_gamma(pair: tuple[float, float], rng: np.random.Generator) -> float:
    alpha, beta = pair
    if beta == 0:
        return 0.0
    return float(rng.gamma(alpha, beta))


def _accept(j: float, rng: np.random.Generator) -> bool:
    t = rng.random()
    return (math.log(t) if t > 0 else -math.inf) < j


def _make_transfer(side: int, transfer=None) -> Callable[[PsfParams], np.ndarray]:
    if transfer is None:
        return GaussianTransfer(side)
    return lambda p: np.asarray(transfer(p, side))


def _joint_step(current, h_cur, resid_cur, xhat, yhat, gamma_eps, box, rng, transfer):
    lo, hi = box.low, box.high
    prop = PsfParams.from_array(lo + rng.random(3) * (hi - lo))
    h_prop = transfer(prop)
    resid_prop = _sqnorm(yhat - h_prop * xhat)
    j = 0.5 * gamma_eps * (resid_cur - resid_prop)
    if _accept(j, rng):
        return prop, True, h_prop, resid_prop
    return current, False, h_cur, resid_cur


def _componentwise_step(current, h_cur, resid_cur, xhat, yhat, gamma_eps, box, rng, transfer):
    lo, hi = box.low, box.high
    accepted = np.zeros(3, dtype=bool)
    for i in range(3):
        vec = current.as_array()
        vec[i] = lo[i] + rng.random() * (hi[i] - lo[i])
        prop = PsfParams.from_array(vec)
        h_prop = transfer(prop)
        resid_prop = _sqnorm(yhat - h_prop * xhat)
        j = 0.5 * gamma_eps * (resid_cur - resid_prop)
        if _accept(j, rng):
            current, h_cur, resid_cur = prop, h_prop, resid_prop
            accepted[i] = True
    return current, accepted, h_cur, resid_cur


def mh_psf_step(current: PsfParams, xhat, yhat, gamma_eps: float, box: PsfBox, rng, transfer=None):
    """One independent M-H move proposing the whole PSF vector from its prior.

    Returns ``(next_params, accepted)``.
    """
    yhat, xhat = np.asarray(yhat), np.asarray(xhat)
    tf = _make_transfer(yhat.shape[0], transfer)
    h_cur = tf(current)
    nxt, acc, _, _ = _joint_step(current, h_cur, _sqnorm(yhat - h_cur * xhat), xhat, yhat, gamma_eps, box, rng, tf)
    return nxt, acc


def mh_psf_componentwise_step(current: PsfParams, xhat, yhat, gamma_eps: float, box: PsfBox, rng, transfer=None):
    """Three successive independent M-H moves, one per PSF parameter.

    Returns ``(next_params, accepted)`` with one flag per parameter.
    """
    yhat, xhat = np.asarray(yhat), np.asarray(xhat)
    tf = _make_transfer(yhat.shape[0], transfer)
    h_cur = tf(current)
    nxt, acc, _, _ = _componentwise_step(
        current, h_cur, _sqnorm(yhat - h_cur * xhat), xhat, yhat, gamma_eps, box, rng, tf
    )
    return nxt, acc


def convergence_metric(prev_mean, new_mean, norm: str = "l1") -> float:
    """Relative change between two successive running means.

    ``"l1"`` sums coefficient moduli, ``"l2"`` uses the Euclidean norm.
    """
    diff = np.asarray(new_mean) - np.asarray(prev_mean)
    if norm == "l1":
        num, den = float(np.sum(np.abs(diff))), float(np.sum(np.abs(new_mean)))
    elif norm == "l2":
        num, den = math.sqrt(_sqnorm(diff)), math.sqrt(_sqnorm(np.asarray(new_mean)))
    else:
        raise ValueError(f"unknown norm {norm!r}")
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return num / den


def run_gibbs(cfg: SamplerConfig, y, stencil=spectral.LAPLACIAN) -> GibbsResult:
    """Run the sampler on data ``y`` until the running mean stabilizes.

    Stops when :func:`convergence_metric` of the post-burn-in running mean
    drops to ``cfg.convergence_tol`` or after ``cfg.max_iters`` iterations;
    the latter emits :class:`NonConvergence` and sets ``chains.converged``
    to False.
    """
    t_start = time.perf_counter()
    y = np.asarray(y, dtype=float)
    side = y.shape[0]
    n = y.size
    rng = np.random.default_rng(cfg.seed)
    yhat = spectral.dft2(y)
    d = spectral.diagonalize_kernel(stencil, side)
    check_differential(d)
    d2 = _abs2(d)

    transfer = _make_transfer(side, cfg.transfer)
    myopic = cfg.myopic
    full = cfg.prior_mode is PriorMode.FULL
    w = cfg.psf_box.center() if myopic else cfg.psf_known
    h = transfer(w)
    if not full and h[0, 0] == 0:
        raise SingularCovariance("marginalized gamma_0 requires a transmitted null frequency (h_0 != 0)")
    h2 = _abs2(h)

    ge, g1 = cfg.init.gamma_eps, cfg.init.gamma_1
    g0 = cfg.init.gamma_0 if full else 0.0

    m = cfg.max_iters
    ch_eps, ch_0, ch_1 = np.empty(m), np.empty(m), np.empty(m)
    ch_w = np.empty((m, 3)) if myopic else None
    ch_acc = np.zeros((m, 3), dtype=bool) if myopic else None
    ch_conv = np.full(m, np.nan)

    sum_xhat = np.zeros((side, side), dtype=complex)
    sum_sq = np.zeros((side, side))
    count = 0
    prev_mean = None
    converged = False
    k = 0
    while k < m:
        den = ge * h2 + g1 * d2
        den[0, 0] += g0
        if not np.all(den > 0):
            raise SingularCovariance("zero posterior precision at some frequency")
        sigma2 = 1.0 / den
        mu = ge * sigma2 * np.conj(h) * yhat
        xhat = mu + np.sqrt(sigma2) * spectral.sample_white_spectral(side, rng)

        resid = _sqnorm(yhat - h * xhat)
        post = _gamma_posterior(n, resid, abs(xhat[0, 0]) ** 2, _sqnorm(d * xhat), cfg.hyper, full)
        ge = _draw_gamma(post.eps, rng)
        g1 = _draw_gamma(post.one, rng)
        if full:
            g0 = _draw_gamma(post.zero, rng)

        if myopic:
            if cfg.proposal == "joint":
                w, acc, h_new, _ = _joint_step(w, h, resid, xhat, yhat, ge, cfg.psf_box, rng, transfer)
                ch_acc[k] = acc
            else:
                w, acc, h_new, _ = _componentwise_step(w, h, resid, xhat, yhat, ge, cfg.psf_box, rng, transfer)
                ch_acc[k] = acc
            if h_new is not h:
                h, h2 = h_new, _abs2(h_new)
            ch_w[k] = w.as_array()

        ch_eps[k], ch_0[k], ch_1[k] = ge, g0, g1
        k += 1

        if k > cfg.burn_in:
            count += 1
            sum_xhat += xhat
            x = np.fft.ifft2(xhat, norm="ortho").real
            sum_sq += x * x
            new_mean = sum_xhat / count
            if prev_mean is not None:
                ch_conv[k - 1] = convergence_metric(prev_mean, new_mean, cfg.convergence_norm)
                if ch_conv[k - 1] <= cfg.convergence_tol:
                    converged = True
                    prev_mean = new_mean
                    break
            prev_mean = new_mean

    if not converged:
        warnings.warn(f"no convergence after {k} iterations", NonConvergence, stacklevel=2)

    mean_spectrum = sum_xhat / count
    estimate = spectral.idft2(mean_spectrum)
    var = np.maximum(sum_sq / count - estimate * estimate, 0.0)
    chains = ChainRecord(
        gamma_eps=ch_eps[:k].copy(),
        gamma_0=ch_0[:k].copy(),
        gamma_1=ch_1[:k].copy(),
        w=None if ch_w is None else ch_w[:k].copy(),
        accepted=None if ch_acc is None else ch_acc[:k].copy(),
        convergence=ch_conv[:k].copy(),
        mean_spectrum=mean_spectrum,
        n_iter=k,
        converged=converged,
        burn_in=cfg.burn_in,
        proposal=cfg.proposal,
        wall_time=time.perf_counter() - t_start,
    )
    return GibbsResult(estimate, chains, np.sqrt(var))
