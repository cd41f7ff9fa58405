"""Posterior summaries, error index, radial spectra and parameter sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .errors import EmptyChain, ShapeMismatch, ZeroReference
from .model import PARAM_NAMES, PsfParams, gaussian_psf_transfer
from .priors import PrecisionState
from .sampler import ChainRecord, image_conditional_moments

SWEEP_PARAMS = ("gamma_eps", "gamma_1", "w_alpha", "w_beta", "phi")
HIST_BINS = 50
JOINT_PAIRS = (("gamma_1", "w_alpha"), ("gamma_1", "w_beta"))


def error_index(x, x_star) -> float:
    """Normalized Euclidean distance ``||x - x*|| / ||x*||``."""
    x, x_star = np.asarray(x, dtype=float), np.asarray(x_star, dtype=float)
    if x.shape != x_star.shape:
        raise ShapeMismatch(f"{x.shape} != {x_star.shape}")
    ref = np.linalg.norm(x_star)
    if ref == 0:
        raise ZeroReference("reference image has zero norm")
    return float(np.linalg.norm(x - x_star) / ref)


@dataclass
class RadialSpectrum:
    """Power ``|xhat|^2`` averaged over annuli of radial frequency."""

    centers: np.ndarray
    power: np.ndarray
    counts: np.ndarray

    def total_power(self) -> float:
        return float(np.sum(self.power * self.counts))


def radial_spectrum(x, n_bins: int | None = None) -> RadialSpectrum:
    """Circular average of the empirical power spectral density.

    Bins are uniform on ``[0, sqrt(2)/2]`` with centers at their midpoints;
    each frequency goes to the bin with the nearest center. Defaults to
    ``side // 2`` bins.
    """
    x = np.asarray(x, dtype=float)
    side = x.shape[0]
    if n_bins is None:
        n_bins = side // 2
    if n_bins < 2:
        raise ValueError("n_bins must be at least 2")
    f_max = math.sqrt(2) / 2
    width = f_max / n_bins
    f = spectral.radial_frequency(side).ravel()
    idx = np.minimum((f / width).astype(int), n_bins - 1)
    power = np.abs(spectral.dft2(x).ravel()) ** 2
    counts = np.bincount(idx, minlength=n_bins)
    if np.any(counts == 0):
        raise ValueError(f"{n_bins} bins leave empty annuli on a {side}x{side} grid; use fewer bins")
    sums = np.bincount(idx, weights=power, minlength=n_bins)
    centers = (np.arange(n_bins) + 0.5) * width
    return RadialSpectrum(centers, sums / counts, counts)


@dataclass
class Histogram:
    counts: np.ndarray
    edges: np.ndarray


@dataclass
class JointHistogram:
    counts: np.ndarray
    x_edges: np.ndarray
    y_edges: np.ndarray


@dataclass
class PosteriorSummary:
    """Post-burn-in means and standard deviations of the chain parameters."""

    mean: dict[str, float]
    std: dict[str, float]
    n_samples: int
    acceptance: dict[str, float] = field(default_factory=dict)
    image_std: float | None = None
    histograms: dict[str, Histogram] = field(default_factory=dict)
    joint_histograms: dict[tuple[str, str], JointHistogram] = field(default_factory=dict)

    def interval(self, name: str, k: float = 3.0) -> tuple[float, float]:
        return self.mean[name] - k * self.std[name], self.mean[name] + k * self.std[name]

    def covers(self, name: str, value: float, k: float = 3.0) -> bool:
        lo, hi = self.interval(name, k)
        return lo <= value <= hi

    def psf(self) -> PsfParams | None:
        if "w_alpha" not in self.mean:
            return None
        return PsfParams(*(self.mean[p] for p in PARAM_NAMES))


def chain_summary(
    chains: ChainRecord, burn_in: int = 0, posterior_std=None, bins: int = HIST_BINS
) -> PosteriorSummary:
    """Summarize draws after discarding the first ``burn_in`` iterations.

    ``gamma_0`` is left out when it was held at zero. Histograms use
    ``bins`` equal bins over the retained sample range.
    """
    if burn_in < 0 or chains.n_iter <= burn_in:
        raise EmptyChain(f"chain of length {chains.n_iter} has nothing after burn-in {burn_in}")
    samples = {"gamma_eps": chains.gamma_eps, "gamma_1": chains.gamma_1}
    if np.any(chains.gamma_0 != 0):
        samples["gamma_0"] = chains.gamma_0
    if chains.w is not None:
        for i, name in enumerate(PARAM_NAMES):
            samples[name] = chains.w[:, i]
    samples = {k: np.asarray(v[burn_in:], dtype=float) for k, v in samples.items()}

    mean = {k: float(np.mean(v)) for k, v in samples.items()}
    std = {k: float(np.std(v)) for k, v in samples.items()}
    hists = {k: Histogram(*np.histogram(v, bins=bins)) for k, v in samples.items()}
    joint = {}
    for a, b in JOINT_PAIRS:
        if a in samples and b in samples:
            counts, xe, ye = np.histogram2d(samples[a], samples[b], bins=bins)
            joint[(a, b)] = JointHistogram(counts, xe, ye)
    acceptance = {}
    if chains.accepted is not None:
        rates = chains.accepted[burn_in:].mean(axis=0)
        acceptance = {name: float(r) for name, r in zip(PARAM_NAMES, rates)}
    image_std = None if posterior_std is None else float(np.mean(posterior_std))
    return PosteriorSummary(
        mean=mean,
        std=std,
        n_samples=chains.n_iter - burn_in,
        acceptance=acceptance,
        image_std=image_std,
        histograms=hists,
        joint_histograms=joint,
    )


@dataclass
class SweepResult:
    parameter: str
    grid: np.ndarray
    errors: np.ndarray

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.errors))

    @property
    def best_value(self) -> float:
        return float(self.grid[self.best_index])

    @property
    def best_error(self) -> float:
        return float(self.errors[self.best_index])

    def is_interior_minimum(self) -> bool:
        return 0 < self.best_index < len(self.grid) - 1


def wiener_hunt(y, params: dict[str, float], d=None, gamma_0: float = 0.0, transfer=None) -> np.ndarray:
    """Wiener-Hunt restoration for fixed precisions and PSF.

    ``params`` holds ``gamma_eps``, ``gamma_1``, ``w_alpha``, ``w_beta`` and
    ``phi``.
    """
    y = np.asarray(y, dtype=float)
    side = y.shape[0]
    if d is None:
        d = spectral.diagonalize_kernel(spectral.LAPLACIAN, side)
    psf = PsfParams(params["w_alpha"], params["w_beta"], params["phi"])
    h = gaussian_psf_transfer(psf, side) if transfer is None else transfer(psf, side)
    state = PrecisionState(params["gamma_eps"], gamma_0, params["gamma_1"])
    mu, _ = image_conditional_moments(spectral.dft2(y), h, state, d)
    return spectral.idft2(mu)


def parameter_sweep(y, x_star, fixed: dict[str, float], parameter: str, grid, d=None, gamma_0: float = 0.0) -> SweepResult:
    """Error index of the Wiener-Hunt solution as one parameter varies.

    All other parameters stay at their values in ``fixed``.
    """
    if parameter not in SWEEP_PARAMS:
        raise ValueError(f"parameter must be one of {SWEEP_PARAMS}")
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("empty grid")
    missing = set(SWEEP_PARAMS) - set(fixed) - {parameter}
    if missing:
        raise ValueError(f"missing fixed values for {sorted(missing)}")
    y = np.asarray(y, dtype=float)
    if d is None:
        d = spectral.diagonalize_kernel(spectral.LAPLACIAN, y.shape[0])
    errors = np.empty(grid.size)
    for i, v in enumerate(grid):
        params = dict(fixed)
        params[parameter] = v
        errors[i] = error_index(wiener_hunt(y, params, d, gamma_0), x_star)
    return SweepResult(parameter, grid, errors)


def sweep_grid(center: float, span: float, n: int, log: bool) -> np.ndarray:
    """Grid of ``n`` points around ``center`` that contains ``center`` exactly.

    With ``log`` the points are ``center * span**t``, otherwise
    ``center + span * t``, for ``t`` uniform on ``[-1, 1]``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return np.array([center])
    t = np.linspace(-1.0, 1.0, n)
    g = center * span**t if log else center + span * t
    g[np.argmin(np.abs(t))] = center
    return np.unique(g)
