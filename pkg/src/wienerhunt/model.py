"""Parametric Gaussian PSF and the circular convolution observation model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import ShapeMismatch

PARAM_NAMES = ("w_alpha", "w_beta", "phi")


@dataclass(frozen=True)
class PsfParams:
    """Widths ``(w_alpha, w_beta)`` and rotation ``phi`` (radians) of the PSF.

    ``phi`` is canonicalized to ``[0, pi)``: the transfer function has period
    ``pi`` in the rotation angle.
    """

    w_alpha: float
    w_beta: float
    phi: float

    def __post_init__(self):
        for name in ("w_alpha", "w_beta", "phi"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.w_alpha <= 0 or self.w_beta <= 0:
            raise ValueError("PSF widths must be positive")
        if not 0.0 <= self.phi < math.pi:
            object.__setattr__(self, "phi", self.phi % math.pi)

    def as_array(self) -> np.ndarray:
        return np.array([self.w_alpha, self.w_beta, self.phi])

    @classmethod
    def from_array(cls, a) -> "PsfParams":
        return cls(*(float(v) for v in a))


@dataclass(frozen=True)
class PsfBox:
    """Componentwise support ``[lower, upper]`` of the uniform PSF prior."""

    lower: PsfParams
    upper: PsfParams

    def __post_init__(self):
        lo, hi = self.lower.as_array(), self.upper.as_array()
        if np.any(hi <= lo):
            raise ValueError("PSF box must have lower < upper in every component")

    @classmethod
    def from_bounds(cls, w_alpha, w_beta, phi) -> "PsfBox":
        """Build from three ``(low, high)`` pairs."""
        return cls(PsfParams(w_alpha[0], w_beta[0], phi[0]), PsfParams(w_alpha[1], w_beta[1], phi[1]))

    @classmethod
    def around(cls, nominal: PsfParams, delta) -> "PsfBox":
        """Box ``[nominal - delta, nominal + delta]``."""
        c, d = nominal.as_array(), np.broadcast_to(np.asarray(delta, dtype=float), (3,))
        return cls(PsfParams.from_array(c - d), PsfParams.from_array(c + d))

    @property
    def low(self) -> np.ndarray:
        return self.lower.as_array()

    @property
    def high(self) -> np.ndarray:
        return self.upper.as_array()

    def center(self) -> PsfParams:
        return PsfParams.from_array(0.5 * (self.low + self.high))

    def contains(self, params: PsfParams) -> bool:
        a = params.as_array()
        return bool(np.all(a >= self.low) and np.all(a <= self.high))


class GaussianTransfer:
    """Evaluates the Gaussian transfer function on a fixed frequency grid.

    Squared and crossed frequency grids are computed once, which matters
    inside the sampler where the transfer is re-evaluated for every proposal.
    """

    def __init__(self, side: int):
        self.side = side
        nu_a, nu_b = spectral.reduced_frequencies(side)
        self._aa = nu_a * nu_a
        self._bb = nu_b * nu_b
        self._ab = 2.0 * nu_a * nu_b

    def __call__(self, params: PsfParams) -> np.ndarray:
        c, s = math.cos(params.phi), math.sin(params.phi)
        wa, wb = params.w_alpha, params.w_beta
        quad = (
            self._aa * (wa * c * c + wb * s * s)
            + self._bb * (wa * s * s + wb * c * c)
            + self._ab * (s * c * (wa - wb))
        )
        h = np.exp(-2.0 * math.pi**2 * quad)
        if self.side % 2 == 0:
            # -0.5 is its own alias, so the cross term breaks the symmetry of a
            # real PSF on the Nyquist lines; average them with their mirror
            h = spectral.hermitian_part(h).real
        return h


def gaussian_psf_transfer(params: PsfParams, side: int) -> np.ndarray:
    """Real, positive transfer function of the rotated Gaussian PSF.

    Equal to 1 at the null frequency for every parameter value.
    """
    return GaussianTransfer(side)(params)


def apply_forward(h, xhat) -> np.ndarray:
    """Convolution in the Fourier domain: term-wise product ``h * xhat``."""
    h, xhat = np.asarray(h), np.asarray(xhat)
    if h.shape != xhat.shape:
        raise ShapeMismatch(f"transfer shape {h.shape} != spectrum shape {xhat.shape}")
    return h * xhat


def blur(x, h) -> np.ndarray:
    """Circular convolution of a real image with a real-kernel transfer."""
    return spectral.idft2(apply_forward(h, spectral.dft2(x)))


def simulate_data(x, params: PsfParams, gamma_eps: float, rng: np.random.Generator, h=None) -> np.ndarray:
    """Blur ``x`` with the PSF and add white Gaussian noise of precision ``gamma_eps``.

    ``h`` may be given to override the Gaussian transfer computed from ``params``.
    """
    if gamma_eps <= 0:
        raise ValueError("gamma_eps must be positive")
    x = np.asarray(x, dtype=float)
    if h is None:
        h = gaussian_psf_transfer(params, x.shape[0])
    noise = rng.standard_normal(x.shape) / math.sqrt(gamma_eps)
    return blur(x, h) + noise
