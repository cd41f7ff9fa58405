"""Unitary 2-D DFT, circulant operator diagonals and white spectral noise.

Conventions
-----------
* Transforms are unitary (``norm="ortho"``), so ``||dft2(x)|| == ||x||``.
* Frequencies are in standard DFT order, null frequency at index ``(0, 0)``.
* Operator diagonals are the *un-normalized* DFT of the circularly embedded
  point response, so that ``idft2(diag * dft2(x))`` applies the operator.

Every spectrum produced from real data is explicitly made Hermitian
(``f[p, q] == conj(f[-p, -q])`` bit for bit), which keeps all downstream
products exactly symmetric and the inverse transforms exactly real.
"""

from __future__ import annotations

import numpy as np

from .errors import StencilTooLarge, SymmetryViolation

HERMITIAN_RTOL = 1e-9

#: Laplacian stencil used as the default smoothness operator.
LAPLACIAN = np.array([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]]) / 8.0


def _check_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or img.shape[0] != img.shape[1]:
        raise ValueError(f"expected a square 2-D image, got shape {img.shape}")
    if img.shape[0] < 2:
        raise ValueError("image side must be at least 2")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite values")
    return img


def mirror(f: np.ndarray) -> np.ndarray:
    """Return ``g`` with ``g[p, q] = f[-p mod n, -q mod n]``."""
    return np.roll(f[::-1, ::-1], 1, axis=(0, 1))


def hermitian_part(f: np.ndarray) -> np.ndarray:
    """Project onto Hermitian-symmetric spectra.

    The result is symmetric exactly, not just to rounding: the coefficient at
    ``(p, q)`` and at ``(-p, -q)`` are computed from the same two operands.
    """
    return 0.5 * (f + np.conj(mirror(f)))


def is_hermitian(f: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    f = np.asarray(f)
    scale = np.max(np.abs(f)) if f.size else 0.0
    if scale == 0.0:
        return True
    return bool(np.max(np.abs(f - np.conj(mirror(f)))) <= rtol * scale)


def dft2(img) -> np.ndarray:
    """Unitary DFT-2D of a real square image (Hermitian output)."""
    img = _check_image(img)
    return hermitian_part(np.fft.fft2(img, norm="ortho"))


def idft2(f, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Inverse unitary DFT-2D returning a real image.

    Raises
    ------
    SymmetryViolation
        If ``f`` is not Hermitian within ``rtol`` (relative to its largest
        coefficient); a real image cannot have produced it.
    """
    f = np.asarray(f)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError(f"expected a square 2-D spectrum, got shape {f.shape}")
    if not is_hermitian(f, rtol):
        raise SymmetryViolation("spectrum is not Hermitian-symmetric")
    return np.fft.ifft2(f, norm="ortho").real


def embed_kernel(kernel, side: int, anchor: tuple[int, int] | None = None) -> np.ndarray:
    """Circularly embed a small stencil in a ``side x side`` grid.

    The stencil entry at ``anchor`` (default: the central entry) lands on
    pixel ``(0, 0)``; the remaining entries wrap around the borders.
    """
    kernel = np.atleast_2d(np.asarray(kernel, dtype=float))
    kh, kw = kernel.shape
    if kh > side or kw > side:
        raise StencilTooLarge(f"stencil {kernel.shape} does not fit in a {side}x{side} grid")
    if anchor is None:
        anchor = (kh // 2, kw // 2)
    ai, aj = anchor
    if not (0 <= ai < kh and 0 <= aj < kw):
        raise ValueError(f"anchor {anchor} outside stencil of shape {kernel.shape}")
    out = np.zeros((side, side))
    rows = (np.arange(kh) - ai) % side
    cols = (np.arange(kw) - aj) % side
    out[np.ix_(rows, cols)] = kernel
    return out


def diagonalize_kernel(kernel, side: int, anchor: tuple[int, int] | None = None) -> np.ndarray:
    """Eigenvalues of the BCCB operator defined by a stencil.

    Applying the operator to ``x`` is ``idft2(diagonalize_kernel(k, n) * dft2(x))``.
    """
    return hermitian_part(np.fft.fft2(embed_kernel(kernel, side, anchor)))


def reduced_frequencies(side: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced frequency grids ``(nu_alpha, nu_beta)`` wrapped to ``[-0.5, 0.5)``.

    ``nu_alpha`` varies along axis 0 (rows) and ``nu_beta`` along axis 1.
    """
    nu = np.fft.fftfreq(side)
    return np.meshgrid(nu, nu, indexing="ij")


def radial_frequency(side: int) -> np.ndarray:
    nu_a, nu_b = reduced_frequencies(side)
    return np.hypot(nu_a, nu_b)


def sample_white_spectral(side: int, rng: np.random.Generator) -> np.ndarray:
    """DFT of an i.i.d. standard normal real image.

    Each coefficient has unit total variance (real and imaginary parts share
    it, except at the self-conjugate frequencies which are real).
    """
    return dft2(rng.standard_normal((side, side)))
