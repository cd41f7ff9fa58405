import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wienerhunt import spectral
from wienerhunt.analysis import error_index
from wienerhunt.errors import ShapeMismatch
from wienerhunt.model import PsfBox, PsfParams, apply_forward, blur, gaussian_psf_transfer, simulate_data
from wienerhunt.priors import PrecisionState, laplacian_diagonal, sample_prior_image

widths = st.floats(0.05, 40.0)
angles = st.floats(0.0, math.pi, exclude_max=True)


def transfer_literal(wa, wb, phi, nu_a, nu_b):
    """The Gaussian transfer written out term by term for a single frequency."""
    c2, s2, sc = math.cos(phi) ** 2, math.sin(phi) ** 2, math.sin(phi) * math.cos(phi)
    q = nu_a**2 * (wa * c2 + wb * s2) + nu_b**2 * (wa * s2 + wb * c2) + 2 * nu_a * nu_b * sc * (wa - wb)
    return math.exp(-2 * math.pi**2 * q)


@settings(max_examples=50, deadline=None)
@given(widths, widths, angles)
def test_null_frequency_is_one(wa, wb, phi):
    h = gaussian_psf_transfer(PsfParams(wa, wb, phi), 16)
    assert h[0, 0] == 1.0
    assert np.all(h > 0)
    assert np.isrealobj(h)


def test_isotropic_independent_of_angle():
    a = gaussian_psf_transfer(PsfParams(3.0, 3.0, 0.0), 16)
    b = gaussian_psf_transfer(PsfParams(3.0, 3.0, 1.2), 16)
    np.testing.assert_allclose(a, b, rtol=1e-14)


def test_value_at_half_frequency():
    # nu = (0.5, 0) is stored at row side/2 (alias -0.5), column 0
    h = gaussian_psf_transfer(PsfParams(1.0, 1.0, 0.0), 8)
    assert h[4, 0] == pytest.approx(math.exp(-math.pi**2 / 2), rel=1e-14)
    assert h[4, 0] == pytest.approx(7.192e-3, rel=1e-3)


def test_matches_literal_formula_off_nyquist():
    n = 9  # odd side: no Nyquist lines
    wa, wb, phi = 5.0, 1.5, 0.7
    h = gaussian_psf_transfer(PsfParams(wa, wb, phi), n)
    nu = np.fft.fftfreq(n)
    for p in range(n):
        for q in range(n):
            assert h[p, q] == pytest.approx(transfer_literal(wa, wb, phi, nu[p], nu[q]), rel=1e-12)


def test_transfer_is_symmetric_for_real_psf():
    h = gaussian_psf_transfer(PsfParams(2.0, 0.5, 0.9), 8)
    assert np.array_equal(h, spectral.mirror(h))


@settings(max_examples=30, deadline=None)
@given(widths, st.floats(0.01, 5.0), widths)
def test_wider_alpha_never_increases_transfer(wa, extra, wb):
    lo = gaussian_psf_transfer(PsfParams(wa, wb, 0.0), 16)
    hi = gaussian_psf_transfer(PsfParams(wa + extra, wb, 0.0), 16)
    assert np.all(hi <= lo)


def test_phi_canonicalized():
    assert PsfParams(1, 1, math.pi + 0.25).phi == pytest.approx(0.25)
    assert PsfParams(1, 1, -0.25).phi == pytest.approx(math.pi - 0.25)
    with pytest.raises(ValueError):
        PsfParams(0.0, 1.0, 0.0)


def test_box_validation_and_center():
    box = PsfBox.from_bounds((19, 21), (6, 8), (math.pi / 4, math.pi / 2))
    assert box.center().as_array() == pytest.approx([20, 7, 3 * math.pi / 8])
    assert box.contains(PsfParams(20, 7, 1.0))
    with pytest.raises(ValueError):
        PsfBox.from_bounds((1, 1), (6, 8), (0.1, 0.2))


def test_apply_forward_identity_and_null_frequency():
    xhat = spectral.dft2(np.random.default_rng(0).standard_normal((8, 8)))
    np.testing.assert_array_equal(apply_forward(np.ones((8, 8)), xhat), xhat)
    h = gaussian_psf_transfer(PsfParams(2, 1, 0.3), 8)
    assert apply_forward(h, xhat)[0, 0] == xhat[0, 0]
    with pytest.raises(ShapeMismatch):
        apply_forward(np.ones((4, 4)), xhat)


def test_apply_forward_matches_dense_convolution():
    from wienerhunt.oracle import dense_from_transfer

    rng = np.random.default_rng(5)
    x = rng.standard_normal((8, 8))
    # a real, symmetric kernel defined in space, to get an independent transfer
    kernel = rng.random((3, 3))
    kernel = kernel + kernel[::-1, ::-1]
    h = spectral.diagonalize_kernel(kernel, 8)
    from tests.test_spectral import brute_circular_convolution

    np.testing.assert_allclose(blur(x, h), brute_circular_convolution(x, kernel, (1, 1)), atol=1e-10)
    hg = gaussian_psf_transfer(PsfParams(2, 1, 0.3), 8)
    np.testing.assert_allclose(blur(x, hg), (dense_from_transfer(hg) @ x.ravel()).reshape(8, 8), atol=1e-10)


def test_vanishing_noise_limit():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((16, 16))
    p = PsfParams(2, 1, 0.3)
    y = simulate_data(x, p, 1e12, rng)
    hx = blur(x, gaussian_psf_transfer(p, 16))
    assert np.linalg.norm(y - hx) / np.linalg.norm(hx) < 1e-4


def test_noise_variance():
    rng = np.random.default_rng(7)
    x = np.zeros((128, 128))
    y = simulate_data(x, PsfParams(2, 1, 0.3), 0.5, rng)
    assert np.var(y) == pytest.approx(2.0, rel=0.05)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_data_error_in_reported_range(seed):
    from wienerhunt.cli import simulation_rng

    rng = simulation_rng(seed)
    x = sample_prior_image(PrecisionState(0.5, 1.0, 2.0), laplacian_diagonal(128), 128, rng)
    y = simulate_data(x, PsfParams(20, 7, math.pi / 3), 0.5, rng)
    e = error_index(y, x)
    print(f"seed {seed}: data error {e:.4f}")
    assert 0.08 <= e <= 0.14
