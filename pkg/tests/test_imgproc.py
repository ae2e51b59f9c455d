import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from oracles import nlm_reference
from scene2locale.imgproc import (IDENTITY_PSF, Brightness, CorrectionConfig, blur, box_psf, check_image,
                                  classify_brightness, correct, denoise_nlm, gamma_correct, gaussian_psf,
                                  wiener_deblur)

pixels = st.integers(0, 255)


def test_gamma_worked_value():
    assert gamma_correct(np.array([[64.0]]), 2.5)[0, 0] == 147


def test_gamma_one_is_identity(rng):
    img = rng.integers(0, 256, size=(6, 7, 3)).astype(float)
    np.testing.assert_array_equal(gamma_correct(img, 1.0), img)


@given(pixels, pixels, st.floats(0.2, 5.0))
def test_gamma_is_monotone(a, b, g):
    lo, hi = min(a, b), max(a, b)
    out = gamma_correct(np.array([[lo, hi]], dtype=float), g)
    assert out[0, 0] <= out[0, 1]


def test_gamma_fixes_endpoints():
    out = gamma_correct(np.array([[0.0, 255.0]]), 2.5)
    assert out.tolist() == [[0.0, 255.0]]


def test_gamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        gamma_correct(np.ones((2, 2)), 0.0)


def test_brightness_classification():
    cfg = CorrectionConfig(dark_threshold=80)
    assert classify_brightness(np.full((4, 4, 3), 79.0), cfg) is Brightness.DARK
    assert classify_brightness(np.full((4, 4, 3), 80.0), cfg) is Brightness.BRIGHT


def test_empty_input_rejected():
    with pytest.raises(ValueError, match="empty"):
        check_image(np.zeros((0, 3)))


@given(st.integers(0, 255), st.integers(3, 9), st.integers(3, 9))
def test_nlm_keeps_constant_images(v, h, w):
    img = np.full((h, w), float(v))
    np.testing.assert_allclose(denoise_nlm(img), img, atol=1e-9)


def test_nlm_matches_double_loop(rng):
    img = rng.integers(0, 256, size=(9, 8)).astype(float)
    cfg = CorrectionConfig(nlm_strength=30, nlm_patch=3, nlm_window=5)
    ref = np.clip(nlm_reference(img, 30, 3, 5), 0, 255)
    np.testing.assert_allclose(denoise_nlm(img, cfg), ref, atol=1e-9)


def test_nlm_reduces_isolated_impulse():
    img = np.full((11, 11), 100.0)
    img[5, 5] = 140.0
    out = denoise_nlm(img, CorrectionConfig(nlm_strength=50))
    assert abs(out[5, 5] - 100) < 40


def test_nlm_rejects_even_sizes():
    with pytest.raises(ValueError):
        denoise_nlm(np.ones((5, 5)), CorrectionConfig(nlm_patch=4))


def test_wiener_identity_psf_reconstructs(rng):
    img = rng.integers(0, 256, size=(16, 16)).astype(float)
    out = wiener_deblur(img, IDENTITY_PSF, 1e-9)
    assert np.max(np.abs(out - img)) <= 1


def test_wiener_undoes_known_blur(rng):
    img = rng.integers(0, 256, size=(32, 32)).astype(float)
    psf = gaussian_psf(3, 0.6)
    rec = wiener_deblur(blur(img, psf), psf, 1e-8)
    assert np.max(np.abs(rec - img)) < 1.0


def test_wiener_validates_psf():
    with pytest.raises(ValueError):
        wiener_deblur(np.ones((4, 4)), np.zeros((3, 3)), 1e-3)
    with pytest.raises(ValueError):
        wiener_deblur(np.ones((4, 4)), np.ones((3, 3)), 1e-3)


def test_psf_helpers_are_normalized():
    assert box_psf(3).sum() == pytest.approx(1.0)
    assert gaussian_psf(5, 1.0).sum() == pytest.approx(1.0)


def test_correct_applies_gamma_only_when_dark():
    dark = np.full((8, 8, 3), 40.0)
    out, b = correct(dark)
    assert b is Brightness.DARK and out.mean() > 40
    bright = np.full((8, 8, 3), 200.0)
    out, b = correct(bright)
    assert b is Brightness.BRIGHT and np.allclose(out, 200.0, atol=1)


@given(hnp.arrays(np.float64, (6, 6), elements=st.floats(0, 255)))
def test_correct_stays_in_range(img):
    out, _ = correct(img)
    assert out.min() >= 0 and out.max() <= 255
