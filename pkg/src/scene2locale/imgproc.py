"""Brightness classification and the gamma / non-local means / Wiener correction chain.

Gray images are 2-D float arrays in [0, 255]; colour images are (H, W, 3).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import ndimage


class Brightness(enum.Enum):
    DARK = "dark"
    BRIGHT = "bright"


@dataclass
class CorrectionConfig:
    gamma: float = 2.5
    dark_threshold: float = 80.0
    nlm_strength: float = 10.0
    nlm_patch: int = 3
    nlm_window: int = 7
    wiener_balance: float = 1e-3

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if not 0 <= self.dark_threshold <= 255:
            raise ValueError("dark_threshold must lie in [0, 255]")
        if self.nlm_strength <= 0:
            raise ValueError("nlm_strength must be positive")
        if self.nlm_patch > self.nlm_window:
            raise ValueError("nlm_patch must not exceed nlm_window")
        if self.wiener_balance <= 0:
            raise ValueError("wiener_balance must be positive")


def check_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim not in (2, 3) or (img.ndim == 3 and img.shape[2] != 3):
        raise ValueError(f"expected (H, W) or (H, W, 3) image, got shape {img.shape}")
    if img.size == 0:
        raise ValueError("empty input")
    if img.min() < 0 or img.max() > 255:
        raise ValueError("pixel values must lie in [0, 255]")
    return img


def luma(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        return img
    return 0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2]


def classify_brightness(img, cfg: CorrectionConfig | None = None) -> Brightness:
    """DARK iff the mean intensity (luma for colour input) is below the threshold."""
    cfg = cfg or CorrectionConfig()
    img = np.asarray(img, dtype=np.float64)
    if img.size == 0:
        raise ValueError("empty input")
    img = check_image(img)
    return Brightness.DARK if luma(img).mean() < cfg.dark_threshold else Brightness.BRIGHT


def gamma_correct(img, gamma: float) -> np.ndarray:
    """out = round(255 * (in / 255) ** (1 / gamma)); gamma > 1 brightens."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    img = check_image(img)
    if gamma == 1:
        return img.copy()
    return np.round(255.0 * (img / 255.0) ** (1.0 / gamma))


def _check_odd(name: str, n: int) -> None:
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"{name} must be a positive odd size, got {n}")


def _nlm_gray(img: np.ndarray, h: float, patch: int, window: int) -> np.ndarray:
    pr = patch // 2
    wr = window // 2
    pad = np.pad(img, wr + pr, mode="reflect")
    H, W = img.shape
    core = pad[wr:wr + H + 2 * pr, wr:wr + W + 2 * pr]
    num = np.zeros_like(img)
    den = np.zeros_like(img)
    for dy in range(-wr, wr + 1):
        for dx in range(-wr, wr + 1):
            shifted = pad[wr + dy:wr + dy + H + 2 * pr, wr + dx:wr + dx + W + 2 * pr]
            d2 = ndimage.uniform_filter((core - shifted) ** 2, size=patch, mode="constant")[pr:pr + H, pr:pr + W]
            wgt = np.exp(-np.maximum(d2, 0.0) / (h * h))
            num += wgt * shifted[pr:pr + H, pr:pr + W]
            den += wgt
    return num / den


def denoise_nlm(img, cfg: CorrectionConfig | None = None) -> np.ndarray:
    """Non-local means: each pixel becomes the mean of its search window,
    weighted by exp(-d2 / h^2) where d2 is the mean squared patch difference.

    Borders are handled by reflection. Colour images are filtered per channel.
    """
    cfg = cfg or CorrectionConfig()
    _check_odd("nlm_patch", cfg.nlm_patch)
    _check_odd("nlm_window", cfg.nlm_window)
    img = check_image(img)
    if img.ndim == 3:
        out = np.stack([_nlm_gray(img[..., c], cfg.nlm_strength, cfg.nlm_patch, cfg.nlm_window)
                        for c in range(3)], axis=-1)
    else:
        out = _nlm_gray(img, cfg.nlm_strength, cfg.nlm_patch, cfg.nlm_window)
    return np.clip(out, 0.0, 255.0)


def _psf_otf(psf: np.ndarray, shape) -> np.ndarray:
    """Zero-pad the kernel to `shape` with its centre moved to the origin, then FFT."""
    padded = np.zeros(shape)
    kh, kw = psf.shape
    padded[:kh, :kw] = psf
    padded = np.roll(padded, (-(kh // 2), -(kw // 2)), axis=(0, 1))
    return np.fft.fft2(padded)


def blur(img, psf) -> np.ndarray:
    """Circular convolution with `psf`, the forward model the deconvolution inverts."""
    img = np.asarray(img, dtype=np.float64)
    psf = np.asarray(psf, dtype=np.float64)
    return np.real(np.fft.ifft2(np.fft.fft2(img) * _psf_otf(psf, img.shape)))


def _wiener_gray(img, psf, balance):
    H = _psf_otf(psf, img.shape)
    out = np.real(np.fft.ifft2(np.conj(H) * np.fft.fft2(img) / (np.abs(H) ** 2 + balance)))
    return np.clip(out, 0.0, 255.0)


def wiener_deblur(img, psf, balance: float) -> np.ndarray:
    """Regularized deconvolution OUT = conj(H) IN / (|H|^2 + balance), clipped to [0, 255]."""
    psf = np.asarray(psf, dtype=np.float64)
    if psf.ndim != 2 or psf.size == 0:
        raise ValueError("psf must be a non-empty 2-D kernel")
    if not np.any(psf):
        raise ValueError("psf is all zero")
    if not np.isclose(psf.sum(), 1.0, atol=1e-9):
        raise ValueError("psf must sum to 1")
    if balance <= 0:
        raise ValueError("balance must be positive")
    img = check_image(img)
    if img.ndim == 3:
        return np.stack([_wiener_gray(img[..., c], psf, balance) for c in range(3)], axis=-1)
    return _wiener_gray(img, psf, balance)


def box_psf(size: int) -> np.ndarray:
    return np.full((size, size), 1.0 / (size * size))


def gaussian_psf(size: int, sigma: float) -> np.ndarray:
    r = np.arange(size) - size // 2
    g = np.exp(-(r[:, None] ** 2 + r[None, :] ** 2) / (2 * sigma * sigma))
    return g / g.sum()


IDENTITY_PSF = np.ones((1, 1))


def correct(img, cfg: CorrectionConfig | None = None, psf=IDENTITY_PSF) -> tuple[np.ndarray, Brightness]:
    """Full chain: gamma (dark inputs only), then denoise, then deblur."""
    cfg = cfg or CorrectionConfig()
    img = check_image(img)
    level = classify_brightness(img, cfg)
    if level is Brightness.DARK:
        img = gamma_correct(img, cfg.gamma)
    img = denoise_nlm(img, cfg)
    img = wiener_deblur(img, psf, cfg.wiener_balance)
    return img, level
