"""Image file I/O. Reading goes through Pillow (PNG, JPEG, binary PGM/PPM)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".pgm", ".ppm")


def read_image(path) -> np.ndarray:
    """Load as float64 RGB (H, W, 3) in [0, 255]; gray files are replicated to 3 channels."""
    with Image.open(path) as im:
        im.load()
        if im.mode not in ("RGB", "L"):
            im = im.convert("RGB")
        arr = np.asarray(im, dtype=np.float64)
    if arr.ndim == 2:
        arr = np.repeat(arr[..., None], 3, axis=2)
    return arr


def _to_uint8(img: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(img, dtype=np.float64)), 0, 255).astype(np.uint8)


def write_image(path, img: np.ndarray) -> None:
    Image.fromarray(_to_uint8(img)).save(path)


def write_pgm(path, img: np.ndarray) -> None:
    """Binary P5 (gray) or P6 (RGB) file; booleans map to 0/255."""
    arr = np.asarray(img)
    if arr.dtype == bool:
        arr = arr.astype(np.uint8) * 255
    arr = _to_uint8(arr)
    if arr.ndim == 2:
        head = b"P5"
    elif arr.ndim == 3 and arr.shape[2] == 3:
        head = b"P6"
    else:
        raise ValueError(f"cannot write shape {arr.shape} as PGM/PPM")
    h, w = arr.shape[:2]
    Path(path).write_bytes(head + f"\n{w} {h}\n255\n".encode() + arr.tobytes())
