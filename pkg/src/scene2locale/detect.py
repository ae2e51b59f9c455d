"""RBOX decoding of detector score/geometry maps, IoU, and locality-aware NMS.

The detector network itself is external: a backend hands over a score map
(H, W) in [0, 1] and a geometry map (H, W, 5) holding distances to the top,
right, bottom and left box edges plus a rotation angle in radians.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .geometry import BBox, Quad, polygon_iou, rotate

RASTER_MAGIC = 0x524C3253  # b"S2LR" read as little-endian u32
RASTER_VERSION = 1
HEADER_FMT = "<8I"


def check_maps(score: np.ndarray, geo: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    score = np.asarray(score, dtype=np.float64)
    geo = np.asarray(geo, dtype=np.float64)
    if score.ndim != 2:
        raise ValueError(f"score map must be 2-D, got shape {score.shape}")
    if geo.shape != score.shape + (5,):
        raise ValueError(f"geometry map shape {geo.shape} does not match score map {score.shape}")
    if score.size and (score.min() < 0 or score.max() > 1):
        raise ValueError("score map values must lie in [0, 1]")
    if (geo[..., :4] < 0).any():
        raise ValueError("geometry distances must be non-negative")
    ang = geo[..., 4]
    if ((ang <= -math.pi / 2) | (ang > math.pi / 2)).any():
        raise ValueError("geometry angles must lie in (-pi/2, pi/2]")
    return score, geo


def rbox_quad(x: float, y: float, top: float, right: float, bottom: float, left: float,
              angle: float, score: float = 1.0) -> Quad:
    """Rectangle around the origin pixel, rotated by `angle` about that pixel."""
    corners = [(x - left, y - top), (x + right, y - top), (x + right, y + bottom), (x - left, y + bottom)]
    if angle:
        corners = [rotate(c, angle, (x, y)) for c in corners]
    return Quad(tuple(corners), score)


def decode_rbox(score: np.ndarray, geo: np.ndarray, score_thresh: float = 0.8,
                scale: float = 1.0) -> list[Quad]:
    """One quad per map pixel whose score reaches `score_thresh`, in row-major order.

    `scale` maps map coordinates to image coordinates (EAST-style networks
    predict on a 1/4 grid); distances are taken to be in image pixels already.
    """
    score, geo = check_maps(score, geo)
    if not 0 <= score_thresh <= 1:
        raise ValueError("score_thresh must lie in [0, 1]")
    ys, xs = np.nonzero(score >= score_thresh)
    quads = []
    for y, x in zip(ys, xs):
        t, r, b, l, a = geo[y, x]
        quads.append(rbox_quad(x * scale, y * scale, t, r, b, l, a, float(score[y, x])))
    return quads


def _points(shape) -> list[tuple[float, float]]:
    if isinstance(shape, Quad):
        return list(shape.points)
    if isinstance(shape, BBox):
        return shape.corners()
    return [tuple(p) for p in shape]


def iou(a, b) -> float:
    """Intersection over union of two quads or axis-aligned boxes."""
    return polygon_iou(_points(a), _points(b))


def weighted_merge(a: Quad, b: Quad) -> Quad:
    """Score-weighted vertex average; keeps the larger score."""
    wa, wb = a.score, b.score
    if wa + wb <= 0:
        wa = wb = 1.0
    pts = tuple(((wa * pa[0] + wb * pb[0]) / (wa + wb), (wa * pa[1] + wb * pb[1]) / (wa + wb))
                for pa, pb in zip(a.points, b.points))
    return Quad(pts, max(a.score, b.score))


def standard_nms(quads: Sequence[Quad], iou_thresh: float) -> list[Quad]:
    order = sorted(range(len(quads)), key=lambda i: -quads[i].score)
    keep: list[Quad] = []
    for i in order:
        q = quads[i]
        if all(iou(q, k) < iou_thresh for k in keep):
            keep.append(q)
    return keep


def locality_aware_nms(quads: Sequence[Quad], iou_thresh: float = 0.2) -> list[Quad]:
    """Merge consecutive overlapping quads, then greedy highest-score-first suppression.

    Input order matters for the merge pass: `decode_rbox` emits row-major, so
    consecutive quads come from neighbouring pixels. Output is sorted by
    descending score.
    """
    merged: list[Quad] = []
    for q in quads:
        if merged and iou(merged[-1], q) >= iou_thresh:
            merged[-1] = weighted_merge(merged[-1], q)
        else:
            merged.append(q)
    return standard_nms(merged, iou_thresh)


# -- fixture rasters ---------------------------------------------------------

def write_raster(path, channels: np.ndarray, scale: int = 1) -> None:
    """Write an (H, W, C) float array as a raster file.

    Header: 8 little-endian u32 (magic, version, width, height, channels,
    scale, 0, 0) followed by float32 little-endian samples, channel-interleaved.
    """
    arr = np.asarray(channels, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[..., None]
    h, w, c = arr.shape
    header = struct.pack(HEADER_FMT, RASTER_MAGIC, RASTER_VERSION, w, h, c, int(scale), 0, 0)
    Path(path).write_bytes(header + np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_raster(path) -> tuple[np.ndarray, int]:
    data = Path(path).read_bytes()
    hsize = struct.calcsize(HEADER_FMT)
    if len(data) < hsize:
        raise ValueError(f"{path}: truncated raster header")
    magic, version, w, h, c, scale, _, _ = struct.unpack(HEADER_FMT, data[:hsize])
    if magic != RASTER_MAGIC:
        raise ValueError(f"{path}: bad raster magic")
    if version != RASTER_VERSION:
        raise ValueError(f"{path}: unsupported raster version {version}")
    expected = hsize + 4 * w * h * c
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(data)}")
    arr = np.frombuffer(data[hsize:], dtype="<f4").astype(np.float64).reshape(h, w, c)
    return arr, max(1, scale)


def write_maps(path, score: np.ndarray, geo: np.ndarray, scale: int = 1) -> None:
    score, geo = check_maps(score, geo)
    write_raster(path, np.concatenate([score[..., None], geo], axis=2), scale)


def read_maps(path) -> tuple[np.ndarray, np.ndarray, int]:
    arr, scale = read_raster(path)
    if arr.shape[2] != 6:
        raise ValueError(f"{path}: detector maps need 6 channels, found {arr.shape[2]}")
    geo = arr[..., 1:].copy()
    # float32 rounding can push pi/2 just past the limit
    geo[..., 4] = np.where(np.abs(geo[..., 4] - math.pi / 2) < 1e-6, math.pi / 2, geo[..., 4])
    score, geo = check_maps(arr[..., 0], geo)
    return score, geo, scale


class DetectorBackend(Protocol):
    def predict(self, image: np.ndarray, image_id: str) -> tuple[np.ndarray, np.ndarray, int]:
        """Return (score map, geometry map, map-to-image scale)."""


class FixtureDetector:
    """Backend that serves precomputed maps stored as `<image_id>.s2lr` in a directory."""

    suffix = ".s2lr"

    def __init__(self, maps_dir):
        self.maps_dir = Path(maps_dir)

    def predict(self, image, image_id):
        path = self.maps_dir / f"{image_id}{self.suffix}"
        if not path.is_file():
            h, w = np.asarray(image).shape[:2]
            return np.zeros((h, w)), np.zeros((h, w, 5)), 1
        return read_maps(path)


def detect(image, image_id: str, backend: DetectorBackend, score_thresh: float = 0.8,
           nms_iou: float = 0.2) -> list[Quad]:
    score, geo, scale = backend.predict(image, image_id)
    return locality_aware_nms(decode_rbox(score, geo, score_thresh, scale), nms_iou)
