"""Shared planar geometry: quads, axis-aligned boxes and convex polygon clipping."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate box {self}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def contains(self, other: "BBox") -> bool:
        return (self.x_min <= other.x_min and self.y_min <= other.y_min
                and self.x_max >= other.x_max and self.y_max >= other.y_max)

    def interiors_overlap(self, other: "BBox") -> bool:
        return (self.x_min < other.x_max and other.x_min < self.x_max
                and self.y_min < other.y_max and other.y_min < self.y_max)

    def corners(self) -> list[tuple[float, float]]:
        return [(self.x_min, self.y_min), (self.x_max, self.y_min),
                (self.x_max, self.y_max), (self.x_min, self.y_max)]

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]


@dataclass(frozen=True)
class Quad:
    """Four vertices in consistent winding order plus a confidence score."""

    points: tuple[tuple[float, float], ...]
    score: float = 1.0

    def __post_init__(self):
        if len(self.points) != 4:
            raise ValueError("a quad needs exactly four vertices")
        object.__setattr__(self, "points", tuple((float(x), float(y)) for x, y in self.points))

    @classmethod
    def from_bbox(cls, box: BBox, score: float = 1.0) -> "Quad":
        return cls(tuple(box.corners()), score)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points)

    def area(self) -> float:
        return abs(signed_area(self.points))

    def envelope(self) -> BBox:
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        return BBox(min(xs), min(ys), max(xs), max(ys))

    def center(self) -> tuple[float, float]:
        a = self.array
        return float(a[:, 0].mean()), float(a[:, 1].mean())


def signed_area(poly) -> float:
    """Shoelace area; positive for counter-clockwise order in a y-up frame."""
    s = 0.0
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s / 2.0


def cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def is_convex(poly, eps: float = 1e-12) -> bool:
    n = len(poly)
    sign = 0
    for i in range(n):
        c = cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n])
        if abs(c) <= eps:
            continue
        s = 1 if c > 0 else -1
        if sign and s != sign:
            return False
        sign = s
    return sign != 0


def _ccw(poly):
    poly = [tuple(p) for p in poly]
    return poly if signed_area(poly) > 0 else poly[::-1]


def clip_convex(subject, clip) -> list[tuple[float, float]]:
    """Sutherland-Hodgman: part of polygon `subject` inside convex polygon `clip`."""
    clip = _ccw(clip)
    out = [tuple(p) for p in subject]
    n = len(clip)
    for i in range(n):
        if not out:
            break
        a, b = clip[i], clip[(i + 1) % n]
        inp, out = out, []
        for j in range(len(inp)):
            p, q = inp[j - 1], inp[j]
            p_in = cross(a, b, p) >= 0
            q_in = cross(a, b, q) >= 0
            if q_in:
                if not p_in:
                    out.append(_intersect(p, q, a, b))
                out.append(q)
            elif p_in:
                out.append(_intersect(p, q, a, b))
    return out


def _intersect(p, q, a, b):
    d1 = cross(a, b, p)
    d2 = cross(a, b, q)
    t = d1 / (d1 - d2)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def polygon_iou(a, b) -> float:
    """Intersection over union of two simple polygons, at least one convex."""
    area_a = abs(signed_area(a))
    area_b = abs(signed_area(b))
    if area_a <= 0 or area_b <= 0:
        raise ValueError("IoU undefined for zero-area input")
    if is_convex(b):
        inter_poly = clip_convex(a, b)
    elif is_convex(a):
        inter_poly = clip_convex(b, a)
    else:
        raise ValueError("IoU needs at least one convex polygon")
    inter = abs(signed_area(inter_poly)) if len(inter_poly) >= 3 else 0.0
    union = area_a + area_b - inter
    return min(1.0, max(0.0, inter / union))


def rotate(point, angle: float, origin=(0.0, 0.0)) -> tuple[float, float]:
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = point[0] - origin[0], point[1] - origin[1]
    return (origin[0] + c * dx - s * dy, origin[1] + s * dx + c * dy)
