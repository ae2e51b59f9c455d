"""Slow, obviously-correct reference implementations used only by the tests."""

import itertools
import math

import numpy as np


def collapse(path, blank=0):
    out, prev = [], None
    for k in path:
        if k != prev and k != blank:
            out.append(int(k))
        prev = k
    return out


def ctc_prob_bruteforce(p, target):
    """Sum of path probabilities over every length-T path collapsing to target."""
    T, C = p.shape
    total = 0.0
    for path in itertools.product(range(C), repeat=T):
        if collapse(path) == list(target):
            total += math.prod(p[t, k] for t, k in enumerate(path))
    return total


def best_path_bruteforce(p):
    T, C = p.shape
    best, best_path = -1.0, None
    for path in itertools.product(range(C), repeat=T):
        pr = math.prod(p[t, k] for t, k in enumerate(path))
        if pr > best:
            best, best_path = pr, path
    return collapse(best_path), best


def hull_halfplane(points):
    """O(n^3): keep directed edges (a, b) with every other point strictly left or on the open segment."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    verts = set()
    for a in pts:
        for b in pts:
            if a == b:
                continue
            ok = True
            for c in pts:
                if c in (a, b):
                    continue
                cr = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
                if cr < 0:
                    ok = False
                    break
                if cr == 0:
                    # collinear points must lie strictly between a and b
                    dot = (c[0] - a[0]) * (b[0] - a[0]) + (c[1] - a[1]) * (b[1] - a[1])
                    if not 0 < dot < (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2:
                        ok = False
                        break
            if ok:
                verts.add(a)
                verts.add(b)
    return verts


def point_in_convex_or_on(poly, x, y, eps=1e-9):
    """Crossing-number test plus an explicit on-edge check."""
    n = len(poly)
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        cr = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if abs(cr) <= eps and min(x1, x2) - eps <= x <= max(x1, x2) + eps and min(y1, y2) - eps <= y <= max(y1, y2) + eps:
            return True
    inside = False
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xc:
                inside = not inside
    return inside


def greedy_nms(quads, iou_fn, thresh):
    """Textbook greedy suppression; stable on equal scores."""
    order = sorted(range(len(quads)), key=lambda i: -quads[i].score)
    keep = []
    for i in order:
        if all(iou_fn(quads[i], quads[k]) < thresh for k in keep):
            keep.append(i)
    return [quads[i] for i in keep]


def otsu_exhaustive(values):
    """Direct between-class variance for every cut on integer data; smallest best cut."""
    v = np.asarray(values).ravel()
    best_t, best = None, -1.0
    for t in range(255):
        a, b = v[v <= t], v[v > t]
        if len(a) == 0 or len(b) == 0:
            continue
        w0, w1 = len(a) / len(v), len(b) / len(v)
        s = w0 * w1 * (a.mean() - b.mean()) ** 2
        if s > best * (1 + 1e-12) + 1e-300:
            best_t, best = t, s
    return best_t


def haversine_scalar(lat1, lon1, lat2, lon2, r=6371.0):
    """Spherical law of cosines, independent of the haversine formula."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dl = math.radians(lon2 - lon1)
    c = math.sin(p1) * math.sin(p2) + math.cos(p1) * math.cos(p2) * math.cos(dl)
    return r * math.acos(max(-1.0, min(1.0, c)))


def nlm_reference(img, h, patch, window):
    """Per-pixel double loop non-local means with reflect padding."""
    img = np.asarray(img, dtype=np.float64)
    pr, wr = patch // 2, window // 2
    pad = np.pad(img, pr + wr, mode="reflect")
    H, W = img.shape
    out = np.empty_like(img)
    o = pr + wr
    for y in range(H):
        for x in range(W):
            ref = pad[y + o - pr:y + o + pr + 1, x + o - pr:x + o + pr + 1]
            num = den = 0.0
            for dy in range(-wr, wr + 1):
                for dx in range(-wr, wr + 1):
                    cy, cx = y + o + dy, x + o + dx
                    cand = pad[cy - pr:cy + pr + 1, cx - pr:cx + pr + 1]
                    d2 = np.mean((ref - cand) ** 2)
                    w = math.exp(-d2 / (h * h))
                    num += w * pad[cy, cx]
                    den += w
            out[y, x] = num / den
    return out
