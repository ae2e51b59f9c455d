"""Detection, word-recognition and location metrics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ..detect import iou
from ..georesolve import haversine_km
from ..lingua import tokenize

DEFAULT_MATCH_IOU = 0.5


@dataclass(frozen=True)
class EvalPair:
    image_id: str
    predicted: object
    ground_truth: object


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def f_score(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r else 0.0


def match_boxes(pred: Sequence, gt: Sequence, iou_thresh: float = DEFAULT_MATCH_IOU) -> int:
    """Greedy one-to-one matching: highest-IoU (pred, gt) pair first; ties by index."""
    cands = []
    for i, p in enumerate(pred):
        for j, g in enumerate(gt):
            v = iou(p, g)
            if v >= iou_thresh:
                cands.append((-v, i, j))
    cands.sort()
    used_p, used_g = set(), set()
    for _, i, j in cands:
        if i not in used_p and j not in used_g:
            used_p.add(i)
            used_g.add(j)
    return len(used_p)


def _check_ids(pairs: Sequence[EvalPair]) -> None:
    ids = [p.image_id for p in pairs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate image ids in evaluation pairs")


def eval_detection(pairs: Sequence[EvalPair], iou_thresh: float = DEFAULT_MATCH_IOU) -> tuple[float, float, float]:
    """(precision, recall, F) over all images; geometries are polygons/quads/boxes."""
    _check_ids(pairs)
    matches = n_pred = n_gt = 0
    for pair in pairs:
        matches += match_boxes(pair.predicted, pair.ground_truth, iou_thresh)
        n_pred += len(pair.predicted)
        n_gt += len(pair.ground_truth)
    p, r = _ratio(matches, n_pred), _ratio(matches, n_gt)
    return p, r, f_score(p, r)


def _words(text: str) -> Counter:
    return Counter(t.text.casefold() for t in tokenize(text or ""))


def eval_recognition(pairs: Sequence[EvalPair]) -> tuple[float, float]:
    """Word-level (precision, recall) from multiset intersections of tokenized texts."""
    _check_ids(pairs)
    correct = n_pred = n_gt = 0
    for pair in pairs:
        pw, gw = _words(pair.predicted), _words(pair.ground_truth)
        correct += sum((pw & gw).values())
        n_pred += sum(pw.values())
        n_gt += sum(gw.values())
    return _ratio(correct, n_pred), _ratio(correct, n_gt)


@dataclass(frozen=True)
class LocationScore:
    mean_km: float
    resolved: int
    total: int

    @property
    def resolution_rate(self) -> float:
        return _ratio(self.resolved, self.total)


def eval_location(pairs: Sequence[EvalPair]) -> LocationScore:
    """Mean haversine distance over pairs where both sides are (lat, lon); None marks unresolved."""
    _check_ids(pairs)
    dists = [haversine_km(tuple(p.predicted), tuple(p.ground_truth))
             for p in pairs if p.predicted is not None and p.ground_truth is not None]
    if not dists:
        raise ValueError("nothing to average")
    return LocationScore(sum(dists) / len(dists), len(dists), len(pairs))
