"""End-to-end orchestration with per-stage reporting."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from ..detect import DetectorBackend, FixtureDetector, detect
from ..georesolve import (Gazetteer, GeoTuple, languages_for, geotag, pick, resolve_keywords, utc_now)
from ..images import IMAGE_SUFFIXES, read_image, write_pgm
from ..imgproc import correct
from ..lingua import detect_script, filter_location_tokens, load_translation_dict, tokenize, translate_to_english
from ..segment import segment_text_region
from ..seqnet import load_params, recognize
from .config import PipelineConfig
from .exif import read_gps

FULL_STAGES = ("read", "exif", "correction", "detect", "segment", "recognize", "detect_script",
               "translate", "tokenize", "keywords", "resolve", "reverse_geocode", "languages", "geotag")
GPS_STAGES = ("read", "exif", "reverse_geocode", "languages")

EXIT_OK = 0
EXIT_UNRESOLVED = 2
EXIT_FAILED = 3

LOCATION_NOT_FOUND = "Location cannot be found"


class StageError(Exception):
    """Expected, reportable stop (e.g. nothing detected)."""


@dataclass
class PipelineReport:
    image_id: str
    status: str = "running"          # resolved | unresolved | failed
    stages: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    failed_stage: str | None = None
    failure: str | None = None
    total_seconds: float = 0.0

    @property
    def exit_code(self) -> int:
        return {"resolved": EXIT_OK, "unresolved": EXIT_UNRESOLVED}.get(self.status, EXIT_FAILED)

    @property
    def resolved_tuple(self) -> GeoTuple | None:
        r = self.stages.get("resolve")
        if not r or r.get("tuple") is None:
            return None
        return GeoTuple(**r["tuple"])

    @property
    def languages(self) -> list[str] | None:
        return self.stages.get("languages")

    def to_dict(self) -> dict:
        return {"image_id": self.image_id, "status": self.status, "exit_code": self.exit_code,
                "failed_stage": self.failed_stage, "failure": self.failure,
                "stages": self.stages, "timings": self.timings, "total_seconds": self.total_seconds}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)


def _tuple_dict(t: GeoTuple) -> dict:
    return {"latitude": t.latitude, "longitude": t.longitude, "pincode": t.pincode}


def _box_list(b) -> list[float]:
    return [float(v) for v in b.as_list()]


class Pipeline:
    """Holds the shared read-only resources (databases, heads, dictionary, detector)."""

    def __init__(self, cfg: PipelineConfig, gazetteer: Gazetteer, heads: list, table: dict,
                 backend: DetectorBackend, clock: Callable[[], datetime] = utc_now,
                 timer: Callable[[], float] = time.perf_counter):
        self.cfg = cfg
        self.gaz = gazetteer
        self.heads = heads
        self.table = table
        self.backend = backend
        self.clock = clock
        self.timer = timer

    @classmethod
    def from_config(cls, cfg: PipelineConfig, backend: DetectorBackend | None = None, **kw) -> "Pipeline":
        cfg.validate()
        gaz = Gazetteer.from_files(cfg.csdb, cfg.lldb, cfg.rldb)
        heads = [load_params(Path(cfg.heads_dir) / f"{lang}.s2lp") for lang in cfg.heads]
        table = load_translation_dict(cfg.translation_dict) if cfg.translation_dict else {}
        if backend is None:
            if cfg.maps_dir is None:
                raise ValueError("no detector backend: set maps_dir or pass a backend")
            backend = FixtureDetector(cfg.maps_dir)
        return cls(cfg, gaz, heads, table, backend, **kw)

    def run_path(self, path) -> PipelineReport:
        path = Path(path)
        return self._run(path.stem, lambda: read_image(path), lambda: read_gps(path))

    def run_array(self, image: np.ndarray, image_id: str, gps: tuple[float, float] | None = None) -> PipelineReport:
        return self._run(image_id, lambda: np.asarray(image, dtype=np.float64), lambda: gps)

    def run_batch(self, paths: Iterable, sink: Callable[[PipelineReport], None] | None = None) -> list[PipelineReport]:
        reports = []
        for p in paths:
            rep = self.run_path(p)
            if sink is not None:
                sink(rep)
            reports.append(rep)
        return reports

    def _run(self, image_id: str, load: Callable, gps_probe: Callable) -> PipelineReport:
        rep = PipelineReport(image_id)
        t_start = self.timer()
        state: dict = {}
        try:
            self._stage(rep, "read", lambda: self._read(load, state))
            self._stage(rep, "exif", lambda: self._exif(gps_probe, state))
            if state["gps"] is not None:
                self._gps_branch(rep, state)
            else:
                self._full_branch(rep, state, image_id)
            if rep.status == "running":
                rep.status = "resolved"
        except _Stop:
            pass
        rep.total_seconds = self.timer() - t_start
        return rep

    def _stage(self, rep: PipelineReport, name: str, fn: Callable):
        t0 = self.timer()
        try:
            out = fn()
        except StageError as e:
            rep.timings[name] = self.timer() - t0
            rep.status, rep.failed_stage, rep.failure = "failed", name, str(e)
            raise _Stop from e
        except _Unresolved as e:
            rep.timings[name] = self.timer() - t0
            rep.stages[name] = e.outcome
            rep.status, rep.failed_stage, rep.failure = "unresolved", name, e.reason
            raise _Stop from e
        except Exception as e:  # noqa: BLE001 - every stage error ends up in the report
            rep.timings[name] = self.timer() - t0
            rep.status, rep.failed_stage, rep.failure = "failed", name, f"{type(e).__name__}: {e}"
            raise _Stop from e
        rep.timings[name] = self.timer() - t0
        rep.stages[name] = out
        return out

    # stage bodies; each returns its JSON-serialisable outcome

    def _read(self, load, state):
        img = load()
        if img.ndim not in (2, 3) or img.size == 0:
            raise StageError("image unreadable")
        state["image"] = img
        return {"height": int(img.shape[0]), "width": int(img.shape[1])}

    def _exif(self, probe, state):
        gps = probe()
        state["gps"] = gps
        return None if gps is None else {"latitude": gps[0], "longitude": gps[1]}

    def _gps_branch(self, rep, state):
        lat, lon = state["gps"]
        rec = self._stage(rep, "reverse_geocode", lambda: self._reverse(lat, lon, state))
        self._stage(rep, "languages", lambda: languages_for(state["record"], self.gaz))
        return rec

    def _reverse(self, lat, lon, state):
        rec = self.gaz.reverse_geocode(lat, lon)
        state["record"] = rec
        return {"city_id": rec.city_id, "city_name": rec.city_name, "latitude": rec.latitude,
                "longitude": rec.longitude, "state": rec.state}

    def _full_branch(self, rep, state, image_id):
        cfg = self.cfg
        self._stage(rep, "correction", lambda: self._correct(state))
        self._stage(rep, "detect", lambda: self._detect(state, image_id))
        self._stage(rep, "segment", lambda: self._segment(state, image_id))
        self._stage(rep, "recognize", lambda: self._recognize(state))
        self._stage(rep, "detect_script", lambda: self._script(state))
        self._stage(rep, "translate", lambda: self._translate(state))
        self._stage(rep, "tokenize", lambda: self._tokenize(state))
        self._stage(rep, "keywords", lambda: self._keywords(state))
        self._stage(rep, "resolve", lambda: self._resolve(state))
        t = state["tuple"]
        self._stage(rep, "reverse_geocode", lambda: self._reverse(t.latitude, t.longitude, state))
        self._stage(rep, "languages", lambda: self._languages(state))
        self._stage(rep, "geotag", lambda: self._geotag(state, image_id, cfg.geotag_path))

    def _correct(self, state):
        out, brightness = correct(state["image"], self.cfg.correction, self.cfg.psf())
        state["corrected"] = out
        return {"brightness": brightness.value, "gamma_applied": brightness.value == "dark"}

    def _detect(self, state, image_id):
        quads = detect(state["corrected"], image_id, self.backend, self.cfg.score_thresh, self.cfg.nms_iou)
        if not quads:
            raise StageError("no text detected")
        state["quads"] = quads
        return [{"points": [[float(x), float(y)] for x, y in q.points], "score": float(q.score)} for q in quads]

    def _segment(self, state, image_id):
        seg = segment_text_region(state["corrected"], state["quads"], self.cfg.segment)
        state["seg"] = seg
        if self.cfg.debug_dir is not None:
            d = Path(self.cfg.debug_dir)
            d.mkdir(parents=True, exist_ok=True)
            write_pgm(d / f"{image_id}_mask.pgm", seg.mask)
            write_pgm(d / f"{image_id}_masked.ppm", seg.masked)
            (d / f"{image_id}_hull.txt").write_text("".join(f"{x:g} {y:g}\n" for x, y in seg.hull))
        return {"grown_boxes": [_box_list(b) for b in seg.boxes],
                "hull": [[float(x), float(y)] for x, y in seg.hull]}

    def _recognize(self, state):
        rec = recognize(state["seg"].masked, state["seg"].boxes, self.heads, self.cfg.gate_threshold)
        state["text"] = rec.text
        return {"text": rec.text, "language": rec.language,
                "words": [{"box": _box_list(w.box), "text": w.text, "language": w.language,
                           "scores": {k: float(v) for k, v in w.scores.items()}} for w in rec.words]}

    def _script(self, state):
        try:
            script = detect_script(state["text"])
        except ValueError as e:
            raise StageError(str(e)) from e
        state["script"] = script
        return script.value

    def _translate(self, state):
        state["english"] = translate_to_english(state["text"], self.table)
        return state["english"]

    def _tokenize(self, state):
        state["tokens"] = tokenize(state["english"])
        return [t.text for t in state["tokens"]]

    def _keywords(self, state):
        kws = filter_location_tokens(state["tokens"], self.gaz.place_index)
        if not kws:
            raise _Unresolved("no location keywords", [])
        state["keywords"] = [k.text for k in kws]
        return state["keywords"]

    def _resolve(self, state):
        res = resolve_keywords(state["keywords"], state["tokens"], state["script"], self.gaz)
        outcome = {"stage": res.stage,
                   "trail": [[name, [_tuple_dict(t) for t in ts]] for name, ts in res.trail],
                   "candidates": [_tuple_dict(t) for t in sorted(res.candidates, key=lambda t: (t.pincode, t.latitude, t.longitude))],
                   "tuple": None}
        if not res.resolved:
            raise _Unresolved(LOCATION_NOT_FOUND, outcome)
        t = pick(res.candidates)
        state["tuple"] = t
        outcome["tuple"] = _tuple_dict(t)
        return outcome

    def _languages(self, state):
        state["languages"] = languages_for(state["record"], self.gaz)
        return state["languages"]

    def _geotag(self, state, image_id, path):
        rec = geotag(image_id, state["tuple"], state["languages"], state["record"].city_name, path, self.clock)
        return json.loads(rec.to_json())


class _Stop(Exception):
    pass


class _Unresolved(Exception):
    def __init__(self, reason: str, outcome):
        super().__init__(reason)
        self.reason = reason
        self.outcome = outcome


def run_pipeline(image, cfg: PipelineConfig, backend: DetectorBackend | None = None, image_id: str | None = None,
                 gps: tuple[float, float] | None = None, **kw) -> PipelineReport:
    """One-shot convenience: `image` is a path or an array (then `image_id` is required)."""
    pipe = Pipeline.from_config(cfg, backend, **kw)
    if isinstance(image, (str, Path)):
        return pipe.run_path(image)
    if image_id is None:
        raise ValueError("image_id is required for array input")
    return pipe.run_array(image, image_id, gps)


def list_images(directory) -> list[Path]:
    return sorted(p for p in Path(directory).iterdir() if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file())
