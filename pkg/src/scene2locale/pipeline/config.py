"""Flat `key = value` pipeline configuration.

Lines starting with `#` are comments. Relative paths are resolved against the
directory holding the config file. Every key is optional; defaults live on PipelineConfig.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np

from ..imgproc import IDENTITY_PSF, CorrectionConfig, box_psf, gaussian_psf
from ..segment import SegmentConfig

PSFS = {
    "identity": lambda: IDENTITY_PSF,
    "box3": lambda: box_psf(3),
    "box5": lambda: box_psf(5),
    "gaussian3": lambda: gaussian_psf(3, 1.0),
    "gaussian5": lambda: gaussian_psf(5, 1.0),
}

PATH_KEYS = ("csdb", "lldb", "rldb", "translation_dict", "heads_dir", "maps_dir")


def data_path(*parts: str) -> Path:
    """Filesystem path of a bundled data file."""
    return Path(str(resources.files("scene2locale.data").joinpath(*parts)))


@dataclass
class PipelineConfig:
    correction: CorrectionConfig = field(default_factory=CorrectionConfig)
    wiener_psf: str = "identity"
    score_thresh: float = 0.8
    nms_iou: float = 0.2
    segment: SegmentConfig = field(default_factory=SegmentConfig)
    heads: tuple[str, ...] = ("en",)
    gate_threshold: float = 0.5
    csdb: Path = field(default_factory=lambda: data_path("gazetteer", "csdb.csv"))
    lldb: Path = field(default_factory=lambda: data_path("gazetteer", "lldb.csv"))
    rldb: Path = field(default_factory=lambda: data_path("gazetteer", "rldb.csv"))
    translation_dict: Path | None = field(default_factory=lambda: data_path("dict", "hi_en.tsv"))
    heads_dir: Path = field(default_factory=lambda: data_path("heads"))
    maps_dir: Path | None = None
    debug_dir: Path | None = None
    geotag_path: Path | None = None

    def psf(self) -> np.ndarray:
        try:
            return PSFS[self.wiener_psf]()
        except KeyError:
            raise ValueError(f"unknown wiener_psf {self.wiener_psf!r}; choose from {sorted(PSFS)}") from None

    def validate(self) -> "PipelineConfig":
        if not 0 <= self.score_thresh <= 1:
            raise ValueError("score_thresh must lie in [0, 1]")
        if not 0 <= self.nms_iou <= 1:
            raise ValueError("nms_iou must lie in [0, 1]")
        if self.segment.grow_step <= 0:
            raise ValueError("grow_step must be positive")
        if not self.heads:
            raise ValueError("at least one recognizer head is required")
        self.psf()
        for key in PATH_KEYS:
            p = getattr(self, key)
            if p is not None and not Path(p).exists():
                raise FileNotFoundError(f"{key}: {p} does not exist")
        for lang in self.heads:
            hp = Path(self.heads_dir) / f"{lang}.s2lp"
            if not hp.is_file():
                raise FileNotFoundError(f"no parameter file for head {lang!r} at {hp}")
        return self


_CORRECTION_KEYS = {f.name for f in fields(CorrectionConfig)}
_FLOAT_KEYS = {"score_thresh", "nms_iou", "gate_threshold"}
_OPTIONAL_PATHS = {"translation_dict", "maps_dir", "debug_dir", "geotag_path"}


def _parse_value(key: str, raw: str, base: Path):
    raw = raw.strip()
    if key in _CORRECTION_KEYS:
        return int(raw) if key in ("nlm_patch", "nlm_window") else float(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key == "grow_step":
        return float(raw)
    if key == "max_growth":
        return None if raw.lower() in ("", "auto", "none") else float(raw)
    if key == "heads":
        return tuple(h.strip() for h in raw.split(",") if h.strip())
    if key == "wiener_psf":
        return raw
    if key in PATH_KEYS or key in ("debug_dir", "geotag_path"):
        if key in _OPTIONAL_PATHS and raw.lower() in ("", "none"):
            return None
        p = Path(raw).expanduser()
        return p if p.is_absolute() else (base / p)
    raise KeyError(f"unknown config key {key!r}")


def apply_settings(cfg: PipelineConfig, settings: dict, base: Path | None = None) -> PipelineConfig:
    """Return a copy of `cfg` with flat settings applied (values may be strings or typed)."""
    base = base or Path.cwd()
    corr = {}
    seg = {}
    top = {}
    for key, value in settings.items():
        if value is None:
            continue
        if isinstance(value, str):
            value = _parse_value(key, value, base)
        elif key not in _CORRECTION_KEYS | _FLOAT_KEYS | {"grow_step", "max_growth", "heads", "wiener_psf"} | set(PATH_KEYS) | _OPTIONAL_PATHS:
            raise KeyError(f"unknown config key {key!r}")
        if key in _CORRECTION_KEYS:
            corr[key] = value
        elif key == "grow_step":
            seg["grow_step"] = value
        elif key == "max_growth":
            seg["max_growth"] = value
        else:
            top[key] = Path(value) if key in PATH_KEYS + ("debug_dir", "geotag_path") and value is not None else value
    out = replace(cfg, **top)
    if corr:
        out.correction = replace(cfg.correction, **corr)
    if seg:
        out.segment = replace(cfg.segment, **seg)
    return out


def parse_config_text(text: str) -> dict[str, str]:
    settings = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, value = line.split("=", 1)
        settings[key.strip()] = value.strip()
    return settings


def load_config(path=None, **overrides) -> PipelineConfig:
    """Defaults, then the config file (if any), then non-None overrides; validated."""
    cfg = PipelineConfig()
    if path is not None:
        path = Path(path)
        cfg = apply_settings(cfg, parse_config_text(path.read_text(encoding="utf-8")), path.parent)
    cfg = apply_settings(cfg, {k: v for k, v in overrides.items() if v is not None})
    return cfg.validate()


def dump_config(cfg: PipelineConfig) -> str:
    c = cfg.correction
    lines = [
        f"gamma = {c.gamma}", f"dark_threshold = {c.dark_threshold}",
        f"nlm_strength = {c.nlm_strength}", f"nlm_patch = {c.nlm_patch}", f"nlm_window = {c.nlm_window}",
        f"wiener_balance = {c.wiener_balance}", f"wiener_psf = {cfg.wiener_psf}",
        f"score_thresh = {cfg.score_thresh}", f"nms_iou = {cfg.nms_iou}",
        f"grow_step = {cfg.segment.grow_step}",
        f"max_growth = {'auto' if cfg.segment.max_growth is None else cfg.segment.max_growth}",
        f"heads = {','.join(cfg.heads)}", f"gate_threshold = {cfg.gate_threshold}",
    ]
    for key in PATH_KEYS + ("debug_dir", "geotag_path"):
        v = getattr(cfg, key)
        lines.append(f"{key} = {'none' if v is None else v}")
    return "\n".join(lines) + "\n"
