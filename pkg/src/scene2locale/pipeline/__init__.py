"""Orchestration, configuration, evaluation and the command line."""

from .config import PipelineConfig, load_config
from .evaluate import EvalPair, eval_detection, eval_location, eval_recognition
from .exif import read_gps
from .runner import Pipeline, PipelineReport, run_pipeline

__all__ = ["PipelineConfig", "load_config", "EvalPair", "eval_detection", "eval_location",
           "eval_recognition", "read_gps", "Pipeline", "PipelineReport", "run_pipeline"]
