"""Swarm-shift workload toolkit: swarm mission simulation and
multi-dimensional workload estimation."""

from ._native import (
    SwarmloadError,
    classify,
    extract_epoch_features,
    metric_component_map,
    minute_bin,
    normalize_likert,
    run_pipeline,
    simulate,
    spearman,
    synthesize,
    weighted_subjective_overall,
)

__all__ = [
    "SwarmloadError",
    "classify",
    "extract_epoch_features",
    "metric_component_map",
    "minute_bin",
    "normalize_likert",
    "run_pipeline",
    "simulate",
    "spearman",
    "synthesize",
    "weighted_subjective_overall",
]

__version__ = "0.1.0"
