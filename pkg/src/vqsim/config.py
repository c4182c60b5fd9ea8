"""Experiment configuration schema and run records.

Configs are plain JSON validated before any compute; a run record embeds the
resolved config, a content hash of its inputs, and every metric the command
produced.  result.json is deterministic for a fixed (config, seed) in dense
mode, so wall-clock time and other volatile facts go to the log instead.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Any

from . import __version__
from .dataio import NORMALIZATIONS

COMMANDS = (
    "entanglement-scan",
    "expressibility",
    "gradvar",
    "fourier",
    "bound",
    "deconvolve",
    "neuron",
    "autoencoder",
    "unsample",
    "train",
)

BACKENDS = ("dense", "mps")


class ConfigError(ValueError):
    """Raised for schema violations; the CLI maps it to exit code 2."""


@dataclass
class ExperimentConfig:
    command: str
    seed: int = 0
    backend: str = "dense"
    chi_max: int = 4096
    rel_cutoff: float = 1e-9
    shots: int | None = None
    jobs: int = 1
    out_dir: str = "runs"
    payload: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        out = {
            "command": self.command,
            "seed": self.seed,
            "backend": self.backend,
            "chi_max": self.chi_max,
            "rel_cutoff": self.rel_cutoff,
            "shots": self.shots,
            "jobs": self.jobs,
        }
        out.update(self.payload)
        return out


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def parse_config(data: dict) -> ExperimentConfig:
    _expect(isinstance(data, dict), "config must be a JSON object")
    _expect("command" in data, "config is missing the 'command' field")
    command = data["command"]
    _expect(command in COMMANDS, f"unknown command {command!r}; pick one of {COMMANDS}")
    seed = data.get("seed", 0)
    _expect(isinstance(seed, int) and seed >= 0, "'seed' must be a non-negative integer")
    backend = data.get("backend", "dense")
    _expect(backend in BACKENDS, f"'backend' must be one of {BACKENDS}")
    chi_max = data.get("chi_max", 4096)
    _expect(isinstance(chi_max, int) and chi_max >= 1, "'chi_max' must be a positive integer")
    rel_cutoff = data.get("rel_cutoff", 1e-9)
    _expect(
        isinstance(rel_cutoff, (int, float)) and 0 <= rel_cutoff < 1,
        "'rel_cutoff' must lie in [0, 1)",
    )
    shots = data.get("shots")
    if shots == "exact":
        shots = None
    _expect(
        shots is None or (isinstance(shots, int) and shots >= 1),
        "'shots' must be a positive integer or \"exact\"",
    )
    jobs = data.get("jobs", 1)
    _expect(isinstance(jobs, int) and jobs >= 1, "'jobs' must be a positive integer")
    out_dir = data.get("out_dir", "runs")
    _expect(isinstance(out_dir, str) and out_dir, "'out_dir' must be a non-empty string")
    if "normalization" in data:
        _expect(
            data["normalization"] in NORMALIZATIONS,
            f"'normalization' must be one of {NORMALIZATIONS}",
        )
    reserved = {
        "command",
        "seed",
        "backend",
        "chi_max",
        "rel_cutoff",
        "shots",
        "jobs",
        "out_dir",
    }
    payload = {k: v for k, v in data.items() if k not in reserved}
    return ExperimentConfig(
        command, seed, backend, chi_max, rel_cutoff, shots, jobs, out_dir, payload
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)


def content_hash(config: ExperimentConfig, extra_paths: list[str] | None = None) -> str:
    """sha256 over the canonical config plus any referenced input files."""
    digest = hashlib.sha256()
    digest.update(json.dumps(config.resolved(), sort_keys=True).encode())
    for path in extra_paths or []:
        if os.path.exists(path):
            with open(path, "rb") as fh:
                digest.update(fh.read())
    return digest.hexdigest()


@dataclass
class RunRecord:
    config: dict
    input_hash: str
    metrics: dict
    excluded_draws: dict = field(default_factory=dict)
    library_version: str = __version__

    def to_json(self) -> str:
        # sorted keys so identical runs produce byte-identical files
        return json.dumps(
            {
                "config": self.config,
                "input_hash": self.input_hash,
                "metrics": self.metrics,
                "excluded_draws": self.excluded_draws,
                "library_version": self.library_version,
            },
            sort_keys=True,
            indent=2,
        )


def jsonable(value: Any) -> Any:
    """Round floats/arrays into plain JSON types, recursively."""
    import numpy as np

    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value
