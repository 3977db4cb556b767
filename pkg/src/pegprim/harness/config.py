"""Run configuration: defaults, config-file loading, CLI overrides and
the reproducibility manifest.

Config files are flat JSON objects whose keys are RunConfig field
names.  Precedence: CLI flag > config file > built-in default.  The
manifest written next to every run is itself a valid config file, so a
run can be reproduced by pointing --config at it.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from ..agent import TrainConfig
from ..sim import kernels

ALGOS = ("tsmpdqn", "mpdqn", "dqn-discrete")

# manifest keys that describe the run but are not config inputs
INFORMATIONAL_KEYS = ("kernel_backend", "manifest_version")

MANIFEST_VERSION = 1


@dataclass
class RunConfig:
    """Flat experiment configuration; training hyperparameters live in
    the nested TrainConfig and are set through keys of the same name."""

    algo: str = "tsmpdqn"
    task: str = "square"
    episodes: int = 3000
    horizon: int = 20
    seed: int = 0
    out: str = "runs/run"
    eval_every: int = 100
    eval_trials: int = 100
    checkpoint_every: int = 500
    phase1_episodes: int = 200
    phase2_episodes: int = 300
    train: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.algo not in ALGOS:
            raise ValueError(f"algo must be one of {ALGOS}, got {self.algo!r}")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.eval_trials < 1:
            raise ValueError("eval_trials must be >= 1")


_RUN_KEYS = [f.name for f in fields(RunConfig) if f.name != "train"]
_TRAIN_KEYS = [f.name for f in fields(TrainConfig)]


def load_config_file(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return data


def resolve_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Merge config sources into a validated RunConfig.

    `file_values` comes from --config, `overrides` from explicit CLI
    flags; unknown keys are rejected, informational manifest keys are
    ignored so manifests round-trip as configs.
    """
    merged: dict = {}
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if value is None or key in INFORMATIONAL_KEYS:
                continue
            merged[key] = value
    run_kwargs = {}
    train_kwargs = {}
    for key, value in merged.items():
        if key in _TRAIN_KEYS:
            train_kwargs[key] = value
        elif key in _RUN_KEYS:
            run_kwargs[key] = value
        else:
            raise ValueError(f"unknown config key {key!r}")
    # the algorithm presets pin the reduction flags unless the user
    # overrides them explicitly
    algo = run_kwargs.get("algo", "tsmpdqn")
    if algo == "mpdqn":
        train_kwargs.setdefault("twin_enabled", False)
        train_kwargs.setdefault("smoothing_enabled", False)
    return RunConfig(train=TrainConfig(**train_kwargs), **run_kwargs)


def make_manifest(config: RunConfig) -> dict:
    """Flat resolved-config dict plus informational provenance keys;
    no timestamps, so reruns produce identical manifests."""
    out = {}
    for key in _RUN_KEYS:
        out[key] = getattr(config, key)
    train = asdict(config.train)
    train["hidden"] = list(train["hidden"])
    for key in _TRAIN_KEYS:
        out[key] = train[key]
    out["kernel_backend"] = kernels.BACKEND
    out["manifest_version"] = MANIFEST_VERSION
    return out


def write_manifest(path, config: RunConfig) -> None:
    with open(path, "w") as fh:
        json.dump(make_manifest(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
