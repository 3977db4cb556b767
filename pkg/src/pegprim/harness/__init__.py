"""Experiment orchestration: configs, evaluation, training runs,
transfer, and the command-line interface."""

from .config import RunConfig, load_config_file, make_manifest, resolve_config
from .evaluate import EvalReport, TrialRecord, evaluate, write_eval_report
from .oracle import OracleInsertPolicy, RandomPolicy
from .run import RunArtifacts, run_training, transfer

__all__ = [
    "EvalReport",
    "OracleInsertPolicy",
    "RandomPolicy",
    "RunArtifacts",
    "RunConfig",
    "TrialRecord",
    "evaluate",
    "load_config_file",
    "make_manifest",
    "resolve_config",
    "run_training",
    "transfer",
    "write_eval_report",
]
