"""Experiment harness: configuration, pipeline stages and the command line."""

from .config import ALGORITHMS, ExperimentConfig, load_config, parse_config_text
from .pipeline import (
    AttackResult,
    attack_snapshot,
    build_dataset,
    cmd_attack,
    cmd_experiment,
    cmd_simulate,
    cmd_train_eval,
    evaluate,
    exemplar,
)

__all__ = [
    "ALGORITHMS",
    "AttackResult",
    "ExperimentConfig",
    "attack_snapshot",
    "build_dataset",
    "cmd_attack",
    "cmd_experiment",
    "cmd_simulate",
    "cmd_train_eval",
    "evaluate",
    "exemplar",
    "load_config",
    "parse_config_text",
]
