"""Softmax policies trained from tree-search values in self-play."""

from ._core import (
    Action,
    Checkpoint,
    ConfigError,
    ContractViolation,
    FeatureSet,
    Game,
    GameState,
    TrainConfig,
    atomic_features,
    bootstrap_ci,
    ce_gradient,
    deserialize_checkpoint,
    known_games,
    load_checkpoint,
    normalized_entropy,
    play_match,
    search,
    softmax,
    train,
    tspg_gradient,
    weight_summary,
)

__all__ = [
    "Action",
    "Checkpoint",
    "ConfigError",
    "ContractViolation",
    "FeatureSet",
    "Game",
    "GameState",
    "TrainConfig",
    "atomic_features",
    "bootstrap_ci",
    "ce_gradient",
    "deserialize_checkpoint",
    "known_games",
    "load_checkpoint",
    "normalized_entropy",
    "play_match",
    "search",
    "softmax",
    "train",
    "tspg_gradient",
    "weight_summary",
]
