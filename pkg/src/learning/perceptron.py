"""Averaged structured perceptron over MAP states."""

import logging
from typing import Literal, Optional, Sequence

import numpy as np
from tqdm import tqdm

from src.inference.maxsat import map_exact, map_localsearch
from src.learning.instances import TrainingInstance, stack_weights

logger = logging.getLogger(__name__)

MapMode = Literal["exact", "localsearch"]


def _map_state(instance: TrainingInstance, weights: np.ndarray, map_mode: MapMode, seed: int, **options) -> np.ndarray:
    network = instance.network.with_weights(weights)
    if map_mode == "exact":
        return map_exact(network, **options).truth
    if map_mode == "localsearch":
        return map_localsearch(network, seed=seed, **options).truth
    raise ValueError(f"unknown MAP mode {map_mode!r}")


def _sweep(instances, weights, learning_rate, map_mode, seed, **options):
    """Visit every instance once; yield the weights after each visit."""
    weights = np.asarray(weights, dtype=float).copy()
    for k, instance in enumerate(instances):
        if learning_rate:
            predicted = _map_state(instance, weights, map_mode, seed + k, **options)
            network = instance.network
            weights = weights + learning_rate * (network.counts(instance.observed) - network.counts(predicted))
        yield weights


def perceptron_epoch(
    instances: Sequence[TrainingInstance],
    weights: Sequence[float],
    learning_rate: float = 0.1,
    map_mode: MapMode = "exact",
    seed: int = 0,
    **options,
) -> np.ndarray:
    """
    One pass of ``w += rate * (n(observed) - n(MAP))`` per instance.

    Returns:
        Average of the weights after each instance update

    Raises:
        InferenceCapError, UnsatisfiableError: From MAP inference
    """
    if not instances:
        raise ValueError("at least one training instance is required")
    if learning_rate == 0:
        return np.asarray(weights, dtype=float).copy()
    visited = list(_sweep(instances, weights, learning_rate, map_mode, seed, **options))
    return np.mean(visited, axis=0)


def train_perceptron(
    instances: Sequence[TrainingInstance],
    weights: Optional[Sequence[float]] = None,
    epochs: int = 10,
    learning_rate: float = 0.1,
    map_mode: MapMode = "exact",
    seed: int = 0,
    progress: bool = False,
    **options,
) -> np.ndarray:
    """
    Multi-epoch perceptron returning the average of every intermediate weight
    vector across all epochs.
    """
    initial, _ = stack_weights(instances)
    current = initial if weights is None else np.asarray(weights, dtype=float)
    if learning_rate == 0 or epochs == 0:
        return current.copy()
    total = np.zeros_like(current)
    visits = 0
    for epoch in tqdm(range(epochs), desc="perceptron", disable=not progress):
        mistakes = 0
        for updated in _sweep(instances, current, learning_rate, map_mode, seed + epoch * len(instances), **options):
            mistakes += int(not np.array_equal(updated, current))
            current = updated
            total += current
            visits += 1
        logger.debug("perceptron epoch %d: %d update(s)", epoch, mistakes)
        if not mistakes:
            break
    logger.info("learned %d weight(s) by perceptron", len(current))
    return total / visits
