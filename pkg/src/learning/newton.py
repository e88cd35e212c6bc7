"""
Diagonal Newton weight learning.

Each epoch moves the weights along ``-g / (Var[n] + damping)`` where ``g`` is
the negative-CLL gradient summed over instances. The step length starts at 1
and is halved until the negative CLL does not increase: measured exactly
under exact inference, estimated from the epoch's samples under MC-SAT.
"""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp
from tqdm import tqdm

from src.errors import LearningError
from src.learning.gradient import Expectation, Inference, batch_expectations, negative_cll
from src.learning.instances import TrainingInstance, stack_weights

logger = logging.getLogger(__name__)


def _sampled_change(moments: Sequence[Expectation], step: np.ndarray) -> float:
    """Importance estimate of the change in negative CLL after moving by ``step``."""
    change = 0.0
    for m in moments:
        log_ratio = m.sampled_counts @ step
        change += float(logsumexp(log_ratio) - np.log(len(log_ratio))) - float(step @ m.observed)
    return change


def diagonal_newton_epoch(
    instances: Sequence[TrainingInstance],
    weights: Sequence[float],
    damping: float = 1.0,
    inference: Inference = "exact",
    seed: int = 0,
    samples: int = 1000,
    backtracking_steps: int = 10,
    n_jobs: int = 1,
    **options,
) -> np.ndarray:
    """
    One diagonal Newton update over all instances.

    Args:
        instances: Training set
        weights: Current parameter values
        damping: Added to every curvature term
        inference: ``exact`` or ``mcsat`` moments
        seed: MC-SAT seed for this epoch
        samples: MC-SAT samples per instance
        backtracking_steps: Step halvings before giving up on the epoch
        n_jobs: Parallel instances

    Returns:
        Updated weights; the input weights when no tried step helps

    Raises:
        LearningError: Non-finite gradient, curvature or update
    """
    if not instances:
        raise ValueError("at least one training instance is required")
    weights = np.asarray(weights, dtype=float)
    moments = batch_expectations(instances, weights, inference, seed, samples, n_jobs, **options)
    gradient = sum(m.gradient for m in moments)
    curvature = sum(m.variance for m in moments)
    direction = -gradient / (curvature + damping)
    if not (np.all(np.isfinite(gradient)) and np.all(np.isfinite(direction))):
        raise LearningError(f"non-finite update: gradient {gradient}, curvature {curvature}")
    if not np.any(direction):
        return weights

    if inference == "exact":
        current = sum(m.log_partition - float(weights @ m.observed) for m in moments)
    alpha = 1.0
    for _ in range(backtracking_steps + 1):
        step = alpha * direction
        if inference == "exact":
            change = negative_cll(instances, weights + step, **options) - current
        else:
            change = _sampled_change(moments, step)
        if np.isfinite(change) and change <= 0.0:
            logger.debug("newton step %.4g accepted, loss change %.6g", alpha, change)
            return weights + step
        alpha /= 2
    logger.debug("no improving step after %d halvings", backtracking_steps)
    return weights


def train_diagonal_newton(
    instances: Sequence[TrainingInstance],
    weights: Optional[Sequence[float]] = None,
    epochs: int = 20,
    damping: float = 1.0,
    inference: Inference = "exact",
    seed: int = 0,
    samples: int = 1000,
    backtracking_steps: int = 10,
    n_jobs: int = 1,
    progress: bool = False,
    **options,
) -> np.ndarray:
    """
    Run ``epochs`` diagonal Newton updates starting from ``weights`` (the
    networks' current weights when omitted). Stops early once an epoch leaves
    the weights unchanged.
    """
    initial, parameters = stack_weights(instances)
    weights = initial if weights is None else np.asarray(weights, dtype=float)
    for epoch in tqdm(range(epochs), desc="diagonal newton", disable=not progress):
        updated = diagonal_newton_epoch(
            instances,
            weights,
            damping,
            inference,
            seed + epoch * len(instances),
            samples,
            backtracking_steps,
            n_jobs,
            **options,
        )
        if np.array_equal(updated, weights):
            logger.info("diagonal newton converged after %d epoch(s)", epoch)
            break
        weights = updated
        logger.debug("epoch %d weights %s", epoch, dict(zip(parameters, np.round(weights, 4))))
    logger.info("learned %d weight(s) by diagonal newton", len(weights))
    return weights
