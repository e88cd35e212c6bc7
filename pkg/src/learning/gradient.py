"""
Conditional log-likelihood of annotated query atoms and its derivatives.

For weights ``w`` and parameter counts ``n``, the negative CLL of one
instance is ``log Z(w) - w . n(observed)`` and its gradient is
``E_w[n] - n(observed)``. Expectations come from exact inference or from
the average over MC-SAT samples; the same samples give ``Var_w[n]``.
"""

import logging
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.inference.exact import exact_moments
from src.inference.mcsat import mcsat_samples
from src.learning.instances import TrainingInstance

logger = logging.getLogger(__name__)

Inference = Literal["exact", "mcsat"]


@dataclass(frozen=True)
class Expectation:
    """
    Attributes:
        expected: E_w[n] per parameter
        variance: Var_w[n] per parameter
        observed: n(observed) per parameter
        log_partition: log Z (exact inference only)
        sampled_counts: Per-sample counts (MC-SAT only), one row per sample
    """

    expected: np.ndarray
    variance: np.ndarray
    observed: np.ndarray
    log_partition: Optional[float] = None
    sampled_counts: Optional[np.ndarray] = None

    @property
    def gradient(self) -> np.ndarray:
        return self.expected - self.observed


def expectations(
    instance: TrainingInstance,
    weights: Sequence[float],
    inference: Inference = "exact",
    seed: int = 0,
    samples: int = 1000,
    **options,
) -> Expectation:
    """
    Count moments of one instance under ``weights``.

    Args:
        instance: Annotated network
        weights: Parameter values
        inference: ``exact`` or ``mcsat``
        seed: MC-SAT seed
        samples: MC-SAT samples
        options: Passed to the inference procedure
    """
    network = instance.network.with_weights(weights)
    observed = network.counts(instance.observed)
    if inference == "exact":
        moments = exact_moments(network, **options)
        return Expectation(moments.expected_counts, moments.count_variance, observed, moments.log_partition)
    if inference != "mcsat":
        raise ValueError(f"unknown inference {inference!r}")
    drawn = mcsat_samples(network, samples=samples, seed=seed, **options)
    counts = np.asarray((network.features.T @ network.satisfied(drawn).T.astype(float)).T)
    return Expectation(counts.mean(axis=0), counts.var(axis=0), observed, sampled_counts=counts)


def batch_expectations(
    instances: Sequence[TrainingInstance],
    weights: Sequence[float],
    inference: Inference = "exact",
    seed: int = 0,
    samples: int = 1000,
    n_jobs: int = 1,
    **options,
):
    """Per-instance expectations; instance ``k`` uses seed ``seed + k``."""
    return Parallel(n_jobs=n_jobs)(
        delayed(expectations)(instance, weights, inference, seed + k, samples, **options)
        for k, instance in enumerate(instances)
    )


def cll_gradient(
    instance: TrainingInstance,
    weights: Sequence[float],
    inference: Inference = "exact",
    seed: int = 0,
    samples: int = 1000,
    **options,
) -> np.ndarray:
    """
    Gradient of the negative CLL: E_w[n] - n(observed).

    Example:
        >>> cll_gradient(single_atom_instance, [0.0])
        array([-0.5])
    """
    return expectations(instance, weights, inference, seed, samples, **options).gradient


def negative_cll(instances: Sequence[TrainingInstance], weights: Sequence[float], **options) -> float:
    """Exact negative CLL summed over instances."""
    weights = np.asarray(weights, dtype=float)
    total = 0.0
    for instance in instances:
        network = instance.network.with_weights(weights)
        log_z = exact_moments(network, **options).log_partition
        total += log_z - float(weights @ network.counts(instance.observed))
    return total
