"""
Exact marginals, log-partition and clause-count moments.

The network is split into connected components. A component of at most
``cap`` atoms is enumerated world by world in chunks (atom ``i`` is bit ``i``
of the world number); larger components are handled by bucket elimination
when ``method="auto"``. Atoms outside every clause get probability 0.5.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.special import logsumexp

from src.errors import InferenceCapError, UnsatisfiableError
from src.inference.elimination import eliminate
from src.models.dataclasses import MarginalTable
from src.network.network import GroundNetwork

logger = logging.getLogger(__name__)

ENUMERATION_CAP = 20
CHUNK_BITS = 16
METHODS = ("auto", "enumerate", "eliminate")
CURVATURE_STEP = 1e-3


@dataclass(frozen=True)
class Moments:
    """
    Exact quantities of the conditional distribution.

    Attributes:
        log_partition: log Z over hard-feasible worlds
        marginals: P(atom = True) per atom
        expected_counts: E[n] per parameter
        count_variance: Var[n] per parameter
    """

    log_partition: float
    marginals: np.ndarray
    expected_counts: np.ndarray
    count_variance: np.ndarray


def worlds(n_atoms: int, start: int, stop: int) -> np.ndarray:
    """Boolean states of worlds ``start..stop-1``, one row per world."""
    ids = np.arange(start, stop, dtype=np.int64)
    return ((ids[:, None] >> np.arange(n_atoms, dtype=np.int64)) & 1).astype(bool)


def _enumerate(network: GroundNetwork) -> Moments:
    n = network.atom_count
    weights = network.clause_weights
    hard = network.hard_mask
    features = network.features.T.tocsr()
    index, sign, mask = network.literal_layout
    chunk = 1 << CHUNK_BITS
    parts: List[Tuple[float, np.ndarray, np.ndarray, np.ndarray]] = []
    for start in range(0, 1 << n, chunk):
        states = worlds(n, start, min(start + chunk, 1 << n))
        satisfied = np.any((states[:, index] == sign) & mask, axis=-1)
        feasible = np.all(satisfied[:, hard], axis=1)
        log_weight = np.where(feasible, satisfied.astype(float) @ weights, -np.inf)
        if not feasible.any():
            continue
        log_z = float(logsumexp(log_weight))
        probability = np.exp(log_weight - log_z)
        counts = np.asarray((features @ satisfied.T.astype(float)).T)
        parts.append((log_z, probability @ states, probability @ counts, probability @ counts**2))
    if not parts:
        raise UnsatisfiableError(f"hard clauses of {network.name or 'network'} admit no world")
    log_z = float(logsumexp([p[0] for p in parts]))
    share = np.exp(np.asarray([p[0] for p in parts]) - log_z)
    marginals = sum(s * p[1] for s, p in zip(share, parts))
    first = sum(s * p[2] for s, p in zip(share, parts))
    second = sum(s * p[3] for s, p in zip(share, parts))
    return Moments(log_z, np.clip(marginals, 0.0, 1.0), first, np.maximum(second - first**2, 0.0))


def _eliminate(network: GroundNetwork, max_width: int) -> Moments:
    result = eliminate(network, max_width)
    expected = np.asarray(network.features.T @ result.clause_probabilities, dtype=float).reshape(-1)
    # Var[n_j] is the second derivative of log Z along weight j.
    variance = np.zeros(len(network.parameters))
    used = np.flatnonzero(np.asarray(abs(network.features).sum(axis=0)).reshape(-1) > 0)
    for j in used:
        step = np.zeros(len(network.parameters))
        step[j] = CURVATURE_STEP
        up = eliminate(network.with_weights(network.weights + step), max_width).log_partition
        down = eliminate(network.with_weights(network.weights - step), max_width).log_partition
        variance[j] = max((up - 2 * result.log_partition + down) / CURVATURE_STEP**2, 0.0)
    return Moments(result.log_partition, result.marginals, expected, variance)


def exact_moments(
    network: GroundNetwork, cap: int = ENUMERATION_CAP, method: str = "auto", max_width: int = 20
) -> Moments:
    """
    Exact marginals and moments of a ground network, component by component.

    Args:
        network: Ground network
        cap: Largest component enumerated world by world
        method: ``auto`` (enumerate up to the cap, eliminate beyond),
            ``enumerate`` or ``eliminate``
        max_width: Largest bucket scope for elimination

    Raises:
        InferenceCapError: Component beyond the cap with ``method="enumerate"``,
            or an elimination bucket beyond ``max_width``
        UnsatisfiableError: The hard clauses admit no world
    """
    if method not in METHODS:
        raise ValueError(f"unknown exact method {method!r}, expected one of {METHODS}")
    n_params = len(network.parameters)
    marginals = np.full(network.atom_count, 0.5)
    expected = np.zeros(n_params)
    variance = np.zeros(n_params)
    log_z = 0.0
    for component in network.components():
        if not len(component.clauses):
            log_z += component.size * np.log(2.0)
            continue
        sub = network.subnetwork(component.atoms, component.clauses)
        if method == "eliminate" or (method == "auto" and component.size > cap):
            moments = _eliminate(sub, max_width)
        elif component.size > cap:
            raise InferenceCapError(f"component of {component.size} atoms exceeds the enumeration cap of {cap}")
        else:
            moments = _enumerate(sub)
        marginals[component.atoms] = moments.marginals
        expected += moments.expected_counts
        variance += moments.count_variance
        log_z += moments.log_partition
    logger.debug("exact inference on %s: log Z = %.4f", network.name or "network", log_z)
    return Moments(log_z, marginals, expected, variance)


def exact_marginals(
    network: GroundNetwork, cap: int = ENUMERATION_CAP, method: str = "auto", max_width: int = 20
) -> MarginalTable:
    """
    P(atom = True | evidence) for every query atom.

    Example:
        >>> exact_marginals(network).probability(holds_at_meeting_5)
        0.68
    """
    moments = exact_moments(network, cap, method, max_width)
    return MarginalTable(network.atoms, moments.marginals, method="exact")


def log_partition(network: GroundNetwork, cap: int = ENUMERATION_CAP, method: str = "auto", max_width: int = 20) -> float:
    return exact_moments(network, cap, method, max_width).log_partition
