"""
Exact inference by bucket elimination over log-space factors.

Used for connected components too large to enumerate but with small induced
width, such as the per-fluent chains produced by inertia rules. A forward
pass sums variables out in min-degree order and yields the log-partition
function; a backward pass sends messages down the bucket tree so every
bucket ends with its exact marginal belief.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from src.errors import InferenceCapError, UnsatisfiableError
from src.network.network import GroundNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Factor:
    """Log-space table over binary variables; axis ``i`` is ``variables[i]`` (sorted)."""

    variables: Tuple[int, ...]
    table: np.ndarray

    @classmethod
    def constant(cls, value: float = 0.0) -> "Factor":
        return cls((), np.asarray(value, dtype=float))

    def expanded(self, variables: Tuple[int, ...]) -> np.ndarray:
        shape = [2 if v in self.variables else 1 for v in variables]
        return self.table.reshape(shape)

    def sum_out(self, variable: int) -> "Factor":
        axis = self.variables.index(variable)
        with np.errstate(divide="ignore", invalid="ignore"):
            table = logsumexp(self.table, axis=axis)
        return Factor(tuple(v for v in self.variables if v != variable), np.asarray(table, dtype=float))

    def restrict_to(self, keep: Sequence[int]) -> "Factor":
        axes = tuple(i for i, v in enumerate(self.variables) if v not in set(keep))
        if not axes:
            return self
        with np.errstate(divide="ignore", invalid="ignore"):
            table = logsumexp(self.table, axis=axes)
        return Factor(tuple(v for v in self.variables if v in set(keep)), np.asarray(table, dtype=float))


def product(factors: Sequence[Factor]) -> Factor:
    variables = tuple(sorted({v for f in factors for v in f.variables}))
    table = np.zeros((2,) * len(variables))
    for factor in factors:
        table = table + factor.expanded(variables)
    return Factor(variables, table)


def clause_factor(literals: Sequence[int], weight: float, hard: bool) -> Factor:
    """Factor of one clause over 0-based atoms: ``weight`` (or 0 if hard) when satisfied, 0 (or -inf) otherwise."""
    variables = tuple(sorted({abs(l) - 1 for l in literals}))
    satisfied = _satisfied_mask(literals, variables)
    if hard:
        table = np.where(satisfied, 0.0, -np.inf)
    else:
        table = np.where(satisfied, float(weight), 0.0)
    return Factor(variables, table)


def min_degree_order(n_atoms: int, scopes: Sequence[Tuple[int, ...]]) -> List[int]:
    neighbours: Dict[int, set] = {v: set() for v in range(n_atoms)}
    for scope in scopes:
        for v in scope:
            neighbours[v].update(u for u in scope if u != v)
    order = []
    while neighbours:
        v = min(neighbours, key=lambda u: (len(neighbours[u]), u))
        adjacent = neighbours.pop(v)
        for u in adjacent:
            neighbours[u].discard(v)
            neighbours[u].update(adjacent - {u})
        order.append(v)
    return order


@dataclass(frozen=True)
class EliminationResult:
    log_partition: float
    marginals: np.ndarray
    clause_probabilities: np.ndarray


def eliminate(network: GroundNetwork, max_width: int = 20) -> EliminationResult:
    """
    Exact log-partition, atom marginals and clause satisfaction probabilities.

    Args:
        network: Network (usually one connected component)
        max_width: Largest bucket scope allowed

    Raises:
        InferenceCapError: A bucket exceeds ``max_width`` variables
        UnsatisfiableError: The hard clauses admit no world
    """
    n = network.atom_count
    weights = network.clause_weights
    factors = [clause_factor(c.literals, w, c.hard) for c, w in zip(network.clauses, weights)]
    order = min_degree_order(n, [f.variables for f in factors])
    position = {v: i for i, v in enumerate(order)}

    def bucket_of(variables: Tuple[int, ...]) -> int:
        return min(variables, key=position.__getitem__)

    originals: Dict[int, List[int]] = {v: [] for v in order}
    for k, factor in enumerate(factors):
        originals[bucket_of(factor.variables)].append(k)
    incoming: Dict[int, List[Tuple[int, Factor]]] = {v: [] for v in order}
    log_partition = 0.0

    for v in order:
        combined = product([factors[k] for k in originals[v]] + [m for _, m in incoming[v]] + [Factor((v,), np.zeros(2))])
        if len(combined.variables) > max_width:
            raise InferenceCapError(f"bucket of width {len(combined.variables)} exceeds the cap of {max_width}")
        message = combined.sum_out(v)
        if message.variables:
            incoming[bucket_of(message.variables)].append((v, message))
        else:
            log_partition += float(message.table)

    if not np.isfinite(log_partition):
        raise UnsatisfiableError(f"hard clauses of {network.name or 'network'} admit no world")

    downward: Dict[int, Factor] = {}
    beliefs: Dict[int, Factor] = {}
    for v in reversed(order):
        own = [factors[k] for k in originals[v]] + [Factor((v,), np.zeros(2))]
        down = downward.get(v, Factor.constant())
        messages = incoming[v]
        belief = product(own + [m for _, m in messages] + [down])
        beliefs[v] = Factor(belief.variables, belief.table - log_partition)
        for child, message in messages:
            rest = product(own + [m for c, m in messages if c != child] + [down])
            downward[child] = rest.restrict_to(message.variables)

    marginals = np.empty(n)
    for v in range(n):
        marginal = beliefs[v].restrict_to((v,))
        marginals[v] = float(np.exp(marginal.table[1]))
    clause_probabilities = np.empty(len(factors))
    for k, factor in enumerate(factors):
        belief = beliefs[bucket_of(factor.variables)].restrict_to(factor.variables)
        mask = _satisfied_mask(network.clauses[k].literals, factor.variables)
        clause_probabilities[k] = float(np.exp(belief.table)[mask].sum())
    logger.debug("eliminated %d atoms, log Z = %.4f", n, log_partition)
    return EliminationResult(log_partition, np.clip(marginals, 0.0, 1.0), np.clip(clause_probabilities, 0.0, 1.0))


def _satisfied_mask(literals: Sequence[int], variables: Tuple[int, ...]) -> np.ndarray:
    grid = np.indices((2,) * len(variables)).astype(bool)
    satisfied = np.zeros((2,) * len(variables), dtype=bool)
    for lit in literals:
        satisfied |= grid[variables.index(abs(lit) - 1)] == (lit > 0)
    return satisfied
