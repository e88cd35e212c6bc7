"""
MAP inference as weighted MaxSAT.

Key Functions:
    - map_exact: depth-first branch and bound per connected component
    - map_localsearch: MaxWalkSAT with restarts
    - walksat: satisfying assignment of a clause set (all clauses required)
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import InferenceCapError, UnsatisfiableError
from src.inference.world import ClauseIndex, WorldState, maxsat_costs
from src.models.dataclasses import MapAssignment
from src.network.network import GroundNetwork

logger = logging.getLogger(__name__)

MAP_CAP = 24
TOLERANCE = 1e-9


def _branch_and_bound(network: GroundNetwork) -> Tuple[np.ndarray, float]:
    n = network.atom_count
    weights = network.clause_weights
    hard = network.hard_mask
    gain = np.maximum(weights, 0.0)
    length = np.asarray([len(c.literals) for c in network.clauses], dtype=np.int64)
    index = ClauseIndex([c.literals for c in network.clauses], n, np.zeros(len(length)))
    true_count = np.zeros(len(length), dtype=np.int64)
    false_count = np.zeros(len(length), dtype=np.int64)
    assignment = np.zeros(n, dtype=bool)
    best = {"score": -np.inf, "state": None}

    def bound() -> float:
        satisfied = true_count > 0
        falsified = ~satisfied & (false_count == length)
        if np.any(falsified & hard):
            return -np.inf
        return float(weights[satisfied].sum() + gain[~satisfied & ~falsified].sum())

    def assign(atom: int, value: bool, step: int) -> None:
        clauses = index.occurrence_clause[atom]
        makes_true = index.occurrence_sign[atom] == value
        np.add.at(true_count, clauses[makes_true], step)
        np.add.at(false_count, clauses[~makes_true], step)

    def search(atom: int) -> None:
        upper = bound()
        if upper <= best["score"] + TOLERANCE:
            return
        if atom == n:
            best["score"], best["state"] = upper, assignment.copy()
            return
        # False first: among equal scores the lexicographically smallest world wins.
        for value in (False, True):
            assignment[atom] = value
            assign(atom, value, 1)
            search(atom + 1)
            assign(atom, value, -1)
        assignment[atom] = False

    search(0)
    if best["state"] is None:
        raise UnsatisfiableError(f"hard clauses of {network.name or 'network'} admit no world")
    return best["state"], best["score"]


def map_exact(network: GroundNetwork, cap: int = MAP_CAP) -> MapAssignment:
    """
    Most probable world by exhaustive branch and bound.

    Components are solved independently; ties are broken towards the
    lexicographically smallest assignment (False before True, atom order),
    so isolated atoms are False.

    Raises:
        InferenceCapError: A component has more than ``cap`` atoms
        UnsatisfiableError: The hard clauses admit no world
    """
    truth = np.zeros(network.atom_count, dtype=bool)
    for component in network.components():
        if not len(component.clauses):
            continue
        if component.size > cap:
            raise InferenceCapError(f"component of {component.size} atoms exceeds the MAP cap of {cap}")
        sub = network.subnetwork(component.atoms, component.clauses)
        state, _ = _branch_and_bound(sub)
        truth[component.atoms] = state
    world = WorldState.of(network, truth)
    logger.debug("exact MAP of %s: score %.4f", network.name or "network", world.score)
    return MapAssignment(network.atoms, truth, world.score, world.hard_ok, optimal=True)


def map_localsearch(
    network: GroundNetwork,
    flips: int = 1000,
    seed: int = 0,
    noise: float = 0.5,
    restarts: int = 10,
) -> MapAssignment:
    """
    MaxWalkSAT: minimise the weight of violated clauses plus a penalty per
    violated hard clause that outweighs every soft clause together.

    A clause is violated when it is hard and unsatisfied, has positive weight
    and is unsatisfied, or has negative weight and is satisfied.

    Args:
        network: Ground network
        flips: Flips per restart
        seed: Random seed
        noise: Probability of a random-walk move instead of a greedy one
        restarts: Independent random starting states

    Returns:
        Best hard-feasible state seen, or the least-violating one flagged
        ``best_effort``
    """
    rng = np.random.default_rng(seed)
    n = network.atom_count
    penalty = 1.0 + float(np.abs(network.clause_weights).sum())
    unsat_cost, sat_cost = maxsat_costs(network, penalty)
    index = ClauseIndex([c.literals for c in network.clauses], n, unsat_cost, sat_cost)
    best_state = np.zeros(n, dtype=bool)
    best_cost = np.inf
    for _ in range(max(restarts, 1)):
        index.reset(rng.random(n) < 0.5)
        cost = index.total_cost()
        if cost < best_cost - TOLERANCE:
            best_state, best_cost = index.state.copy(), cost
        for _ in range(flips):
            broken = index.broken()
            if not len(broken):
                break
            atom = index.walk_move(int(rng.choice(broken)), noise, rng)
            cost += index.delta(atom)
            index.flip(atom)
            if cost < best_cost - TOLERANCE:
                best_state, best_cost = index.state.copy(), cost
    world = WorldState.of(network, best_state)
    if not world.hard_ok:
        logger.warning("local search found no hard-feasible state for %s", network.name or "network")
    return MapAssignment(network.atoms, best_state, world.score, world.hard_ok, best_effort=not world.hard_ok)


def walksat(
    clauses: Sequence[Sequence[int]],
    n_atoms: int,
    rng: np.random.Generator,
    max_flips: int = 10000,
    noise: float = 0.5,
    initial: Optional[np.ndarray] = None,
) -> Optional[np.ndarray]:
    """
    Assignment satisfying every clause, or None when ``max_flips`` run out.

    Args:
        clauses: Signed 1-based literal tuples
        n_atoms: Number of atoms
        rng: Random generator
        max_flips: Flip budget
        noise: Random-walk probability
        initial: Starting state (uniformly random when omitted)
    """
    index = ClauseIndex(clauses, n_atoms, np.ones(len(clauses)))
    index.reset(rng.random(n_atoms) < 0.5 if initial is None else initial)
    for _ in range(max_flips):
        broken = index.broken()
        if not len(broken):
            return index.state.copy()
        index.flip(index.walk_move(int(rng.choice(broken)), noise, rng))
    return index.state.copy() if not len(index.broken()) else None
