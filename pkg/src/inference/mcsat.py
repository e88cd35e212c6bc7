"""
MC-SAT marginal inference.

Each step keeps every hard clause, keeps each satisfied positive-weight clause
with probability ``1 - exp(-w)`` and each unsatisfied negative-weight clause
(as "must stay false") with probability ``1 - exp(w)``, then moves to a
near-uniform state satisfying the kept set. Small components draw that state
exactly from the enumerated worlds; larger ones use SampleSAT, a mix of
WalkSAT and simulated-annealing moves. One chain runs per connected component
with its own seed spawned from the run seed.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from src.errors import UnsatisfiableError
from src.inference.exact import worlds
from src.inference.maxsat import walksat
from src.inference.world import ClauseIndex
from src.models.dataclasses import MarginalTable
from src.network.network import GroundNetwork

logger = logging.getLogger(__name__)

UNIFORM_CAP = 16
TEMPERATURE = 0.5


def _samplesat(
    constraints: Sequence[Sequence[int]],
    state: np.ndarray,
    rng: np.random.Generator,
    walk_ratio: float,
    flips: int,
) -> np.ndarray:
    """
    Near-uniform state satisfying ``constraints``; ``state`` must satisfy them.

    A SampleSAT walk from a uniformly random state looks for a solution. The
    solution found (or ``state`` when the walk runs out of flips) is then
    moved by ``flips`` proposals flipping one or two random atoms, each
    accepted only when every constraint stays satisfied, which leaves the
    uniform distribution over solutions invariant. Atoms outside every
    constraint are fair coin flips.
    """
    n = len(state)
    touched = np.zeros(n, dtype=bool)
    for clause in constraints:
        touched[[abs(lit) - 1 for lit in clause]] = True
    if not len(constraints):
        return rng.random(n) < 0.5

    index = ClauseIndex(constraints, n, np.ones(len(constraints)))
    index.reset(rng.random(n) < 0.5)
    unsatisfied = index.total_cost()
    for _ in range(flips):
        if unsatisfied == 0:
            break
        if rng.random() < walk_ratio:
            atom = index.walk_move(int(rng.choice(index.broken())), 0.5, rng)
        else:
            atom = int(rng.integers(n))
            delta = index.delta(atom)
            if delta > 0 and rng.random() >= np.exp(-delta / TEMPERATURE):
                continue
        unsatisfied += index.delta(atom)
        index.flip(atom)
    if unsatisfied != 0:
        index.reset(state)

    candidates = np.flatnonzero(touched)
    pairs = rng.random(flips) < 0.5
    firsts = rng.choice(candidates, size=flips)
    seconds = rng.choice(candidates, size=flips)
    for first, second, pair in zip(firsts, seconds, pairs):
        first, second = int(first), int(second)
        change = index.delta(first)
        index.flip(first)
        if pair and second != first:
            change += index.delta(second)
            if change == 0:
                index.flip(second)
        if change != 0:
            index.flip(first)
    result = index.state.copy()
    free = ~touched
    result[free] = rng.random(int(free.sum())) < 0.5
    return result


def _chain(
    network: GroundNetwork,
    samples: int,
    burn_in: int,
    seed: np.random.SeedSequence,
    walk_ratio: float,
    flips_factor: int,
    uniform_cap: int,
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    n = network.atom_count
    weights = network.clause_weights
    hard = network.hard_mask
    literals = [c.literals for c in network.clauses]
    hard_clauses = [literals[k] for k in np.flatnonzero(hard)]
    if hard_clauses:
        state = walksat(hard_clauses, n, rng, max_flips=max(10000, 100 * n))
        if state is None:
            raise UnsatisfiableError(f"no state satisfies the hard clauses of {network.name or 'network'}")
    else:
        state = np.zeros(n, dtype=bool)

    keep_satisfied = -np.expm1(-np.maximum(weights, 0.0))
    keep_violated = -np.expm1(np.minimum(weights, 0.0))
    all_states = worlds(n, 0, 1 << n) if n <= uniform_cap else None
    table = network.satisfied(all_states) if all_states is not None else None

    drawn = np.empty((samples, n), dtype=bool)
    for step in range(burn_in + samples):
        satisfied = network.satisfied(state)
        draw = rng.random(len(weights))
        must = hard | (satisfied & (weights > 0) & (draw < keep_satisfied))
        forbid = ~hard & ~satisfied & (weights < 0) & (draw < keep_violated)
        if table is not None:
            feasible = np.all(table[:, must], axis=1) & ~np.any(table[:, forbid], axis=1)
            state = all_states[rng.choice(np.flatnonzero(feasible))]
        else:
            constraints: List[Sequence[int]] = [literals[k] for k in np.flatnonzero(must)]
            for k in np.flatnonzero(forbid):
                constraints.extend((-lit,) for lit in literals[k])
            state = _samplesat(constraints, state, rng, walk_ratio, flips_factor * n)
        if step >= burn_in:
            drawn[step - burn_in] = state
    return drawn


def mcsat_samples(
    network: GroundNetwork,
    samples: int = 1000,
    seed: int = 0,
    burn_in: int = 100,
    walk_ratio: float = 0.5,
    flips_factor: int = 10,
    uniform_cap: int = UNIFORM_CAP,
    n_jobs: int = 1,
    progress: bool = False,
) -> np.ndarray:
    """
    Retained MC-SAT states, one row per sample.

    Atoms outside every clause are drawn uniformly.

    Args:
        network: Ground network
        samples: Retained samples per chain
        seed: Run seed; chains get independent child seeds
        burn_in: Discarded initial steps
        walk_ratio: Share of WalkSAT moves inside SampleSAT
        flips_factor: SampleSAT flips per atom per step
        uniform_cap: Components up to this size are sampled exactly
        n_jobs: Parallel chains (joblib)
        progress: Show a progress bar over components

    Raises:
        UnsatisfiableError: The initial SAT search fails
    """
    components = network.components()
    seeds = np.random.SeedSequence(seed).spawn(len(components) + 1)
    drawn = np.empty((samples, network.atom_count), dtype=bool)
    coupled = [(c, s) for c, s in zip(components, seeds) if len(c.clauses)]
    isolated = [c for c in components if not len(c.clauses)]
    if isolated:
        atoms = np.concatenate([c.atoms for c in isolated])
        drawn[:, atoms] = np.random.default_rng(seeds[-1]).random((samples, len(atoms))) < 0.5
    chains = Parallel(n_jobs=n_jobs)(
        delayed(_chain)(
            network.subnetwork(component.atoms, component.clauses),
            samples,
            burn_in,
            child,
            walk_ratio,
            flips_factor,
            uniform_cap,
        )
        for component, child in tqdm(coupled, desc="mc-sat", disable=not progress)
    )
    for (component, _), chain in zip(coupled, chains):
        drawn[:, component.atoms] = chain
    logger.debug("mc-sat on %s: %d chain(s), %d samples", network.name or "network", len(coupled), samples)
    return drawn


def mcsat_marginals(
    network: GroundNetwork,
    samples: int = 1000,
    seed: int = 0,
    burn_in: int = 100,
    walk_ratio: float = 0.5,
    flips_factor: int = 10,
    uniform_cap: int = UNIFORM_CAP,
    n_jobs: int = 1,
    progress: bool = False,
    drawn: Optional[np.ndarray] = None,
) -> MarginalTable:
    """
    Per-atom frequency of True over the retained MC-SAT samples.

    Atoms outside every clause are reported at exactly 0.5. Pass ``drawn`` to
    reuse samples from :func:`mcsat_samples`.
    """
    if drawn is None:
        drawn = mcsat_samples(
            network, samples, seed, burn_in, walk_ratio, flips_factor, uniform_cap, n_jobs, progress
        )
    probabilities = drawn.mean(axis=0) if len(drawn) else np.full(network.atom_count, 0.5)
    for component in network.components():
        if not len(component.clauses):
            probabilities[component.atoms] = 0.5
    return MarginalTable(network.atoms, probabilities, samples=len(drawn), seed=seed, method="mcsat")
