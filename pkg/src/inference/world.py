"""World states and the incremental clause bookkeeping shared by the local-search procedures."""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.network.network import GroundNetwork


@dataclass(frozen=True)
class WorldState:
    """
    Attributes:
        assignment: Truth value per query atom
        score: Summed weight of satisfied soft clauses
        hard_ok: Whether every hard clause is satisfied
    """

    assignment: np.ndarray
    score: float
    hard_ok: bool

    @classmethod
    def of(cls, network: GroundNetwork, assignment) -> "WorldState":
        assignment = np.asarray(assignment, dtype=bool)
        satisfied = network.satisfied(assignment)
        score = float(network.clause_weights @ satisfied)
        return cls(assignment, score, bool(np.all(satisfied[network.hard_mask])))


class ClauseIndex:
    """
    Clause satisfaction counters maintained under single-atom flips.

    Each clause has a cost when unsatisfied and a cost when satisfied; local
    search minimises the total. Literals are signed 1-based atom numbers.

    Args:
        clauses: Literal tuples
        n_atoms: Number of atoms
        unsat_cost: Cost of each clause while unsatisfied
        sat_cost: Cost of each clause while satisfied (zeros by default)
    """

    def __init__(
        self,
        clauses: Sequence[Sequence[int]],
        n_atoms: int,
        unsat_cost: np.ndarray,
        sat_cost: np.ndarray = None,
    ):
        self.clauses = [np.asarray(c, dtype=np.int64) for c in clauses]
        self.n_atoms = n_atoms
        self.unsat_cost = np.asarray(unsat_cost, dtype=float)
        self.sat_cost = np.zeros(len(self.clauses)) if sat_cost is None else np.asarray(sat_cost, dtype=float)
        occurrence_clause: List[List[int]] = [[] for _ in range(n_atoms)]
        occurrence_sign: List[List[bool]] = [[] for _ in range(n_atoms)]
        for k, clause in enumerate(self.clauses):
            for lit in clause:
                occurrence_clause[abs(lit) - 1].append(k)
                occurrence_sign[abs(lit) - 1].append(lit > 0)
        self.occurrence_clause = [np.asarray(o, dtype=np.int64) for o in occurrence_clause]
        self.occurrence_sign = [np.asarray(o, dtype=bool) for o in occurrence_sign]
        self.state = np.zeros(n_atoms, dtype=bool)
        self.true_count = np.zeros(len(self.clauses), dtype=np.int64)

    def reset(self, state: np.ndarray) -> None:
        self.state = np.asarray(state, dtype=bool).copy()
        self.true_count = np.asarray(
            [int(np.sum(self.state[np.abs(c) - 1] == (c > 0))) for c in self.clauses], dtype=np.int64
        )

    def costs(self) -> np.ndarray:
        return np.where(self.true_count > 0, self.sat_cost, self.unsat_cost)

    def total_cost(self) -> float:
        return float(self.costs().sum())

    def broken(self) -> np.ndarray:
        """Clauses currently contributing a positive cost"""
        return np.flatnonzero(self.costs() > 0)

    def delta(self, atom: int) -> float:
        """Change in total cost if the 0-based atom were flipped."""
        clauses = self.occurrence_clause[atom]
        if not len(clauses):
            return 0.0
        becomes_true = self.occurrence_sign[atom] != self.state[atom]
        before = self.true_count[clauses]
        after = before + np.where(becomes_true, 1, -1)
        old = np.where(before > 0, self.sat_cost[clauses], self.unsat_cost[clauses])
        new = np.where(after > 0, self.sat_cost[clauses], self.unsat_cost[clauses])
        return float(np.sum(new - old))

    def flip(self, atom: int) -> None:
        clauses = self.occurrence_clause[atom]
        becomes_true = self.occurrence_sign[atom] != self.state[atom]
        np.add.at(self.true_count, clauses, np.where(becomes_true, 1, -1))
        self.state[atom] = not self.state[atom]

    def walk_move(self, clause: int, noise: float, rng: np.random.Generator) -> int:
        """WalkSAT choice inside a broken clause: a random atom with probability ``noise``, else a least-cost flip."""
        atoms = np.abs(self.clauses[clause]) - 1
        if rng.random() < noise:
            return int(rng.choice(atoms))
        deltas = np.asarray([self.delta(int(a)) for a in atoms])
        return int(rng.choice(atoms[deltas == deltas.min()]))


def maxsat_costs(network: GroundNetwork, hard_penalty: float):
    """
    (unsat_cost, sat_cost) for weighted MaxSAT: a hard clause costs ``hard_penalty``
    while unsatisfied, a positive-weight clause its weight while unsatisfied and a
    negative-weight clause its absolute weight while satisfied.
    """
    weights = network.clause_weights
    hard = network.hard_mask
    unsat_cost = np.where(hard, hard_penalty, np.maximum(weights, 0.0))
    sat_cost = np.where(hard, 0.0, np.maximum(-weights, 0.0))
    return unsat_cost, sat_cost
