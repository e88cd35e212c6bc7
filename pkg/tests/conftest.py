import itertools

import numpy as np
import pytest
import scipy.sparse as sp

from src.importer import load_kb
from src.kb.parser import parse_kb, parse_narrative
from src.logic.formulas import Atom
from src.logic.terms import Const, Func
from src.network.network import GroundClause, GroundNetwork

INERTIA_KB = """
sort item = {a}.
sort time.
event start(item).
event stop(item).
fluent tracked(item).
evidence happens(event, time).
query holdsAt(fluent, time).
auxiliary initiatedAt(fluent, time).
auxiliary terminatedAt(fluent, time).
initiatedAt(tracked(X), T) :- happens(start(X), T).
terminatedAt(tracked(X), T) :- happens(stop(X), T).
"""


def holds(fluent: str, time: int, *args: str) -> Atom:
    return Atom("holdsAt", (Func(fluent, tuple(Const(a) for a in args)), Const(str(time))))


def random_network(rng: np.random.Generator, n_atoms: int, n_clauses: int, hard_share: float = 0.0) -> GroundNetwork:
    """Random clauses of 1-3 literals, each with its own parameter."""
    atoms = tuple(holds("f", t, "a") for t in range(n_atoms))
    clauses, parameters, rows, cols = [], [], [], []
    for _ in range(n_clauses):
        size = int(rng.integers(1, min(3, n_atoms) + 1))
        chosen = rng.choice(n_atoms, size=size, replace=False) + 1
        literals = tuple(sorted((int(a) if rng.random() < 0.5 else -int(a) for a in chosen), key=abs))
        hard = rng.random() < hard_share
        if not hard:
            rows.append(len(clauses))
            cols.append(len(parameters))
            parameters.append(f"w{len(parameters)}")
        clauses.append(GroundClause(literals, hard, ("random",)))
    features = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(clauses), len(parameters)))
    weights = rng.normal(0.0, 1.5, size=len(parameters))
    return GroundNetwork(atoms, tuple(clauses), tuple(parameters), features, weights, name="random")


def brute_force(network: GroundNetwork):
    """(states, log weights) of every hard-feasible world."""
    states = np.asarray(list(itertools.product([False, True], repeat=network.atom_count)), dtype=bool)
    satisfied = network.satisfied(states)
    feasible = np.all(satisfied[:, network.hard_mask], axis=1)
    scores = satisfied.astype(float) @ network.clause_weights
    return states[feasible], scores[feasible]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def meeting_kb():
    return load_kb("meeting_moving.mlnec")


@pytest.fixture(scope="session")
def inertia_kb():
    return parse_kb(INERTIA_KB)


@pytest.fixture
def narrative_of():
    def build(kb, text: str, name: str = "test"):
        return parse_narrative(text, kb.signature, name=name)

    return build
