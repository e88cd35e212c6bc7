"""
Grounding of a compiled program against one narrative.

Every compiled formula is turned into clauses, every clause is grounded over
the sort domains with the time sort bound to ``0..horizon``, and evidence
atoms are replaced by their closed-world value: clauses made true by the
evidence disappear and false evidence literals are deleted. What remains
mentions holdsAt atoms only.
"""

import logging
from collections import defaultdict
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sp
from tqdm import tqdm

from src.compiler.completion import CompiledKB
from src.errors import EvidenceContradictionError
from src.logic.cnf import to_cnf
from src.logic.formulas import HARD, Atom
from src.logic.substitution import groundings
from src.logic.terms import HOLDS_AT, Const
from src.models.dataclasses import Narrative, NetworkStats
from src.network.network import GroundClause, GroundNetwork

logger = logging.getLogger(__name__)

NARRATIVE_SOURCE = "narrative"


class _ClauseStore:
    """Deduplicating accumulator of simplified ground clauses."""

    def __init__(self, parameters: Tuple[str, ...]):
        self.parameters = {name: j for j, name in enumerate(parameters)}
        self.hard: Dict[Tuple[int, ...], bool] = {}
        self.coefficients: Dict[Tuple[int, ...], Dict[int, float]] = {}
        self.sources: Dict[Tuple[int, ...], List[str]] = {}

    def add(self, literals: Tuple[int, ...], hard: bool, source: str, parameter: str = "", share: float = 0.0):
        self.hard[literals] = self.hard.get(literals, False) or hard
        coefficients = self.coefficients.setdefault(literals, {})
        if not hard and parameter:
            j = self.parameters[parameter]
            coefficients[j] = coefficients.get(j, 0.0) + share
        sources = self.sources.setdefault(literals, [])
        if source not in sources:
            sources.append(source)

    def build(self) -> Tuple[Tuple[GroundClause, ...], sp.csr_matrix]:
        clauses, rows, cols, data = [], [], [], []
        for row, (literals, hard) in enumerate(self.hard.items()):
            clauses.append(GroundClause(literals, hard, tuple(self.sources[literals])))
            if hard:
                continue
            for j, value in sorted(self.coefficients[literals].items()):
                rows.append(row)
                cols.append(j)
                data.append(value)
        features = sp.csr_matrix((data, (rows, cols)), shape=(len(clauses), len(self.parameters)))
        return tuple(clauses), features


def query_atoms(ckb: CompiledKB, horizon: int) -> Tuple[Atom, ...]:
    """Every holdsAt(f, t) over the fluent domain and 0..horizon, sorted by fluent then time."""
    signature = ckb.signature.with_horizon(horizon)
    fluents = sorted(signature.domain(signature.fluent_sort), key=str)
    return tuple(Atom(HOLDS_AT, (f, Const(str(t)))) for f in fluents for t in range(horizon + 1))


def ground(ckb: CompiledKB, narrative: Narrative, progress: bool = False) -> GroundNetwork:
    """
    Build the evidence-conditioned ground network of a compiled program.

    Args:
        ckb: Weighted compiled program
        narrative: Evidence; holdsAt entries become hard unit clauses
        progress: Show a progress bar over compiled formulas

    Returns:
        GroundNetwork over all holdsAt atoms of the narrative's horizon

    Raises:
        EvidenceContradictionError: The evidence falsifies a hard ground clause
    """
    signature = ckb.signature.with_horizon(narrative.horizon)
    atoms = query_atoms(ckb, narrative.horizon)
    number = {atom: i + 1 for i, atom in enumerate(atoms)}
    parameters = ckb.parameters
    store = _ClauseStore(parameters)
    raw_counts: Dict[str, int] = defaultdict(int)

    for compiled in tqdm(ckb.formulas, desc="grounding", disable=not progress):
        if compiled.weight is None:
            raise ValueError(f"{compiled.name} has no weight; apply an inertia policy first")
        hard = compiled.weight == HARD
        clauses = to_cnf(compiled.formula, compiled.weight, compiled.name)
        share = 1.0 / len(clauses) if clauses else 0.0
        raw_counts.setdefault(compiled.name, 0)
        for clause in clauses:
            for grounded in groundings(clause, signature):
                raw_counts[compiled.name] += 1
                literals = set()
                for literal in grounded.literals:
                    if literal.atom.predicate == HOLDS_AT:
                        literals.add(number[literal.atom] if literal.positive else -number[literal.atom])
                    elif narrative.value(literal.atom) == literal.positive:
                        break
                else:
                    if any(-lit in literals for lit in literals):
                        continue
                    if not literals:
                        if hard:
                            raise EvidenceContradictionError(str(grounded), compiled.name)
                        continue
                    key = tuple(sorted(literals, key=lambda lit: (abs(lit), lit < 0)))
                    store.add(key, hard, compiled.name, compiled.parameter, share)

    for atom, value in narrative.clamped.items():
        if atom not in number:
            raise EvidenceContradictionError(str(atom), NARRATIVE_SOURCE)
        store.add((number[atom] if value else -number[atom],), True, NARRATIVE_SOURCE)

    clauses, features = store.build()
    network = GroundNetwork(
        atoms=atoms,
        clauses=clauses,
        parameters=parameters,
        features=features,
        weights=ckb.weights,
        raw_counts=dict(raw_counts),
        name=narrative.name,
    )
    logger.info(
        "grounded %s: %d atoms, %d clauses (%d hard) from %d raw groundings",
        narrative.name or "narrative",
        network.atom_count,
        network.clause_count,
        int(network.hard_mask.sum()),
        sum(raw_counts.values()),
    )
    return network


def network_stats(network: GroundNetwork) -> NetworkStats:
    """Atom and clause counts; each clause is attributed to its first source formula."""
    per_formula: Dict[str, int] = defaultdict(int)
    for clause in network.clauses:
        per_formula[clause.source] += 1
    return NetworkStats(
        atom_count=network.atom_count,
        clause_count=network.clause_count,
        hard_count=int(np.count_nonzero(network.hard_mask)),
        per_formula=dict(per_formula),
        raw_per_formula=dict(network.raw_counts),
    )
