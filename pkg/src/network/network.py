"""
Evidence-conditioned ground Markov network over holdsAt atoms.

Atoms are numbered from 1 and clause literals are signed atom numbers, as in
DIMACS files: ``-3`` is the negation of the third atom. Clause weights are not
stored directly; each soft clause carries coefficients over the program's
learnable parameters (``1/k`` for one of the ``k`` clauses of a formula, summed
when groundings coincide), so

    clause_weights = features @ weights
    counts(y)      = features.T @ satisfied(y)

Hard clauses have all-zero feature rows.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
import pyparsing as pp
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from src.errors import KBSyntaxError
from src.kb import grammar
from src.logic.formulas import Atom

HARD_TOKEN = "hard"


@dataclass(frozen=True)
class GroundClause:
    """
    Attributes:
        literals: Signed 1-based atom numbers, sorted by atom then sign
        hard: Whether the clause is a hard constraint
        sources: Compiled formula names that produced the clause
    """

    literals: Tuple[int, ...]
    hard: bool = False
    sources: Tuple[str, ...] = ()

    @property
    def source(self) -> str:
        return self.sources[0] if self.sources else ""


@dataclass(frozen=True)
class Component:
    atoms: np.ndarray
    clauses: np.ndarray

    @property
    def size(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class GroundNetwork:
    """
    Attributes:
        atoms: Query atoms, atom ``i`` is literal ``i + 1``
        clauses: Simplified ground clauses
        parameters: Learnable weight names (columns of ``features``)
        features: Sparse clause-by-parameter coefficient matrix
        weights: Current value of every parameter
        raw_counts: Groundings per compiled formula before evidence simplification
        name: Narrative the network was grounded on
    """

    atoms: Tuple[Atom, ...]
    clauses: Tuple[GroundClause, ...]
    parameters: Tuple[str, ...] = ()
    features: sp.csr_matrix = None
    weights: np.ndarray = None
    raw_counts: Dict[str, int] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.features is None:
            object.__setattr__(self, "features", sp.csr_matrix((len(self.clauses), len(self.parameters))))
        if self.weights is None:
            object.__setattr__(self, "weights", np.zeros(len(self.parameters)))
        if self.features.shape != (len(self.clauses), len(self.parameters)):
            raise ValueError(f"feature matrix shape {self.features.shape} does not match the network")

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    @cached_property
    def hard_mask(self) -> np.ndarray:
        return np.fromiter((c.hard for c in self.clauses), dtype=bool, count=len(self.clauses))

    @cached_property
    def clause_weights(self) -> np.ndarray:
        """Weight of every clause; 0 for hard clauses"""
        return np.asarray(self.features @ self.weights, dtype=float).reshape(-1)

    def with_weights(self, weights: Sequence[float]) -> "GroundNetwork":
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(self.parameters),):
            raise ValueError(f"expected {len(self.parameters)} weight(s), got {weights.shape}")
        return replace(self, weights=weights)

    def atom_index(self) -> Dict[Atom, int]:
        return {atom: i for i, atom in enumerate(self.atoms)}

    @cached_property
    def literal_layout(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Padded literal layout for vectorised evaluation.

        Returns:
            (index, sign, mask) arrays of shape (clauses, max clause length):
            0-based atom index, required truth value, and which cells are real
        """
        width = max((len(c.literals) for c in self.clauses), default=0)
        index = np.zeros((len(self.clauses), width), dtype=np.int64)
        sign = np.zeros((len(self.clauses), width), dtype=bool)
        mask = np.zeros((len(self.clauses), width), dtype=bool)
        for row, clause in enumerate(self.clauses):
            lits = np.asarray(clause.literals, dtype=np.int64)
            index[row, : len(lits)] = np.abs(lits) - 1
            sign[row, : len(lits)] = lits > 0
            mask[row, : len(lits)] = True
        return index, sign, mask

    def satisfied(self, states: np.ndarray) -> np.ndarray:
        """
        Clause satisfaction for one state (atoms,) or a batch (worlds, atoms).

        Returns:
            Boolean array (clauses,) or (worlds, clauses)
        """
        states = np.asarray(states, dtype=bool)
        index, sign, mask = self.literal_layout
        values = states[..., index]
        return np.any((values == sign) & mask, axis=-1)

    def counts(self, state: np.ndarray) -> np.ndarray:
        """Per-parameter weighted count of satisfied soft groundings in a state"""
        return np.asarray(self.features.T @ self.satisfied(state).astype(float), dtype=float).reshape(-1)

    def score(self, state: np.ndarray) -> float:
        return float(self.clause_weights @ self.satisfied(state))

    def hard_ok(self, state: np.ndarray) -> bool:
        return bool(np.all(self.satisfied(state)[self.hard_mask]))

    def violated_hard(self, state: np.ndarray) -> List[GroundClause]:
        sat = self.satisfied(state)
        return [c for c, ok, hard in zip(self.clauses, sat, self.hard_mask) if hard and not ok]

    def components(self) -> List[Component]:
        """Connected components of the atom/clause incidence graph, isolated atoms included."""
        n, m = len(self.atoms), len(self.clauses)
        if n == 0:
            return []
        rows = [r for r, c in enumerate(self.clauses) for _ in c.literals]
        cols = [abs(lit) - 1 for c in self.clauses for lit in c.literals]
        incidence = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, n))
        adjacency = incidence.T @ incidence + sp.identity(n, format="csr")
        count, labels = connected_components(adjacency, directed=False)
        clause_labels = np.asarray([labels[abs(c.literals[0]) - 1] for c in self.clauses], dtype=np.int64)
        return [
            Component(np.flatnonzero(labels == k), np.flatnonzero(clause_labels == k))
            for k in range(count)
        ]

    def subnetwork(self, atoms: Iterable[int], clauses: Iterable[int]) -> "GroundNetwork":
        """Restriction to the given atoms and clauses, renumbered in the given order."""
        atoms = np.asarray(list(atoms), dtype=np.int64)
        clauses = np.asarray(list(clauses), dtype=np.int64)
        renumber = {int(old) + 1: new + 1 for new, old in enumerate(atoms)}
        kept = []
        for k in clauses:
            clause = self.clauses[int(k)]
            literals = tuple(renumber[abs(l)] * (1 if l > 0 else -1) for l in clause.literals)
            kept.append(replace(clause, literals=literals))
        return replace(
            self,
            atoms=tuple(self.atoms[int(i)] for i in atoms),
            clauses=tuple(kept),
            features=self.features[clauses] if len(clauses) else sp.csr_matrix((0, len(self.parameters))),
        )

    def to_text(self) -> str:
        """
        Dump the network, one record per line::

            p <parameter> <weight>
            a <number> <atom>
            c <weight|hard> <literal>... 0 [<parameter>=<coefficient>...] [# <sources>]
        """
        lines = [f"p {name} {float(w)!r}" for name, w in zip(self.parameters, self.weights)]
        lines.extend(f"a {i + 1} {atom}" for i, atom in enumerate(self.atoms))
        weights = self.clause_weights
        for row, clause in enumerate(self.clauses):
            start, end = self.features.indptr[row], self.features.indptr[row + 1]
            coefs = [
                f"{self.parameters[j]}={float(v)!r}"
                for j, v in zip(self.features.indices[start:end], self.features.data[start:end])
            ]
            weight = HARD_TOKEN if clause.hard else repr(float(weights[row]))
            literals = " ".join(str(l) for l in clause.literals)
            comment = f" # {','.join(clause.sources)}" if clause.sources else ""
            lines.append(" ".join(filter(None, ["c", weight, literals, "0", " ".join(coefs)])) + comment)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "GroundNetwork":
        """Inverse of :meth:`to_text`."""
        parameters: List[str] = []
        weights: List[float] = []
        atoms: Dict[int, Atom] = {}
        clauses: List[GroundClause] = []
        rows, cols, data = [], [], []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line, _, comment = raw.partition("#")
            fields = line.split()
            if not fields:
                continue
            try:
                if fields[0] == "p":
                    parameters.append(fields[1])
                    weights.append(float(fields[2]))
                elif fields[0] == "a":
                    atoms[int(fields[1])] = grammar.atom.parse_string(" ".join(fields[2:]), parse_all=True)[0]
                elif fields[0] == "c":
                    end = fields.index("0", 2)
                    literals = tuple(int(f) for f in fields[2:end])
                    for entry in fields[end + 1 :]:
                        parameter, _, coefficient = entry.partition("=")
                        rows.append(len(clauses))
                        cols.append(parameters.index(parameter))
                        data.append(float(coefficient))
                    sources = tuple(s for s in comment.strip().split(",") if s)
                    clauses.append(GroundClause(literals, fields[1] == HARD_TOKEN, sources))
                else:
                    raise ValueError(f"unknown record type {fields[0]!r}")
            except (ValueError, IndexError, pp.ParseBaseException) as exc:
                raise KBSyntaxError(f"bad network record: {exc}", lineno, 1, raw) from None
        features = sp.csr_matrix((data, (rows, cols)), shape=(len(clauses), len(parameters)))
        ordered = tuple(atoms[i] for i in sorted(atoms))
        return cls(ordered, tuple(clauses), tuple(parameters), features, np.asarray(weights, dtype=float), name=name)

