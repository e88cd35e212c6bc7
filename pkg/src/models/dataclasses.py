from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd
import pandera as pa
from pandera.typing import DataFrame

from src.logic.formulas import Atom
from src.logic.terms import HOLDS_AT, Const
from src.models.dataframes import (
    EvidenceDataSchema,
    FormulaStatsDataSchema,
    MapDataSchema,
    MarginalDataSchema,
)


def atom_time(atom: Atom) -> Optional[int]:
    """Time-point of an atom whose last argument is a time constant."""
    if atom.args and isinstance(atom.args[-1], Const) and atom.args[-1].name.isdigit():
        return int(atom.args[-1].name)
    return None


def holds_key(atom: Atom) -> Tuple[str, int]:
    """(fluent, time) key of a ground holdsAt atom"""
    return str(atom.args[0]), int(atom.args[1].name)


@dataclass(frozen=True)
class Narrative:
    """
    Time-indexed evidence for one recognition run.

    Attributes:
        horizon: Last time-point; the time domain is 0..horizon
        evidence: Explicit ground evidence atoms and their truth value. Absent
            atoms are False. holdsAt entries clamp the query atom.
        annotation: True holdsAt atoms of the CE annotation, if any
        name: Source identifier (file stem)
    """

    horizon: int = 0
    evidence: Dict[Atom, bool] = field(default_factory=dict)
    annotation: Optional[FrozenSet[Atom]] = None
    name: str = ""

    def value(self, atom: Atom) -> bool:
        return self.evidence.get(atom, False)

    @property
    def clamped(self) -> Dict[Atom, bool]:
        """Query atoms fixed by the narrative (typically the initial state)"""
        return {a: v for a, v in self.evidence.items() if a.predicate == HOLDS_AT}

    def true_atoms(self, predicate: Optional[str] = None) -> List[Atom]:
        return [
            a for a, v in self.evidence.items() if v and (predicate is None or a.predicate == predicate)
        ]

    def with_annotation(self, annotation: Iterable[Atom]) -> "Narrative":
        return replace(self, annotation=frozenset(annotation))

    def without_times(self, times: Iterable[int]) -> "Narrative":
        """Copy with every non-holdsAt evidence atom at the given time-points removed."""
        erased = set(times)
        kept = {
            a: v
            for a, v in self.evidence.items()
            if a.predicate == HOLDS_AT or atom_time(a) not in erased
        }
        return replace(self, evidence=kept)

    @pa.check_types
    def to_frame(self) -> DataFrame[EvidenceDataSchema]:
        atoms = sorted(self.evidence, key=lambda a: (atom_time(a) or 0, str(a)))
        return pd.DataFrame(
            {
                "TIME": pd.array([atom_time(a) for a in atoms], dtype="Int64"),
                "PREDICATE": np.asarray([a.predicate for a in atoms], dtype=object),
                "ATOM": np.asarray([str(a) for a in atoms], dtype=object),
                "TRUTH": np.asarray([self.evidence[a] for a in atoms], dtype=bool),
            }
        )


@dataclass(frozen=True)
class MarginalTable:
    """
    Marginal probability per query atom.

    Attributes:
        atoms: Ground holdsAt atoms in network order
        probabilities: P(atom = True) per atom
        samples: Retained MC-SAT samples (None for exact inference)
        seed: Seed of the sampler (None for exact inference)
        method: Inference procedure that produced the table
    """

    atoms: Tuple[Atom, ...]
    probabilities: np.ndarray
    samples: Optional[int] = None
    seed: Optional[int] = None
    method: str = "exact"

    def probability(self, atom: Atom) -> float:
        return float(self.probabilities[self.atoms.index(atom)])

    def as_dict(self) -> Dict[Tuple[str, int], float]:
        return {holds_key(a): float(p) for a, p in zip(self.atoms, self.probabilities)}

    @pa.check_types
    def to_frame(self) -> DataFrame[MarginalDataSchema]:
        keys = [holds_key(a) for a in self.atoms]
        frame = pd.DataFrame(
            {
                "TIME": np.asarray([k[1] for k in keys], dtype=np.int64),
                "FLUENT": np.asarray([k[0] for k in keys], dtype=object),
                "PROBABILITY": np.clip(np.asarray(self.probabilities, dtype=float), 0.0, 1.0),
            }
        )
        return frame.sort_values(["FLUENT", "TIME"], kind="stable").reset_index(drop=True)


@dataclass(frozen=True)
class MapAssignment:
    """
    Most probable truth assignment of the query atoms.

    Attributes:
        atoms: Ground holdsAt atoms in network order
        truth: Assigned value per atom
        score: Summed weight of satisfied soft clauses
        hard_ok: Whether every hard clause is satisfied
        optimal: Whether the score is proven optimal
        best_effort: Local search ended without a hard-feasible state
    """

    atoms: Tuple[Atom, ...]
    truth: np.ndarray
    score: float = 0.0
    hard_ok: bool = True
    optimal: bool = False
    best_effort: bool = False

    def as_dict(self) -> Dict[Tuple[str, int], bool]:
        return {holds_key(a): bool(v) for a, v in zip(self.atoms, self.truth)}

    @pa.check_types
    def to_frame(self) -> DataFrame[MapDataSchema]:
        keys = [holds_key(a) for a in self.atoms]
        frame = pd.DataFrame(
            {
                "TIME": np.asarray([k[1] for k in keys], dtype=np.int64),
                "FLUENT": np.asarray([k[0] for k in keys], dtype=object),
                "TRUTH": np.asarray(self.truth, dtype=bool),
            }
        )
        return frame.sort_values(["FLUENT", "TIME"], kind="stable").reset_index(drop=True)


@dataclass(frozen=True)
class NetworkStats:
    """Size of a ground network; per-formula counts sum to clause_count"""

    atom_count: int = 0
    clause_count: int = 0
    hard_count: int = 0
    per_formula: Dict[str, int] = field(default_factory=dict)
    raw_per_formula: Dict[str, int] = field(default_factory=dict)

    @property
    def raw_clause_count(self) -> int:
        return sum(self.raw_per_formula.values())

    @pa.check_types
    def to_frame(self) -> DataFrame[FormulaStatsDataSchema]:
        names = sorted(set(self.per_formula) | set(self.raw_per_formula))
        return pd.DataFrame(
            {
                "FORMULA": np.asarray(names, dtype=object),
                "RAW_CLAUSES": np.asarray([self.raw_per_formula.get(n, 0) for n in names], dtype=np.int64),
                "CLAUSES": np.asarray([self.per_formula.get(n, 0) for n in names], dtype=np.int64),
            }
        )


@dataclass(frozen=True)
class MetricsReport:
    """
    Recognition accuracy over one or more runs.

    Counts are micro-aggregated with ``+``; precision, recall and F1 are 0
    whenever their denominator is 0.
    """

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    auprc: Optional[float] = None
    threshold: float = 0.5

    @classmethod
    def from_counts(
        cls, tp: int, fp: int, fn: int, tn: int = 0, threshold: float = 0.5, auprc: Optional[float] = None
    ) -> "MetricsReport":
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(int(tp), int(fp), int(fn), int(tn), precision, recall, f1, auprc, threshold)

    def __add__(self, other: "MetricsReport") -> "MetricsReport":
        return MetricsReport.from_counts(
            self.tp + other.tp,
            self.fp + other.fp,
            self.fn + other.fn,
            self.tn + other.tn,
            threshold=self.threshold,
        )

    def as_row(self) -> Dict[str, float]:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auprc": self.auprc,
            "threshold": self.threshold,
        }
