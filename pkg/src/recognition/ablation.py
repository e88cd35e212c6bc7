import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Set, Tuple

import numpy as np
from tqdm import tqdm

from src.config import AblationSpec
from src.logic.formulas import Atom
from src.logic.terms import HOLDS_AT, Const, Func, Term
from src.models.dataclasses import Narrative, atom_time

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AblatedNarrative:
    """
    Attributes:
        narrative: Copy of the original with evidence erased
        length: Interval length
        repetition: Repetition number
        starts: First time-point of every erased interval
    """

    narrative: Narrative
    length: int
    repetition: int
    starts: Tuple[int, ...]

    @property
    def erased(self) -> Set[int]:
        horizon = self.narrative.horizon
        return {t for s in self.starts for t in range(s, min(s + self.length, horizon + 1))}


def _entities(term: Term) -> Iterator[str]:
    if isinstance(term, Func):
        for arg in term.args:
            yield from _entities(arg)
    elif isinstance(term, Const) and not term.name.isdigit():
        yield term.name


def entities_by_time(narrative: Narrative) -> Dict[int, Set[str]]:
    """Entities mentioned by true evidence at each time-point (numeric constants excluded)."""
    found: Dict[int, Set[str]] = {}
    for atom, value in narrative.evidence.items():
        time = atom_time(atom)
        if not value or time is None or atom.predicate == HOLDS_AT:
            continue
        found.setdefault(time, set()).update(name for arg in atom.args[:-1] for name in _entities(arg))
    return found


def eligible_times(narrative: Narrative, min_entities: int = 2) -> List[int]:
    mentioned = entities_by_time(narrative)
    return [t for t in range(narrative.horizon + 1) if len(mentioned.get(t, ())) >= min_entities]


def erase_intervals(narrative: Narrative, starts, length: int) -> Narrative:
    """Remove every evidence atom (not holdsAt) on ``[start, start + length)`` for each start."""
    times = {t for s in starts for t in range(s, s + length)}
    return narrative.without_times(times)


def ablate(narrative: Narrative, spec: AblationSpec, progress: bool = False) -> List[AblatedNarrative]:
    """
    Degraded copies of a narrative, one per interval length and repetition.

    Every eligible time-point independently starts an erased interval with
    probability ``spec.start_probability``. Annotation and clamped holdsAt
    entries are kept. Copies are reproducible from ``spec.seed``.

    Args:
        narrative: Original evidence
        spec: Ablation parameters
        progress: Show a progress bar over copies

    Returns:
        Copies ordered by length then repetition
    """
    candidates = np.asarray(eligible_times(narrative, spec.min_entities), dtype=np.int64)
    jobs = [(length, repetition) for length in spec.lengths for repetition in range(spec.repetitions)]
    copies = []
    for length, repetition in tqdm(jobs, desc="ablation", disable=not progress):
        rng = np.random.default_rng([spec.seed, length, repetition])
        starts = candidates[rng.random(len(candidates)) < spec.start_probability]
        degraded = erase_intervals(narrative, starts.tolist(), length)
        copies.append(AblatedNarrative(degraded, length, repetition, tuple(int(s) for s in starts)))
        logger.debug(
            "ablated %s: length %d repetition %d, %d interval(s)",
            narrative.name or "narrative",
            length,
            repetition,
            len(starts),
        )
    return copies


def erased_atoms(original: Narrative, degraded: Narrative) -> Set[Atom]:
    return set(original.evidence) - set(degraded.evidence)
