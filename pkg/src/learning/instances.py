import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.compiler.completion import CompiledKB
from src.errors import InvalidTrainingInstanceError, NarrativeError
from src.models.dataclasses import Narrative
from src.network.grounder import ground
from src.network.network import GroundNetwork

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingInstance:
    """
    One annotated narrative.

    Attributes:
        network: Ground network of the narrative
        observed: Annotated truth value of every query atom
        name: Narrative name
    """

    network: GroundNetwork
    observed: np.ndarray
    name: str = ""

    @property
    def counts_observed(self) -> np.ndarray:
        """Per-parameter satisfied-grounding counts at the annotated state"""
        return self.network.counts(self.observed)

    def with_weights(self, weights: Sequence[float]) -> "TrainingInstance":
        return TrainingInstance(self.network.with_weights(weights), self.observed, self.name)


def make_instance(network: GroundNetwork, annotation: Iterable, name: str = "") -> TrainingInstance:
    """
    Pair a ground network with the annotated state of its query atoms.

    Query atoms absent from the annotation are False.

    Raises:
        NarrativeError: Annotation mentions an atom outside the network
        InvalidTrainingInstanceError: Annotated state violates hard clauses
    """
    index = network.atom_index()
    observed = np.zeros(network.atom_count, dtype=bool)
    for atom in annotation:
        if atom not in index:
            raise NarrativeError(f"annotated atom {atom} is not a query atom of {name or network.name}")
        observed[index[atom]] = True
    violated = network.violated_hard(observed)
    if violated:
        raise InvalidTrainingInstanceError(
            name or network.name, [f"{c.source}: {c.literals}" for c in violated]
        )
    return TrainingInstance(network, observed, name or network.name)


def _instance(ckb: CompiledKB, narrative: Narrative) -> TrainingInstance:
    if narrative.annotation is None:
        raise NarrativeError(f"narrative {narrative.name or '?'} has no annotation")
    return make_instance(ground(ckb, narrative), narrative.annotation, narrative.name)


def build_instances(ckb: CompiledKB, narratives: Sequence[Narrative], n_jobs: int = 1) -> List[TrainingInstance]:
    """Ground every annotated narrative against ``ckb``, in parallel."""
    instances = Parallel(n_jobs=n_jobs)(delayed(_instance)(ckb, narrative) for narrative in narratives)
    logger.info(
        "built %d training instance(s), %d atoms in total",
        len(instances),
        sum(i.network.atom_count for i in instances),
    )
    return instances


def stack_weights(instances: Sequence[TrainingInstance]) -> Tuple[np.ndarray, Tuple[str, ...]]:
    """Shared weight vector and parameter names of a training set."""
    if not instances:
        raise ValueError("at least one training instance is required")
    first = instances[0].network
    for instance in instances[1:]:
        if instance.network.parameters != first.parameters:
            raise ValueError(f"{instance.name} was grounded from a different program")
    return first.weights.copy(), first.parameters
