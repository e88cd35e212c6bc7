"""
Synthetic narratives.

A scenario is either scripted (explicit evidence lines) or driven by the
random-walkers generator: two persons switch between being apart, meeting and
moving together under a sticky Markov chain, and emit the short-term
activities and spatial relations each regime implies, with a share of
activities replaced by random ones. The annotation comes from the crisp
evaluation of the scenario's knowledge base.
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.compiler import compile_kb, crisp_holds
from src.config import ScenarioSpec, WalkerSpec
from src.errors import ConfigurationError
from src.importer import load_kb
from src.kb.parser import parse_narrative
from src.kb.source import KnowledgeBaseSource
from src.models.dataclasses import Narrative

logger = logging.getLogger(__name__)

REGIMES = ("apart", "meeting", "moving")
ACTIVITIES = ("active", "inactive", "walking", "running")

# Regime -> (activity of each person, distance between them)
REGIME_EVIDENCE: Dict[str, tuple] = {
    "apart": ("walking", 60),
    "meeting": ("active", 20),
    "moving": ("walking", 30),
}


def _check_entities(kb: KnowledgeBaseSource, entities: Sequence[str]) -> None:
    known = {c for sort in kb.signature.sorts.values() for c in sort.constants}
    unknown = [e for e in entities if e not in known]
    if unknown:
        raise ConfigurationError(f"entities {unknown} are not constants of the knowledge base")


def walker_lines(spec: WalkerSpec, entities: Sequence[str], horizon: int, rng: np.random.Generator) -> List[str]:
    """Evidence lines of the random-walkers generator, in time order."""
    if len(entities) < 2:
        raise ConfigurationError("the random-walkers generator needs two entities")
    first, second = entities[:2]
    pairs = ((first, second), (second, first))
    lines: List[str] = []
    regime = "apart"
    for t in range(horizon + 1):
        if t and rng.random() >= spec.stay_probability:
            regime = str(rng.choice([r for r in REGIMES if r != regime]))
        activity, distance = REGIME_EVIDENCE[regime]
        for person in (first, second):
            shown = str(rng.choice(ACTIVITIES)) if rng.random() < spec.noise else activity
            lines.append(f"happens({shown}({person}),{t})")
        for threshold in sorted(spec.distances):
            if distance <= threshold:
                lines.extend(f"close({a},{b},{threshold},{t})" for a, b in pairs)
        if regime == "moving":
            lines.extend(f"orientationMove({a},{b},{t})" for a, b in pairs)
    return lines


def simulate(spec: ScenarioSpec, seed: int = 0, kb: Optional[KnowledgeBaseSource] = None) -> Narrative:
    """
    Build the narrative (and annotation) of a scenario.

    Args:
        spec: Scenario description
        seed: Seed of the stochastic generator
        kb: Knowledge base to use instead of ``spec.kb``

    Returns:
        Narrative named after the scenario; annotated unless
        ``spec.annotation == "none"``

    Raises:
        ConfigurationError: Entities outside the knowledge base, or walkers
            with fewer than two entities
        KBSyntaxError, NarrativeError: Malformed scripted evidence
    """
    kb = kb or load_kb(spec.kb)
    _check_entities(kb, spec.entities)
    lines = [f"@horizon {spec.horizon}"] + list(spec.evidence)
    if spec.walkers is not None:
        lines.extend(walker_lines(spec.walkers, spec.entities, spec.horizon, np.random.default_rng(seed)))
    narrative = parse_narrative("\n".join(lines), kb.signature, name=spec.name)
    if spec.annotation == "crisp":
        narrative = narrative.with_annotation(crisp_holds(compile_kb(kb), narrative))
    logger.info(
        "simulated %s: horizon %d, %d evidence atom(s)", spec.name, narrative.horizon, len(narrative.evidence)
    )
    return narrative
