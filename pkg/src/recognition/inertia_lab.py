"""
Probability curves of one fluent over time under the inertia policies.

Scenarios:
    si-eq-true   start/stop knowledge base, fluent true at 0, SI_eq
    si-eq-false  same, fluent false at 0
    si-h         fluent true at 0, only holdsAt-persistence soft
    si-negh      fluent false at 0, only !holdsAt-persistence soft
    fig1-hi      meeting initiated at 3 and 10, terminated at 20, hard inertia
    sharpening   meeting true at 0 and never initiated or terminated, SI_h;
                 the persons stay within 34 pixels except, in the gap
                 series, at one step where one holdsAt-inertia clause is
                 trivially satisfied

Each weight gives one series.
"""

import logging
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd
import pandera as pa
from pandera.typing import DataFrame

from src.compiler import InertiaPolicy, InertiaVariant, compile_kb
from src.config import ScenarioSpec, Settings
from src.importer import load_kb, load_scenario
from src.models.dataclasses import Narrative
from src.models.dataframes import InertiaCurveDataSchema
from src.network.grounder import ground
from src.recognition.pipeline import infer_marginals
from src.recognition.simulate import simulate

logger = logging.getLogger(__name__)

SCENARIOS = ("si-eq-true", "si-eq-false", "si-h", "si-negh", "fig1-hi", "sharpening")
TRACKED = "tracked(a)"
MEETING = "meeting(id1,id2)"
SHARPENING_GAP = 10

_DECAY = {
    "si-eq-true": (InertiaVariant.SI_EQ, True),
    "si-eq-false": (InertiaVariant.SI_EQ, False),
    "si-h": (InertiaVariant.SI_H, True),
    "si-negh": (InertiaVariant.SI_NEGH, False),
}


def fluent_curve(
    kb, policy: InertiaPolicy, narrative: Narrative, fluent: str, settings: Optional[Settings] = None
) -> np.ndarray:
    """P(holdsAt(fluent, t)) for t = 0..horizon."""
    network = ground(compile_kb(kb, policy), narrative)
    table = infer_marginals(network, settings or Settings())
    by_key = table.as_dict()
    return np.asarray([by_key[(fluent, t)] for t in range(narrative.horizon + 1)])


def decay_narrative(start: bool, horizon: int) -> ScenarioSpec:
    literal = f"holdsAt({TRACKED},0)"
    return ScenarioSpec(
        name="inertia-decay",
        kb="inertia.mlnec",
        horizon=horizon,
        entities=["a"],
        evidence=[literal if start else f"!{literal}"],
        annotation="none",
    )


def sharpening_narratives(horizon: int) -> Dict[str, ScenarioSpec]:
    """
    Meeting true at 0 with no initiating or terminating events.

    Every step keeps both holdsAt-inertia clauses of meeting non-trivial
    (no walking, persons within 34 pixels) except the gap step of the gap
    series, where the missing close relation satisfies one of them.
    """
    specs = {}
    for series, gap in (("continuous", None), ("gap", SHARPENING_GAP)):
        evidence = [f"holdsAt({MEETING},0)"]
        for t in range(horizon + 1):
            if t != gap:
                evidence.append(f"close(id1,id2,34,{t})")
        specs[series] = ScenarioSpec(
            name=f"sharpening-{series}",
            kb="meeting_moving.mlnec",
            horizon=horizon,
            entities=["id1", "id2"],
            evidence=evidence,
            annotation="none",
        )
    return specs


@pa.check_types
def curve_frame(curves: Dict[str, np.ndarray]) -> DataFrame[InertiaCurveDataSchema]:
    rows = [
        {"SERIES": series, "TIME": t, "PROBABILITY": float(np.clip(p, 0.0, 1.0))}
        for series, curve in curves.items()
        for t, p in enumerate(curve)
    ]
    return pd.DataFrame(rows, columns=["SERIES", "TIME", "PROBABILITY"]).astype({"TIME": np.int64, "PROBABILITY": float})


def run_scenario(
    name: str,
    weights: Sequence[float] = (1.0,),
    horizon: int = 20,
    settings: Optional[Settings] = None,
) -> DataFrame[InertiaCurveDataSchema]:
    """
    Curves of a named scenario, one series per weight (``w=<weight>``), or
    ``continuous``/``gap`` per weight for sharpening.

    Args:
        name: One of SCENARIOS
        weights: Soft inertia (and effect) weights to compare
        horizon: Last time-point (fig1-hi uses its preset horizon)
        settings: Inference settings
    """
    if name not in SCENARIOS:
        raise ValueError(f"unknown inertia scenario {name!r}, expected one of {SCENARIOS}")
    curves: Dict[str, np.ndarray] = {}
    for weight in weights:
        label = f"w={weight:g}"
        if name in _DECAY:
            variant, start = _DECAY[name]
            kb = load_kb("inertia.mlnec")
            policy = InertiaPolicy(variant=variant, shared_weight=weight, initial_weight=weight)
            narrative = simulate(decay_narrative(start, horizon), kb=kb)
            curves[label] = fluent_curve(kb, policy, narrative, TRACKED, settings)
        elif name == "fig1-hi":
            spec = load_scenario("fig1")
            kb = load_kb(spec.kb)
            narrative = simulate(spec.model_copy(update={"annotation": "none"}), kb=kb)
            policy = InertiaPolicy(variant=InertiaVariant.HI, initial_weight=weight)
            curves[label] = fluent_curve(kb, policy, narrative, MEETING, settings)
        else:
            kb = load_kb("meeting_moving.mlnec")
            policy = InertiaPolicy(variant=InertiaVariant.SI_H, initial_weight=weight)
            for series, spec in sharpening_narratives(horizon).items():
                narrative = simulate(spec, kb=kb)
                key = series if len(weights) == 1 else f"{series} {label}"
                curves[key] = fluent_curve(kb, policy, narrative, MEETING, settings)
    logger.info("inertia scenario %s: %d series", name, len(curves))
    return curve_frame(curves)
