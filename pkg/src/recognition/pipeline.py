"""
Compile, ground and infer over one narrative, and fit weights on many.

Errors raised inside a stage are re-raised as StageError tagged with the
stage name (compile, ground, infer, learn) and the narrative name.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Union

import numpy as np
import pandas as pd
import pandera as pa
from pandera.typing import DataFrame

from src.compiler import CompiledKB, compile_kb, crisp_holds
from src.config import Settings
from src.errors import ECError, InferenceCapError, StageError
from src.inference.exact import exact_marginals
from src.inference.maxsat import map_exact, map_localsearch
from src.inference.mcsat import mcsat_marginals
from src.kb.source import KnowledgeBaseSource
from src.learning.instances import build_instances
from src.learning.newton import train_diagonal_newton
from src.learning.perceptron import train_perceptron
from src.models.dataclasses import MapAssignment, MarginalTable, Narrative, holds_key
from src.models.dataframes import DecisionDataSchema
from src.network.grounder import ground, query_atoms
from src.network.network import GroundNetwork

logger = logging.getLogger(__name__)

Mode = Literal["marginal", "map", "crisp"]
MODES = ("marginal", "map", "crisp")
MARGINAL_METHODS = ("auto", "exact", "mcsat")
MAP_METHODS = ("auto", "exact", "localsearch")


@contextmanager
def stage(name: str, subject: Optional[str] = None):
    try:
        yield
    except StageError:
        raise
    except ECError as exc:
        raise StageError(name, exc, subject) from exc


@dataclass(frozen=True)
class Recognition:
    """
    Attributes:
        decisions: One row per (fluent, time-point)
        network: Ground network (None in crisp mode)
        marginals: Marginal mode result
        assignment: MAP mode result
    """

    decisions: pd.DataFrame
    network: Optional[GroundNetwork] = None
    marginals: Optional[MarginalTable] = None
    assignment: Optional[MapAssignment] = None

    @property
    def probabilities(self) -> np.ndarray:
        return self.decisions["PROBABILITY"].to_numpy()


def as_compiled(kb: Union[CompiledKB, KnowledgeBaseSource], settings: Settings) -> CompiledKB:
    if isinstance(kb, CompiledKB):
        return kb
    with stage("compile"):
        if kb.is_compiled:
            return compile_kb(kb)
        return compile_kb(kb, settings.policy.to_policy(), settings.policy.sigma_soft)


@pa.check_types
def decision_frame(keys, probabilities: np.ndarray, recognised: np.ndarray) -> DataFrame[DecisionDataSchema]:
    frame = pd.DataFrame(
        {
            "TIME": np.asarray([k[1] for k in keys], dtype=np.int64),
            "FLUENT": np.asarray([k[0] for k in keys], dtype=object),
            "PROBABILITY": np.clip(np.asarray(probabilities, dtype=float), 0.0, 1.0),
            "RECOGNISED": np.asarray(recognised, dtype=bool),
        }
    )
    return frame.sort_values(["FLUENT", "TIME"], kind="stable").reset_index(drop=True)


def infer_marginals(network: GroundNetwork, settings: Settings, method: str = "auto") -> MarginalTable:
    """Exact marginals, or MC-SAT when ``method`` asks for it or exact inference exceeds its caps under ``auto``."""
    if method not in MARGINAL_METHODS:
        raise ValueError(f"unknown marginal method {method!r}, expected one of {MARGINAL_METHODS}")
    inference = settings.inference
    if method != "mcsat":
        try:
            return exact_marginals(network, inference.exact_cap, "auto", inference.elimination_width)
        except InferenceCapError:
            if method == "exact":
                raise
            logger.info("exact inference beyond its caps on %s; sampling with MC-SAT", network.name or "network")
    return mcsat_marginals(
        network,
        samples=inference.samples,
        seed=settings.seed,
        burn_in=inference.burn_in,
        walk_ratio=inference.walk_ratio,
        flips_factor=inference.flips_factor,
        uniform_cap=inference.uniform_cap,
        n_jobs=settings.threads,
        progress=settings.progress,
    )


def infer_map(network: GroundNetwork, settings: Settings, method: str = "auto") -> MapAssignment:
    if method not in MAP_METHODS:
        raise ValueError(f"unknown MAP method {method!r}, expected one of {MAP_METHODS}")
    inference = settings.inference
    if method != "localsearch":
        try:
            return map_exact(network, inference.map_cap)
        except InferenceCapError:
            if method == "exact":
                raise
            logger.info("exact MAP beyond its cap on %s; using local search", network.name or "network")
    return map_localsearch(network, inference.flips, settings.seed, inference.noise, inference.restarts)


def recognize(
    kb: Union[CompiledKB, KnowledgeBaseSource],
    narrative: Narrative,
    mode: Mode = "marginal",
    threshold: Optional[float] = None,
    settings: Optional[Settings] = None,
    method: str = "auto",
) -> Recognition:
    """
    Decide for every fluent and time-point whether the CE is recognised.

    Args:
        kb: Source or compiled knowledge base
        narrative: Evidence
        mode: ``marginal`` (P >= threshold), ``map`` (most probable world) or
            ``crisp`` (logic-only evaluation)
        threshold: Marginal threshold; settings.threshold when omitted
        settings: Run settings; defaults when omitted
        method: Inference procedure, see :func:`infer_marginals` and :func:`infer_map`

    Raises:
        StageError: Any pipeline error, tagged with its stage
    """
    if mode not in MODES:
        raise ValueError(f"unknown recognition mode {mode!r}, expected one of {MODES}")
    settings = settings or Settings()
    threshold = settings.threshold if threshold is None else threshold
    ckb = as_compiled(kb, settings)
    subject = narrative.name or None

    if mode == "crisp":
        with stage("infer", subject):
            holds = crisp_holds(ckb, narrative)
        atoms = query_atoms(ckb, narrative.horizon)
        truth = np.asarray([a in holds for a in atoms], dtype=bool)
        return Recognition(decision_frame([holds_key(a) for a in atoms], truth.astype(float), truth))

    with stage("ground", subject):
        network = ground(ckb, narrative, settings.progress)
    keys = [holds_key(a) for a in network.atoms]
    with stage("infer", subject):
        if mode == "map":
            assignment = infer_map(network, settings, method)
            decisions = decision_frame(keys, assignment.truth.astype(float), assignment.truth)
            return Recognition(decisions, network, assignment=assignment)
        marginals = infer_marginals(network, settings, method)
    recognised = marginals.probabilities >= threshold
    logger.info(
        "recognised %d of %d (fluent, time) pairs in %s",
        int(recognised.sum()),
        len(recognised),
        narrative.name or "narrative",
    )
    return Recognition(decision_frame(keys, marginals.probabilities, recognised), network, marginals=marginals)


def learn(
    kb: Union[CompiledKB, KnowledgeBaseSource],
    narratives: Sequence[Narrative],
    settings: Optional[Settings] = None,
) -> CompiledKB:
    """
    Fit the soft weights of ``kb`` to annotated narratives.

    Returns:
        Compiled knowledge base carrying the learned weights

    Raises:
        StageError: Grounding, invalid annotation or learning failure
    """
    settings = settings or Settings()
    options = settings.learning
    ckb = as_compiled(kb, settings)
    # Compiled knowledge bases resume from their own weights.
    resume = isinstance(kb, CompiledKB) or kb.is_compiled
    initial = ckb.weights if resume else np.full(len(ckb.parameters), options.initial_weight)
    with stage("ground"):
        instances = build_instances(ckb, narratives, settings.threads)
    inference = settings.inference
    with stage("learn"):
        if options.method == "perceptron":
            map_options = {"cap": inference.map_cap} if options.map_mode == "exact" else {
                "flips": inference.flips,
                "noise": inference.noise,
                "restarts": inference.restarts,
            }
            weights = train_perceptron(
                instances,
                weights=initial,
                epochs=options.epochs,
                learning_rate=options.learning_rate,
                map_mode=options.map_mode,
                seed=settings.seed,
                progress=settings.progress,
                **map_options,
            )
        else:
            if options.inference == "exact":
                infer_options = {"cap": inference.exact_cap, "max_width": inference.elimination_width}
            else:
                infer_options = {
                    "burn_in": inference.burn_in,
                    "walk_ratio": inference.walk_ratio,
                    "flips_factor": inference.flips_factor,
                    "uniform_cap": inference.uniform_cap,
                }
            weights = train_diagonal_newton(
                instances,
                weights=initial,
                epochs=options.epochs,
                damping=options.damping,
                inference=options.inference,
                seed=settings.seed,
                samples=options.samples,
                backtracking_steps=options.backtracking_steps,
                n_jobs=settings.threads,
                progress=settings.progress,
                **infer_options,
            )
    logger.info("learned weights: %s", dict(zip(ckb.parameters, np.round(weights, 4))))
    return ckb.with_weights(weights)
