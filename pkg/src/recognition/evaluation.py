"""
Recognition accuracy over many narratives: micro-aggregated metrics,
manifest-driven cross-validation and robustness under evidence ablation.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import pandera as pa
from joblib import Parallel, delayed
from pandera.typing import DataFrame

from src.compiler import CompiledKB
from src.compiler.policy import InertiaVariant
from src.config import AblationSpec, Settings
from src.errors import ConfigurationError, NarrativeError
from src.kb.source import KnowledgeBaseSource
from src.models.dataclasses import MetricsReport, Narrative
from src.models.dataframes import FoldDataSchema, RobustnessDataSchema, ThresholdSweepDataSchema
from src.recognition.ablation import ablate
from src.recognition.metrics import auprc, labels, metrics, threshold_sweep
from src.recognition.pipeline import Mode, as_compiled, learn, recognize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Evaluation:
    """
    Attributes:
        report: Micro-aggregated metrics over every narrative
        per_narrative: Metrics of each narrative by name
        probabilities: Concatenated P per (fluent, time) example
        truth: Concatenated annotation per example
    """

    report: MetricsReport
    per_narrative: Dict[str, MetricsReport] = field(default_factory=dict)
    probabilities: np.ndarray = field(default_factory=lambda: np.zeros(0))
    truth: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def sweep(self) -> DataFrame[ThresholdSweepDataSchema]:
        return threshold_sweep(self.probabilities, self.truth)

    def table(self) -> pd.DataFrame:
        rows = [{"narrative": name, **report.as_row()} for name, report in self.per_narrative.items()]
        rows.append({"narrative": "total", **self.report.as_row()})
        return pd.DataFrame(rows)


def _run(ckb: CompiledKB, narrative: Narrative, mode: Mode, threshold: float, settings: Settings, method: str):
    if narrative.annotation is None:
        raise NarrativeError(f"narrative {narrative.name or '?'} has no annotation")
    result = recognize(ckb, narrative, mode, threshold, settings, method)
    report = metrics(result.decisions, narrative.annotation, threshold)
    return narrative.name, report, result.probabilities, labels(result.decisions, narrative.annotation)


def evaluate(
    kb: Union[CompiledKB, KnowledgeBaseSource],
    narratives: Sequence[Narrative],
    mode: Mode = "marginal",
    threshold: Optional[float] = None,
    settings: Optional[Settings] = None,
    method: str = "auto",
) -> Evaluation:
    """
    Recognise every annotated narrative and aggregate the confusion counts.

    Narratives run in parallel over ``settings.threads`` workers. AUPRC is
    computed over the pooled examples in marginal mode when any is positive.
    """
    settings = settings or Settings()
    threshold = settings.threshold if threshold is None else threshold
    ckb = as_compiled(kb, settings)
    inner = settings.model_copy(update={"threads": 1})
    runs = Parallel(n_jobs=settings.threads)(
        delayed(_run)(ckb, narrative, mode, threshold, inner, method) for narrative in narratives
    )
    total = MetricsReport(threshold=threshold)
    per_narrative: Dict[str, MetricsReport] = {}
    for k, (name, report, _, _) in enumerate(runs):
        per_narrative[name or f"narrative{k}"] = report
        total = total + report
    probabilities = np.concatenate([r[2] for r in runs]) if runs else np.zeros(0)
    truth = np.concatenate([r[3] for r in runs]) if runs else np.zeros(0, dtype=bool)
    if mode == "marginal" and truth.any():
        total = MetricsReport.from_counts(total.tp, total.fp, total.fn, total.tn, threshold, auprc(probabilities, truth))
    logger.info("evaluated %d narrative(s): F1 %.4f", len(runs), total.f1)
    return Evaluation(total, per_narrative, probabilities, truth)


def assign_folds(folds: Sequence[Optional[int]], k: Optional[int], seed: int = 0) -> List[int]:
    """
    Fold of every narrative: taken from the manifest when all are given,
    otherwise a seeded round-robin over a random permutation into ``k`` folds.

    Raises:
        ConfigurationError: Some but not all folds given, or neither folds nor k
    """
    given = [f is not None for f in folds]
    if all(given) and folds:
        return [int(f) for f in folds]
    if any(given):
        raise ConfigurationError("manifest gives a fold for some narratives but not all")
    if not k or k < 2:
        raise ConfigurationError("cross-validation needs at least 2 folds")
    if k > len(folds):
        raise ConfigurationError(f"{k} folds requested for {len(folds)} narrative(s)")
    order = np.random.default_rng(seed).permutation(len(folds))
    assigned = [0] * len(folds)
    for position, index in enumerate(order):
        assigned[int(index)] = position % k
    return assigned


def cross_validate(
    kb: KnowledgeBaseSource,
    narratives: Sequence[Narrative],
    folds: Sequence[int],
    mode: Mode = "marginal",
    settings: Optional[Settings] = None,
    method: str = "auto",
) -> Tuple[DataFrame[FoldDataSchema], MetricsReport]:
    """
    Learn on every fold but one, evaluate on the held-out fold.

    Returns:
        Per-fold scores and the micro-aggregated report over all folds
    """
    settings = settings or Settings()
    rows = []
    total = MetricsReport(threshold=settings.threshold)
    for fold in sorted(set(folds)):
        train = [n for n, f in zip(narratives, folds) if f != fold]
        test = [n for n, f in zip(narratives, folds) if f == fold]
        learned = learn(kb, train, settings) if train else as_compiled(kb, settings)
        report = evaluate(learned, test, mode, settings=settings, method=method).report
        total = total + report
        rows.append(
            {
                "FOLD": int(fold),
                "NARRATIVES": len(test),
                "TP": report.tp,
                "FP": report.fp,
                "FN": report.fn,
                "PRECISION": report.precision,
                "RECALL": report.recall,
                "F1": report.f1,
            }
        )
        logger.info("fold %d: F1 %.4f on %d narrative(s)", fold, report.f1, len(test))
    frame = pd.DataFrame(rows, columns=list(FoldDataSchema.to_schema().columns))
    return FoldDataSchema.validate(frame), total


@pa.check_types
def robustness(
    kb: KnowledgeBaseSource,
    narratives: Sequence[Narrative],
    variants: Sequence[Union[str, InertiaVariant]],
    spec: Optional[AblationSpec] = None,
    settings: Optional[Settings] = None,
    train: bool = True,
    mode: Mode = "marginal",
) -> DataFrame[RobustnessDataSchema]:
    """
    F1 on the original narratives against F1 on their ablated copies, per
    inertia variant, length and repetition.

    Args:
        kb: Source knowledge base
        narratives: Annotated narratives
        variants: Inertia variants to compare (e.g. SI_h, HI, NONE)
        spec: Ablation parameters; settings.ablation when omitted
        settings: Run settings
        train: Learn weights on the original narratives before evaluating
        mode: Recognition mode
    """
    settings = settings or Settings()
    spec = spec or settings.ablation
    degraded = [ablate(n, spec, settings.progress) for n in narratives]
    rows = []
    for variant in variants:
        variant = InertiaVariant(variant)
        policy = settings.policy.model_copy(update={"variant": variant, "weights": None})
        run_settings = settings.model_copy(update={"policy": policy})
        ckb = as_compiled(kb, run_settings)
        if train:
            ckb = learn(ckb, narratives, run_settings)
        original = evaluate(ckb, narratives, mode, settings=run_settings).report.f1
        for position, copy in enumerate(degraded[0] if degraded else []):
            ablated_set = [copies[position].narrative for copies in degraded]
            ablated = evaluate(ckb, ablated_set, mode, settings=run_settings).report.f1
            rows.append(
                {
                    "POLICY": variant.value,
                    "LENGTH": copy.length,
                    "REPETITION": copy.repetition,
                    "F1_ORIGINAL": original,
                    "F1_ABLATED": ablated,
                    "F1_DROP": original - ablated,
                }
            )
        logger.info("robustness of %s: original F1 %.4f", variant.value, original)
    return pd.DataFrame(rows, columns=list(RobustnessDataSchema.to_schema().columns))
