"""
Recognition accuracy.

Every (fluent, time-point) pair of the decision table is one example; an
example is positive when its holdsAt atom is in the annotation.
"""

import logging
from typing import Iterable, Tuple

import numpy as np
import pandas as pd
import pandera as pa
from pandera.typing import DataFrame
from sklearn.metrics import average_precision_score

from src.errors import NarrativeError
from src.logic.formulas import Atom
from src.models.dataclasses import MetricsReport, holds_key
from src.models.dataframes import DecisionDataSchema, ThresholdSweepDataSchema

logger = logging.getLogger(__name__)

SWEEP_POINTS = 101


def labels(decisions: DataFrame[DecisionDataSchema], annotation: Iterable[Atom]) -> np.ndarray:
    """
    Annotated truth of every decision row.

    Raises:
        NarrativeError: Annotation mentions a pair outside the decision table
    """
    keys = set(zip(decisions["FLUENT"], decisions["TIME"].astype(int)))
    positives = {holds_key(a) for a in annotation}
    outside = positives - keys
    if outside:
        fluent, time = sorted(outside)[0]
        raise NarrativeError(
            f"annotation has {len(outside)} atom(s) outside the recognised horizon, e.g. {fluent} at {time}"
        )
    return np.asarray([k in positives for k in zip(decisions["FLUENT"], decisions["TIME"].astype(int))], dtype=bool)


def confusion(recognised: np.ndarray, truth: np.ndarray) -> Tuple[int, int, int, int]:
    recognised = np.asarray(recognised, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    tp = int(np.sum(recognised & truth))
    fp = int(np.sum(recognised & ~truth))
    fn = int(np.sum(~recognised & truth))
    tn = int(np.sum(~recognised & ~truth))
    return tp, fp, fn, tn


def metrics(
    decisions: DataFrame[DecisionDataSchema], annotation: Iterable[Atom], threshold: float = 0.5
) -> MetricsReport:
    """
    Confusion counts and scores of one recognition run.

    AUPRC is filled in when the annotation has at least one positive.

    Example:
        >>> MetricsReport.from_counts(tp=4008, fp=400, fn=2264).f1
        0.7506...
    """
    truth = labels(decisions, annotation)
    tp, fp, fn, tn = confusion(decisions["RECOGNISED"].to_numpy(), truth)
    score = auprc(decisions["PROBABILITY"].to_numpy(), truth) if truth.any() else None
    return MetricsReport.from_counts(tp, fp, fn, tn, threshold=threshold, auprc=score)


def auprc(probabilities: np.ndarray, truth: np.ndarray) -> float:
    """
    Area under the precision-recall step curve.

    Raises:
        NarrativeError: No positive example
    """
    truth = np.asarray(truth, dtype=bool)
    if not truth.any():
        raise NarrativeError("AUPRC is undefined without positive annotations")
    return float(average_precision_score(truth, np.asarray(probabilities, dtype=float)))


@pa.check_types
def threshold_sweep(
    probabilities: np.ndarray, truth: np.ndarray, points: int = SWEEP_POINTS
) -> DataFrame[ThresholdSweepDataSchema]:
    """Counts and scores at ``points`` evenly spaced thresholds on [0, 1]; P >= threshold recognises."""
    probabilities = np.asarray(probabilities, dtype=float)
    rows = []
    for threshold in np.linspace(0.0, 1.0, points):
        tp, fp, fn, _ = confusion(probabilities >= threshold, truth)
        report = MetricsReport.from_counts(tp, fp, fn, threshold=float(threshold))
        rows.append(
            {
                "THRESHOLD": float(threshold),
                "TP": tp,
                "FP": fp,
                "FN": fn,
                "PRECISION": report.precision,
                "RECALL": report.recall,
                "F1": report.f1,
            }
        )
    return pd.DataFrame(rows, columns=list(ThresholdSweepDataSchema.to_schema().columns))
