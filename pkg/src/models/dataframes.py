import pandas as pd
import pandera as pa
from pandera.typing import Series


class EvidenceDataSchema(pa.DataFrameModel):
    """One row per explicit narrative entry"""

    TIME: Series[pd.Int64Dtype] = pa.Field(nullable=True)
    PREDICATE: Series[str]
    ATOM: Series[str]
    TRUTH: Series[bool]


class AnnotationDataSchema(pa.DataFrameModel):
    """CE annotation, one row per (time, fluent)"""

    TIME: Series[int] = pa.Field(ge=0, coerce=True)
    FLUENT: Series[str]
    TRUTH: Series[bool]


class MarginalDataSchema(pa.DataFrameModel):
    TIME: Series[int] = pa.Field(ge=0)
    FLUENT: Series[str]
    PROBABILITY: Series[float] = pa.Field(ge=0.0, le=1.0)


class MapDataSchema(pa.DataFrameModel):
    TIME: Series[int] = pa.Field(ge=0)
    FLUENT: Series[str]
    TRUTH: Series[bool]


class DecisionDataSchema(MarginalDataSchema):
    """Recognition output; PROBABILITY is 0/1 in MAP and crisp modes"""

    RECOGNISED: Series[bool]


class ThresholdSweepDataSchema(pa.DataFrameModel):
    THRESHOLD: Series[float] = pa.Field(ge=0.0, le=1.0)
    TP: Series[int]
    FP: Series[int]
    FN: Series[int]
    PRECISION: Series[float]
    RECALL: Series[float]
    F1: Series[float]


class InertiaCurveDataSchema(pa.DataFrameModel):
    """Marginal of one fluent over time, one series per setting"""

    SERIES: Series[str]
    TIME: Series[int] = pa.Field(ge=0)
    PROBABILITY: Series[float] = pa.Field(ge=0.0, le=1.0)


class FormulaStatsDataSchema(pa.DataFrameModel):
    """Per-formula grounding counts of a ground network"""

    FORMULA: Series[str]
    RAW_CLAUSES: Series[int] = pa.Field(ge=0)
    CLAUSES: Series[int] = pa.Field(ge=0)


class RobustnessDataSchema(pa.DataFrameModel):
    """F1 of original vs ablated narratives for one policy"""

    POLICY: Series[str]
    LENGTH: Series[int] = pa.Field(gt=0)
    REPETITION: Series[int] = pa.Field(ge=0)
    F1_ORIGINAL: Series[float]
    F1_ABLATED: Series[float]
    F1_DROP: Series[float]


class FoldDataSchema(pa.DataFrameModel):
    """Cross-validation scores, one row per held-out fold"""

    FOLD: Series[int] = pa.Field(ge=0)
    NARRATIVES: Series[int] = pa.Field(ge=0)
    TP: Series[int]
    FP: Series[int]
    FN: Series[int]
    PRECISION: Series[float]
    RECALL: Series[float]
    F1: Series[float]
