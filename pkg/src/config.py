"""
Run settings, loadable from a YAML file and overridden by command-line flags.

Example settings file::

    seed: 7
    inference:
      samples: 5000
    policy:
      variant: SI_h
    learning:
      method: dn
      epochs: 30
"""

import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

from src.compiler.policy import InertiaPolicy, InertiaVariant
from src.errors import ConfigurationError

logger = logging.getLogger(__name__)


class InferenceSettings(BaseModel):
    samples: int = Field(1000, gt=0)
    burn_in: int = Field(100, ge=0)
    walk_ratio: float = Field(0.5, ge=0.0, le=1.0)
    flips_factor: int = Field(10, gt=0)
    exact_cap: int = Field(20, gt=0)
    elimination_width: int = Field(20, gt=0)
    map_cap: int = Field(24, gt=0)
    uniform_cap: int = Field(16, ge=0)
    flips: int = Field(1000, ge=0)
    restarts: int = Field(10, gt=0)
    noise: float = Field(0.5, ge=0.0, le=1.0)


class LearningSettings(BaseModel):
    method: Literal["dn", "perceptron"] = "dn"
    epochs: int = Field(20, ge=0)
    damping: float = Field(1.0, gt=0.0)
    learning_rate: float = Field(0.1, ge=0.0)
    initial_weight: float = 1.0
    inference: Literal["exact", "mcsat"] = "exact"
    samples: int = Field(1000, gt=0)
    map_mode: Literal["exact", "localsearch"] = "exact"
    backtracking_steps: int = Field(10, ge=0)


class PolicySettings(BaseModel):
    variant: InertiaVariant = InertiaVariant.HI
    sigma_soft: bool = True
    weights: Optional[List[float]] = None
    shared_weight: float = 1.0
    initial_weight: float = 1.0

    def to_policy(self) -> InertiaPolicy:
        return InertiaPolicy(
            variant=self.variant,
            weights=self.weights,
            shared_weight=self.shared_weight,
            initial_weight=self.initial_weight,
        )


class AblationSpec(BaseModel):
    """
    Random erasure of evidence intervals.

    Attributes:
        start_probability: Chance that an eligible time-point starts an interval
        lengths: Interval lengths, one degraded copy per length and repetition
        repetitions: Copies per length
        seed: Base seed
        min_entities: Entities that must appear in true evidence at a time-point
            for it to be eligible as a start
    """

    start_probability: float = Field(0.01, ge=0.0, lt=1.0)
    lengths: List[int] = Field(default_factory=lambda: [10, 20])
    repetitions: int = Field(5, gt=0)
    seed: int = Field(0, ge=0)
    min_entities: int = Field(2, ge=0)

    @field_validator("lengths")
    @classmethod
    def _positive(cls, value):
        if not value or any(length <= 0 for length in value):
            raise ValueError("interval lengths must be positive")
        return value


class WalkerSpec(BaseModel):
    """Two-person regime chain of the random-walkers scenario"""

    stay_probability: float = Field(0.95, ge=0.0, le=1.0)
    noise: float = Field(0.05, ge=0.0, le=1.0)
    distances: List[int] = Field(default_factory=lambda: [24, 25, 34])


class ScenarioSpec(BaseModel):
    """
    Synthetic narrative description.

    Attributes:
        name: Scenario name, used as narrative name
        kb: Bundled knowledge base name or path
        horizon: Last time-point
        entities: Persons or items of the scenario
        evidence: Scripted ground literals with their time stamp, e.g.
            ``happens(active(id1),3)`` or ``!holdsAt(meeting(id1,id2),0)``
        walkers: Stochastic two-person evidence generator
        annotation: ``crisp`` (logic-only evaluation of the KB), ``none``
    """

    name: str = "scenario"
    kb: str = "meeting_moving.mlnec"
    horizon: int = Field(0, ge=0)
    entities: List[str] = Field(default_factory=list)
    evidence: List[str] = Field(default_factory=list)
    walkers: Optional[WalkerSpec] = None
    annotation: Literal["crisp", "none"] = "crisp"


class ManifestEntry(BaseModel):
    narrative: str
    annotation: Optional[str] = None
    fold: Optional[int] = None


class Manifest(BaseModel):
    """Annotated narratives for learning and evaluation; paths relative to the manifest"""

    entries: List[ManifestEntry]
    folds: Optional[int] = Field(None, gt=1)


class Settings(BaseModel):
    seed: int = Field(0, ge=0)
    threads: int = Field(1, gt=0)
    progress: bool = False
    threshold: float = Field(0.5, ge=0.0)
    inference: InferenceSettings = Field(default_factory=InferenceSettings)
    learning: LearningSettings = Field(default_factory=LearningSettings)
    policy: PolicySettings = Field(default_factory=PolicySettings)
    ablation: AblationSpec = Field(default_factory=AblationSpec)


def _read_yaml(path: Path) -> Dict:
    if not path.exists():
        raise FileNotFoundError(f"{path} not found")
    with path.open() as handle:
        data = yaml.safe_load(handle) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: expected a mapping at the top level")
    return data


def validate_model(model, data: Dict, source: str = ""):
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"{source or model.__name__}: {exc}") from None


def load_settings(path: Optional[Path] = None, overrides: Optional[Dict] = None) -> Settings:
    """
    Read settings from YAML and apply overrides.

    Args:
        path: YAML file; defaults only when None
        overrides: Nested mapping merged over the file values (None values skipped)

    Raises:
        ConfigurationError: Invalid value or structure
    """
    data = _read_yaml(Path(path)) if path is not None else {}
    for key, value in (overrides or {}).items():
        if isinstance(value, dict):
            section = dict(data.get(key) or {})
            section.update({k: v for k, v in value.items() if v is not None})
            data[key] = section
        elif value is not None:
            data[key] = value
    settings = validate_model(Settings, data, str(path) if path else "settings")
    logger.debug("settings: %s", settings.model_dump())
    return settings
