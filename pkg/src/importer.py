import logging
from pathlib import Path
from typing import FrozenSet, List, Optional

import pandas as pd
import pandera as pa
from pandera.typing import DataFrame

from src.config import Manifest, ScenarioSpec, _read_yaml, validate_model
from src.errors import NarrativeError
from src.kb.parser import parse_annotation, parse_ground_atom, parse_kb, parse_narrative
from src.kb.source import KnowledgeBaseSource
from src.logic.formulas import Atom
from src.logic.terms import HOLDS_AT, Signature
from src.models.dataclasses import Narrative, atom_time
from src.models.dataframes import AnnotationDataSchema

logger = logging.getLogger(__name__)

RESOURCES = Path(__file__).parent / "resources"
SCENARIOS = RESOURCES / "scenarios"


def resource_path(name: Path | str) -> Path:
    """
    Resolve a file path, falling back to the bundled resources.

    Example:
        >>> resource_path("meeting_moving.mlnec").name
        'meeting_moving.mlnec'
    """
    path = Path(name)
    if path.exists():
        return path
    bundled = RESOURCES / path
    if bundled.exists():
        return bundled
    raise FileNotFoundError(f"{name} not found (also looked in {RESOURCES})")


def load_kb(file_path: Path | str) -> KnowledgeBaseSource:
    """
    Read a knowledge base file (source or compiled).

    Args:
        file_path: Path or bundled resource name (e.g., meeting_moving.mlnec)

    Returns:
        Parsed and type-checked knowledge base
    """
    path = resource_path(file_path)
    logger.info("loading knowledge base %s", path)
    return parse_kb(path.read_text())


def load_narrative(file_path: Path | str, signature: Signature, horizon: Optional[int] = None) -> Narrative:
    """
    Read a narrative file, named after its stem.

    Args:
        file_path: Narrative file, one ground atom per line
        signature: Signature the atoms are checked against
        horizon: Overrides the file's horizon; must cover its time stamps
    """
    path = Path(file_path)
    narrative = parse_narrative(path.read_text(), signature, name=path.stem)
    if horizon is not None:
        times = [t for t in (atom_time(a) for a in narrative.evidence) if t is not None]
        if times and max(times) > horizon:
            raise NarrativeError(f"{path}: time stamp {max(times)} beyond horizon {horizon}")
        narrative = Narrative(horizon, narrative.evidence, narrative.annotation, narrative.name)
    return narrative


@pa.check_types
def import_annotation_frame(file_path: Path | str) -> DataFrame[AnnotationDataSchema]:
    """
    Read a CSV annotation with columns time, fluent, truth.

    Truth accepts true/false, 1/0 and yes/no in any case.
    """
    df = pd.read_csv(file_path, dtype={"fluent": str, "truth": str})
    df.columns = [c.strip().upper() for c in df.columns]
    missing = {"TIME", "FLUENT", "TRUTH"} - set(df.columns)
    if missing:
        raise NarrativeError(f"{file_path}: missing annotation column(s) {sorted(missing)}")
    truth = df["TRUTH"].str.strip().str.lower()
    unknown = ~truth.isin(["true", "false", "1", "0", "yes", "no"])
    if unknown.any():
        raise NarrativeError(f"{file_path}: unreadable truth value {df['TRUTH'][unknown].iloc[0]!r}")
    df["TRUTH"] = truth.isin(["true", "1", "yes"])
    df["FLUENT"] = df["FLUENT"].str.replace(" ", "", regex=False)
    return df[["TIME", "FLUENT", "TRUTH"]]


def load_annotation(file_path: Path | str, signature: Signature) -> FrozenSet[Atom]:
    """
    True holdsAt atoms of an annotation file: ``.csv`` (time, fluent, truth)
    or one ``holdsAt(...)`` line per true atom.
    """
    path = Path(file_path)
    if path.suffix.lower() == ".csv":
        frame = import_annotation_frame(path)
        true_rows = frame[frame["TRUTH"]]
        return frozenset(
            parse_ground_atom(f"{HOLDS_AT}({fluent},{time})", signature)
            for fluent, time in zip(true_rows["FLUENT"], true_rows["TIME"])
        )
    return parse_annotation(path.read_text(), signature)


def load_manifest(file_path: Path | str, signature: Signature) -> tuple[List[Narrative], List[Optional[int]], Manifest]:
    """
    Read a YAML manifest of annotated narratives.

    Example manifest::

        folds: 5
        entries:
          - narrative: walk01.nar
            annotation: walk01.ann
            fold: 0

    Returns:
        Narratives (with annotation attached), their fold numbers and the manifest
    """
    path = Path(file_path)
    manifest = validate_model(Manifest, _read_yaml(path), str(path))
    narratives, folds = [], []
    for entry in manifest.entries:
        narrative = load_narrative(path.parent / entry.narrative, signature)
        if entry.annotation is not None:
            annotation = load_annotation(path.parent / entry.annotation, signature)
            narrative = narrative.with_annotation(annotation)
        narratives.append(narrative)
        folds.append(entry.fold)
    logger.info("manifest %s: %d narrative(s)", path, len(narratives))
    return narratives, folds, manifest


def load_scenario(name: Path | str) -> ScenarioSpec:
    """Scenario from a YAML file, or a bundled preset name (fig1, inertia-decay, random-walkers)."""
    path = Path(name)
    if not path.exists():
        path = SCENARIOS / f"{name}.yaml"
    return validate_model(ScenarioSpec, _read_yaml(path), str(path))


def scenario_presets() -> List[str]:
    return sorted(p.stem for p in SCENARIOS.glob("*.yaml"))
