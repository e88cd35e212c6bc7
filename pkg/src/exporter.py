"""CSV and DSL output of recognition, learning and compilation results."""

from pathlib import Path
from typing import Iterable, Optional, TextIO

import pandas as pd

from src.compiler.completion import CompiledKB
from src.kb.serializer import serialize_kb
from src.logic.formulas import Atom
from src.models.dataclasses import Narrative, atom_time, holds_key

PROBABILITY_FORMAT = "%.4f"


def result_frame(decisions: pd.DataFrame, mode: str) -> pd.DataFrame:
    """
    Result rows sorted by fluent then time: ``time,fluent,probability`` in
    marginal mode, ``time,fluent,truth`` otherwise.
    """
    ordered = decisions.sort_values(["FLUENT", "TIME"], kind="stable")
    if mode == "marginal":
        return pd.DataFrame(
            {"time": ordered["TIME"].to_numpy(), "fluent": ordered["FLUENT"].to_numpy(), "probability": ordered["PROBABILITY"].to_numpy()}
        )
    truth = ordered["RECOGNISED"].map({True: "true", False: "false"})
    return pd.DataFrame({"time": ordered["TIME"].to_numpy(), "fluent": ordered["FLUENT"].to_numpy(), "truth": truth.to_numpy()})


def write_csv(frame: pd.DataFrame, out: TextIO | Path | str) -> None:
    """Write with ``%.4f`` floats and ``\\n`` line endings; an empty frame still gets its header."""
    frame.to_csv(out, index=False, float_format=PROBABILITY_FORMAT, lineterminator="\n")


def write_results(decisions: pd.DataFrame, mode: str, out: TextIO | Path | str) -> None:
    write_csv(result_frame(decisions, mode), out)


def write_table(frame: pd.DataFrame, out: TextIO | Path | str) -> None:
    """Write a report table with lower-case column names."""
    write_csv(frame.rename(columns=str.lower), out)


def serialize_compiled(ckb: CompiledKB, header: Optional[str] = None) -> str:
    """
    Compiled program as DSL text; every rule carries its group tag and weight
    so it loads back without recompiling.
    """
    return serialize_kb(ckb.to_source(), header or "compiled knowledge base")


def format_narrative(narrative: Narrative) -> str:
    """Narrative file text: ``@horizon`` line, then one literal per line in time order."""
    atoms = sorted(narrative.evidence, key=lambda a: (atom_time(a) or 0, str(a)))
    lines = [f"@horizon {narrative.horizon}"]
    lines.extend(str(a) if narrative.evidence[a] else f"!{a}" for a in atoms)
    return "\n".join(lines) + "\n"


def format_annotation(atoms: Iterable[Atom]) -> str:
    """Annotation file text, one true holdsAt atom per line sorted by fluent then time."""
    return "".join(f"{a}\n" for a in sorted(atoms, key=holds_key))
