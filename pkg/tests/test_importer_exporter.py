import io

import pandas as pd
import pytest

from src.compiler import compile_kb
from src.compiler.policy import SHARED_INERTIA, InertiaPolicy, InertiaVariant
from src.errors import NarrativeError
from src.exporter import format_annotation, format_narrative, result_frame, serialize_compiled, write_results
from src.importer import (
    load_annotation,
    load_kb,
    load_manifest,
    load_narrative,
    load_scenario,
    resource_path,
    scenario_presets,
)
from src.kb.parser import parse_kb
from src.recognition import recognize, simulate

from conftest import holds


@pytest.fixture
def files(tmp_path, meeting_kb):
    narrative = tmp_path / "walk01.nar"
    narrative.write_text("@horizon 6\nhappens(active(id1),1)\nclose(id1,id2,25,1)\n!holdsAt(meeting(id1,id2),0)\n")
    (tmp_path / "walk01.ann").write_text("".join(f"holdsAt(meeting(id1,id2),{t})\n" for t in range(2, 7)))
    return tmp_path


def test_bundled_resources():
    assert resource_path("meeting_moving.mlnec").exists()
    assert scenario_presets() == ["fig1", "inertia-decay", "random-walkers"]
    with pytest.raises(FileNotFoundError):
        resource_path("absent.mlnec")


def test_load_kb(meeting_kb):
    assert len(meeting_kb.signature.domain("fluent")) == 8
    assert len(load_kb("inertia.mlnec").signature.domain("fluent")) == 1


def test_load_narrative(files, meeting_kb):
    narrative = load_narrative(files / "walk01.nar", meeting_kb.signature)
    assert narrative.name == "walk01"
    assert narrative.horizon == 6
    assert not narrative.evidence[holds("meeting", 0, "id1", "id2")]
    assert load_narrative(files / "walk01.nar", meeting_kb.signature, horizon=9).horizon == 9
    with pytest.raises(NarrativeError):
        load_narrative(files / "walk01.nar", meeting_kb.signature, horizon=0)


def test_line_annotation(files, meeting_kb):
    annotation = load_annotation(files / "walk01.ann", meeting_kb.signature)
    assert annotation == {holds("meeting", t, "id1", "id2") for t in range(2, 7)}


def test_csv_annotation(tmp_path, meeting_kb):
    path = tmp_path / "walk.csv"
    path.write_text('time,fluent,truth\n2,"meeting(id1, id2)",True\n3,"meeting(id1,id2)",yes\n4,"meeting(id1,id2)",0\n')
    assert load_annotation(path, meeting_kb.signature) == {
        holds("meeting", 2, "id1", "id2"),
        holds("meeting", 3, "id1", "id2"),
    }


@pytest.mark.parametrize(
    "content",
    ["time,fluent\n2,\"meeting(id1,id2)\"\n", "time,fluent,truth\n2,\"meeting(id1,id2)\",maybe\n"],
)
def test_invalid_csv_annotation(tmp_path, meeting_kb, content):
    path = tmp_path / "walk.csv"
    path.write_text(content)
    with pytest.raises(NarrativeError):
        load_annotation(path, meeting_kb.signature)


def test_manifest(files, meeting_kb):
    (files / "train.yaml").write_text(
        "folds: 2\nentries:\n  - narrative: walk01.nar\n    annotation: walk01.ann\n  - narrative: walk01.nar\n"
    )
    narratives, folds, manifest = load_manifest(files / "train.yaml", meeting_kb.signature)
    assert manifest.folds == 2
    assert folds == [None, None]
    assert len(narratives[0].annotation) == 5
    assert narratives[1].annotation is None


def test_scenario_file(tmp_path):
    path = tmp_path / "mine.yaml"
    path.write_text("name: mine\nhorizon: 5\nevidence:\n  - happens(active(id1),2)\n")
    spec = load_scenario(path)
    assert (spec.name, spec.horizon, spec.annotation) == ("mine", 5, "crisp")


def test_result_csv(meeting_kb):
    narrative = simulate(load_scenario("fig1"), kb=meeting_kb)
    decisions = recognize(meeting_kb, narrative, "crisp").decisions
    out = io.StringIO()
    write_results(decisions, "crisp", out)
    lines = out.getvalue().splitlines()
    assert lines[0] == "time,fluent,truth"
    assert lines[1] == "0,meeting(id1,id1),false"
    assert "4,meeting(id1,id2),true" in lines
    assert len(lines) == 1 + 8 * 31


def test_marginal_result_frame():
    decisions = pd.DataFrame(
        {"TIME": [1, 0], "FLUENT": ["f(a)", "f(a)"], "PROBABILITY": [0.25, 1.0], "RECOGNISED": [False, True]}
    )
    frame = result_frame(decisions, "marginal")
    assert list(frame.columns) == ["time", "fluent", "probability"]
    assert list(frame["time"]) == [0, 1]
    out = io.StringIO()
    write_results(decisions, "marginal", out)
    assert out.getvalue() == "time,fluent,probability\n0,f(a),1.0000\n1,f(a),0.2500\n"


def test_narrative_text_reads_back(meeting_kb, narrative_of):
    narrative = simulate(load_scenario("fig1"), kb=meeting_kb)
    text = format_narrative(narrative)
    assert text.startswith("@horizon 30\n!holdsAt(meeting(id1,id2),0)\n")
    again = narrative_of(meeting_kb, text, name="fig1")
    assert again.evidence == narrative.evidence
    assert format_annotation(narrative.annotation).splitlines()[0] == "holdsAt(meeting(id1,id2),4)"


def test_compiled_kb_text_loads_without_recompiling(inertia_kb):
    ckb = compile_kb(inertia_kb, InertiaPolicy(variant=InertiaVariant.SI_EQ, shared_weight=1.5))
    text = serialize_compiled(ckb, "inertia test")
    assert text.startswith("// inertia test")
    reloaded = parse_kb(text)
    assert reloaded.is_compiled
    again = compile_kb(reloaded)
    assert again.parameters == ckb.parameters
    assert list(again.weights) == pytest.approx(list(ckb.weights))


def test_tied_inertia_weight_survives_reload(inertia_kb):
    ckb = compile_kb(inertia_kb, InertiaPolicy(variant=InertiaVariant.SI_EQ, shared_weight=0.8))
    learned = ckb.with_weights([0.4, -0.2, 2.5])
    text = serialize_compiled(learned)
    assert "@inertia_holds=inertia 2.5 " in text
    assert "@inertia_not_holds=inertia 2.5 " in text
    again = compile_kb(parse_kb(text))
    assert again.parameters == ("tracked:effect_holds:1", "tracked:effect_not_holds:1", SHARED_INERTIA)
    assert list(again.weights) == pytest.approx([0.4, -0.2, 2.5])
    assert {f.tie for f in again.sigma_prime} == {SHARED_INERTIA}


def test_empty_results_keep_header():
    decisions = pd.DataFrame({"TIME": [], "FLUENT": [], "PROBABILITY": [], "RECOGNISED": []})
    out = io.StringIO()
    write_results(decisions, "map", out)
    assert out.getvalue() == "time,fluent,truth\n"
