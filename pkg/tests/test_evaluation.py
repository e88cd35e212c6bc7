from dataclasses import replace

import pytest

from src.compiler import InertiaVariant, compile_kb, crisp_holds
from src.config import AblationSpec, LearningSettings, Settings
from src.errors import ConfigurationError, NarrativeError, StageError
from src.importer import load_scenario
from src.recognition import cross_validate, evaluate, robustness, simulate
from src.recognition.evaluation import assign_folds

TRAINING = [
    "@horizon 8\nhappens(start(a),1)\nhappens(stop(a),5)\n",
    "@horizon 8\nholdsAt(tracked(a),0)\nhappens(stop(a),3)\n",
    "@horizon 8\nhappens(start(a),2)\n",
    "@horizon 8\nhappens(start(a),0)\nhappens(stop(a),2)\nhappens(start(a),5)\n",
]


@pytest.fixture(scope="module")
def fig1(meeting_kb):
    return simulate(load_scenario("fig1"), kb=meeting_kb)


@pytest.fixture
def tracked(inertia_kb, narrative_of):
    ckb = compile_kb(inertia_kb)
    narratives = []
    for k, text in enumerate(TRAINING):
        narrative = narrative_of(inertia_kb, text, name=f"t{k}")
        narratives.append(narrative.with_annotation(crisp_holds(ckb, narrative)))
    return narratives


def test_crisp_evaluation_is_perfect(meeting_kb, fig1):
    evaluation = evaluate(meeting_kb, [fig1], "crisp")
    assert evaluation.report.f1 == 1.0
    assert evaluation.report.tp == 17
    table = evaluation.table()
    assert list(table["narrative"]) == ["fig1", "total"]


def test_marginal_evaluation_pools_examples(meeting_kb, fig1):
    evaluation = evaluate(meeting_kb, [fig1, replace(fig1, name="fig1-copy")], "marginal")
    assert len(evaluation.probabilities) == 2 * 248
    assert evaluation.report.tp == 2 * evaluation.per_narrative["fig1"].tp
    assert 0.0 < evaluation.report.auprc <= 1.0
    sweep = evaluation.sweep()
    assert sweep["RECALL"].is_monotonic_decreasing


def test_evaluation_needs_annotation(inertia_kb, narrative_of):
    with pytest.raises(NarrativeError):
        evaluate(inertia_kb, [narrative_of(inertia_kb, "@horizon 2\n")])


def test_folds_from_manifest():
    assert assign_folds([1, 0, 1], None) == [1, 0, 1]


def test_random_folds_are_balanced_and_seeded():
    folds = assign_folds([None] * 5, 2, seed=4)
    assert sorted(folds) == [0, 0, 0, 1, 1]
    assert assign_folds([None] * 5, 2, seed=4) == folds


@pytest.mark.parametrize(
    "folds, k",
    [([0, None], 2), ([None, None], None), ([None, None], 1), ([None, None], 3)],
)
def test_invalid_folds(folds, k):
    with pytest.raises(ConfigurationError):
        assign_folds(folds, k)


def test_cross_validation(inertia_kb, tracked):
    settings = Settings(learning=LearningSettings(epochs=2))
    frame, total = cross_validate(inertia_kb, tracked, [0, 0, 1, 1], settings=settings)
    assert list(frame["FOLD"]) == [0, 1]
    assert list(frame["NARRATIVES"]) == [2, 2]
    assert total.tp == frame["TP"].sum()
    assert total.fn == frame["FN"].sum()


def test_cross_validation_reports_stage(inertia_kb, tracked, narrative_of):
    narratives = tracked[:1] + [narrative_of(inertia_kb, "@horizon 3\n", name="bare")]
    with pytest.raises(StageError):
        cross_validate(inertia_kb, narratives, [0, 1], settings=Settings(learning=LearningSettings(epochs=1)))


def test_robustness_rows(meeting_kb, fig1):
    spec = AblationSpec(start_probability=0.5, lengths=[2], repetitions=2, min_entities=1)
    frame = robustness(meeting_kb, [fig1], [InertiaVariant.HI, "SI_h"], spec, train=False)
    assert len(frame) == 4
    assert list(frame["POLICY"]) == ["HI", "HI", "SI_h", "SI_h"]
    assert list(frame["REPETITION"]) == [0, 1, 0, 1]
    assert (frame["F1_DROP"] == frame["F1_ORIGINAL"] - frame["F1_ABLATED"]).all()


@pytest.mark.slow
def test_soft_inertia_survives_evidence_erasure(meeting_kb):
    walkers = load_scenario("random-walkers")
    narratives = [replace(simulate(walkers, seed=s, kb=meeting_kb), name=f"walk{s}") for s in range(5)]
    spec = AblationSpec(start_probability=0.01, lengths=[10, 20], repetitions=5)
    settings = Settings(learning=LearningSettings(epochs=5))
    frame = robustness(meeting_kb, narratives, ["SI_h", "HI", "NONE"], spec, settings)
    assert len(frame) == 3 * 2 * 5
    drops = frame.groupby(["POLICY", "LENGTH"])["F1_DROP"].mean()
    assert drops["SI_h"].max() <= 0.15
    assert drops["HI"].mean() <= drops["NONE"].mean()
