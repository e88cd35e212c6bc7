import pandas as pd
import pytest

from src.main import argparser, main


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "fig.nar").write_text(
        "@horizon 12\n!holdsAt(meeting(id1,id2),0)\nhappens(active(id1),3)\nclose(id1,id2,25,3)\nhappens(running(id1),8)\n"
    )
    (tmp_path / "fig.ann").write_text("".join(f"holdsAt(meeting(id1,id2),{t})\n" for t in range(4, 9)))
    (tmp_path / "train.yaml").write_text("entries:\n  - narrative: fig.nar\n    annotation: fig.ann\n")
    return tmp_path


def test_learn_method_flag_sets_learner():
    args = argparser().parse_args(["learn", "kb.mlnec", "train.yaml", "--method", "perceptron"])
    assert args.learner == "perceptron"


def test_recognize_writes_csv(workspace):
    out = workspace / "result.csv"
    metrics = workspace / "metrics.csv"
    code = main(
        [
            "recognize",
            "meeting_moving.mlnec",
            str(workspace / "fig.nar"),
            "--annotation",
            str(workspace / "fig.ann"),
            "--metrics",
            str(metrics),
            "-o",
            str(out),
        ]
    )
    assert code == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["time", "fluent", "probability"]
    assert len(frame) == 8 * 13
    report = pd.read_csv(metrics)
    assert report.loc[0, "tp"] == 5


def test_map_recognition_writes_truth(workspace):
    out = workspace / "result.csv"
    assert main(["recognize", "meeting_moving.mlnec", str(workspace / "fig.nar"), "--mode", "map", "-o", str(out)]) == 0
    frame = pd.read_csv(out, dtype={"truth": str})
    meeting = frame[frame["fluent"] == "meeting(id1,id2)"]
    assert list(meeting.loc[meeting["truth"] == "true", "time"]) == [4, 5, 6, 7, 8]


def test_compile_then_learn(workspace):
    compiled = workspace / "compiled.mlnec"
    assert main(["compile", "meeting_moving.mlnec", "--policy", "SI_h", "-o", str(compiled)]) == 0
    assert "inertia_holds" in compiled.read_text()
    learned = workspace / "learned.mlnec"
    code = main(["learn", str(compiled), str(workspace / "train.yaml"), "--epochs", "1", "-o", str(learned)])
    assert code == 0
    assert learned.read_text().startswith("// learned from")


def test_ground_stats(workspace):
    out = workspace / "stats.csv"
    assert main(["ground", "meeting_moving.mlnec", str(workspace / "fig.nar"), "--stats", "-o", str(out)]) == 0
    assert len(pd.read_csv(out))


def test_simulate_and_ablate(workspace):
    narrative = workspace / "walk.nar"
    annotation = workspace / "walk.ann"
    assert main(["--seed", "3", "simulate", "random-walkers", "-o", str(narrative), "--annotation", str(annotation)]) == 0
    assert narrative.read_text().startswith("@horizon")
    out_dir = workspace / "ablated"
    code = main(
        ["ablate", "meeting_moving.mlnec", str(narrative), "--lengths", "5", "--repetitions", "2", "--out-dir", str(out_dir)]
    )
    assert code == 0
    assert sorted(p.name for p in out_dir.iterdir()) == ["walk-L5-r0.nar", "walk-L5-r1.nar"]


def test_inertia_lab_csv(workspace):
    out = workspace / "curves.csv"
    assert main(["inertia-lab", "si-eq-true", "--weights", "1", "2", "--horizon", "5", "-o", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["series", "time", "probability"]
    assert len(frame) == 12


def test_errors_exit_with_two(workspace):
    assert main(["recognize", "absent.mlnec", str(workspace / "fig.nar")]) == 2
    (workspace / "bad.nar").write_text("happens(fly(id1),1)\n")
    assert main(["recognize", "meeting_moving.mlnec", str(workspace / "bad.nar")]) == 2
    (workspace / "bad.yaml").write_text("inference:\n  samples: -3\n")
    assert main(["--config", str(workspace / "bad.yaml"), "recognize", "meeting_moving.mlnec", str(workspace / "fig.nar")]) == 2


def test_usage_error():
    with pytest.raises(SystemExit):
        main(["recognize"])
