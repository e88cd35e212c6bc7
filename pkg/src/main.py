"""
Command-line entry point.

Usage::

    python -m src.main recognize meeting_moving.mlnec walk01.nar --threshold 0.5
    python -m src.main learn meeting_moving.mlnec train.yaml --method dn -o learned.mlnec
    python -m src.main inertia-lab si-eq-true --weights 0.5 1 2

Results go to stdout (or ``-o``); logs go to stderr. Exit code 2 signals an
input, model or inference error, 1 an unexpected failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from src.config import Settings, load_settings
from src.errors import ECError
from src.exporter import format_annotation, format_narrative, serialize_compiled, write_results, write_table
from src.importer import load_annotation, load_kb, load_manifest, load_narrative, load_scenario, scenario_presets
from src.network.grounder import ground, network_stats
from src.recognition.ablation import ablate
from src.recognition.evaluation import assign_folds, cross_validate, evaluate, robustness
from src.recognition.inertia_lab import SCENARIOS, run_scenario
from src.recognition.metrics import metrics
from src.recognition.pipeline import as_compiled, learn, recognize, stage
from src.recognition.simulate import simulate

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
VARIANTS = ["HI", "SI_h", "SI_negh", "SI", "SI_eq", "NONE"]


def _output(args, text: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_target(args):
    return args.output if getattr(args, "output", None) else sys.stdout


def argparser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlnec",
        description="Probabilistic event recognition with Markov logic and the Event Calculus",
    )
    parser.add_argument("--seed", type=int, default=None, help="Random seed (default 0)")
    parser.add_argument("--threads", type=int, default=None, help="Parallel workers (default 1)")
    parser.add_argument("--format", choices=["csv"], default="csv", help="Result format")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--config", type=Path, default=None, help="YAML settings file")
    parser.add_argument("--progress", action="store_true", help="Show progress bars")

    policy = argparse.ArgumentParser(add_help=False)
    policy.add_argument("--policy", choices=VARIANTS, default=None, help="Inertia policy (default HI)")
    policy.add_argument("--sigma-hard", action="store_true", help="Make the effect rules hard")
    policy.add_argument("--inertia-weights", type=float, nargs="+", default=None)
    policy.add_argument("--initial-weight", type=float, default=None, help="Weight of unweighted soft rules")

    inference = argparse.ArgumentParser(add_help=False)
    inference.add_argument("--method", default="auto", help="auto, exact, mcsat (marginal) or localsearch (map)")
    inference.add_argument("--samples", type=int, default=None, help="MC-SAT samples")
    inference.add_argument("--burn-in", type=int, default=None)

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("-o", "--output", default=None, help="Output file (default stdout)")

    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("compile", parents=[policy, output], help="Compile a knowledge base")
    p.add_argument("kb")

    p = commands.add_parser("ground", parents=[policy, output], help="Ground a knowledge base on a narrative")
    p.add_argument("kb")
    p.add_argument("narrative")
    p.add_argument("--stats", action="store_true", help="Per-formula clause counts instead of the network")

    p = commands.add_parser("infer", parents=[policy, inference, output], help="Marginal or MAP inference")
    p.add_argument("kb")
    p.add_argument("narrative")
    p.add_argument("--mode", choices=["marginal", "map"], default="marginal")

    p = commands.add_parser("learn", parents=[policy, output], help="Learn weights from a manifest")
    p.add_argument("kb")
    p.add_argument("manifest")
    p.add_argument("--method", dest="learner", choices=["dn", "perceptron"], default=None)
    p.add_argument("--samples", type=int, default=None, help="MC-SAT samples per instance")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--inference", choices=["exact", "mcsat"], default=None)

    p = commands.add_parser("recognize", parents=[policy, inference, output], help="Recognise CEs in a narrative")
    p.add_argument("kb")
    p.add_argument("narrative")
    p.add_argument("--mode", choices=["marginal", "map", "crisp"], default="marginal")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--annotation", default=None, help="Annotation file; metrics are written to --metrics")
    p.add_argument("--metrics", default=None, help="Metrics CSV path (default stderr)")

    p = commands.add_parser("evaluate", parents=[policy, inference, output], help="Metrics over a manifest")
    p.add_argument("kb")
    p.add_argument("manifest")
    p.add_argument("--mode", choices=["marginal", "map", "crisp"], default="marginal")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--folds", type=int, default=None, help="Cross-validate with learning on the other folds")
    p.add_argument("--sweep", default=None, help="Write the F1-vs-threshold sweep to this CSV")

    p = commands.add_parser("ablate", parents=[policy, inference, output], help="Erase evidence intervals")
    p.add_argument("kb")
    p.add_argument("input", help="Narrative (writes degraded copies) or manifest (robustness report)")
    p.add_argument("--probability", type=float, default=None)
    p.add_argument("--lengths", type=int, nargs="+", default=None)
    p.add_argument("--repetitions", type=int, default=None)
    p.add_argument("--out-dir", default=".", help="Directory for degraded narratives")
    p.add_argument("--variants", nargs="+", choices=VARIANTS, default=["SI_h", "HI", "NONE"])
    p.add_argument("--no-train", action="store_true", help="Skip weight learning in the robustness report")

    p = commands.add_parser("simulate", parents=[output], help="Generate a synthetic narrative")
    p.add_argument("scenario", help=f"Scenario YAML or preset ({', '.join(scenario_presets())})")
    p.add_argument("--annotation", default=None, help="Write the annotation to this file")

    p = commands.add_parser("inertia-lab", parents=[output], help="Fluent probability curves under inertia policies")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--weights", type=float, nargs="+", default=[1.0])
    p.add_argument("--horizon", type=int, default=20)
    return parser


def _overrides(args) -> Dict:
    return {
        "seed": args.seed,
        "threads": args.threads,
        "progress": True if args.progress else None,
        "threshold": getattr(args, "threshold", None),
        "inference": {"samples": getattr(args, "samples", None), "burn_in": getattr(args, "burn_in", None)},
        "policy": {
            "variant": getattr(args, "policy", None),
            "sigma_soft": False if getattr(args, "sigma_hard", False) else None,
            "weights": getattr(args, "inertia_weights", None),
            "initial_weight": getattr(args, "initial_weight", None),
        },
        "learning": {
            "method": getattr(args, "learner", None),
            "samples": getattr(args, "samples", None) if args.command == "learn" else None,
            "epochs": getattr(args, "epochs", None),
            "learning_rate": getattr(args, "learning_rate", None),
            "inference": getattr(args, "inference", None),
        },
        "ablation": {
            "start_probability": getattr(args, "probability", None),
            "lengths": getattr(args, "lengths", None),
            "repetitions": getattr(args, "repetitions", None),
        },
    }


def _compile(args, settings: Settings):
    kb = load_kb(args.kb)
    return kb, as_compiled(kb, settings)


def cmd_compile(args, settings: Settings) -> None:
    _, ckb = _compile(args, settings)
    _output(args, serialize_compiled(ckb, f"compiled from {args.kb}, policy {settings.policy.variant.value}"))


def cmd_ground(args, settings: Settings) -> None:
    kb, ckb = _compile(args, settings)
    narrative = load_narrative(args.narrative, kb.signature)
    with stage("ground", narrative.name):
        network = ground(ckb, narrative, settings.progress)
    if args.stats:
        write_table(network_stats(network).to_frame(), _csv_target(args))
    else:
        _output(args, network.to_text())


def cmd_infer(args, settings: Settings) -> None:
    kb, ckb = _compile(args, settings)
    narrative = load_narrative(args.narrative, kb.signature)
    result = recognize(ckb, narrative, args.mode, settings=settings, method=args.method)
    write_results(result.decisions, args.mode, _csv_target(args))


def cmd_learn(args, settings: Settings) -> None:
    kb = load_kb(args.kb)
    narratives, _, _ = load_manifest(args.manifest, kb.signature)
    learned = learn(kb, narratives, settings)
    header = f"learned from {args.manifest} by {settings.learning.method}, policy {settings.policy.variant.value}"
    _output(args, serialize_compiled(learned, header))


def cmd_recognize(args, settings: Settings) -> None:
    kb, ckb = _compile(args, settings)
    narrative = load_narrative(args.narrative, kb.signature)
    result = recognize(ckb, narrative, args.mode, settings=settings, method=args.method)
    write_results(result.decisions, args.mode, _csv_target(args))
    if args.annotation:
        report = metrics(result.decisions, load_annotation(args.annotation, kb.signature), settings.threshold)
        write_table(pd.DataFrame([report.as_row()]), args.metrics or sys.stderr)


def cmd_evaluate(args, settings: Settings) -> None:
    kb = load_kb(args.kb)
    narratives, folds, manifest = load_manifest(args.manifest, kb.signature)
    k = args.folds or manifest.folds
    if k or any(f is not None for f in folds):
        table, report = cross_validate(
            kb, narratives, assign_folds(folds, k, settings.seed), args.mode, settings, args.method
        )
        write_table(table, _csv_target(args))
        logger.info("cross-validated F1 %.4f", report.f1)
        return
    evaluation = evaluate(kb, narratives, args.mode, settings=settings, method=args.method)
    write_table(evaluation.table(), _csv_target(args))
    if args.sweep:
        write_table(evaluation.sweep(), args.sweep)


def cmd_ablate(args, settings: Settings) -> None:
    kb = load_kb(args.kb)
    if Path(args.input).suffix.lower() in (".yaml", ".yml"):
        narratives, _, _ = load_manifest(args.input, kb.signature)
        report = robustness(kb, narratives, args.variants, settings.ablation, settings, train=not args.no_train)
        write_table(report, _csv_target(args))
        return
    narrative = load_narrative(args.input, kb.signature)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for copy in ablate(narrative, settings.ablation, settings.progress):
        target = out_dir / f"{narrative.name}-L{copy.length}-r{copy.repetition}.nar"
        target.write_text(format_narrative(copy.narrative))
        logger.info("%s: %d interval(s) erased", target, len(copy.starts))


def cmd_simulate(args, settings: Settings) -> None:
    spec = load_scenario(args.scenario)
    narrative = simulate(spec, settings.seed)
    _output(args, format_narrative(narrative))
    if args.annotation and narrative.annotation is not None:
        Path(args.annotation).write_text(format_annotation(narrative.annotation))


def cmd_inertia_lab(args, settings: Settings) -> None:
    curves = run_scenario(args.scenario, args.weights, args.horizon, settings)
    write_table(curves, _csv_target(args))


COMMANDS = {
    "compile": cmd_compile,
    "ground": cmd_ground,
    "infer": cmd_infer,
    "learn": cmd_learn,
    "recognize": cmd_recognize,
    "evaluate": cmd_evaluate,
    "ablate": cmd_ablate,
    "simulate": cmd_simulate,
    "inertia-lab": cmd_inertia_lab,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = argparser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr, force=True)
    try:
        settings = load_settings(args.config, _overrides(args))
        COMMANDS[args.command](args, settings)
    except (ECError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return 2
    except Exception:
        logger.exception("unexpected failure in %s", args.command)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
