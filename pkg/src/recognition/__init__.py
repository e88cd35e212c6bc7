from src.recognition.ablation import AblatedNarrative, ablate
from src.recognition.evaluation import Evaluation, cross_validate, evaluate, robustness
from src.recognition.metrics import auprc, metrics, threshold_sweep
from src.recognition.pipeline import Recognition, learn, recognize
from src.recognition.simulate import simulate

__all__ = [
    "AblatedNarrative",
    "Evaluation",
    "Recognition",
    "ablate",
    "auprc",
    "cross_validate",
    "evaluate",
    "learn",
    "metrics",
    "recognize",
    "robustness",
    "simulate",
    "threshold_sweep",
]
