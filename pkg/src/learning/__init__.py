from src.learning.gradient import Expectation, cll_gradient, expectations, negative_cll
from src.learning.instances import TrainingInstance, build_instances, make_instance, stack_weights
from src.learning.newton import diagonal_newton_epoch, train_diagonal_newton
from src.learning.perceptron import perceptron_epoch, train_perceptron

__all__ = [
    "Expectation",
    "TrainingInstance",
    "build_instances",
    "cll_gradient",
    "diagonal_newton_epoch",
    "expectations",
    "make_instance",
    "negative_cll",
    "perceptron_epoch",
    "stack_weights",
    "train_diagonal_newton",
    "train_perceptron",
]
