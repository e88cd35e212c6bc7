"""
Inertia policies: which compiled formulas are hard and which carry weights.

    HI       every inertia formula hard
    SI_h     holdsAt-persistence soft, !holdsAt-persistence hard
    SI_negh  !holdsAt-persistence soft, holdsAt-persistence hard
    SI       every inertia formula soft, one weight each
    SI_eq    every inertia formula soft, all tied to one weight
    NONE     inertia formulas dropped (effect rules only)
"""

import logging
import math
from dataclasses import replace
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, field_validator

from src.compiler.completion import CompiledKB
from src.errors import PolicyError
from src.kb.source import FormulaGroup
from src.logic.formulas import HARD

logger = logging.getLogger(__name__)

SHARED_INERTIA = "inertia"


class InertiaVariant(str, Enum):
    HI = "HI"
    SI_H = "SI_h"
    SI_NEGH = "SI_negh"
    SI_EQ = "SI_eq"
    SI = "SI"
    NONE = "NONE"

    @property
    def soft_groups(self) -> frozenset:
        if self == InertiaVariant.SI_H:
            return frozenset({FormulaGroup.INERTIA_HOLDS})
        if self == InertiaVariant.SI_NEGH:
            return frozenset({FormulaGroup.INERTIA_NOT_HOLDS})
        if self in (InertiaVariant.SI, InertiaVariant.SI_EQ):
            return frozenset({FormulaGroup.INERTIA_HOLDS, FormulaGroup.INERTIA_NOT_HOLDS})
        return frozenset()


class InertiaPolicy(BaseModel):
    """
    Attributes:
        variant: Which inertia formulas become soft
        weights: Explicit initial weights, one per softened inertia formula in
            program order (a single value for SI_eq)
        shared_weight: Initial tied weight of SI_eq when no weights are given
        initial_weight: Weight of soft formulas that have none
    """

    variant: InertiaVariant = InertiaVariant.HI
    weights: Optional[List[float]] = None
    shared_weight: float = 1.0
    initial_weight: float = 1.0

    @field_validator("weights")
    @classmethod
    def _finite(cls, value):
        if value is not None and not all(math.isfinite(w) for w in value):
            raise ValueError("inertia weights must be finite")
        return value


def _effect_weight(weight: Optional[float], policy: InertiaPolicy, sigma_soft: bool) -> float:
    if not sigma_soft or weight == HARD:
        return HARD
    return policy.initial_weight if weight is None else float(weight)


def apply_policy(ckb: CompiledKB, policy: InertiaPolicy, sigma_soft: bool = True) -> CompiledKB:
    """
    Set the hard/soft status and initial weights of a compiled program.

    Args:
        ckb: Compiled program (weighted or not)
        policy: Inertia policy
        sigma_soft: Effect formulas keep their (or the initial) weight; False
            makes them hard

    Returns:
        CompiledKB with every formula weighted

    Raises:
        PolicyError: Explicit weight list does not match the softened formulas
    """
    variant = policy.variant
    soft_groups = variant.soft_groups
    softened = [f for f in ckb.sigma_prime if f.group in soft_groups]
    expected = 1 if variant == InertiaVariant.SI_EQ else len(softened)
    if policy.weights is not None and len(policy.weights) != expected:
        raise PolicyError(
            f"{variant.value} softens {expected} inertia weight(s), got {len(policy.weights)} explicit weight(s)"
        )
    if policy.weights is not None:
        explicit = list(policy.weights)
    elif variant == InertiaVariant.SI_EQ:
        explicit = [policy.shared_weight]
    else:
        explicit = [policy.initial_weight] * len(softened)

    formulas = []
    position = 0
    for formula in ckb.formulas:
        if formula.group.is_effect:
            formulas.append(replace(formula, weight=_effect_weight(formula.weight, policy, sigma_soft), tie=None))
        elif formula.group.is_inertia:
            if variant == InertiaVariant.NONE:
                continue
            if formula.group not in soft_groups:
                formulas.append(replace(formula, weight=HARD, tie=None))
            elif variant == InertiaVariant.SI_EQ:
                formulas.append(replace(formula, weight=float(explicit[0]), tie=SHARED_INERTIA))
            else:
                formulas.append(replace(formula, weight=float(explicit[position]), tie=None))
                position += 1
        else:
            formulas.append(replace(formula, weight=HARD if formula.weight is None else formula.weight))
    logger.info(
        "applied policy %s (effect rules %s): %d soft formula(s)",
        variant.value,
        "soft" if sigma_soft else "hard",
        sum(f.is_soft for f in formulas),
    )
    return replace(ckb, formulas=tuple(formulas))
