import logging
from dataclasses import replace
from typing import Optional

from src.compiler.axioms import event_calculus_axioms
from src.compiler.completion import (
    CompiledFormula,
    CompiledKB,
    CompletedKB,
    Definition,
    complete,
    specialize_axioms,
)
from src.compiler.crisp import crisp_holds
from src.compiler.policy import InertiaPolicy, InertiaVariant, apply_policy
from src.kb.source import KnowledgeBaseSource
from src.logic.formulas import HARD

logger = logging.getLogger(__name__)


def _fill_missing(ckb: CompiledKB, initial_weight: float = 1.0) -> CompiledKB:
    formulas = []
    for formula in ckb.formulas:
        if formula.weight is None:
            formula = replace(formula, weight=initial_weight if formula.group.is_effect else HARD)
        formulas.append(formula)
    return replace(ckb, formulas=tuple(formulas))


def compile_kb(
    kb: KnowledgeBaseSource, policy: Optional[InertiaPolicy] = None, sigma_soft: bool = True
) -> CompiledKB:
    """
    Complete, specialise and weight a knowledge base.

    A knowledge base that is already compiled (every rule tagged with its
    group) is rebuilt as is and keeps its weights unless a policy is given.

    Args:
        kb: Parsed knowledge base
        policy: Inertia policy; HI when omitted for a source knowledge base
        sigma_soft: Effect rules soft (True) or hard

    Returns:
        Weighted CompiledKB
    """
    if kb.is_compiled:
        ckb = CompiledKB.from_source(kb)
        if policy is None:
            return _fill_missing(ckb)
        return apply_policy(ckb, policy, sigma_soft)
    ckb = specialize_axioms(complete(kb))
    return apply_policy(ckb, policy or InertiaPolicy(), sigma_soft)


__all__ = [
    "CompiledFormula",
    "CompiledKB",
    "CompletedKB",
    "Definition",
    "InertiaPolicy",
    "InertiaVariant",
    "apply_policy",
    "compile_kb",
    "complete",
    "crisp_holds",
    "event_calculus_axioms",
    "specialize_axioms",
]
