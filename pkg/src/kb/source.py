from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from src.logic.formulas import HARD, Atom, Formula, Implies, Not
from src.logic.terms import HOLDS_AT, INITIATED_AT, TERMINATED_AT, Signature


class RuleKind(str, Enum):
    INITIATION = "initiation"
    TERMINATION = "termination"
    AXIOM = "axiom"
    CONSTRAINT = "constraint"


class FormulaGroup(str, Enum):
    """Role of a compiled formula; written as ``@<value>`` tags in compiled KB files."""

    EFFECT_HOLDS = "effect_holds"
    EFFECT_NOT_HOLDS = "effect_not_holds"
    INERTIA_HOLDS = "inertia_holds"
    INERTIA_NOT_HOLDS = "inertia_not_holds"
    CONSTRAINT = "constraint"

    @property
    def is_effect(self) -> bool:
        return self in (FormulaGroup.EFFECT_HOLDS, FormulaGroup.EFFECT_NOT_HOLDS)

    @property
    def is_inertia(self) -> bool:
        return self in (FormulaGroup.INERTIA_HOLDS, FormulaGroup.INERTIA_NOT_HOLDS)


def rule_head(formula: Formula) -> Optional[Atom]:
    """Head atom of a ``head :- body`` rule (possibly negated), else None."""
    if not isinstance(formula, Implies):
        return None
    consequent = formula.consequent
    if isinstance(consequent, Not):
        consequent = consequent.operand
    return consequent if isinstance(consequent, Atom) else None


def classify(formula: Formula) -> RuleKind:
    head = rule_head(formula)
    if head is not None and not isinstance(formula.consequent, Not):
        if head.predicate == INITIATED_AT:
            return RuleKind.INITIATION
        if head.predicate == TERMINATED_AT:
            return RuleKind.TERMINATION
    if head is not None and head.predicate == HOLDS_AT:
        return RuleKind.AXIOM
    return RuleKind.CONSTRAINT


@dataclass(frozen=True)
class Rule:
    """
    Knowledge base statement.

    Attributes:
        formula: Rule as a formula; ``head :- body`` is ``Implies(body, head)``
        weight: Finite weight, HARD, or None when the policy decides
        kind: initiation, termination, axiom or constraint
        name: Stable identifier used for provenance and weight names
        group: Compiled-formula role, set only in compiled knowledge bases
        tie: Shared parameter of a compiled formula (written ``@group=tie``)
    """

    formula: Formula
    weight: Optional[float] = None
    kind: RuleKind = RuleKind.CONSTRAINT
    name: str = ""
    group: Optional[FormulaGroup] = None
    tie: Optional[str] = None

    @property
    def is_hard(self) -> bool:
        return self.weight == HARD


@dataclass(frozen=True)
class KnowledgeBaseSource:
    signature: Signature
    rules: List[Rule] = field(default_factory=list)
    policy: Optional[object] = None

    @property
    def is_compiled(self) -> bool:
        return bool(self.rules) and all(r.group is not None for r in self.rules)

    def effect_rules(self) -> List[Rule]:
        return [r for r in self.rules if r.kind in (RuleKind.INITIATION, RuleKind.TERMINATION)]
