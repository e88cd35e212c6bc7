"""Clausal normal form conversion."""

import logging
from typing import Dict, FrozenSet, List, Optional

from src.errors import UnsupportedFormulaError
from src.logic.formulas import (
    HARD,
    And,
    Atom,
    Clause,
    Exists,
    Formula,
    Iff,
    Implies,
    Literal,
    Not,
    Or,
    Truth,
)

logger = logging.getLogger(__name__)

_ClauseSet = List[FrozenSet[Literal]]


def _nnf(formula: Formula, positive: bool = True) -> Formula:
    """Eliminate implications/equivalences and push negations onto atoms."""
    if isinstance(formula, Atom):
        return formula if positive else Not(formula)
    if isinstance(formula, Truth):
        return Truth(formula.value == positive)
    if isinstance(formula, Not):
        return _nnf(formula.operand, not positive)
    if isinstance(formula, And):
        parts = tuple(_nnf(f, positive) for f in formula.operands)
        return And(parts) if positive else Or(parts)
    if isinstance(formula, Or):
        parts = tuple(_nnf(f, positive) for f in formula.operands)
        return Or(parts) if positive else And(parts)
    if isinstance(formula, Implies):
        return _nnf(Or((Not(formula.antecedent), formula.consequent)), positive)
    if isinstance(formula, Iff):
        expanded = And(
            (
                Or((Not(formula.left), formula.right)),
                Or((formula.left, Not(formula.right))),
            )
        )
        return _nnf(expanded, positive)
    if isinstance(formula, Exists):
        raise UnsupportedFormulaError("existential quantifiers cannot be converted to clauses")
    raise TypeError(f"unknown formula node {type(formula).__name__}")


def _tautological(literals: FrozenSet[Literal]) -> bool:
    return any(lit.negated() in literals for lit in literals)


def _dedupe(clauses: _ClauseSet) -> _ClauseSet:
    seen: Dict[FrozenSet[Literal], None] = {}
    for clause in clauses:
        if not _tautological(clause):
            seen.setdefault(clause, None)
    return list(seen)


def _clauses(formula: Formula) -> _ClauseSet:
    # An empty list is "true"; a list holding the empty clause is "false".
    if isinstance(formula, Atom):
        return [frozenset({Literal(formula, True)})]
    if isinstance(formula, Not):
        return [frozenset({Literal(formula.operand, False)})]
    if isinstance(formula, Truth):
        return [] if formula.value else [frozenset()]
    if isinstance(formula, And):
        result: _ClauseSet = []
        for part in formula.operands:
            result.extend(_clauses(part))
        return _dedupe(result)
    if isinstance(formula, Or):
        result = [frozenset()]
        for part in formula.operands:
            part_clauses = _clauses(part)
            result = _dedupe([left | right for left in result for right in part_clauses])
            if not result:
                return []
        return result
    raise TypeError(f"unexpected node {type(formula).__name__} after negation normal form")


def to_cnf(formula: Formula, weight: Optional[float] = None, origin: str = "") -> List[Clause]:
    """
    Convert a quantifier-free formula into an equivalent list of clauses.

    A finite weight is split equally among the resulting clauses; hard and
    unset weights are copied unchanged.

    Args:
        formula: Formula with implicitly universal variables
        weight: Formula weight, :data:`HARD`, or None
        origin: Source formula identifier stored on each clause

    Returns:
        Clauses in deterministic order. A tautology yields an empty list.

    Example:
        >>> to_cnf(Iff(p, q))
        [Clause(!p v q), Clause(p v !q)]
    """
    clause_sets = _clauses(_nnf(formula))
    if weight is None or weight == HARD:
        share = weight
    else:
        share = weight / len(clause_sets) if clause_sets else weight
    clauses = [Clause(tuple(literals), share, origin) for literals in clause_sets]
    logger.debug("%s -> %d clause(s)", origin or "formula", len(clauses))
    return clauses
