"""
Quantifier-free formulas, literals and weighted clauses.

Formulas are immutable trees. ``format_formula`` prints them in the knowledge
base syntax (``!`` not, ``^`` and, ``v`` or, ``=>``, ``<=>``) with every
compound operand parenthesised, so printing and re-parsing gives back the same
tree.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Set, Tuple, Union

from src.logic.terms import BOUNDARY, Func, Succ, Term, Var, term_variables

HARD = math.inf


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"

    @property
    def has_boundary(self) -> bool:
        return any(_contains_boundary(a) for a in self.args)


def _contains_boundary(term: Term) -> bool:
    if term is BOUNDARY:
        return True
    if isinstance(term, Func):
        return any(_contains_boundary(a) for a in term.args)
    if isinstance(term, Succ):
        return _contains_boundary(term.term)
    return False


@dataclass(frozen=True)
class Truth:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = Truth(True)
FALSE = Truth(False)


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    operands: Tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    operands: Tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    variables: Tuple[Var, ...]
    body: "Formula"


Formula = Union[Atom, Truth, Not, And, Or, Implies, Iff, Exists]


def conjunction(parts) -> "Formula":
    parts = tuple(parts)
    if not parts:
        return TRUE
    return parts[0] if len(parts) == 1 else And(parts)


def disjunction(parts) -> "Formula":
    parts = tuple(parts)
    if not parts:
        return FALSE
    return parts[0] if len(parts) == 1 else Or(parts)


def children(formula: Formula) -> Tuple[Formula, ...]:
    if isinstance(formula, Not):
        return (formula.operand,)
    if isinstance(formula, (And, Or)):
        return formula.operands
    if isinstance(formula, Implies):
        return (formula.antecedent, formula.consequent)
    if isinstance(formula, Iff):
        return (formula.left, formula.right)
    if isinstance(formula, Exists):
        return (formula.body,)
    return ()


def atoms(formula: Formula) -> Iterator[Atom]:
    if isinstance(formula, Atom):
        yield formula
        return
    for child in children(formula):
        yield from atoms(child)


def variables(formula: Formula) -> Set[Var]:
    found: Set[Var] = set()
    for atom in atoms(formula):
        for arg in atom.args:
            found.update(term_variables(arg))
    return found


def predicates(formula: Formula) -> Set[str]:
    return {a.predicate for a in atoms(formula)}


def evaluate(formula: Formula, truth: Callable[[Atom], bool]) -> bool:
    """Truth value of a ground formula under an atom valuation."""
    if isinstance(formula, Atom):
        return truth(formula)
    if isinstance(formula, Truth):
        return formula.value
    if isinstance(formula, Not):
        return not evaluate(formula.operand, truth)
    if isinstance(formula, And):
        return all(evaluate(f, truth) for f in formula.operands)
    if isinstance(formula, Or):
        return any(evaluate(f, truth) for f in formula.operands)
    if isinstance(formula, Implies):
        return (not evaluate(formula.antecedent, truth)) or evaluate(formula.consequent, truth)
    if isinstance(formula, Iff):
        return evaluate(formula.left, truth) == evaluate(formula.right, truth)
    raise TypeError(f"cannot evaluate {type(formula).__name__}")


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"!{self.atom}"

    def negated(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    @property
    def key(self) -> Tuple[str, int]:
        return (str(self.atom), 0 if self.positive else 1)


@dataclass(frozen=True)
class Clause:
    """
    Disjunction of literals with a weight.

    ``weight`` is a finite real, :data:`HARD`, or ``None`` while a compiled
    formula is still waiting for its inertia policy. Literals are kept sorted
    and free of duplicates.
    """

    literals: Tuple[Literal, ...]
    weight: Optional[float] = None
    origin: str = ""

    def __post_init__(self):
        unique = {lit.key: lit for lit in self.literals}
        object.__setattr__(self, "literals", tuple(unique[k] for k in sorted(unique)))
        if self.weight is not None:
            if math.isnan(self.weight) or self.weight == -math.inf:
                raise ValueError(f"invalid clause weight {self.weight}")

    @property
    def is_hard(self) -> bool:
        return self.weight == HARD

    @property
    def is_tautology(self) -> bool:
        signs = {}
        for lit in self.literals:
            if signs.setdefault(lit.atom, lit.positive) != lit.positive:
                return True
        return False

    def to_formula(self) -> Formula:
        return disjunction(lit.atom if lit.positive else Not(lit.atom) for lit in self.literals)

    def __str__(self) -> str:
        body = " v ".join(str(lit) for lit in self.literals) or "false"
        if self.weight is None:
            return body
        return f"{'hard' if self.is_hard else repr(self.weight)} {body}"


def _is_simple(formula: Formula) -> bool:
    return isinstance(formula, (Atom, Truth)) or (
        isinstance(formula, Not) and isinstance(formula.operand, (Atom, Truth))
    )


def _operand(formula: Formula) -> str:
    text = format_formula(formula)
    return text if _is_simple(formula) else f"({text})"


def format_formula(formula: Formula) -> str:
    """Render a formula in knowledge base syntax."""
    if isinstance(formula, (Atom, Truth)):
        return str(formula)
    if isinstance(formula, Not):
        return f"!{_operand(formula.operand)}"
    if isinstance(formula, And):
        return " ^ ".join(_operand(f) for f in formula.operands)
    if isinstance(formula, Or):
        return " v ".join(_operand(f) for f in formula.operands)
    if isinstance(formula, Implies):
        return f"{_operand(formula.antecedent)} => {_operand(formula.consequent)}"
    if isinstance(formula, Iff):
        return f"{_operand(formula.left)} <=> {_operand(formula.right)}"
    if isinstance(formula, Exists):
        names = ",".join(v.name for v in formula.variables)
        return f"EXIST {names} ({format_formula(formula.body)})"
    raise TypeError(f"cannot format {type(formula).__name__}")
