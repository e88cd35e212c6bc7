"""
Variable substitution and grounding enumeration.

Key Functions:
    - substitute: replace variables by terms, evaluating ``T+1`` on constants
    - groundings: every ground instance of a clause over finite sort domains
    - formula_groundings: same for arbitrary quantifier-free formulas
"""

import itertools
from typing import Dict, Iterator, List, Mapping, Optional

from src.errors import SignatureError
from src.logic.formulas import (
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
    atoms,
    variables,
)
from src.logic.terms import BOUNDARY, Const, Func, Signature, Succ, Term, Var

Binding = Mapping[str, Term]


def substitute_term(term: Term, binding: Binding, signature: Optional[Signature] = None) -> Term:
    if isinstance(term, Var):
        value = binding.get(term.name)
        if value is None:
            return term
        if (
            signature is not None
            and term.sort is not None
            and not isinstance(value, Var)
            and not signature.contains(term.sort, value)
        ):
            raise SignatureError(f"{value} is not a constant of sort {term.sort} (variable {term.name})")
        return value
    if isinstance(term, Func):
        return Func(term.name, tuple(substitute_term(a, binding, signature) for a in term.args))
    if isinstance(term, Succ):
        inner = substitute_term(term.term, binding, signature)
        if inner is BOUNDARY:
            return BOUNDARY
        if isinstance(inner, Const):
            successor = int(inner.name) + 1
            if signature is not None and signature.horizon is not None and successor > signature.horizon:
                return BOUNDARY
            return Const(str(successor))
        return Succ(inner)
    return term


def substitute_atom(atom: Atom, binding: Binding, signature: Optional[Signature] = None) -> Atom:
    return Atom(atom.predicate, tuple(substitute_term(a, binding, signature) for a in atom.args))


def substitute(formula: Formula, binding: Binding, signature: Optional[Signature] = None) -> Formula:
    """
    Replace bound variables in a formula.

    Args:
        formula: Formula to rewrite
        binding: Variable name to term (constants, or variables for renaming)
        signature: When given, constants are sort-checked and ``T+1`` past the
            horizon becomes the boundary marker

    Returns:
        The rewritten formula; unbound variables are left in place.

    Raises:
        SignatureError: A constant does not belong to its variable's sort.
    """
    if isinstance(formula, Atom):
        return substitute_atom(formula, binding, signature)
    if isinstance(formula, Truth):
        return formula
    if isinstance(formula, Not):
        return Not(substitute(formula.operand, binding, signature))
    if isinstance(formula, And):
        return And(tuple(substitute(f, binding, signature) for f in formula.operands))
    if isinstance(formula, Or):
        return Or(tuple(substitute(f, binding, signature) for f in formula.operands))
    if isinstance(formula, Implies):
        return Implies(
            substitute(formula.antecedent, binding, signature),
            substitute(formula.consequent, binding, signature),
        )
    if isinstance(formula, Iff):
        return Iff(substitute(formula.left, binding, signature), substitute(formula.right, binding, signature))
    if isinstance(formula, Exists):
        inner = {k: v for k, v in binding.items() if k not in {v.name for v in formula.variables}}
        return Exists(formula.variables, substitute(formula.body, inner, signature))
    raise TypeError(f"unknown formula node {type(formula).__name__}")


def _sorted_variables(vars_) -> List[Var]:
    ordered = sorted(vars_, key=lambda v: v.name)
    for var in ordered:
        if var.sort is None:
            raise SignatureError(f"variable {var.name} has no sort")
    names = [v.name for v in ordered]
    if len(set(names)) != len(names):
        raise SignatureError(f"variable used with two sorts: {names}")
    return ordered


def _bindings(vars_: List[Var], signature: Signature) -> Iterator[Dict[str, Term]]:
    domains = [signature.domain(v.sort) for v in vars_]
    for values in itertools.product(*domains):
        yield {v.name: value for v, value in zip(vars_, values)}


def groundings(clause: Clause, signature: Signature) -> Iterator[Clause]:
    """
    Lazily enumerate the ground instances of a clause.

    One instance per element of the Cartesian product of the variable domains
    (in variable-name order); instances whose ``T+1`` falls past the horizon
    are dropped.
    """
    vars_ = _sorted_variables({v for lit in clause.literals for v in variables(lit.atom)})
    for binding in _bindings(vars_, signature):
        literals = []
        for lit in clause.literals:
            atom = substitute_atom(lit.atom, binding, signature)
            if atom.has_boundary:
                break
            literals.append(Literal(atom, lit.positive))
        else:
            yield Clause(tuple(literals), clause.weight, clause.origin)


def formula_groundings(formula: Formula, signature: Signature) -> Iterator[Formula]:
    """Ground instances of a formula, dropping those that reach past the horizon."""
    vars_ = _sorted_variables(variables(formula))
    for binding in _bindings(vars_, signature):
        ground = substitute(formula, binding, signature)
        if not any(a.has_boundary for a in atoms(ground)):
            yield ground
